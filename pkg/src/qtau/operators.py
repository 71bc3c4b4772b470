"""Normal-ordered differential operators in the odd times.

A term ``(creation, annihilation, coeff)`` acts as
``coeff * t^creation * d^annihilation`` with every derivative to the right.
Operators are built for a weight cap: terms whose creation weight exceeds
the cap can never produce a surviving monomial and are dropped.
"""

from __future__ import annotations

from collections import defaultdict
from itertools import product
from math import comb, perm

from gmpy2 import mpq

from .errors import UsageError
from .polyring import (
    BITS,
    MASK,
    HbarSeries,
    OddPolynomial,
    _format_monomial,
    monomial,
    monomial_degree,
    monomial_exponents,
    monomial_weight,
)
from .report import VerificationReport
from .scalars import NU, format_scalar

__all__ = [
    "DiffOperator",
    "build_W0",
    "build_W1",
    "build_W1_family",
    "build_virasoro_odd",
    "build_MB",
    "build_JB",
    "conjugate_rescale",
    "exp_action",
    "verify_operator_identity",
]


def _odd(upto: int):
    return range(1, upto + 1, 2)


def _slot_counts(m: int):
    """``[(bit_shift, exponent), ...]`` for the nonzero slots of m."""
    out = []
    shift = 0
    while m:
        e = m & MASK
        if e:
            out.append((shift, e))
        m >>= BITS
        shift += BITS
    return tuple(out)


class DiffOperator:
    def __init__(self, terms, cap: int):
        self.cap = cap
        merged: dict[tuple[int, int], object] = {}
        for c, a, coeff in terms:
            if monomial_weight(c) > cap or not coeff:
                continue
            key = (c, a)
            merged[key] = merged[key] + coeff if key in merged else coeff
        self.terms = {k: v for k, v in merged.items() if v}
        groups = defaultdict(list)
        for (c, a), coeff in self.terms.items():
            groups[a].append((monomial_weight(c), c, coeff))
        self._groups = [
            (a, _slot_counts(a), monomial_weight(a), sorted(lst, key=lambda x: (x[0], x[1])))
            for a, lst in sorted(groups.items())
        ]

    # -- structure ----------------------------------------------------------
    def shifts(self) -> set[int]:
        return {monomial_weight(c) - monomial_weight(a) for c, a in self.terms}

    @property
    def shift(self) -> int:
        s = self.shifts()
        if len(s) != 1:
            raise UsageError(f"operator is not homogeneous: shifts {sorted(s)}")
        return s.pop()

    def sorted_terms(self):
        def key(item):
            (c, a), _ = item
            return (monomial_weight(c), monomial_weight(a), c, a)
        return sorted(self.terms.items(), key=key)

    def dump(self) -> str:
        """One line per term in canonical order: coeff, creation, annihilation."""
        lines = []
        for (c, a), coeff in self.sorted_terms():
            cs = _format_monomial(c) or "1"
            ds = "*".join(
                (f"d{k}" if e == 1 else f"d{k}^{e}") for _, k, e in monomial_exponents(a)
            ) or "1"
            lines.append(f"{format_scalar(coeff)}\t{cs}\t{ds}")
        return "\n".join(lines)

    # -- algebra ------------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, DiffOperator):
            return DiffOperator(
                [(c, a, v) for (c, a), v in self.terms.items()]
                + [(c, a, v) for (c, a), v in other.terms.items()],
                min(self.cap, other.cap),
            )
        if isinstance(other, OddPolynomial):
            return self + multiplication_operator(other, self.cap)
        return NotImplemented

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        return DiffOperator([(c, a, v * scalar) for (c, a), v in self.terms.items()], self.cap)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, DiffOperator):
            return NotImplemented
        return not (self - other).terms

    __hash__ = None

    def compose(self, other: "DiffOperator") -> "DiffOperator":
        """Normal-ordered product ``self . other``.

        Moves each derivative of ``self`` past the creation monomial of
        ``other`` with the Leibniz rule.
        """
        out = []
        for (c1, a1), v1 in self.terms.items():
            a1_exps = {k: e for _, k, e in monomial_exponents(a1)}
            for (c2, a2), v2 in other.terms.items():
                c2_exps = {k: e for _, k, e in monomial_exponents(c2)}
                shared = [k for k in a1_exps if k in c2_exps]
                ranges = [range(min(a1_exps[k], c2_exps[k]) + 1) for k in shared]
                for js in product(*ranges):
                    factor = 1
                    cut = {}
                    for k, j in zip(shared, js):
                        factor *= comb(a1_exps[k], j) * perm(c2_exps[k], j)
                        cut[k] = j
                    jm = monomial(cut)
                    out.append((c1 + c2 - jm, a1 - jm + a2, v1 * v2 * factor))
        return DiffOperator(out, min(self.cap, other.cap))

    # -- action -------------------------------------------------------------
    def apply(self, p: OddPolynomial) -> OddPolynomial:
        if p.cap > self.cap:
            raise UsageError(f"operator built for cap {self.cap}, polynomial has cap {p.cap}")
        cap = p.cap
        out: dict = {}
        get = out.get
        for m, coeff in p.terms.items():
            w = monomial_weight(m)
            for a, slots, wa, creations in self._groups:
                factor = 1
                for shift, need in slots:
                    e = (m >> shift) & MASK
                    if e < need:
                        factor = 0
                        break
                    factor *= perm(e, need)
                if not factor:
                    continue
                base = m - a
                lim = cap - (w - wa)
                scaled = coeff * factor
                for wc, c, v in creations:
                    if wc > lim:
                        break
                    key = base + c
                    prev = get(key)
                    term = scaled * v
                    out[key] = term if prev is None else prev + term
        return OddPolynomial._raw({k: v for k, v in out.items() if v}, cap)

    def __call__(self, p):
        return self.apply(p)

    def __repr__(self):
        return f"DiffOperator({len(self.terms)} terms, cap={self.cap})"


def multiplication_operator(p: OddPolynomial, cap: int) -> DiffOperator:
    return DiffOperator([(m, 0, c) for m, c in p.terms.items()], cap)


def _nu_coefficient(nu):
    if nu is None or nu == "symbolic":
        return NU
    return nu


def build_W0(nu=0, cap: int = 12) -> DiffOperator:
    """Cut-and-join operator of the (generalized) BGW model.

    ``nu`` is N^2: a rational, or ``"symbolic"``/``None`` for the symbol.
    """
    nu = _nu_coefficient(nu)
    terms = []
    for k in _odd(cap):
        for m in _odd(cap):
            if k + m - 1 <= cap:
                terms.append((monomial({k: 1}) + monomial({m: 1}), monomial({k + m - 1: 1}), mpq(k * m)))
            if k + m + 1 <= cap:
                terms.append((monomial({k + m + 1: 1}), monomial({k: 1}) + monomial({m: 1}), mpq(k + m + 1, 2)))
    t1 = monomial({1: 1})
    terms.append((t1, 0, mpq(1, 8)))
    if nu is not None and not (isinstance(nu, (int, type(mpq(0)))) and nu == 0):
        terms.append((t1, 0, nu * mpq(-1, 2)))
    return DiffOperator(terms, cap)


def build_W1(cap: int = 12) -> DiffOperator:
    """Cut-and-join operator of the Kontsevich-Witten model."""
    third = mpq(1, 3)
    terms = []
    for k in _odd(cap):
        for m in _odd(cap):
            if k + m - 3 >= 1:
                terms.append((monomial({k: 1}) + monomial({m: 1}), monomial({k + m - 3: 1}), third * k * m))
            if k + m + 3 <= cap:
                terms.append((monomial({k + m + 3: 1}), monomial({k: 1}) + monomial({m: 1}),
                              third * mpq(k + m + 3, 2)))
    terms.append((monomial({1: 3}), 0, mpq(1, 6)))
    terms.append((monomial({3: 1}), 0, mpq(1, 8)))
    return DiffOperator(terms, cap)


def build_W1_family(b, cap: int = 12) -> DiffOperator:
    """W1 + t1^3/144 + b*t3, the two-parameter BKP family of KW-type
    operators."""
    extra = [(monomial({1: 3}), 0, mpq(1, 144)), (monomial({3: 1}), 0, b)]
    return build_W1(cap) + DiffOperator(extra, cap)


def build_virasoro_odd(m: int, cap: int = 12) -> DiffOperator:
    """L_m restricted to odd times (m even).

    Dropping terms with an even index is exact on functions independent of
    the even times evaluated at even times = 0: a term containing t_even
    vanishes there, and a term containing d/dt_even kills the function.
    """
    if m % 2:
        raise UsageError("only even Virasoro modes are defined on odd times")
    terms = []
    if m < 0:
        for a in _odd(-m):
            b = -m - a
            if b > 0:
                terms.append((monomial({a: 1}) + monomial({b: 1}), 0, mpq(a * b, 2)))
    for k in _odd(cap - m if m < 0 else cap + m):
        if k + m > 0:
            terms.append((monomial({k: 1}), monomial({k + m: 1}), mpq(k)))
    if m > 0:
        for a in _odd(m):
            b = m - a
            if b > 0:
                terms.append((0, monomial({a: 1}) + monomial({b: 1}), mpq(1, 2)))
    return DiffOperator(terms, cap)


def build_MB(j: int, cap: int = 12) -> DiffOperator:
    """The W^(3) generators M^B_{-1} and M^B_{-3} of the BKP symmetry
    algebra."""
    if j not in (-1, -3):
        raise UsageError("only M^B_{-1} and M^B_{-3} are provided")
    s = -j
    terms = []
    for k in _odd(cap):
        for m in _odd(cap):
            if k + m - s >= 1:
                terms.append((monomial({k: 1}) + monomial({m: 1}), monomial({k + m - s: 1}), mpq(2 * k * m)))
            if k + m + s <= cap:
                terms.append((monomial({k + m + s: 1}), monomial({k: 1}) + monomial({m: 1}), mpq(4 * (k + m + s))))
    if j == -3:
        terms.append((monomial({1: 3}), 0, mpq(1, 3)))
    return DiffOperator(terms, cap)


def build_JB(k: int, cap: int = 12) -> DiffOperator:
    """BKP current: 2 d/dt_k for k > 0, -k t_{-k} for k < 0 (k odd)."""
    if k % 2 == 0:
        raise UsageError("BKP currents have odd index")
    if k > 0:
        return DiffOperator([(0, monomial({k: 1}), mpq(2))], cap)
    return DiffOperator([(monomial({-k: 1}), 0, mpq(-k))], cap)


def conjugate_rescale(op: DiffOperator, c) -> DiffOperator:
    """The operator in the times t -> c t: coefficients pick up
    c^(deg creation - deg annihilation)."""
    if not c:
        raise UsageError("rescaling factor must be invertible")
    inv = 1 / c
    terms = []
    for (cr, an), v in op.terms.items():
        d = monomial_degree(cr) - monomial_degree(an)
        terms.append((cr, an, v * (c**d if d >= 0 else inv ** (-d))))
    return DiffOperator(terms, op.cap)


def exp_action(op: DiffOperator, order: int, cap: int) -> HbarSeries:
    """exp(hbar * op) . 1 through hbar^order, truncated at weight ``cap``."""
    shift = op.shift
    if shift <= 0:
        raise UsageError("exp_action needs a positive weight shift")
    if cap > op.cap:
        raise UsageError(f"operator built for cap {op.cap} < requested {cap}")
    term = OddPolynomial.one(cap)
    comps = {0: term}
    for n in range(1, order + 1):
        term = op.apply(term) * mpq(1, n)
        comps[n] = term
    return HbarSeries(comps, cap, order)


def _basis_monomials(cap: int):
    from .qschur import _odd_part_partitions

    for w in range(cap + 1):
        for mults in _odd_part_partitions(w, w):
            yield monomial(mults)


def verify_operator_identity(cap: int) -> VerificationReport:
    """Rescaled cut-and-join operators against the BKP W^(3) generators, on
    every monomial of weight <= cap (nu symbolic)."""
    report = VerificationReport("operators", {"max_weight": cap, "nu": "symbolic"})
    big = cap + 3
    t1 = OddPolynomial.var(1, big)
    half = mpq(1, 2)

    w0_lhs = conjugate_rescale(build_W0("symbolic", big), half)
    w0_rhs = build_MB(-1, big) * mpq(1, 4) + t1 * (mpq(1, 16) - NU * mpq(1, 4))
    w1_lhs = conjugate_rescale(build_W1(big), half)
    t1cubed = OddPolynomial({monomial({1: 3}): mpq(-1, 144)}, big)
    w1_rhs = build_MB(-3, big) * mpq(1, 12) + t1cubed + OddPolynomial.var(3, big, mpq(1, 16))

    for name, lhs, rhs in (("W0(N)", w0_lhs, w0_rhs), ("W1", w1_lhs, w1_rhs)):
        for m in _basis_monomials(cap):
            p = OddPolynomial({m: mpq(1)}, big)
            left, right = lhs.apply(p), rhs.apply(p)
            diff = left - right
            report.add(
                _format_monomial(m) or "1", right, left, diff.is_zero(), group=name,
                detail=[] if diff.is_zero() else [f"difference: {diff}"],
            )
        report.add("term lists", f"{len(rhs.terms)} terms", f"{len(lhs.terms)} terms",
                   lhs == rhs, group=name)
    return report
