"""Weight-truncated sparse polynomials in the odd times t1, t3, t5, ...

A monomial is packed into a Python int: the exponent of ``t_{2i+1}`` sits
in bits ``[8i, 8i+8)``.  Monomial multiplication is then integer addition,
which is carry-free as long as every exponent stays below 256; this is
guaranteed by requiring ``weight_cap <= 255``.  A second family of times
(``t'``) uses slots 64 and up, so the same class serves as the two-set
polynomial ring needed for bilinear identities.

Weight is sum(k * e_k); every ring operation drops terms of weight above the
cap.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb

from gmpy2 import mpq

from .errors import UsageError
from .scalars import format_scalar, scalar_from_json, scalar_to_json

__all__ = [
    "OddPolynomial",
    "TwoSetPolynomial",
    "HbarSeries",
    "LaurentZ",
    "monomial",
    "monomial_exponents",
    "monomial_weight",
    "poly_mul",
    "poly_exp",
    "poly_log",
    "series_exp",
    "rescale_times",
    "specialize_times",
    "embed_family",
]

BITS = 8
MASK = (1 << BITS) - 1
FAMILY_SLOTS = 64
FAMILY_SHIFT = BITS * FAMILY_SLOTS
MAX_CAP = MASK


def _slot(k: int, family: int = 0) -> int:
    if k <= 0 or k % 2 == 0:
        raise UsageError(f"only positive odd time indices exist, got t{k}")
    i = (k - 1) // 2
    if i >= FAMILY_SLOTS:
        raise UsageError(f"time index t{k} out of range")
    return i + FAMILY_SLOTS * family


def monomial(exps, family: int = 0) -> int:
    """Pack ``{k: e}`` (or pairs) into a monomial of the given family."""
    items = exps.items() if isinstance(exps, dict) else exps
    m = 0
    for k, e in items:
        if e < 0 or e > MASK:
            raise UsageError(f"exponent out of range: t{k}^{e}")
        m += e << (BITS * _slot(k, family))
    return m


@lru_cache(maxsize=None)
def monomial_exponents(m: int) -> tuple[tuple[int, int, int], ...]:
    """Decode to ``((family, k, e), ...)`` in slot order."""
    out = []
    slot = 0
    while m:
        e = m & MASK
        if e:
            family, i = divmod(slot, FAMILY_SLOTS)
            out.append((family, 2 * i + 1, e))
        m >>= BITS
        slot += 1
    return tuple(out)


@lru_cache(maxsize=None)
def monomial_weight(m: int) -> int:
    return sum(k * e for _, k, e in monomial_exponents(m))


@lru_cache(maxsize=None)
def monomial_degree(m: int) -> int:
    return sum(e for _, _, e in monomial_exponents(m))


def _weight_split(m: int) -> tuple[int, int]:
    wt = wp = 0
    for family, k, e in monomial_exponents(m):
        if family:
            wp += k * e
        else:
            wt += k * e
    return wt, wp


def _sort_key(m: int):
    exps = monomial_exponents(m)
    vec = [0] * (2 * FAMILY_SLOTS)
    for family, k, e in exps:
        vec[(k - 1) // 2 + FAMILY_SLOTS * family] = -e
    return (monomial_weight(m), vec)


def _format_monomial(m: int) -> str:
    factors = []
    for family, k, e in monomial_exponents(m):
        name = f"t{k}" + ("'" if family else "")
        factors.append(name if e == 1 else f"{name}^{e}")
    return "*".join(factors)


def _check_cap(cap: int) -> int:
    cap = int(cap)
    if cap < 0 or cap > MAX_CAP:
        raise UsageError(f"weight cap must lie in [0, {MAX_CAP}], got {cap}")
    return cap


class OddPolynomial:
    """Sparse polynomial ``{monomial: coefficient}`` truncated at ``cap``.

    Values are immutable by convention: no method mutates ``terms`` after
    construction.
    """

    __slots__ = ("terms", "cap")

    def __init__(self, terms=None, cap: int = 0):
        self.cap = _check_cap(cap)
        self.terms = {}
        if terms:
            for m, c in terms.items():
                if c and monomial_weight(m) <= self.cap:
                    self.terms[m] = c

    @classmethod
    def _raw(cls, terms: dict, cap: int):
        obj = cls.__new__(cls)
        obj.terms = terms
        obj.cap = cap
        return obj

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, cap: int):
        return cls(None, cap)

    @classmethod
    def one(cls, cap: int):
        return cls.constant(mpq(1), cap)

    @classmethod
    def constant(cls, c, cap: int):
        return cls({0: c}, cap)

    @classmethod
    def var(cls, k: int, cap: int, coeff=None, family: int = 0):
        return cls({monomial({k: 1}, family): mpq(1) if coeff is None else coeff}, cap)

    @classmethod
    def from_exponents(cls, items, cap: int, family: int = 0):
        """``items`` is an iterable of ``({k: e}, coeff)`` pairs."""
        terms: dict = {}
        for exps, c in items:
            m = monomial(exps, family)
            terms[m] = terms[m] + c if m in terms else c
        return cls(terms, cap)

    # -- basic queries -----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def coefficient(self, m: int):
        return self.terms.get(m, mpq(0))

    def constant_term(self):
        return self.terms.get(0, mpq(0))

    def weights(self) -> set[int]:
        return {monomial_weight(m) for m in self.terms}

    def homogeneous_part(self, w: int):
        return type(self)._raw(
            {m: c for m, c in self.terms.items() if monomial_weight(m) == w}, self.cap
        )

    def is_homogeneous(self, w: int) -> bool:
        return all(monomial_weight(m) == w for m in self.terms)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda mc: _sort_key(mc[0]))

    def truncate(self, cap: int):
        cap = _check_cap(cap)
        if cap > self.cap:
            raise UsageError("truncate cannot raise the weight cap; use extend_cap")
        return type(self)._raw(
            {m: c for m, c in self.terms.items() if monomial_weight(m) <= cap}, cap
        )

    def extend_cap(self, cap: int):
        """Re-cap upward.  Only valid when the polynomial is known exactly,
        e.g. a homogeneous Q-function stored at its own weight."""
        cap = _check_cap(cap)
        if cap < self.cap:
            return self.truncate(cap)
        return type(self)._raw(dict(self.terms), cap)

    def map_coefficients(self, f):
        out = {}
        for m, c in self.terms.items():
            v = f(c)
            if v:
                out[m] = v
        return type(self)._raw(out, self.cap)

    # -- arithmetic --------------------------------------------------------
    def _require_same_cap(self, other):
        if other.cap != self.cap:
            raise UsageError(f"weight caps differ: {self.cap} vs {other.cap}")

    def __add__(self, other):
        if isinstance(other, OddPolynomial):
            self._require_same_cap(other)
            out = dict(self.terms)
            for m, c in other.terms.items():
                if m in out:
                    v = out[m] + c
                    if v:
                        out[m] = v
                    else:
                        del out[m]
                else:
                    out[m] = c
            return type(self)._raw(out, self.cap)
        if other == 0:
            return self
        return self + type(self).constant(other, self.cap)

    __radd__ = __add__

    def __neg__(self):
        return type(self)._raw({m: -c for m, c in self.terms.items()}, self.cap)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, OddPolynomial):
            return self._mul_poly(other)
        if not other:
            return type(self)._raw({}, self.cap)
        out = {}
        for m, c in self.terms.items():
            v = c * other
            if v:
                out[m] = v
        return type(self)._raw(out, self.cap)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        if isinstance(other, int):
            other = mpq(other)
        return self * (1 / other)

    def _mul_poly(self, other):
        self._require_same_cap(other)
        cap = self.cap
        if len(self.terms) > len(other.terms):
            self, other = other, self
        right = sorted(
            ((monomial_weight(m), m, c) for m, c in other.terms.items()),
            key=lambda x: x[0],
        )
        out: dict = {}
        get = out.get
        for m1, c1 in self.terms.items():
            lim = cap - monomial_weight(m1)
            for w2, m2, c2 in right:
                if w2 > lim:
                    break
                m = m1 + m2
                v = get(m)
                out[m] = c1 * c2 if v is None else v + c1 * c2
        return type(self)._raw({m: c for m, c in out.items() if c}, cap)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = type(self).one(self.cap)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, OddPolynomial):
            return (self - other).is_zero() if other.cap == self.cap else (
                (self.truncate(min(self.cap, other.cap)) - other.truncate(min(self.cap, other.cap))).is_zero()
            )
        try:
            return (self - other).is_zero()
        except TypeError:
            return NotImplemented

    __hash__ = None

    # -- calculus ------------------------------------------------------------
    def derivative(self, k: int, family: int = 0):
        shift = BITS * _slot(k, family)
        unit = 1 << shift
        out = {}
        for m, c in self.terms.items():
            e = (m >> shift) & MASK
            if e:
                out[m - unit] = c * e
        return type(self)._raw(out, self.cap)

    # -- text / json ---------------------------------------------------------
    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for m, c in self.sorted_terms():
            cs = format_scalar(c)
            compound = (" + " in cs) or (" - " in cs.lstrip("-"))
            if m == 0:
                pieces.append(f"({cs})" if compound else cs)
                continue
            mono = _format_monomial(m)
            if compound:
                pieces.append(f"({cs})*{mono}")
            elif cs == "1":
                pieces.append(mono)
            elif cs == "-1":
                pieces.append("-" + mono)
            else:
                pieces.append(f"{cs}*{mono}")
        out = pieces[0]
        for p in pieces[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self):
        return f"{type(self).__name__}({self}, cap={self.cap})"

    def to_json(self, key=None) -> dict:
        terms = []
        for m, c in self.sorted_terms():
            exps = []
            for family, k, e in monomial_exponents(m):
                exps.append([k, e] if family == 0 else [k, e, family])
            terms.append({"exps": exps, "coeff": scalar_to_json(c)})
        return {"key": key, "weight_cap": self.cap, "terms": terms}

    @classmethod
    def from_json(cls, obj: dict):
        terms = {}
        for t in obj["terms"]:
            m = 0
            for entry in t["exps"]:
                k, e = entry[0], entry[1]
                family = entry[2] if len(entry) > 2 else 0
                m += e << (BITS * _slot(k, family))
            terms[m] = scalar_from_json(t["coeff"])
        return cls(terms, obj["weight_cap"])


class TwoSetPolynomial(OddPolynomial):
    """Polynomial in t and t' with joint weight cap."""

    __slots__ = ()

    def split_weights(self) -> set[tuple[int, int]]:
        return {_weight_split(m) for m in self.terms}


def embed_family(p: OddPolynomial, family: int, cap: int | None = None) -> TwoSetPolynomial:
    """View a one-family polynomial as a two-set polynomial in t (family 0)
    or t' (family 1)."""
    cap = p.cap if cap is None else cap
    shift = FAMILY_SHIFT * family
    return TwoSetPolynomial(
        {m << shift: c for m, c in p.terms.items()}, cap
    )


# -- module-level operations ------------------------------------------------

def poly_mul(p: OddPolynomial, q: OddPolynomial) -> OddPolynomial:
    return p * q


def poly_exp(p: OddPolynomial) -> OddPolynomial:
    """exp(p) truncated at the weight cap; p must have zero constant term."""
    if p.constant_term():
        raise UsageError("poly_exp needs a polynomial with zero constant term")
    result = type(p).one(p.cap)
    term = result
    n = 1
    while True:
        term = (term * p) / n
        if term.is_zero():
            return result
        result = result + term
        n += 1


def _log_one_plus(x, one, truncated_zero):
    result = truncated_zero
    power = one
    n = 1
    while True:
        power = power * x
        if power.is_zero():
            return result
        term = power / n
        result = result + term if n % 2 else result - term
        n += 1


def poly_log(s):
    """Formal logarithm of a polynomial or :class:`HbarSeries` with constant
    term 1."""
    if isinstance(s, HbarSeries):
        one = HbarSeries.one(s.cap, s.hbar_cap)
        if (s.component(0) - OddPolynomial.one(s.cap)) or any(e < 0 for e in s.terms):
            raise UsageError("poly_log needs an hbar-series with constant term 1")
        return _log_one_plus(s - one, one, HbarSeries.zero(s.cap, s.hbar_cap))
    c0 = s.constant_term()
    if c0 != 1:
        raise UsageError("poly_log needs constant term 1")
    one = type(s).one(s.cap)
    return _log_one_plus(s - one, one, type(s).zero(s.cap))


def series_exp(s: "HbarSeries") -> "HbarSeries":
    """exp of an hbar-series whose components all have positive hbar exponent."""
    if any(e <= 0 for e in s.terms):
        raise UsageError("series_exp needs strictly positive hbar exponents")
    result = HbarSeries.one(s.cap, s.hbar_cap)
    term = result
    n = 1
    while True:
        term = (term * s) * mpq(1, n)
        if term.is_zero():
            return result
        result = result + term
        n += 1


def rescale_times(p, c):
    """Substitute t_k -> c * t_k (all families)."""
    if isinstance(p, HbarSeries):
        return p.map_polys(lambda q: rescale_times(q, c))
    powers: dict[int, object] = {}
    out = {}
    for m, coeff in p.terms.items():
        d = monomial_degree(m)
        if d not in powers:
            powers[d] = c**d if d else mpq(1)
        v = coeff * powers[d]
        if v:
            out[m] = v
    return type(p)._raw(out, p.cap)


def specialize_times(p: OddPolynomial, point: dict):
    """Evaluate at ``{k: value}``; unlisted variables are set to 0."""
    total = mpq(0)
    for m, c in p.terms.items():
        v = c
        for family, k, e in monomial_exponents(m):
            x = point.get(k) if family == 0 else None
            if x is None or not x:
                v = None
                break
            v = v * x**e
        if v is not None:
            total = total + v
    return total


class HbarSeries:
    """Finite map from hbar exponents (rationals with denominator 1 or 3) to
    polynomials sharing one weight cap.

    ``hbar_cap`` is the largest exponent known exactly; products drop
    components beyond it.
    """

    __slots__ = ("terms", "cap", "hbar_cap")

    def __init__(self, terms=None, cap: int = 0, hbar_cap=None):
        self.cap = _check_cap(cap)
        self.hbar_cap = None if hbar_cap is None else hbar_exponent(hbar_cap)
        self.terms = {}
        for e, p in (terms or {}).items():
            e = hbar_exponent(e)
            if p.cap != self.cap:
                raise UsageError(f"component cap {p.cap} differs from series cap {self.cap}")
            if self.hbar_cap is not None and e > self.hbar_cap:
                continue
            if not p.is_zero():
                self.terms[e] = p

    @classmethod
    def zero(cls, cap, hbar_cap=None):
        return cls({}, cap, hbar_cap)

    @classmethod
    def one(cls, cap, hbar_cap=None):
        return cls({mpq(0): OddPolynomial.one(cap)}, cap, hbar_cap)

    def is_zero(self) -> bool:
        return not self.terms

    def component(self, e) -> OddPolynomial:
        return self.terms.get(hbar_exponent(e), OddPolynomial.zero(self.cap))

    def exponents(self) -> list:
        return sorted(self.terms)

    def items(self):
        return sorted(self.terms.items())

    def map_polys(self, f):
        return HbarSeries({e: f(p) for e, p in self.terms.items()}, self.cap, self.hbar_cap)

    def truncate_hbar(self, hbar_cap):
        hbar_cap = hbar_exponent(hbar_cap)
        if self.hbar_cap is not None and hbar_cap > self.hbar_cap:
            raise UsageError("cannot raise the hbar cap of a truncated series")
        return HbarSeries(self.terms, self.cap, hbar_cap)

    def truncate(self, cap):
        return HbarSeries({e: p.truncate(cap) for e, p in self.terms.items()}, cap, self.hbar_cap)

    def _combined_hbar_cap(self, other):
        caps = [c for c in (self.hbar_cap, other.hbar_cap) if c is not None]
        return min(caps) if caps else None

    def __add__(self, other):
        if not isinstance(other, HbarSeries):
            return NotImplemented
        if other.cap != self.cap:
            raise UsageError("weight caps differ")
        out = dict(self.terms)
        for e, p in other.terms.items():
            out[e] = out[e] + p if e in out else p
        return HbarSeries(out, self.cap, self._combined_hbar_cap(other))

    def __neg__(self):
        return self.map_polys(lambda p: -p)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, HbarSeries):
            if other.cap != self.cap:
                raise UsageError("weight caps differ")
            hcap = self._combined_hbar_cap(other)
            out: dict = {}
            for e1, p1 in self.terms.items():
                for e2, p2 in other.terms.items():
                    e = e1 + e2
                    if hcap is not None and e > hcap:
                        continue
                    prod = p1 * p2
                    out[e] = out[e] + prod if e in out else prod
            return HbarSeries(out, self.cap, hcap)
        return self.map_polys(lambda p: p * other)

    def __rmul__(self, other):
        return self.map_polys(lambda p: other * p)

    def __truediv__(self, other):
        if isinstance(other, int):
            other = mpq(other)
        return self * (1 / other)

    def __eq__(self, other):
        if not isinstance(other, HbarSeries):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def __str__(self):
        if not self.terms:
            return "0"
        return "\n".join(f"hbar^{e}: {p}" for e, p in self.items())

    def __repr__(self):
        return f"HbarSeries(cap={self.cap}, hbar_cap={self.hbar_cap}, {len(self.terms)} components)"

    def to_json(self) -> dict:
        return {
            "weight_cap": self.cap,
            "hbar_cap": None if self.hbar_cap is None else str(self.hbar_cap),
            "components": [
                {"hbar": str(e), **p.to_json()} for e, p in self.items()
            ],
        }


def hbar_exponent(e) -> mpq:
    e = mpq(e)
    if 3 % e.denominator:
        raise UsageError(f"hbar exponent must have denominator dividing 3, got {e}")
    return e


class LaurentZ:
    """Laurent polynomial in z with polynomial coefficients, restricted to
    powers in ``[zmin, zmax]``; products drop powers outside the window."""

    __slots__ = ("terms", "zmin", "zmax", "cap")

    def __init__(self, terms, zmin: int, zmax: int, cap: int):
        self.zmin, self.zmax, self.cap = zmin, zmax, cap
        self.terms = {}
        for j, p in terms.items():
            if j < zmin or j > zmax:
                raise UsageError(f"z^{j} outside the window [{zmin}, {zmax}]")
            if not p.is_zero():
                self.terms[j] = p

    def coefficient(self, j: int):
        if j < self.zmin or j > self.zmax:
            raise UsageError(f"z^{j} outside the window [{self.zmin}, {self.zmax}]")
        return self.terms.get(j, TwoSetPolynomial.zero(self.cap))

    def mul(self, other: "LaurentZ", zmin: int, zmax: int) -> "LaurentZ":
        """Product restricted to ``[zmin, zmax]``.  The window must not lie
        outside what the factors' windows can produce."""
        if zmin < self.zmin + other.zmin or zmax > self.zmax + other.zmax:
            raise UsageError("requested z-window exceeds the factors' windows")
        out: dict = {}
        for j1, p1 in self.terms.items():
            for j2, p2 in other.terms.items():
                j = j1 + j2
                if zmin <= j <= zmax:
                    prod = p1 * p2
                    out[j] = out[j] + prod if j in out else prod
        return LaurentZ(out, zmin, zmax, self.cap)

    def __str__(self):
        return " + ".join(f"z^{j}*({p})" for j, p in sorted(self.terms.items())) or "0"


def binomial_shift_terms(e: int, a):
    """Terms of (t + a)^e as ``(j, C(e, j) a^j)`` with j the power of a."""
    return [(j, comb(e, j) * a**j) for j in range(e + 1)]
