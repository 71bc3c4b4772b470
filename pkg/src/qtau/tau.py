"""Tau-functions from cut-and-join operators and from Q-function sums, and
the campaigns comparing them.

All comparisons are exact and made per (hbar exponent, monomial).  hbar is
never given a numeric value; the KW hypergeometric coefficients carry
fractional hbar powers and the Laurent symbol beta, and their cancellation
in the total is checked rather than assumed.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from gmpy2 import mpq

from .errors import UsageError
from .operators import build_virasoro_odd, build_W0, build_W1, exp_action
from .partitions import (
    StrictPartition,
    double_factorial_ratio,
    double_partition,
    hook_eval_delta1,
    strict_up_to,
)
from .polyring import (
    HbarSeries,
    OddPolynomial,
    _format_monomial,
    monomial_weight,
    rescale_times,
)
from .qschur import DELTA1, DELTA3_OVER_3, QMacTable, default_table, mm_factor, specialized
from .report import VerificationReport
from .scalars import BETA, NU, CoeffScalar, Root2Number, format_scalar, is_root2_free

__all__ = [
    "RFunction",
    "bgw_r",
    "kw_r",
    "tau_cutjoin",
    "q_expansion_bgw",
    "q_expansion_mm",
    "tau_hypergeometric",
    "compare_series",
    "verify_conjecture",
    "verify_perpart_relation",
    "verify_virasoro",
]

HALF = mpq(1, 2)


def _nu_value(nu):
    if nu is None or nu == "symbolic":
        return NU
    return mpq(nu)


def _beta_value(beta):
    if beta is None or beta == "symbolic":
        return BETA
    beta = mpq(beta)
    if beta == 0:
        raise UsageError("beta must be nonzero")
    return beta


def _inverse(x):
    if isinstance(x, CoeffScalar):
        return CoeffScalar({(-b, n): 1 / v for (b, n), v in x.terms.items()}) if len(x.terms) == 1 else None
    return 1 / x


def _kw_A(k: int) -> mpq:
    out = mpq(1)
    for j in range(1, k + 1):
        out *= mpq((6 * j - 1) * (6 * j - 5), 16)
    return out


@dataclass(frozen=True)
class RFunction:
    """e^{xi(n)} for the BGW(nu) or KW(beta) model.

    ``xi(n)`` returns ``(hbar_exponent, coefficient)``.
    """

    model: str
    parameter: object

    def xi(self, n: int):
        if n <= 0:
            raise UsageError("xi(n) is defined for n >= 1")
        if self.model == "bgw":
            nu = self.parameter
            coeff = mpq(1)
            for j in range(1, n + 1):
                coeff = coeff * (((2 * j - 1) ** 2 - 4 * nu) * mpq(1, 16))
            return mpq(n), coeff
        if self.model == "kw":
            beta = self.parameter
            k, r = divmod(n + 2, 3)
            A = _kw_A(k)
            if r == 2:  # n = 3k
                return mpq(k), A
            if r == 1:  # n = 3k - 1
                return mpq(3 * k - 1, 3), -mpq(2, 6 * k - 1) * A * _inverse(beta)
            return mpq(3 * k - 2, 3), mpq(8, 6 * k - 1) * A * beta
        raise UsageError(f"unknown model {self.model!r}")

    def r_lambda(self, lam: StrictPartition):
        exponent, coeff = mpq(0), mpq(1)
        for p in lam.parts:
            e, c = self.xi(p)
            exponent += e
            coeff = coeff * c
        return exponent, coeff

    def describe(self) -> str:
        return f"{self.model}({format_scalar(self.parameter)})"


def bgw_r(nu="symbolic") -> RFunction:
    return RFunction("bgw", _nu_value(nu))


def kw_r(beta="symbolic") -> RFunction:
    return RFunction("kw", _beta_value(beta))


# -- cut-and-join ------------------------------------------------------------

def _model_alpha(model: str) -> int:
    if model == "kw":
        return 1
    if model == "bgw":
        return 0
    raise UsageError(f"unknown model {model!r}; expected 'kw' or 'bgw'")


def tau_cutjoin(model: str, order: int, nu=0, cap: int | None = None) -> HbarSeries:
    """exp(hbar W) . 1 through hbar^order at weight cap order*(1 + 2 alpha)."""
    alpha = _model_alpha(model)
    if cap is None:
        cap = order * (1 + 2 * alpha)
    if model == "kw":
        op = build_W1(cap)
    else:
        op = build_W0(nu, cap)
    return exp_action(op, order, cap)


# -- Q-function expansions ------------------------------------------------------

@dataclass
class _Term:
    partition: StrictPartition
    hbar: mpq
    scalar: object
    checks: list  # (name, expected, actual)


def _assemble(terms: list[_Term], cap: int, hbar_cap, table: QMacTable, rescale=None) -> HbarSeries:
    comps: dict = {}
    for term in terms:
        if not term.scalar:
            continue
        poly = table.get(term.partition).extend_cap(cap)
        if rescale is not None:
            poly = rescale_times(poly, rescale)
        contribution = poly * term.scalar
        e = term.hbar
        comps[e] = comps[e] + contribution if e in comps else contribution
    return HbarSeries(comps, cap, hbar_cap)


def _as_rational_if_possible(x):
    if isinstance(x, Root2Number) and x.b == 0:
        return x.a
    return x


def _bgw_terms(cap: int) -> list[_Term]:
    s1 = specialized(DELTA1)
    out = []
    for lam in strict_up_to(cap):
        d1 = hook_eval_delta1(lam)
        d2 = hook_eval_delta1(double_partition(lam))
        pd1 = Root2Number.coerce(s1.mm(lam))
        pd2 = Root2Number.coerce(s1.mm(double_partition(lam)))
        # (1/16)^|lam| * 2^(-l/2) [Q_lam(t) normalization] * Q_lam(d1)^3 / Q_2lam(d1)^2
        scalar = mpq(1, 16 ** lam.weight) * Root2Number.coerce(mm_factor(lam.length)) * d1**3 / d2**2
        checks = [
            ("Q_lam(delta1): hook vs Pfaffian", d1, pd1),
            ("Q_2lam(delta1): hook vs Pfaffian", d2, pd2),
            ("coefficient is sqrt2-free", "rational", "rational" if scalar.b == 0 else scalar),
        ]
        out.append(_Term(lam, mpq(lam.weight), _as_rational_if_possible(scalar), checks))
    return out


def q_expansion_bgw(cap: int, table: QMacTable | None = None) -> HbarSeries:
    """sum_lam (hbar/16)^|lam| Q_lam(t) Q_lam(delta1)^3 / Q_2lam(delta1)^2."""
    table = default_table() if table is None else table
    return _assemble(_bgw_terms(cap), cap, cap, table)


def _mm_terms(cap: int) -> list[_Term]:
    s1 = specialized(DELTA1)
    s3 = specialized(DELTA3_OVER_3)
    out = []
    for lam in strict_up_to(cap):
        dbl = double_partition(lam)
        q2_d3 = s3.mm(dbl)
        d1 = hook_eval_delta1(lam)
        d2 = hook_eval_delta1(dbl)
        ratio = d1 / d2
        checks = [
            ("Q_lam(d1)/Q_2lam(d1) = prod (2 lam_j - 1)!!", double_factorial_ratio(lam), ratio),
            ("Q_2lam(delta1): hook vs Pfaffian", d2, Root2Number.coerce(s1.mm(dbl))),
        ]
        if not q2_d3:
            out.append(_Term(lam, mpq(0), mpq(0), checks))
            continue
        if lam.weight % 3:
            raise ArithmeticError(f"Q_{dbl}(delta3/3) nonzero at weight not divisible by 3")
        k = lam.weight // 3
        scalar = mpq(1, 16**k) * Root2Number.coerce(mm_factor(lam.length)) * ratio * q2_d3
        checks.append(("coefficient is sqrt2-free", "rational", "rational" if scalar.b == 0 else scalar))
        out.append(_Term(lam, mpq(k), _as_rational_if_possible(scalar), checks))
    return out


def q_expansion_mm(cap: int, table: QMacTable | None = None) -> HbarSeries:
    """sum_lam (hbar/16)^(|lam|/3) Q_lam(t) Q_lam(d1) Q_2lam(d3/3) / Q_2lam(d1)."""
    table = default_table() if table is None else table
    return _assemble(_mm_terms(cap), cap, mpq(cap // 3), table)


def _hypergeometric_terms(r: RFunction, tstar_half, cap: int) -> list[_Term]:
    spec = specialized(tstar_half)
    out = []
    for lam in strict_up_to(cap):
        q_star = spec.mac(lam)
        if not q_star:
            out.append(_Term(lam, mpq(0), mpq(0), []))
            continue
        e, r_lam = r.r_lambda(lam)
        # Q_lam(t/2) Q_lam(t*/2) in MM normalization: 2^(-l) times Mac
        scalar = r_lam * (mpq(1, 2**lam.length) * q_star)
        out.append(_Term(lam, e, scalar, []))
    return out


def tau_hypergeometric(r: RFunction, tstar_half, cap: int, table: QMacTable | None = None,
                       hbar_cap=None) -> HbarSeries:
    """sum_lam r_lam Q_lam(t/2) Q_lam(t*/2) for |lam| <= cap.

    ``tstar_half`` is the point t*/2, e.g. ``DELTA1`` or ``DELTA3_OVER_3``.
    """
    table = default_table() if table is None else table
    if hbar_cap is None:
        hbar_cap = mpq(cap) if r.model == "bgw" else mpq(cap, 3)
    return _assemble(_hypergeometric_terms(r, tstar_half, cap), cap, hbar_cap, table, rescale=HALF)


# -- comparison ------------------------------------------------------------------

def compare_series(report: VerificationReport, expected: HbarSeries, actual: HbarSeries,
                   group_prefix: str = "") -> bool:
    """Add one item per hbar exponent; mismatching monomials go in the detail."""
    ok = True
    exps = sorted(set(expected.terms) | set(actual.terms))
    for e in exps:
        pe, pa = expected.component(e), actual.component(e)
        diff = pa - pe
        detail = []
        for m, _ in diff.sorted_terms()[:25]:
            detail.append(
                f"{_format_monomial(m) or '1'}: expected {format_scalar(pe.coefficient(m))}, "
                f"got {format_scalar(pa.coefficient(m))}"
            )
        passed = diff.is_zero()
        ok &= passed
        report.add(f"hbar^{e}", f"{len(pe)} terms", f"{len(pa)} terms", passed,
                   group=f"{group_prefix}coefficients", detail=detail)
    return ok


def _term_checks(report: VerificationReport, terms: list[_Term]):
    for term in terms:
        for name, expected, actual in term.checks:
            report.add(str(term.partition), expected, actual, expected == actual,
                       group=f"terms: {name}")


def _invariant_items(report, series: HbarSeries, label: str, *, weight_per_hbar: int | None,
                     require_beta_free=False, require_integer_hbar=True):
    bad_root2, bad_beta, bad_weight, bad_hbar = [], [], [], []
    for e, poly in series.items():
        if require_integer_hbar and e.denominator != 1:
            bad_hbar.append(str(e))
        for m, c in poly.terms.items():
            if not is_root2_free(c):
                bad_root2.append(f"hbar^{e} {_format_monomial(m)}")
            if require_beta_free and isinstance(c, CoeffScalar) and c.beta_exponents() - {0}:
                bad_beta.append(f"hbar^{e} {_format_monomial(m)}")
            if weight_per_hbar is not None and monomial_weight(m) != weight_per_hbar * e:
                bad_weight.append(f"hbar^{e} {_format_monomial(m)}")
    report.add(f"{label}: sqrt2-free", "[]", bad_root2[:10], not bad_root2, group="invariants")
    if require_integer_hbar:
        report.add(f"{label}: integer hbar exponents", "[]", bad_hbar, not bad_hbar, group="invariants")
    if require_beta_free:
        report.add(f"{label}: beta cancels", "[]", bad_beta[:10], not bad_beta, group="invariants")
    if weight_per_hbar is not None:
        report.add(f"{label}: weight = {weight_per_hbar} * hbar order", "[]", bad_weight[:10],
                   not bad_weight, group="invariants")


CONJECTURES = ("mm", "bgw-q", "c2", "c3")


def verify_conjecture(which: str, cap: int, table: QMacTable | None = None) -> VerificationReport:
    """Q-function side against the cut-and-join side, exactly.

    mm:    Mironov-Morozov expansion vs exp(hbar W1).1
    bgw-q: Q-expansion of BGW vs exp(hbar W0).1
    c2:    hypergeometric BGW(nu) with symbolic nu vs rescaled cut-and-join
    c3:    hypergeometric KW(beta) with symbolic beta vs rescaled cut-and-join
    """
    which = which.lower().replace("_", "-")
    table = default_table() if table is None else table
    report = VerificationReport(which, {"max_weight": cap})
    t0 = time.perf_counter()
    if which == "mm":
        reference = tau_cutjoin("kw", cap // 3, cap=cap)
        terms = _mm_terms(cap)
        candidate = _assemble(terms, cap, mpq(cap // 3), table)
        _term_checks(report, terms)
        compare_series(report, reference, candidate)
        _invariant_items(report, candidate, "Q-expansion", weight_per_hbar=3)
    elif which == "bgw-q":
        reference = tau_cutjoin("bgw", cap)
        terms = _bgw_terms(cap)
        candidate = _assemble(terms, cap, cap, table)
        _term_checks(report, terms)
        compare_series(report, reference, candidate)
        _invariant_items(report, candidate, "Q-expansion", weight_per_hbar=1)
        # second route at nu = 0, independent of the cut-and-join reference
        hyper = tau_hypergeometric(bgw_r(0), DELTA1, cap, table)
        compare_series(report, rescale_times(candidate, HALF), hyper, group_prefix="routes: ")
    elif which == "c2":
        report.parameters["nu"] = "symbolic"
        reference = rescale_times(tau_cutjoin("bgw", cap, nu="symbolic"), HALF)
        candidate = tau_hypergeometric(bgw_r("symbolic"), DELTA1, cap, table)
        compare_series(report, reference, candidate)
        _invariant_items(report, candidate, "hypergeometric", weight_per_hbar=1)
        bad = [str(e) for e, p in candidate.items()
               for c in p.terms.values()
               if isinstance(c, CoeffScalar) and c.beta_exponents() - {0}]
        report.add("nu-polynomial only", "[]", bad, not bad, group="invariants")
    elif which == "c3":
        report.parameters["beta"] = "symbolic"
        reference = rescale_times(tau_cutjoin("kw", cap // 3, cap=cap), HALF)
        candidate = tau_hypergeometric(kw_r("symbolic"), DELTA3_OVER_3, cap, table)
        compare_series(report, reference, candidate)
        _invariant_items(report, candidate, "hypergeometric", weight_per_hbar=3,
                         require_beta_free=True)
    else:
        raise UsageError(f"unknown conjecture {which!r}; expected one of {CONJECTURES}")
    report.timing["seconds"] = round(time.perf_counter() - t0, 3)
    return report


def _hbar_value_str(e, c) -> str:
    if not c:
        return "0"
    return f"hbar^{e} * ({format_scalar(c)})"


def verify_perpart_relation(cap: int) -> VerificationReport:
    """r^KW_lam Q_lam(d3/3) = (hbar/16)^(|lam|/3) Q_lam(d1)/Q_2lam(d1) Q_2lam(d3/3)
    for every strict |lam| <= cap, with beta symbolic.

    Also checks termwise that the t -> t/2 rescaled Mironov-Morozov term
    equals the KW hypergeometric term, the consequence linking the two
    expansions.
    """
    report = VerificationReport("perpart", {"max_weight": cap, "beta": "symbolic"})
    t0 = time.perf_counter()
    r = kw_r("symbolic")
    s3 = specialized(DELTA3_OVER_3)
    table = default_table()
    for lam in strict_up_to(cap):
        q_d3 = s3.mm(lam)
        if q_d3:
            e_l, r_lam = r.r_lambda(lam)
            lhs = (e_l, r_lam * q_d3)
        else:
            lhs = (mpq(0), mpq(0))
        dbl = double_partition(lam)
        q2_d3 = s3.mm(dbl)
        if q2_d3:
            if lam.weight % 3:
                report.add(str(lam), "weight divisible by 3", lam.weight, False, group="relation")
                continue
            ratio = hook_eval_delta1(lam) / hook_eval_delta1(dbl)
            rhs = (mpq(lam.weight // 3), mpq(1, 16 ** (lam.weight // 3)) * ratio * q2_d3)
        else:
            rhs = (mpq(0), mpq(0))
        passed = (not lhs[1] and not rhs[1]) or (lhs[0] == rhs[0] and CoeffScalar.coerce(lhs[1]) == rhs[1])
        report.add(str(lam), _hbar_value_str(*rhs), _hbar_value_str(*lhs), passed,
                   group=f"relation weight {lam.weight}")

    mm_terms = {t.partition: t for t in _mm_terms(cap)}
    hyper_terms = {t.partition: t for t in _hypergeometric_terms(r, DELTA3_OVER_3, cap)}
    for lam in strict_up_to(cap):
        a, b = mm_terms[lam], hyper_terms[lam]
        # both sides multiply Q^Mac_lam(t/2) = 2^-|lam| Q^Mac_lam(t); compare the scalars
        mm_side = a.scalar
        hyper_side = CoeffScalar.coerce(b.scalar)
        passed = (not mm_side and not hyper_side) or (a.hbar == b.hbar and hyper_side == mm_side)
        report.add(str(lam), _hbar_value_str(a.hbar, mm_side), _hbar_value_str(b.hbar, hyper_side),
                   passed, group="termwise mm vs c3")
    report.timing["seconds"] = round(time.perf_counter() - t0, 3)
    return report


def verify_virasoro(model: str, cap: int) -> VerificationReport:
    """L^k_alpha tau_alpha = 0 for k >= -alpha, and the hbar/weight grading,
    on all components of weight <= cap.

    L^k_alpha = 1/2 L_{2k} - 1/(2 hbar) d/dt_{2k+1+2alpha} + delta_{k,0}/16.
    """
    alpha = _model_alpha(model)
    step = 1 + 2 * alpha
    n_max = cap // step
    order = n_max + 1
    wcap = order * step
    tau = tau_cutjoin(model, order, cap=wcap)
    report = VerificationReport("virasoro", {"model": model, "max_weight": cap, "hbar_order": n_max})
    t0 = time.perf_counter()

    for n in range(order + 1):
        comp = tau.component(n)
        bad = [] if comp.is_homogeneous(step * n) else sorted(comp.weights())
        report.add(f"hbar^{n}", f"weight {step * n}", bad or f"weight {step * n}", not bad,
                   group="grading")
    L0 = build_virasoro_odd(0, wcap)
    for n in range(order + 1):
        comp = tau.component(n)
        diff = L0.apply(comp) - comp * (step * n)
        report.add(f"hbar^{n}", "0", diff, diff.is_zero(), group="L0 = (1+2a) hbar d/dhbar")

    k = -alpha
    while 2 * k <= wcap:
        L = build_virasoro_odd(2 * k, wcap)
        d_index = 2 * k + 1 + 2 * alpha
        for n in range(n_max + 1):
            comp = tau.component(n)
            result = L.apply(comp) * HALF
            if d_index <= wcap:
                result = result - tau.component(n + 1).derivative(d_index) * HALF
            if k == 0:
                result = result + comp * mpq(1, 16)
            report.add(f"k={k} hbar^{n}", "0", result, result.is_zero(), group=f"L^{k}")
        k += 1
    report.timing["seconds"] = round(time.perf_counter() - t0, 3)
    return report
