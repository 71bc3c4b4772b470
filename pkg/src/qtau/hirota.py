"""Perturbative checks of the BKP and KP bilinear identities.

The contour integral is a formal residue on truncated Laurent series in z.
With both time families graded by weight, shifting t_k by c/(k z^k) trades
weight for negative powers of z and the kernel exp(sum (t_k - t'_k) z^k)
trades positive powers of z for weight.  The z^0 (BKP) or z^-1 (KP)
coefficient therefore has joint weight equal to (or one less than) the
weight of the input components, so truncating inputs at the joint cap is
exact.
"""

from __future__ import annotations

import time
from itertools import product
from math import comb

from gmpy2 import mpq

from .errors import UsageError
from .polyring import (
    BITS,
    FAMILY_SLOTS,
    HbarSeries,
    LaurentZ,
    OddPolynomial,
    TwoSetPolynomial,
    _format_monomial,
    embed_family,
    monomial,
    monomial_exponents,
    poly_exp,
)
from .report import VerificationReport

__all__ = ["ShiftedSeries", "shift_times", "bkp_kernel", "verify_hirota_bkp", "verify_hirota_kp"]


class ShiftedSeries(LaurentZ):
    """LaurentZ produced by a time shift, remembering the shift."""

    __slots__ = ("family", "sign", "magnitude")


def shift_times(p: OddPolynomial, sign: int, magnitude: int, family: int = 0) -> ShiftedSeries:
    """Substitute t_k -> t_k + sign*magnitude/(k z^k) in the given family.

    Only odd k occur.  For the KP shift (magnitude 1) the even-time shifts are
    omitted: they act trivially on functions independent of the even times.
    """
    if sign not in (1, -1) or magnitude not in (1, 2):
        raise UsageError("shift needs sign +-1 and magnitude 1 or 2")
    cap = p.cap
    out: dict[int, dict[int, object]] = {}
    for m, coeff in p.terms.items():
        expansions = []
        for fam, k, e in monomial_exponents(m):
            if fam != family:
                expansions.append([(0, 0, mpq(1))])
                continue
            a = mpq(sign * magnitude, k)
            unit = 1 << (BITS * ((k - 1) // 2 + FAMILY_SLOTS * family))
            expansions.append([(j * unit, -k * j, comb(e, j) * a**j) for j in range(e + 1)])
        for combo in product(*expansions):
            drop = 0
            zpow = 0
            c = coeff
            for d, zp, f in combo:
                drop += d
                zpow += zp
                c = c * f
            bucket = out.setdefault(zpow, {})
            key = m - drop
            bucket[key] = bucket[key] + c if key in bucket else c
    terms = {j: TwoSetPolynomial(d, cap) for j, d in out.items()}
    series = ShiftedSeries.__new__(ShiftedSeries)
    LaurentZ.__init__(series, terms, -cap, 0, cap)
    series.family, series.sign, series.magnitude = family, sign, magnitude
    return series


def bkp_kernel(cap: int) -> LaurentZ:
    """exp(sum_{k odd} (t_k - t'_k) z^k); the z^j coefficient is the
    weight-j part."""
    exponent = TwoSetPolynomial.zero(cap)
    for k in range(1, cap + 1, 2):
        exponent = exponent + TwoSetPolynomial(
            {monomial({k: 1}): mpq(1), monomial({k: 1}, 1): mpq(-1)}, cap
        )
    full = poly_exp(exponent)
    return LaurentZ({j: full.homogeneous_part(j) for j in range(cap + 1)}, 0, cap, cap)


def _prepare(tau: HbarSeries, cap: int, hbar_order):
    if tau.cap < cap:
        raise UsageError(f"tau known to weight {tau.cap}, need {cap}")
    if hbar_order is None:
        hbar_order = tau.hbar_cap if tau.hbar_cap is not None else max(tau.terms, default=mpq(0))
    hbar_order = mpq(hbar_order)
    if tau.hbar_cap is not None and hbar_order > tau.hbar_cap:
        raise UsageError(f"tau known to hbar^{tau.hbar_cap}, need hbar^{hbar_order}")
    comps = {e: p.truncate(cap) for e, p in tau.terms.items() if e <= hbar_order}
    return comps, hbar_order


def _bilinear(tau: HbarSeries, cap: int, hbar_order, magnitude: int, residue_power: int):
    """For each total hbar exponent, (residue coefficient, tau(t) tau(t'))."""
    comps, hbar_order = _prepare(tau, cap + (1 if residue_power else 0), hbar_order)
    wcap = cap + (1 if residue_power else 0)
    kernel = bkp_kernel(wcap)
    left = {e: shift_times(embed_family(p, 0, wcap), -1, magnitude, 0) for e, p in comps.items()}
    right = {e: shift_times(embed_family(p, 1, wcap), +1, magnitude, 1) for e, p in comps.items()}
    plain_l = {e: embed_family(p, 0, wcap) for e, p in comps.items()}
    plain_r = {e: embed_family(p, 1, wcap) for e, p in comps.items()}
    results = {}
    for e1 in sorted(comps):
        for e2 in sorted(comps):
            e = e1 + e2
            if e > hbar_order:
                continue
            shifted = left[e1].mul(right[e2], -wcap, 0)
            res = TwoSetPolynomial.zero(wcap)
            for j, kj in kernel.terms.items():
                target = residue_power - j
                if target < -wcap:
                    continue
                if target > 0:
                    continue
                res = res + kj * shifted.coefficient(target)
            rhs = plain_l[e1] * plain_r[e2]
            if e in results:
                r0, q0 = results[e]
                results[e] = (r0 + res, q0 + rhs)
            else:
                results[e] = (res, rhs)
    return {e: (r.truncate(cap), q.truncate(cap)) for e, (r, q) in results.items()}


def verify_hirota_bkp(tau: HbarSeries, cap: int, hbar_order=None) -> VerificationReport:
    """Residue of exp(sum (t-t')z^k) tau(t - 2[1/z]) tau(t' + 2[1/z]) dz/z
    equals tau(t) tau(t') at each hbar order, up to joint weight ``cap``."""
    report = VerificationReport("hirota-bkp", {"max_weight": cap, "hbar_order": str(hbar_order)})
    t0 = time.perf_counter()
    for e, (lhs, rhs) in sorted(_bilinear(tau, cap, hbar_order, 2, 0).items()):
        diff = lhs - rhs
        report.add(f"hbar^{e}", f"{len(rhs)} terms", f"{len(lhs)} terms", diff.is_zero(),
                   group="bkp", detail=[f"{_format_monomial(m)}: {c}" for m, c in diff.sorted_terms()[:20]])
    report.timing["seconds"] = round(time.perf_counter() - t0, 3)
    return report


def verify_hirota_kp(tau: HbarSeries, cap: int, hbar_order=None) -> VerificationReport:
    """Residue of exp(xi(t-t', z)) tau(t - [1/z]) tau(t' + [1/z]) dz vanishes.

    Even times are set equal in t and t', which is allowed because tau does
    not depend on them; the kernel then only involves odd times.
    """
    report = VerificationReport("hirota-kp", {"max_weight": cap, "hbar_order": str(hbar_order)})
    t0 = time.perf_counter()
    for e, (lhs, _) in sorted(_bilinear(tau, cap, hbar_order, 1, -1).items()):
        report.add(f"hbar^{e}", "0", f"{len(lhs)} terms", lhs.is_zero(), group="kp",
                   detail=[f"{_format_monomial(m)}: {c}" for m, c in lhs.sorted_terms()[:20]])
    report.timing["seconds"] = round(time.perf_counter() - t0, 3)
    return report
