"""Schur Q-functions as explicit polynomials in the odd times.

Internally everything is in Macdonald's normalization, which has rational
coefficients.  The other normalization, Q = 2^(-l/2) Q^Mac, is applied only
when a :class:`QFunction` in ``"mm"`` normalization is requested.

Q^Mac_lambda is the Pfaffian of the matrix of two-row functions
Q_(lambda_i, lambda_j) (with a zero part appended for odd length).  The
Pfaffian is expanded along the first row; every minor is itself the
Q-function of a sub-partition, so one memo table keyed by partition serves
all of them.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial

from gmpy2 import mpq

from .errors import UsageError
from .partitions import StrictPartition, hook_eval_delta1, strict_up_to
from .polyring import (
    OddPolynomial,
    TwoSetPolynomial,
    _format_monomial,
    embed_family,
    monomial,
    poly_exp,
    specialize_times,
)
from .report import VerificationReport
from .scalars import Root2Number

__all__ = [
    "QFunction",
    "QMacTable",
    "q_one_row",
    "q_two_row",
    "q_mac",
    "q_function",
    "mm_factor",
    "DELTA1",
    "DELTA3_OVER_3",
    "eval_q",
    "verify_cauchy",
    "verify_hook",
]

DELTA1 = {1: mpq(1)}
DELTA3_OVER_3 = {3: mpq(1, 3)}


def _odd_part_partitions(n: int, max_part: int):
    """Partitions of n into odd parts <= max_part, as {part: multiplicity}."""
    if n == 0:
        yield {}
        return
    top = max_part if max_part % 2 else max_part - 1
    for k in range(min(top, n if n % 2 else n - 1), 0, -2):
        for mult in range(1, n // k + 1):
            for rest in _odd_part_partitions(n - k * mult, k - 2):
                yield {k: mult, **rest}


@lru_cache(maxsize=None)
def _q_row(n: int) -> OddPolynomial:
    terms = {}
    for mults in _odd_part_partitions(n, n):
        c = mpq(1)
        for k, e in mults.items():
            c *= mpq(2**e, factorial(e))
        terms[monomial(mults)] = c
    return OddPolynomial(terms, n)


def q_one_row(n: int, cap: int) -> OddPolynomial:
    """Coefficient of z^n in exp(2 * sum_k t_k z^k)."""
    if n < 0:
        return OddPolynomial.zero(cap)
    if cap < n:
        raise UsageError(f"cap {cap} below weight {n}")
    return _q_row(n).extend_cap(cap)


@lru_cache(maxsize=None)
def _two_row(a: int, b: int) -> OddPolynomial:
    # a >= b >= 0
    w = a + b
    if b == 0:
        return _q_row(a)
    acc = _q_row(a).extend_cap(w) * _q_row(b).extend_cap(w)
    for i in range(1, b + 1):
        term = _q_row(a + i).extend_cap(w) * _q_row(b - i).extend_cap(w)
        acc = acc + term * (2 if i % 2 == 0 else -2)
    return acc


def q_two_row(a: int, b: int, cap: int) -> OddPolynomial:
    """Q^Mac_(a,b) = q_a q_b + 2 sum_{i=1}^b (-1)^i q_{a+i} q_{b-i}, extended
    antisymmetrically to a < b."""
    if a < 0 or b < 0:
        raise UsageError("two-row indices must be nonnegative")
    if cap < a + b:
        raise UsageError(f"cap {cap} below weight {a + b}")
    if a >= b:
        return _two_row(a, b).extend_cap(cap)
    return -_two_row(b, a).extend_cap(cap)


class QMacTable:
    """Memoized Q^Mac_lambda with an optional persistent :class:`CacheStore`.

    ``pfaffian_evaluations`` counts partitions actually expanded (cache and
    memo hits excluded).
    """

    def __init__(self, store=None):
        self.store = store
        self._memo: dict[tuple[int, ...], OddPolynomial] = {(): OddPolynomial.one(0)}
        self.pfaffian_evaluations = 0

    def get(self, lam) -> OddPolynomial:
        """Q^Mac_lambda stored at cap |lambda| (exact, homogeneous)."""
        parts = tuple(lam.parts if isinstance(lam, StrictPartition) else lam)
        hit = self._memo.get(parts)
        if hit is not None:
            return hit
        partition = StrictPartition(parts)
        w = partition.weight
        poly = self.store.get(partition, w) if self.store is not None else None
        if poly is None:
            poly = self._pfaffian(parts, w)
            self.pfaffian_evaluations += 1
            if self.store is not None:
                self.store.put(partition, w, poly)
        self._memo[parts] = poly
        return poly

    def _pfaffian(self, parts: tuple[int, ...], w: int) -> OddPolynomial:
        row = parts + (0,) if len(parts) % 2 else parts
        if len(row) == 2:
            return _two_row(row[0], row[1])
        acc = OddPolynomial.zero(w)
        first = row[0]
        for j in range(1, len(row)):
            entry = _two_row(first, row[j])
            if entry.is_zero():
                continue
            minor = tuple(p for i, p in enumerate(row) if i not in (0, j) and p)
            sub = self.get(minor)
            term = entry.extend_cap(w) * sub.extend_cap(w)
            acc = acc + term if j % 2 else acc - term
        return acc

    def build_all(self, max_weight: int) -> list[StrictPartition]:
        parts = strict_up_to(max_weight)
        for lam in parts:
            self.get(lam)
        if self.store is not None:
            self.store.flush()
        return parts

    def __len__(self):
        return len(self._memo)


_DEFAULT_TABLE = QMacTable()


def default_table() -> QMacTable:
    return _DEFAULT_TABLE


def set_default_store(store) -> None:
    """Attach a persistent store to the module-level memo table."""
    global _DEFAULT_TABLE
    _DEFAULT_TABLE = QMacTable(store)


def mm_factor(length: int):
    """2^(-length/2) in Q(sqrt 2) (rational for even length)."""
    if length % 2 == 0:
        return mpq(1, 2 ** (length // 2))
    return Root2Number(0, mpq(1, 2 ** ((length + 1) // 2)))


@dataclass(frozen=True)
class QFunction:
    partition: StrictPartition
    normalization: str
    poly: OddPolynomial

    def specialize(self, point):
        return specialize_times(self.poly, point)


def q_mac(lam: StrictPartition, cap: int, table: QMacTable | None = None) -> QFunction:
    return q_function(lam, cap, "mac", table)


def q_function(lam: StrictPartition, cap: int, normalization: str = "mac",
               table: QMacTable | None = None) -> QFunction:
    if not isinstance(lam, StrictPartition):
        lam = StrictPartition(lam)
    if cap < lam.weight:
        raise UsageError(f"cap {cap} below |lambda| = {lam.weight}")
    table = _DEFAULT_TABLE if table is None else table
    poly = table.get(lam).extend_cap(cap)
    if normalization == "mm":
        poly = poly * mm_factor(lam.length)
    elif normalization != "mac":
        raise UsageError(f"unknown normalization {normalization!r}")
    return QFunction(lam, normalization, poly)


def eval_q(lam: StrictPartition, point: dict, normalization: str = "mm",
           table: QMacTable | None = None):
    """Q_lambda at a point, normalization applied after specializing the
    rational Macdonald polynomial."""
    table = _DEFAULT_TABLE if table is None else table
    value = specialize_times(table.get(lam), point)
    if normalization == "mm":
        return value * mm_factor(lam.length) if value else value
    return value


def verify_cauchy(cap: int, table: QMacTable | None = None) -> VerificationReport:
    """sum_lambda Q_lambda(t) Q_lambda(t') = exp(2 sum k t_k t'_k) up to
    joint weight ``cap``."""
    table = _DEFAULT_TABLE if table is None else table
    report = VerificationReport("cauchy", {"max_weight": cap, "normalization": "mm"})
    lhs = TwoSetPolynomial.zero(cap)
    for lam in strict_up_to(cap // 2):
        q = table.get(lam).extend_cap(cap)
        # 2^(-l/2) * 2^(-l/2) = 2^(-l)
        factor = mpq(1, 2**lam.length)
        lhs = lhs + (embed_family(q, 0, cap) * embed_family(q, 1, cap)) * factor
    kernel_exponent = TwoSetPolynomial.zero(cap)
    for k in range(1, cap // 2 + 1, 2):
        kernel_exponent = kernel_exponent + TwoSetPolynomial(
            {monomial({k: 1}) + monomial({k: 1}, 1): mpq(2 * k)}, cap
        )
    rhs = poly_exp(kernel_exponent)
    for w in range(0, cap + 1, 2):
        lw, rw = lhs.homogeneous_part(w), rhs.homogeneous_part(w)
        diff = lw - rw
        detail = [f"{_format_monomial(m)}: {c}" for m, c in diff.sorted_terms()]
        report.add(f"joint weight {w}", f"{len(rw)} terms", f"{len(lw)} terms",
                   diff.is_zero(), group=f"weight {w}", detail=detail)
    odd = [w for w in range(1, cap + 1, 2) if not lhs.homogeneous_part(w).is_zero()]
    report.add("odd joint weights vanish", "[]", str(odd), not odd, group="parity")
    return report


def verify_hook(cap: int, table: QMacTable | None = None) -> VerificationReport:
    """Closed hook formula against specialization of the polynomial at
    t_k = delta_{k,1}, for every strict |lambda| <= cap."""
    table = _DEFAULT_TABLE if table is None else table
    report = VerificationReport("hook", {"max_weight": cap, "normalization": "mm"})
    for lam in strict_up_to(cap):
        closed = hook_eval_delta1(lam)
        poly_value = Root2Number.coerce(eval_q(lam, DELTA1, "mm", table))
        report.add(str(lam), closed, poly_value, closed == poly_value, group=f"weight {lam.weight}")
    return report


# -- specialized Pfaffians ---------------------------------------------------
#
# Specialization is a ring homomorphism, so Q^Mac_lambda at a point equals
# the Pfaffian of the specialized two-row values.  This avoids building
# weight-36 polynomials when only Q_{2 lambda}(delta_{k,3}/3) is needed.

_POINTS = {"delta1": DELTA1, "delta3over3": DELTA3_OVER_3}


def _point_key(point) -> tuple:
    return tuple(sorted(point.items()))


class SpecializedQ:
    """Q^Mac_lambda evaluated at a fixed point via scalar Pfaffians."""

    def __init__(self, point: dict):
        self.point = dict(point)
        self._rows: dict[int, object] = {}
        self._two: dict[tuple[int, int], object] = {}
        self._memo: dict[tuple[int, ...], object] = {(): mpq(1)}

    def row(self, n: int):
        v = self._rows.get(n)
        if v is None:
            v = specialize_times(_q_row(n), self.point)
            self._rows[n] = v
        return v

    def two_row(self, a: int, b: int):
        key = (a, b)
        v = self._two.get(key)
        if v is None:
            v = self.row(a) * self.row(b) if b else self.row(a)
            if b:
                for i in range(1, b + 1):
                    t = self.row(a + i) * self.row(b - i)
                    v = v + (2 * t if i % 2 == 0 else -2 * t)
            self._two[key] = v
        return v

    def mac(self, lam) -> object:
        parts = tuple(lam.parts if isinstance(lam, StrictPartition) else lam)
        v = self._memo.get(parts)
        if v is not None:
            return v
        row = parts + (0,) if len(parts) % 2 else parts
        if len(row) == 2:
            v = self.two_row(row[0], row[1])
        else:
            v = mpq(0)
            for j in range(1, len(row)):
                entry = self.two_row(row[0], row[j])
                if not entry:
                    continue
                minor = tuple(p for i, p in enumerate(row) if i not in (0, j) and p)
                sub = self.mac(minor)
                v = v + entry * sub if j % 2 else v - entry * sub
        self._memo[parts] = v
        return v

    def mm(self, lam):
        v = self.mac(lam)
        if not isinstance(lam, StrictPartition):
            lam = StrictPartition(lam)
        return v * mm_factor(lam.length) if v else v


_SPECIALIZED: dict[tuple, SpecializedQ] = {}


def specialized(point) -> SpecializedQ:
    if isinstance(point, str):
        point = _POINTS[point]
    key = _point_key(point)
    s = _SPECIALIZED.get(key)
    if s is None:
        s = _SPECIALIZED[key] = SpecializedQ(point)
    return s


def reset_row_caches() -> None:
    """Forget the memoized one- and two-row functions (for cold timings)."""
    _q_row.cache_clear()
    _two_row.cache_clear()


# -- level-parallel construction ---------------------------------------------

_WORKER_TABLE: QMacTable | None = None


def _worker_build(parts_list):
    table = _WORKER_TABLE
    return [(parts, table._pfaffian(parts, sum(parts))) for parts in parts_list]


def build_levels(table: QMacTable, max_weight: int, workers: int = 1, on_level=None):
    """Build every Q^Mac_lambda with |lambda| <= max_weight, one weight level
    at a time.

    Minors of a Pfaffian have strictly smaller weight, so a level depends only
    on earlier levels and its partitions can be farmed out to forked workers.
    ``on_level(weight, partitions)`` is called after each level.
    """
    global _WORKER_TABLE
    from concurrent.futures import ProcessPoolExecutor
    from multiprocessing import get_context

    from .partitions import enumerate_strict

    for w in range(max_weight + 1):
        level = enumerate_strict(w)
        missing = []
        for lam in level:
            if lam.parts in table._memo:
                continue
            cached = table.store.get(lam, w) if table.store is not None else None
            if cached is not None:
                table._memo[lam.parts] = cached
            else:
                missing.append(lam.parts)
        if workers > 1 and len(missing) > 1:
            _WORKER_TABLE = table
            chunks = [missing[i::workers] for i in range(workers)]
            with ProcessPoolExecutor(workers, mp_context=get_context("fork")) as pool:
                results = [r for chunk in pool.map(_worker_build, chunks) for r in chunk]
            _WORKER_TABLE = None
            results.sort()
        else:
            results = [(parts, table._pfaffian(parts, w)) for parts in missing]
        for parts, poly in results:
            table._memo[parts] = poly
            table.pfaffian_evaluations += 1
            if table.store is not None:
                table.store.put(StrictPartition(parts), w, poly)
        if on_level is not None:
            on_level(w, level)
    if table.store is not None:
        table.store.flush()
