"""Strict partitions and partition-only closed forms."""

from __future__ import annotations

from functools import lru_cache, total_ordering
from math import factorial

from gmpy2 import mpq

from .scalars import Root2Number

__all__ = [
    "StrictPartition",
    "enumerate_strict",
    "strict_up_to",
    "double_partition",
    "hook_eval_delta1",
    "double_factorial_ratio",
    "parse_partition",
]


@total_ordering
class StrictPartition:
    """Strictly decreasing tuple of positive parts.

    Ordered by weight, then lexicographically on the parts.
    """

    __slots__ = ("parts",)

    def __init__(self, parts=()):
        parts = tuple(int(p) for p in parts)
        for i, p in enumerate(parts):
            if p <= 0:
                raise ValueError(f"parts must be positive: {parts}")
            if i and parts[i - 1] <= p:
                raise ValueError(f"parts must strictly decrease: {parts}")
        self.parts = parts

    @property
    def weight(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    def __len__(self):
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __getitem__(self, i):
        return self.parts[i]

    def __eq__(self, other):
        if isinstance(other, StrictPartition):
            return self.parts == other.parts
        if isinstance(other, tuple):
            return self.parts == other
        return NotImplemented

    def __lt__(self, other):
        if not isinstance(other, StrictPartition):
            return NotImplemented
        return (self.weight, self.parts) < (other.weight, other.parts)

    def __hash__(self):
        return hash(self.parts)

    def __repr__(self):
        return f"StrictPartition({self.parts})"

    def __str__(self):
        return ",".join(map(str, self.parts)) if self.parts else "-"


def parse_partition(text: str) -> StrictPartition:
    """Parse the textual form ``"4,2,1"``; ``"-"`` (or empty) is the empty partition."""
    text = text.strip()
    if text in ("-", "", "()"):
        return StrictPartition()
    return StrictPartition(int(p) for p in text.strip("()").split(",") if p.strip())


@lru_cache(maxsize=None)
def _strict_parts(weight: int, max_part: int) -> tuple[tuple[int, ...], ...]:
    if weight == 0:
        return ((),)
    out = []
    for first in range(min(weight, max_part), 0, -1):
        for rest in _strict_parts(weight - first, first - 1):
            out.append((first,) + rest)
    return tuple(out)


def enumerate_strict(weight: int) -> list[StrictPartition]:
    """All strict partitions of ``weight`` in lexicographic-descending order."""
    if weight < 0:
        return []
    return [StrictPartition(p) for p in _strict_parts(weight, weight)]


def strict_up_to(max_weight: int) -> list[StrictPartition]:
    out = []
    for w in range(max_weight + 1):
        out.extend(enumerate_strict(w))
    return out


def double_partition(lam: StrictPartition) -> StrictPartition:
    return StrictPartition(2 * p for p in lam.parts)


def hook_eval_delta1(lam: StrictPartition) -> Root2Number:
    """Closed form of Q_lambda at t_k = delta_{k,1} (MM normalization).

    Equals 2^(|lam| - l/2) / prod(lam_j!) * prod_{i<j} (lam_i - lam_j)/(lam_i + lam_j).
    """
    parts = lam.parts
    value = mpq(2) ** (sum(parts) - len(parts) // 2)
    for p in parts:
        value /= factorial(p)
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            value *= mpq(parts[i] - parts[j], parts[i] + parts[j])
    if len(parts) % 2:
        # 2^(-1/2) = sqrt(2)/2
        return Root2Number(0, value / 2)
    return Root2Number(value, 0)


def double_factorial_ratio(lam: StrictPartition) -> int:
    """prod_j (2 lam_j - 1)!!, the ratio Q_lam(delta1) / Q_2lam(delta1)."""
    out = 1
    for p in lam.parts:
        for j in range(2 * p - 1, 0, -2):
            out *= j
    return out
