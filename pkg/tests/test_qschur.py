import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from qtau.errors import UsageError
from qtau.partitions import StrictPartition, double_partition, enumerate_strict, hook_eval_delta1
from qtau.polyring import OddPolynomial, monomial, specialize_times
from qtau.qschur import (
    DELTA1,
    DELTA3_OVER_3,
    QMacTable,
    build_levels,
    eval_q,
    q_function,
    q_mac,
    q_one_row,
    q_two_row,
    specialized,
    verify_cauchy,
    verify_hook,
)
from qtau.scalars import Root2Number, is_root2_free


def P(*parts):
    return StrictPartition(parts)


def t(k, cap, c=1):
    return OddPolynomial.var(k, cap, mpq(c))


Q21 = mpq(4, 3) * t(1, 3) ** 3 - 4 * t(3, 3)
strict_partitions = st.integers(0, 16).flatmap(lambda w: st.sampled_from(enumerate_strict(w)))


def test_one_row():
    assert q_one_row(0, 0) == OddPolynomial.one(0)
    assert q_one_row(1, 1) == t(1, 1, 2)
    assert q_one_row(3, 3) == mpq(4, 3) * t(1, 3) ** 3 + t(3, 3, 2)


def test_two_row():
    assert q_two_row(1, 0, 1) == t(1, 1, 2)
    assert q_two_row(2, 1, 3) == Q21
    assert q_two_row(1, 2, 3) == -Q21


def test_q_mac_examples():
    assert q_mac(P(), 0).poly == OddPolynomial.one(0)
    assert q_mac(P(2, 1), 3).poly == Q21
    assert specialize_times(q_mac(P(3), 3).poly, DELTA3_OVER_3) == mpq(2, 3)
    assert eval_q(P(3), DELTA3_OVER_3) == Root2Number(0, mpq(1, 3))


def test_cap_too_small():
    with pytest.raises(UsageError):
        q_mac(P(2, 1), 2)


def test_mm_normalization():
    q = q_function(P(2, 1), 3, "mm").poly
    assert q == Q21 / 2
    q1 = q_function(P(1), 1, "mm").poly
    assert q1 == OddPolynomial({monomial({1: 1}): Root2Number(0, 1)}, 1)


@given(strict_partitions)
def test_homogeneous_and_cap_independent(lam):
    p = q_mac(lam, lam.weight).poly
    assert p.is_homogeneous(lam.weight)
    assert q_mac(lam, lam.weight + 3).poly == p.extend_cap(lam.weight + 3)
    assert all(is_root2_free(c) for c in p.terms.values())


@given(strict_partitions)
def test_hook_matches_specialization(lam):
    assert Root2Number.coerce(eval_q(lam, DELTA1)) == hook_eval_delta1(lam)


@pytest.mark.parametrize("w", [w for w in range(1, 17) if w % 3])
def test_delta3_vanishes_off_multiples_of_three(w):
    for lam in enumerate_strict(w):
        assert not specialize_times(q_mac(lam, w).poly, DELTA3_OVER_3)


@given(strict_partitions, st.sampled_from([DELTA1, DELTA3_OVER_3, {1: mpq(1, 2), 3: mpq(-2, 3), 5: mpq(3)}]))
def test_scalar_pfaffian_agrees_with_polynomial(lam, point):
    assert specialized(point).mac(lam) == specialize_times(q_mac(lam, lam.weight).poly, point)


def test_q6_at_delta3():
    # q_6 at t3 = 1/3 is (2/3)^2 / 2! = 2/9
    assert specialized(DELTA3_OVER_3).mac(P(6)) == mpq(2, 9)
    assert specialized(DELTA3_OVER_3).mac(P(4, 2)) == mpq(4, 9)


def test_cauchy_small():
    r = verify_cauchy(2)
    assert r.passed
    assert verify_cauchy(0).passed


def test_cauchy_and_hook_campaigns():
    assert verify_cauchy(8).passed
    r = verify_hook(10)
    assert r.passed and len(r.items) == sum(len(enumerate_strict(w)) for w in range(11))


def test_cauchy_detects_broken_table():
    table = QMacTable()
    table.get(P(2, 1))
    table._memo[(2, 1)] = table._memo[(2, 1)] + t(3, 3)
    r = verify_cauchy(6, table)
    assert not r.passed and r.failures[0].detail


def test_level_parallel_build_is_deterministic():
    serial, parallel = QMacTable(), QMacTable()
    build_levels(serial, 12, 1)
    build_levels(parallel, 12, 2)
    assert serial._memo == parallel._memo
    assert serial.pfaffian_evaluations == parallel.pfaffian_evaluations


def test_double_of_odd_length():
    lam = P(3, 2, 1)
    assert double_partition(lam) == P(6, 4, 2)
    assert hook_eval_delta1(double_partition(lam)).a == 0
