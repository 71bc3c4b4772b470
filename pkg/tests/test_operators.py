import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from qtau.errors import UsageError
from qtau.operators import (
    DiffOperator,
    build_JB,
    build_MB,
    build_virasoro_odd,
    build_W0,
    build_W1,
    build_W1_family,
    conjugate_rescale,
    exp_action,
    verify_operator_identity,
)
from qtau.polyring import HbarSeries, OddPolynomial, monomial, monomial_exponents, poly_log
from qtau.scalars import NU
from strategies import polynomials

CAP = 8


def t(k, cap=CAP, c=1):
    return OddPolynomial.var(k, cap, mpq(c))


def one(cap=CAP):
    return OddPolynomial.one(cap)


def brute_apply(op: DiffOperator, p: OddPolynomial) -> OddPolynomial:
    """Differentiate with OddPolynomial.derivative, then multiply."""
    out = OddPolynomial.zero(p.cap)
    for (c, a), v in op.terms.items():
        q = p
        for _, k, e in monomial_exponents(a):
            for _ in range(e):
                q = q.derivative(k)
        out = out + OddPolynomial({c: v}, p.cap) * q
    return out


ops = st.sampled_from([
    build_W0(0, CAP), build_W0(mpq(1, 3), CAP), build_W1(CAP), build_MB(-1, CAP),
    build_MB(-3, CAP), build_virasoro_odd(-2, CAP), build_virasoro_odd(0, CAP),
    build_virasoro_odd(2, CAP), build_virasoro_odd(4, CAP),
])


class TestBuilders:
    def test_w0_on_one(self):
        assert build_W0("symbolic", CAP).apply(one()) == t(1) * (mpq(1, 8) - NU / 2)
        assert build_W0(mpq(1, 4), CAP).apply(one()).is_zero()

    def test_w0_on_t1(self):
        assert build_W0(0, CAP).apply(t(1)) == mpq(9, 8) * t(1) ** 2

    def test_w1_on_one(self):
        assert build_W1(CAP).apply(one()) == t(1) ** 3 / 6 + t(3) / 8

    def test_w1_t5_d1d1_coefficient(self):
        op = build_W1(CAP)
        assert op.terms[(monomial({5: 1}), monomial({1: 2}))] == mpq(5, 6)

    @pytest.mark.parametrize("op, shift", [
        (build_W0(0, CAP), 1), (build_W1(CAP), 3), (build_MB(-1, CAP), 1), (build_MB(-3, CAP), 3),
        (build_virasoro_odd(-2, CAP), 2), (build_virasoro_odd(4, CAP), -4),
    ])
    def test_shifts(self, op, shift):
        assert op.shift == shift

    def test_virasoro(self):
        l0 = build_virasoro_odd(0, CAP)
        assert l0.apply(t(3)) == 3 * t(3)
        assert set(l0.terms) == {(monomial({k: 1}), monomial({k: 1})) for k in (1, 3, 5, 7)}
        assert build_virasoro_odd(-2, CAP).terms[(monomial({1: 2}), 0)] == mpq(1, 2)
        with pytest.raises(UsageError):
            build_virasoro_odd(1, CAP)

    def test_mb(self):
        assert build_MB(-3, CAP).apply(one()) == t(1) ** 3 / 3
        assert build_MB(-1, CAP).apply(one()).is_zero()
        with pytest.raises(UsageError):
            build_MB(-2, CAP)

    def test_jb(self):
        assert build_JB(3, CAP).apply(t(3) ** 2) == 4 * t(3)
        with pytest.raises(UsageError):
            build_JB(2, CAP)

    def test_rescale(self):
        w0 = build_W0("symbolic", CAP)
        assert conjugate_rescale(w0, mpq(1)) == w0
        half = conjugate_rescale(w0, mpq(1, 2))
        assert half.terms[(monomial({1: 1}), 0)] == (mpq(1, 8) - NU / 2) / 2
        assert half == build_MB(-1, CAP) * mpq(1, 4) + t(1) * (mpq(1, 16) - NU / 4)
        with pytest.raises(UsageError):
            conjugate_rescale(w0, mpq(0))

    def test_dump_is_canonical(self):
        a = build_W0(0, 4).dump()
        assert a == build_W0(0, 4).dump()
        assert a.splitlines()[0] == "1/8\tt1\t1"


@given(ops, polynomials(CAP))
def test_apply_matches_brute_force(op, p):
    assert op.apply(p) == brute_apply(op, p)


BIG = 16
wide_ops = st.sampled_from([
    build_W0("symbolic", BIG), build_W1(BIG), build_MB(-1, BIG), build_MB(-3, BIG),
    build_virasoro_odd(-2, BIG), build_virasoro_odd(2, BIG), build_virasoro_odd(4, BIG),
])


@given(wide_ops, wide_ops, polynomials(CAP))
def test_compose_matches_sequential_action(a, b, p):
    # headroom so the intermediate b.p is never truncated
    p = p.extend_cap(BIG)
    lhs = a.compose(b).apply(p)
    rhs = a.apply(b.apply(p))
    assert lhs.truncate(CAP) == rhs.truncate(CAP)


@given(ops, polynomials(CAP), polynomials(CAP))
def test_linearity(op, p, q):
    assert op.apply(p + 3 * q) == op.apply(p) + 3 * op.apply(q)


@given(ops, st.integers(0, CAP))
def test_homogeneity(op, w):
    s = op.shift
    for p in (OddPolynomial({monomial({1: w}): mpq(1)}, CAP),):
        out = op.apply(p)
        assert out.is_zero() or out.is_homogeneous(w + s)


class TestExpAction:
    def test_log_tau0(self):
        cap = 6
        log = poly_log(exp_action(build_W0(0, cap), 6, cap))
        T = lambda k, c=1: OddPolynomial.var(k, cap, mpq(c))
        want = HbarSeries({
            1: T(1) / 8,
            2: T(1) ** 2 / 16,
            3: T(1) ** 3 / 24 + T(3, mpq(9, 128)),
            4: T(1) ** 4 / 32 + T(1) * T(3) * mpq(27, 128),
            5: T(1) ** 5 / 40 + T(1) ** 2 * T(3) * mpq(27, 64) + T(5, mpq(225, 1024)),
            6: T(1) ** 6 / 48 + T(1) ** 3 * T(3) * mpq(45, 64) + T(3) ** 2 * mpq(567, 1024)
               + T(1) * T(5) * mpq(1125, 1024),
        }, cap, 6)
        assert log == want

    def test_components_graded(self):
        series = exp_action(build_W1(9), 3, 9)
        for e, p in series.items():
            assert p.is_homogeneous(3 * int(e))

    def test_nonpositive_shift_rejected(self):
        with pytest.raises(UsageError):
            exp_action(build_virasoro_odd(0, 4), 2, 4)

    def test_trivial_at_quarter(self):
        assert exp_action(build_W0(mpq(1, 4), 8), 8, 8) == HbarSeries.one(8, 8)

    def test_bkp_family_first_order(self):
        s = exp_action(build_W1_family(mpq(1, 16), 6), 2, 6)
        assert s.component(1) == t(1, 6) ** 3 * mpq(25, 144) + t(3, 6) * mpq(3, 16)


def test_operator_identity_campaign():
    r = verify_operator_identity(6)
    assert r.passed
    assert {it.group for it in r.items} == {"W0(N)", "W1"}


def test_operator_identity_detects_wrong_constant():
    w1 = conjugate_rescale(build_W1(6), mpq(1, 2))
    wrong = build_MB(-3, 6) * mpq(1, 12) + OddPolynomial.var(3, 6, mpq(1, 16))
    assert w1.apply(one(6)) != wrong.apply(one(6))
