import pytest
from gmpy2 import mpq

import qtau.tau as tau_mod
from qtau.errors import UsageError
from qtau.partitions import StrictPartition
from qtau.polyring import HbarSeries, OddPolynomial, poly_log, rescale_times
from qtau.qschur import DELTA1, DELTA3_OVER_3, QMacTable, build_levels, specialized
from qtau.report import VerificationReport
from qtau.scalars import BETA, NU, CoeffScalar, Root2Number
from qtau.tau import (
    _mm_terms,
    bgw_r,
    compare_series,
    kw_r,
    q_expansion_bgw,
    q_expansion_mm,
    tau_cutjoin,
    tau_hypergeometric,
    verify_conjecture,
    verify_perpart_relation,
    verify_virasoro,
)


def P(*parts):
    return StrictPartition(parts)


def t(k, cap, c=1):
    return OddPolynomial.var(k, cap, mpq(c))


class TestCutJoin:
    def test_first_orders(self):
        assert tau_cutjoin("bgw", 1) == HbarSeries({0: OddPolynomial.one(1), 1: t(1, 1) / 8}, 1, 1)
        kw = tau_cutjoin("kw", 1)
        assert kw.component(1) == t(1, 3) ** 3 / 6 + t(3, 3) / 8
        nu = tau_cutjoin("bgw", 1, nu="symbolic")
        assert nu.component(1) == t(1, 1) * (mpq(1, 8) - NU / 2)

    def test_log_tau1(self):
        log = poly_log(tau_cutjoin("kw", 3))
        T = lambda k, c=1: t(k, 9, c)
        assert log.component(1) == T(1) ** 3 / 6 + T(3) / 8
        assert log.component(2) == T(3) * T(1) ** 3 / 2 + T(5) * T(1) * mpq(5, 8) + T(3) ** 2 * mpq(3, 16)
        assert log.component(3) == (T(1) * T(3) * T(5) * mpq(15, 4) + T(3) ** 2 * T(1) ** 3 * mpq(3, 2)
                                    + T(5) * T(1) ** 4 * mpq(5, 8) + T(7) * T(1) ** 2 * mpq(35, 16)
                                    + T(3) ** 3 * mpq(3, 8) + T(9, mpq(105, 128)))

    def test_unknown_model(self):
        with pytest.raises(UsageError):
            tau_cutjoin("gue", 2)


class TestRFunction:
    def test_kw_values(self):
        r = kw_r()
        assert r.xi(3) == (1, mpq(5, 16))
        e, c = r.xi(2)
        assert e == mpq(2, 3) and c == BETA ** -1 * mpq(-2, 5) * mpq(5, 16)
        e, c = r.xi(1)
        assert e == mpq(1, 3) and c == BETA * mpq(8, 5) * mpq(5, 16)

    def test_bgw_values(self):
        r = bgw_r(0)
        assert r.xi(1) == (1, mpq(1, 16))
        assert r.xi(2) == (2, mpq(1, 16) * mpq(9, 16))
        assert bgw_r().xi(1)[1] == (1 - 4 * NU) / 16

    def test_beta_zero_rejected(self):
        with pytest.raises(UsageError):
            kw_r(0)


class TestExpansions:
    def test_bgw_leading_terms(self):
        s = q_expansion_bgw(3)
        assert s.component(0) == OddPolynomial.one(3)
        assert s.component(1) == t(1, 3) / 8

    def test_mm_21_term(self):
        term = {x.partition: x for x in _mm_terms(3)}[P(2, 1)]
        # (1/16) * 2^-1 * (2/3)/(2/9) * (1/2)(4/9)
        assert term.hbar == 1 and term.scalar == mpq(1, 48)
        s1, s3 = specialized(DELTA1), specialized(DELTA3_OVER_3)
        assert s1.mm(P(2, 1)) == mpq(2, 3)
        assert s1.mm(P(4, 2)) == mpq(2, 9)
        assert s3.mm(P(4, 2)) == mpq(2, 9)

    def test_mm_matches_cutjoin_small(self):
        assert q_expansion_mm(6) == tau_cutjoin("kw", 2)

    def test_hypergeometric_bgw_first_term(self):
        s = tau_hypergeometric(bgw_r(0), DELTA1, 1)
        assert s.component(1) == t(1, 1) / 16

    def test_hypergeometric_kw_leading(self):
        s = tau_hypergeometric(kw_r(), DELTA3_OVER_3, 3)
        assert s.component(1) == t(1, 3) ** 3 / 48 + t(3, 3) / 16
        assert s.exponents() == [0, 1]


class TestCampaigns:
    @pytest.mark.parametrize("which, cap", [("mm", 9), ("bgw-q", 6), ("c2", 5), ("c3", 6)])
    def test_pass(self, which, cap):
        r = verify_conjecture(which, cap)
        assert r.passed, r.summary()

    def test_bgw_q_lists_partitions(self):
        r = verify_conjecture("bgw-q", 6)
        labels = {it.label for it in r.items if it.group.startswith("terms")}
        assert {"-", "1", "3,2,1", "6"} <= labels

    def test_c2_first_order(self):
        ref = rescale_times(tau_cutjoin("bgw", 1, nu="symbolic"), mpq(1, 2))
        assert ref.component(1) == t(1, 1) * (mpq(1, 16) - NU / 4)
        assert verify_conjecture("c2", 1).passed

    def test_broken_table_detected(self):
        table = QMacTable()
        build_levels(table, 6)
        table._memo[(3,)] = table._memo[(3,)] + t(3, 3)
        r = verify_conjecture("mm", 6, table)
        assert not r.passed
        assert any(it.detail for it in r.failures)

    def test_unknown_campaign(self):
        with pytest.raises(UsageError):
            verify_conjecture("c4", 3)

    def test_perpart_examples(self):
        r = kw_r()
        s3 = specialized(DELTA3_OVER_3)
        e, c = r.r_lambda(P(3))
        assert e == 1 and Root2Number.coerce(c * s3.mm(P(3))) == Root2Number(0, mpq(5, 48))
        e, c = r.r_lambda(P(2, 1))
        assert e == 1 and CoeffScalar.coerce(c * s3.mm(P(2, 1))) == mpq(1, 24)
        assert not s3.mm(P(1)) and not s3.mm(P(2))

    def test_perpart_campaign(self):
        r = verify_perpart_relation(9)
        assert r.passed, r.summary()

    @pytest.mark.parametrize("model", ["bgw", "kw"])
    def test_virasoro(self, model):
        r = verify_virasoro(model, 6)
        assert r.passed, r.summary()
        assert any(it.group == f"L^{-1 if model == 'kw' else 0}" for it in r.items)

    def test_virasoro_detects_perturbation(self, monkeypatch):
        real = tau_mod.tau_cutjoin

        def perturbed(model, order, nu=0, cap=None):
            s = real(model, order, nu, cap)
            bump = HbarSeries({2: t(1, s.cap) ** 2}, s.cap, s.hbar_cap)
            return s + bump

        monkeypatch.setattr(tau_mod, "tau_cutjoin", perturbed)
        assert not verify_virasoro("bgw", 4).passed


def test_compare_series_reports_monomials():
    a = HbarSeries({0: OddPolynomial.one(3), 1: t(1, 3)}, 3, 1)
    b = HbarSeries({0: OddPolynomial.one(3), 1: t(1, 3) * 2}, 3, 1)
    rep = VerificationReport("x", {})
    assert not compare_series(rep, a, b)
    (bad,) = rep.failures
    assert bad.label == "hbar^1" and "t1: expected 1, got 2" in bad.detail[0]
