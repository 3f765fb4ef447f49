import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exptests.core import scale_sample
from exptests.errors import DomainError
from exptests.statistics import (ALL_STATISTICS, PLAIN_STATISTICS,
                                 TUNED_STATISTICS, StatisticId, evaluate,
                                 evaluate_many, kernel_ad, kernel_bh,
                                 kernel_cvm, kernel_he, kernel_hm1,
                                 kernel_hm2, kernel_w, stat_LD, stat_MD,
                                 vn_process)

from oracles import oracle_statistic

positive_samples = st.lists(st.floats(0.05, 20.0), min_size=5, max_size=25)


class TestStatisticId:
    def test_label_and_case_folding(self):
        s = StatisticId("md", 0.5)
        assert s.name == "MD"
        assert s.label() == "MD[a=0.5]"
        assert StatisticId("KS").label() == "KS"

    def test_validation(self):
        with pytest.raises(DomainError):
            StatisticId("XX")
        with pytest.raises(DomainError):
            StatisticId("MD")          # tuned, missing a
        with pytest.raises(DomainError):
            StatisticId("MD", -1.0)    # nonpositive a
        with pytest.raises(DomainError):
            StatisticId("KS", 1.0)     # plain, spurious a

    def test_partition(self):
        assert TUNED_STATISTICS | PLAIN_STATISTICS == ALL_STATISTICS
        assert not TUNED_STATISTICS & PLAIN_STATISTICS


class TestClosedFormsAgainstQuadrature:
    """Spot versions of the full closed-form-vs-integral acceptance sweep."""

    @pytest.mark.parametrize("name,a", [
        ("MD", 1.0), ("MD", 0.2), ("JD", 2.0), ("JP", 1.0), ("MP", 1.5),
        ("BH", 1.0), ("HE", 1.5), ("W", 2.0), ("HM1", 2.5), ("HM2", 2.5),
    ])
    def test_tuned(self, name, a, gen):
        x = gen.exponential(size=12) * 3.0
        closed = evaluate(StatisticId(name, a), x).value
        assert abs(closed - oracle_statistic(name, x, a)) < 1e-8

    @pytest.mark.parametrize("name", ["CVM", "AD"])
    def test_edf(self, name, gen):
        x = gen.exponential(size=10)
        closed = evaluate(StatisticId(name), x).value
        assert abs(closed - oracle_statistic(name, x)) < 1e-8


class TestMDAndLD:
    def test_md_zero_only_in_limit(self, gen):
        # MD is a squared distance: strictly positive on finite samples
        x = gen.exponential(size=15)
        assert stat_MD(scale_sample(x), 1.0) > 0

    def test_vn_process_matches_direct(self, gen):
        x = gen.exponential(size=9)
        s = scale_sample(x)
        y = s.values
        for t in (0.3, 1.0, 4.0):
            l1 = np.mean(np.exp(-t * y))
            l2 = np.mean(np.exp(-2 * t * np.minimum(y[:, None], y[None, :])))
            direct = (l1 - l2) * np.exp(-1.0 * t)
            assert abs(vn_process(s, 1.0, t) - direct) < 1e-12

    def test_ld_matches_dense_grid(self, gen):
        x = gen.exponential(size=14)
        s = scale_sample(x)
        for a in (0.5, 1.0, 5.0):
            ts = np.linspace(1e-4, max(40.0 / a, 4.0), 200_001)
            brute = float(np.max(np.abs(vn_process(s, a, ts))))
            val = stat_LD(s, a)
            assert val >= brute - 1e-9
            assert abs(val - brute) < 1e-6

    def test_ld_at_least_grid_value(self, gen):
        x = gen.exponential(size=10)
        s = scale_sample(x)
        a = 1.0
        ts = np.geomspace(1e-4, 40.0, 512)
        assert stat_LD(s, a) >= np.max(np.abs(vn_process(s, a, ts))) - 1e-12

    def test_invalid_a(self, gen):
        s = scale_sample(gen.exponential(size=5))
        with pytest.raises(DomainError):
            stat_MD(s, 0.0)
        with pytest.raises(DomainError):
            stat_LD(s, -2.0)


class TestKernels:
    @pytest.mark.parametrize("kernel", [kernel_cvm, kernel_ad])
    @given(x=st.floats(0.05, 30.0), y=st.floats(0.05, 30.0))
    @settings(max_examples=25)
    def test_edf_kernel_symmetry(self, kernel, x, y):
        assert abs(kernel(x, y) - kernel(y, x)) < 1e-12

    @pytest.mark.parametrize("kernel", [kernel_bh, kernel_he, kernel_w,
                                        kernel_hm1, kernel_hm2])
    @given(x=st.floats(0.05, 30.0), y=st.floats(0.05, 30.0),
           a=st.floats(0.2, 10.0))
    @settings(max_examples=25)
    def test_laplace_kernel_symmetry(self, kernel, x, y, a):
        assert abs(kernel(x, y, 1.0, a) - kernel(y, x, 1.0, a)) < 1e-10

    def test_ad_kernel_overflow_free(self):
        val = kernel_ad(800.0, 900.0)
        assert np.isfinite(val)
        assert abs(val - (800.0 + 900.0 - 1.0 - 900.0)) < 1e-9


class TestScaleInvariance:
    @pytest.mark.parametrize("name", sorted(ALL_STATISTICS))
    @given(data=positive_samples, c=st.floats(0.01, 100.0))
    @settings(max_examples=10)
    def test_invariant_under_rescaling(self, name, data, c):
        x = np.asarray(data)
        stat = StatisticId(name, 1.0 if name in TUNED_STATISTICS else None)
        v1 = evaluate(stat, x).value
        v2 = evaluate(stat, c * x).value
        assert abs(v1 - v2) < 1e-8 * (1 + abs(v1))


class TestEvaluateMany:
    @pytest.mark.parametrize("name,a", [("MD", 1.0), ("LD", 2.0),
                                        ("KS", None), ("MP", 1.0)])
    def test_rows_match_single_evaluation(self, name, a, gen):
        stat = StatisticId(name, a)
        x = gen.exponential(size=(6, 11))
        many = evaluate_many(stat, x)
        single = np.array([evaluate(stat, row).value for row in x])
        np.testing.assert_allclose(many, single, rtol=0, atol=1e-12)

    def test_chunking_does_not_change_results(self, gen):
        x = gen.exponential(size=(9, 8))
        a = evaluate_many(StatisticId("MD", 1.0), x, chunk_rows=2)
        b = evaluate_many(StatisticId("MD", 1.0), x, chunk_rows=9)
        np.testing.assert_array_equal(a, b)

    def test_rejects_wrong_shape(self, gen):
        with pytest.raises(DomainError):
            evaluate_many(StatisticId("MD", 1.0), gen.exponential(size=7))


class TestClassicalValues:
    def test_ks_handles_both_jump_sides(self):
        # single observation: F0(1) = 1 - 1/e; distance max(1/e, 1 - 1/e)
        v = evaluate(StatisticId("KS"), np.array([5.0, 5.0])).value
        f0 = 1.0 - np.exp(-1.0)
        assert abs(v - max(1.0 - f0, f0 - 0.0)) < 1e-12

    def test_ep_sign_convention(self):
        # all-equal sample: mean e^{-Y} = e^{-1} < 1/2, so EP < 0
        v = evaluate(StatisticId("EP"), np.full(4, 2.0)).value
        assert v < 0
        assert abs(v - np.sqrt(48.0) * (np.exp(-1.0) - 0.5)) < 1e-12

    def test_gini_and_mo_are_folded(self, gen):
        x = gen.exponential(size=40)
        assert evaluate(StatisticId("GINI"), x).value >= 0
        assert evaluate(StatisticId("MO"), x).value >= 0
