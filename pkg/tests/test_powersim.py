import numpy as np
import pytest

from exptests.core import RngStream
from exptests.errors import DomainError
from exptests.nulldist import calibrate_critical_value
from exptests.powersim import (DEFAULT_TUNING_GRID, POWER_COLUMNS,
                               bootstrap_select_a, estimate_power,
                               estimate_power_adaptive, power_table_rows,
                               write_power_table)
from exptests.statistics import StatisticId

SEED = 1729


@pytest.fixture(scope="module")
def md1_cal_n20():
    return calibrate_critical_value(StatisticId("MD", 1.0), 20,
                                    replicates=10_000, rng=RngStream(SEED))


class TestEstimatePower:
    def test_deterministic(self, md1_cal_n20):
        kw = dict(alpha=0.05, replicates=2000, calibration=md1_cal_n20)
        c1 = estimate_power(StatisticId("MD", 1.0), "gamma", 1.0, 20,
                            rng=RngStream(7, 1), **kw)
        c2 = estimate_power(StatisticId("MD", 1.0), "gamma", 1.0, 20,
                            rng=RngStream(7, 1), **kw)
        assert c1.power == c2.power

    def test_thread_invariant(self, md1_cal_n20):
        kw = dict(alpha=0.05, replicates=12_000, calibration=md1_cal_n20)
        c1 = estimate_power(StatisticId("MD", 1.0), "gamma", 1.0, 20,
                            rng=RngStream(7, 1), threads=1, **kw)
        c2 = estimate_power(StatisticId("MD", 1.0), "gamma", 1.0, 20,
                            rng=RngStream(7, 1), threads=3, **kw)
        assert c1.power == c2.power

    def test_size_under_null_alternative(self, md1_cal_n20):
        # gamma(theta=0) is Exp(1): rejection rate must be close to alpha
        cell = estimate_power(StatisticId("MD", 1.0), "gamma", 0.0, 20, 0.05,
                              10_000, RngStream(11, 1), md1_cal_n20)
        assert 0.035 <= cell.power <= 0.065

    def test_power_grows_with_n(self):
        stat = StatisticId("MD", 1.0)
        powers = {}
        for n in (20, 50):
            cal = calibrate_critical_value(stat, n, replicates=10_000,
                                           rng=RngStream(SEED))
            powers[n] = estimate_power(stat, "gamma", 1.0, n, 0.05, 4000,
                                       RngStream(13, 1), cal).power
        assert powers[50] > powers[20] + 0.1

    def test_validation(self, md1_cal_n20):
        stat = StatisticId("MD", 1.0)
        with pytest.raises(DomainError):
            estimate_power(stat, "gamma", 1.0, 20, 0.05, 500,
                           RngStream(0), md1_cal_n20)
        with pytest.raises(DomainError):  # no calibration
            estimate_power(stat, "gamma", 1.0, 20, 0.05, 2000,
                           RngStream(0), None)
        with pytest.raises(DomainError):  # n mismatch
            estimate_power(stat, "gamma", 1.0, 50, 0.05, 2000,
                           RngStream(0), md1_cal_n20)
        with pytest.raises(DomainError):  # alpha not calibrated
            estimate_power(stat, "gamma", 1.0, 20, 0.01, 2000,
                           RngStream(0), md1_cal_n20)

    def test_theta_cleared_for_fixed_families(self, md1_cal_n20):
        cell = estimate_power(StatisticId("MD", 1.0), "uniform", None, 20,
                              0.05, 2000, RngStream(5, 1), md1_cal_n20)
        assert cell.theta is None


@pytest.fixture(scope="module")
def cals():
    out = {}
    for a in (0.5, 1.0, 2.0):
        out[a] = calibrate_critical_value(StatisticId("MD", a), 15,
                                          replicates=10_000,
                                          rng=RngStream(SEED))
    return out


class TestBootstrapSelection:
    def test_singleton_grid(self, cals, gen):
        x = gen.exponential(size=15)
        sel = bootstrap_select_a("MD", x, [1.0], 200, 0.05, RngStream(21),
                                 {1.0: cals[1.0]})
        assert sel.selected_a == 1.0
        assert len(sel.scores) == 1

    def test_tie_goes_to_smallest(self, cals, gen):
        import dataclasses
        x = gen.exponential(size=15)
        # impossible thresholds force all scores to zero: tie
        blocked = {a: dataclasses.replace(
            cals[a], critical_values={0.05: np.inf}) for a in cals}
        sel = bootstrap_select_a("MD", x, list(cals), 200, 0.05,
                                 RngStream(22), blocked)
        assert sel.selected_a == min(cals)
        assert sel.scores == (0.0, 0.0, 0.0)

    def test_validation(self, cals, gen):
        x = gen.exponential(size=15)
        with pytest.raises(DomainError):
            bootstrap_select_a("MD", x, [], 200, 0.05, RngStream(0), cals)
        with pytest.raises(DomainError):
            bootstrap_select_a("MD", x, [-1.0], 200, 0.05, RngStream(0), cals)
        with pytest.raises(DomainError):
            bootstrap_select_a("MD", x, [1.0], 50, 0.05, RngStream(0), cals)

    def test_deterministic(self, cals, gen):
        x = gen.exponential(size=15)
        s1 = bootstrap_select_a("MD", x, list(cals), 200, 0.05,
                                RngStream(23), cals)
        s2 = bootstrap_select_a("MD", x, list(cals), 200, 0.05,
                                RngStream(23), cals)
        assert s1 == s2


class TestAdaptivePower:
    def test_adaptive_near_fixed_best(self):
        # data-driven tuning against Uniform at n=20 should land in the
        # vicinity of the best fixed-parameter power (loose Monte Carlo band)
        grid = DEFAULT_TUNING_GRID
        cals = {a: calibrate_critical_value(StatisticId("MD", a), 20,
                                            replicates=10_000,
                                            rng=RngStream(SEED))
                for a in grid}
        cell = estimate_power_adaptive("MD", "uniform", None, 20, 0.05,
                                       400, RngStream(31, 1), cals,
                                       grid=grid, B=200)
        assert 0.60 <= cell.power <= 0.85

    def test_adaptive_deterministic(self):
        grid = (0.5, 2.0)
        cals = {a: calibrate_critical_value(StatisticId("MD", a), 10,
                                            replicates=10_000,
                                            rng=RngStream(SEED))
                for a in grid}
        kw = dict(grid=grid, B=200)
        c1 = estimate_power_adaptive("MD", "gamma", 1.0, 10, 0.05, 150,
                                     RngStream(32, 1), cals, **kw)
        c2 = estimate_power_adaptive("MD", "gamma", 1.0, 10, 0.05, 150,
                                     RngStream(32, 1), cals, **kw)
        assert c1.power == c2.power


class TestPowerTables:
    def test_rows_and_csv(self, tmp_path, md1_cal_n20):
        cell = estimate_power(StatisticId("MD", 1.0), "gamma", 1.0, 20, 0.05,
                              2000, RngStream(41, 1), md1_cal_n20)
        rows = power_table_rows([cell])
        assert list(rows[0]) == list(POWER_COLUMNS)
        assert rows[0]["percent"] == int(round(100 * cell.power))
        path = tmp_path / "power.csv"
        write_power_table(path, [cell])
        text = path.read_text().splitlines()
        assert text[0] == ",".join(POWER_COLUMNS)
        assert len(text) == 2
