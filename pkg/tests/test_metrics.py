import math

import numpy as np
import pytest

from fmbelief.errors import InsufficientDataError
from fmbelief.metrics import (cost_report, discounted_cost, estimate_epsilon,
                              fit_exponential_decay, fit_gap_scaling, fsum_mean,
                              stage_cost_profile)
from fmbelief.model import belief_stage_cost
from fmbelief.simulation import TrajectoryRecord, rollout


def synthetic_record(T, cov, mean=(0.0, 0.0)):
    means = np.tile(np.asarray(mean, dtype=float), (T + 1, 1))
    covs = np.tile(np.asarray(cov, dtype=float), (T + 1, 1, 1))
    return TrajectoryRecord(
        seed=0, horizon=T, H_list=(0,), states=np.zeros((T + 1, 2)),
        observations=np.zeros((T + 1, 1)), inputs=np.zeros((T, 1)),
        terminal_input=np.zeros(1), true_means=means, true_covs=covs,
        fm_means={0: means.copy()}, fm_covs={0: covs.copy()})


@pytest.fixture(scope="module")
def small_records(model, gain):
    return [rollout(model, gain, [0, 5, 20, 60], 60, seed=s) for s in range(20)]


class TestEstimateEpsilon:
    def test_window_covers_horizon(self, model, gain):
        recs = [rollout(model, gain, [30], 30, seed=s) for s in range(3)]
        est = estimate_epsilon(recs, 30)
        assert est.epsilon_hat < 1e-9
        assert not est.per_time_mean.any()

    def test_identical_records_zero_stderr(self, model, gain):
        r = rollout(model, gain, [2], 40, seed=5)
        est = estimate_epsilon([r, r], 2)
        assert not est.per_time_stderr.any()
        assert est.epsilon_hat > 0

    def test_zero_before_window_fills(self, small_records):
        est = estimate_epsilon(small_records, 20)
        assert np.all(est.per_time_mean[:21] < 1e-9)

    def test_mean_then_max(self, small_records):
        est = estimate_epsilon(small_records, 5, burn_in=10)
        profiles = np.array([r.w2_profile(5) for r in small_records])
        assert est.epsilon_hat == pytest.approx(profiles.mean(axis=0)[10:].max(), rel=1e-12)
        assert est.argmax_t >= 10

    def test_monotone_trend(self, small_records):
        assert estimate_epsilon(small_records, 5).epsilon_hat > \
            estimate_epsilon(small_records, 20).epsilon_hat

    def test_needs_records(self, small_records):
        with pytest.raises(InsufficientDataError):
            estimate_epsilon([], 0)
        with pytest.raises(InsufficientDataError):
            estimate_epsilon(small_records[:1], 0)

    def test_order_independent(self, small_records):
        a = estimate_epsilon(small_records, 5)
        b = estimate_epsilon(small_records[::-1], 5)
        assert a.per_time_mean.tobytes() == b.per_time_mean.tobytes()
        assert a.per_time_stderr.tobytes() == b.per_time_stderr.tobytes()


class TestDiscountedCost:
    def test_zero_trajectory(self, model):
        r = synthetic_record(50, np.zeros((2, 2)))
        assert discounted_cost(model, r) == 0.0

    def test_geometric_sum(self, model):
        # Q = I and Tr(P) = 1 make every stage cost exactly 1
        T, gamma = 200, model.gamma
        r = synthetic_record(T, np.diag([0.5, 0.5]))
        expected = (1 - gamma ** (T + 1)) / (1 - gamma)
        assert discounted_cost(model, r) == pytest.approx(expected, rel=1e-13)
        assert discounted_cost(model, r, gamma=0.5, T=10) == pytest.approx(
            (1 - 0.5 ** 11) / 0.5, rel=1e-13)

    def test_full_window_fm_equals_true(self, model, gain):
        r = rollout(model, gain, [40], 40, seed=2)
        assert discounted_cost(model, r, H=40) == discounted_cost(model, r)

    def test_profile_matches_belief_stage_cost(self, model, gain):
        r = rollout(model, gain, [3], 30, seed=1)
        prof = stage_cost_profile(model, r, 3)
        for t in range(31):
            assert prof[t] == pytest.approx(
                belief_stage_cost(model, r.fm_belief(3, t), r.input_at(t)), rel=1e-13)

    def test_bad_gamma(self, model):
        with pytest.raises(ValueError):
            discounted_cost(model, synthetic_record(3, np.eye(2)), gamma=1.0)

    def test_cost_report(self, model, small_records):
        rep = cost_report(model, small_records, [0, 5, 20, 60])
        for H in (0, 5, 20, 60):
            assert rep.gap[H] == abs(rep.J - rep.J_hat[H])
        assert rep.gap[60] == 0.0
        runs = [discounted_cost(model, r) for r in small_records]
        assert rep.J == pytest.approx(np.mean(runs), rel=1e-12)
        assert 0 < rep.truncation_tail_bound


class TestFits:
    def test_exact_decay(self):
        pts = [(H, 2 * 0.5 ** H) for H in (0, 1, 2, 5, 10)]
        fit = fit_exponential_decay(pts)
        assert abs(fit.rho_hat - 0.5) < 1e-12
        assert abs(fit.r_squared - 1) < 1e-12
        assert abs(fit.log_intercept - math.log(2)) < 1e-12

    def test_noisy_decay(self):
        rng = np.random.default_rng(0)
        Hs = np.arange(0, 21)
        pts = [(H, 2 * 0.5 ** H * (1 + 0.01 * rng.normal())) for H in Hs]
        fit = fit_exponential_decay(pts)
        assert abs(fit.rho_hat - 0.5) / 0.5 < 0.05

    def test_flat(self):
        fit = fit_exponential_decay([(H, 0.3) for H in range(5)])
        assert fit.rho_hat == 1.0
        assert fit.slope == 0.0

    def test_zeros_dropped(self):
        pts = [(0, 1.0), (1, 0.5), (2, 0.25), (100, 0.0)]
        fit = fit_exponential_decay(pts)
        assert fit.H_range == (0.0, 2.0)
        assert abs(fit.rho_hat - 0.5) < 1e-12

    def test_decay_insufficient(self):
        with pytest.raises(InsufficientDataError):
            fit_exponential_decay([(0, 1.0), (1, 0.5), (5, 0.0)])

    @pytest.mark.parametrize("power", [1, 2])
    def test_gap_power_law(self, power):
        fit = fit_gap_scaling([(e, 3 * e ** power) for e in (0.01, 0.1, 0.5, 2.0)])
        assert abs(fit.slope - power) < 1e-12
        assert abs(fit.intercept - math.log(3)) < 1e-12

    def test_gap_insufficient(self):
        with pytest.raises(InsufficientDataError):
            fit_gap_scaling([(0.1, 0.2), (0.0, 0.0), (0.3, 0.0), (0.5, 1.0)])


def test_fsum_mean_order_free():
    vals = [1e16, 1.0, -1e16, 3.0]
    assert fsum_mean(vals) == fsum_mean(vals[::-1]) == 1.0


class TestSweepInvariants:
    """Checks on the desk-scale sweep shared with the acceptance suite."""

    def test_eps_non_increasing(self, desk_sweep):
        _, report, _ = desk_sweep
        rows = report.rows
        for a, b in zip(rows, rows[1:]):
            pooled = math.hypot(a["eps_stderr"], b["eps_stderr"])
            assert b["eps_mean"] <= a["eps_mean"] + 2 * pooled, (a, b)

    def test_moment_ceiling(self, desk_sweep):
        _, report, _ = desk_sweep
        M = 0.0
        for r in report.records:
            M = max(M, float(np.max(np.sum(r.true_means ** 2, axis=1)
                                    + np.trace(r.true_covs, axis1=1, axis2=2))))
            for H in r.H_list:
                M = max(M, float(np.max(np.sum(r.fm_means[H] ** 2, axis=1)
                                        + np.trace(r.fm_covs[H], axis1=1, axis2=2))))
        for row in report.rows:
            assert row["eps_mean"] <= 2 * math.sqrt(M)

    @pytest.mark.xfail(strict=True, reason="gap at H=1 exceeds the envelope "
                       "anchored at H=0 on the desk sweep; see decisions ledger")
    def test_gap_envelope_from_largest_eps(self, desk_sweep):
        _, report, _ = desk_sweep
        top = max(report.rows, key=lambda r: r["eps_mean"])
        const = top["gap"] / top["eps_mean"]
        for row in report.rows:
            assert row["gap"] <= const * row["eps_mean"] * (1 + 1e-12)
