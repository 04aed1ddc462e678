"""Mismatch estimates, discounted costs and log-scale regression fits."""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientDataError, ShapeError

log = logging.getLogger(__name__)

ZERO_EPS = 1e-12


def fsum_mean(values):
    """Correctly rounded mean, independent of summation order."""
    values = list(values)
    return math.fsum(values) / len(values)


def fsum_stderr(values):
    values = list(values)
    n = len(values)
    if n < 2:
        return 0.0
    mu = math.fsum(values) / n
    var = math.fsum((v - mu) ** 2 for v in values) / (n - 1)
    return math.sqrt(var / n)


@dataclass
class MismatchEstimate:
    H: int
    per_time_mean: np.ndarray
    per_time_stderr: np.ndarray
    epsilon_hat: float
    burn_in: int = 0

    @property
    def argmax_t(self):
        return self.burn_in + int(np.argmax(self.per_time_mean[self.burn_in:]))

    @property
    def epsilon_stderr(self):
        """Standard error at the time index attaining epsilon_hat."""
        return float(self.per_time_stderr[self.argmax_t])


def _check_records(records):
    records = list(records)
    if not records:
        raise InsufficientDataError("no trajectory records supplied")
    if len(records) < 2:
        raise InsufficientDataError("at least two records are needed for a stderr")
    T = records[0].horizon
    if any(r.horizon != T for r in records):
        raise ShapeError("records have different horizons")
    return records, T


def per_time_stats(profiles):
    """Column-wise fsum mean and standard error of a (records, T+1) array."""
    profiles = np.asarray(profiles, dtype=float)
    means = np.array([fsum_mean(col) for col in profiles.T])
    errs = np.array([fsum_stderr(col) for col in profiles.T])
    return means, errs


def estimate_epsilon(records, H, burn_in=0, which="fm"):
    """Plug-in estimate of sup_t E[W2(b_t, b_hat_t)]: mean over seeds, then max over t."""
    records, T = _check_records(records)
    if not 0 <= burn_in <= T:
        raise ValueError(f"burn_in must lie in [0, {T}], got {burn_in}")
    means, errs = per_time_stats([r.w2_profile(H, which) for r in records])
    return MismatchEstimate(H=H, per_time_mean=means, per_time_stderr=errs,
                            epsilon_hat=float(np.max(means[burn_in:])), burn_in=burn_in)


def stage_cost_profile(model, record, H=None):
    """c_bar(b_t, u_t) for t = 0..T using the true belief, or the fm belief for H.

    Vectorized form of belief_stage_cost over the whole record.
    """
    if H is None:
        means, covs = record.true_means, record.true_covs
    else:
        means, covs = record.fm_means[H], record.fm_covs[H]
    us = np.vstack([record.inputs, record.terminal_input[None, :]])
    Q, R = model.Q, model.R
    return (np.einsum("ti,ij,tj->t", means, Q, means)
            + np.einsum("ij,tji->t", Q, covs)
            + np.einsum("ti,ij,tj->t", us, R, us))


def discount_sum(stage_costs, gamma):
    c = np.asarray(stage_costs, dtype=float)
    return math.fsum(float(v) for v in gamma ** np.arange(c.size) * c)


def discounted_cost(model, record, H=None, gamma=None, T=None):
    """Sum_{t=0}^{T} gamma^t c_bar(b_t, u_t); ``H=None`` selects the true belief."""
    gamma = model.gamma if gamma is None else gamma
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    T = record.horizon if T is None else T
    if T > record.horizon:
        raise ShapeError(f"record covers {record.horizon} steps, {T} requested")
    return discount_sum(stage_cost_profile(model, record, H)[:T + 1], gamma)


@dataclass
class CostReport:
    J: float
    J_hat: dict
    gap: dict
    T: int
    gamma: float
    truncation_tail_bound: float
    J_stderr: float = 0.0
    J_hat_stderr: dict = field(default_factory=dict)


def cost_report(model, records, H_list, gamma=None):
    """Across-record means of J and J_hat_H on the shared closed-loop runs."""
    records, T = _check_records(records)
    gamma = model.gamma if gamma is None else gamma
    true_profiles = [stage_cost_profile(model, r) for r in records]
    J_runs = [discount_sum(c, gamma) for c in true_profiles]
    peak = max(float(np.max(c)) for c in true_profiles)
    J = fsum_mean(J_runs)
    J_hat, J_hat_se, gap = {}, {}, {}
    for H in H_list:
        profiles = [stage_cost_profile(model, r, H) for r in records]
        peak = max(peak, max(float(np.max(c)) for c in profiles))
        runs = [discount_sum(c, gamma) for c in profiles]
        J_hat[H] = fsum_mean(runs)
        J_hat_se[H] = fsum_stderr(runs)
        gap[H] = abs(J - J_hat[H])
    tail = gamma ** (T + 1) / (1.0 - gamma) * peak
    return CostReport(J=J, J_hat=J_hat, gap=gap, T=T, gamma=gamma,
                      truncation_tail_bound=tail, J_stderr=fsum_stderr(J_runs),
                      J_hat_stderr=J_hat_se)


@dataclass
class LinearFit:
    slope: float
    intercept: float
    r_squared: float
    n_points: int


@dataclass
class DecayFit:
    log_intercept: float
    rho_hat: float
    r_squared: float
    H_range: tuple
    slope: float = 0.0


def ols(x, y):
    """Ordinary least squares line through (x, y) with coefficient of determination."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xm, ym = x.mean(), y.mean()
    sxx = float(np.sum((x - xm) ** 2))
    if sxx == 0.0:
        raise InsufficientDataError("regressor has zero spread")
    slope = float(np.sum((x - xm) * (y - ym))) / sxx
    intercept = float(ym - slope * xm)
    ss_res = float(np.sum((y - (intercept + slope * x)) ** 2))
    ss_tot = float(np.sum((y - ym) ** 2))
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res == 0.0 else 0.0
    else:
        r2 = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return LinearFit(slope, intercept, r2, x.size)


def _positive(points, what):
    keep, dropped = [], []
    for a, b in points:
        (keep if a > ZERO_EPS and b > ZERO_EPS else dropped).append((a, b))
    if dropped:
        log.info("dropping %d non-positive point(s) from %s fit: %s",
                 len(dropped), what, dropped)
    if len(keep) < 3:
        raise InsufficientDataError(
            f"{what} fit needs at least 3 positive points, got {len(keep)}")
    return keep


def fit_exponential_decay(points):
    """Fit log(eps_H) = log C + H log(rho) by least squares over (H, eps_H)."""
    pts = [(float(H), float(e)) for H, e in points]
    keep = []
    for H, e in pts:
        if e > ZERO_EPS:
            keep.append((H, e))
        else:
            log.info("dropping H=%g with eps=%g from decay fit", H, e)
    if len(keep) < 3:
        raise InsufficientDataError(
            f"decay fit needs at least 3 positive points, got {len(keep)}")
    Hs = [h for h, _ in keep]
    fit = ols(Hs, np.log([e for _, e in keep]))
    return DecayFit(log_intercept=fit.intercept, rho_hat=math.exp(fit.slope),
                    r_squared=fit.r_squared, H_range=(min(Hs), max(Hs)),
                    slope=fit.slope)


def fit_gap_scaling(points):
    """Log-log least squares of cost gap against mismatch over (eps_H, gap_H)."""
    keep = _positive([(float(e), float(g)) for e, g in points], "gap scaling")
    return ols(np.log([e for e, _ in keep]), np.log([g for _, g in keep]))
