"""Closed-loop LQG rollouts with passive finite-memory filters."""

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import DivergenceError, ShapeError
from .filtering import (WindowFilter, _predict_cov, _predict_mean, _update_cov,
                        _update_mean)
from .gaussian import GaussianBelief, sqrt_psd, w2_from_moments

DIVERGENCE_LIMIT = 1e12
STREAMS = ("initial_state", "process_noise", "observation_noise")


def noise_streams(seed):
    """Independent named generators derived from one root seed.

    Each stream is a Philox (counter-based) generator keyed by its own child
    of the seed sequence, so extra draws on one stream never shift another.
    """
    children = np.random.SeedSequence(int(seed)).spawn(len(STREAMS))
    return {name: np.random.Generator(np.random.Philox(ss))
            for name, ss in zip(STREAMS, children)}


@dataclass(eq=False)
class TrajectoryRecord:
    """Per-step log of one rollout.

    Arrays are indexed by time: states/observations/beliefs have T + 1 rows,
    inputs has T rows. ``terminal_input`` is the policy output at time T,
    needed by the discounted cost sum that runs through t = T.
    """

    seed: int
    horizon: int
    H_list: tuple
    states: np.ndarray
    observations: np.ndarray
    inputs: np.ndarray
    terminal_input: np.ndarray
    true_means: np.ndarray
    true_covs: np.ndarray
    fm_means: dict
    fm_covs: dict
    obs_only_means: dict = field(default_factory=dict)
    obs_only_covs: dict = field(default_factory=dict)
    _w2_cache: dict = field(default_factory=dict, repr=False)

    def input_at(self, t):
        return self.inputs[t] if t < self.horizon else self.terminal_input

    def true_belief(self, t):
        return GaussianBelief(self.true_means[t], self.true_covs[t])

    def fm_belief(self, H, t):
        return GaussianBelief(self.fm_means[H][t], self.fm_covs[H][t])

    def obs_only_belief(self, H, t):
        return GaussianBelief(self.obs_only_means[H][t], self.obs_only_covs[H][t])

    def w2_profile(self, H, which="fm"):
        """W2(b_t, b_hat_t) for t = 0..T against the fm or obs-only family."""
        key = (which, H)
        if key not in self._w2_cache:
            if which == "fm":
                means, covs = self.fm_means[H], self.fm_covs[H]
            elif which == "obs":
                means, covs = self.obs_only_means[H], self.obs_only_covs[H]
            else:
                raise ValueError(f"unknown belief family {which!r}")
            self._w2_cache[key] = np.array(
                [w2_from_moments(self.true_means[t], self.true_covs[t],
                                 means[t], covs[t])
                 for t in range(self.horizon + 1)])
        return self._w2_cache[key]


def rollout(model, gain, H_list, T, seed, obs_only=False):
    """Simulate the plant under u_t = -K m_t and log every belief family.

    The true Kalman belief drives the controller. For every H in ``H_list``
    the window-restart belief is rebuilt from the realized window at each t
    and evaluated passively; it never feeds back into the inputs.
    """
    H_list = tuple(int(h) for h in H_list)
    if T < 1:
        raise ValueError(f"horizon must be >= 1, got {T}")
    if not H_list:
        raise ValueError("H_list must be nonempty")
    if list(H_list) != sorted(set(H_list)) or H_list[0] < 0:
        raise ValueError(f"H_list must be sorted, distinct and nonnegative: {H_list}")
    K = np.atleast_2d(np.asarray(gain.K, dtype=float))
    if K.shape != (model.m, model.n):
        raise ShapeError(f"gain has shape {K.shape}, expected {(model.m, model.n)}")

    n, m, p = model.n, model.m, model.p
    rng = noise_streams(seed)
    x = model.prior_mean + sqrt_psd(model.prior_cov) @ rng["initial_state"].standard_normal(n)
    W = rng["process_noise"].standard_normal((T, n)) @ sqrt_psd(model.sigma_w).T
    V = rng["observation_noise"].standard_normal((T + 1, p)) @ sqrt_psd(model.sigma_v).T

    xs = np.empty((T + 1, n))
    ys = np.empty((T + 1, p))
    us = np.empty((T, m))
    means = np.empty((T + 1, n))
    covs = np.empty((T + 1, n, n))

    # the true filter at t = 0 is the boundary update of the prior with y_0
    P_pred = model.prior_cov
    m_pred = model.prior_mean
    for t in range(T + 1):
        if t > 0:
            x = model.A @ x + model.B @ us[t - 1] + W[t - 1]
        peak = float(np.max(np.abs(x)))
        if not np.isfinite(peak) or peak > DIVERGENCE_LIMIT:
            raise DivergenceError(seed, t, peak)
        xs[t] = x
        ys[t] = model.C @ x + V[t]
        if t > 0:
            b = GaussianBelief(means[t - 1], covs[t - 1])
            m_pred = _predict_mean(model, b.mean, us[t - 1])
            P_pred = _predict_cov(model, b.cov)
        k_gain, P = _update_cov(model, P_pred)
        b = GaussianBelief(_update_mean(model, m_pred, k_gain, ys[t]), P)
        means[t] = b.mean
        covs[t] = b.cov
        if t < T:
            us[t] = -K @ means[t]
    terminal_input = -K @ means[T]

    window = WindowFilter(model, min(max(H_list), T))
    zeros = np.zeros((T, m))
    fm_means, fm_covs, oo_means, oo_covs = {}, {}, {}, {}
    for H in H_list:
        fm_means[H], fm_covs[H] = _replay_all(window, ys, us, H, T)
        if obs_only:
            oo_means[H], oo_covs[H] = _replay_all(window, ys, zeros, H, T)

    return TrajectoryRecord(
        seed=int(seed), horizon=T, H_list=H_list, states=xs, observations=ys,
        inputs=us, terminal_input=terminal_input, true_means=means, true_covs=covs,
        fm_means=fm_means, fm_covs=fm_covs,
        obs_only_means=oo_means, obs_only_covs=oo_covs)


def _replay_all(window, ys, us, H, T):
    n = window.model.n
    means = np.empty((T + 1, n))
    covs = np.empty((T + 1, n, n))
    for t in range(T + 1):
        s = max(0, t - H)
        means[t] = window.mean(ys[s:t + 1], us[s:t])
        covs[t] = window.covs[t - s]
    return means, covs


TRAJECTORY_COLUMNS_DOC = (
    "t, x_1..x_n, y_1..y_p, u_1..u_m, m_1..m_n, trace_P, w2_H<H> per H")


def trajectory_columns(record):
    n = record.states.shape[1]
    p = record.observations.shape[1]
    m = record.inputs.shape[1] if record.inputs.size else record.terminal_input.shape[0]
    cols = ["t"]
    cols += [f"x_{i + 1}" for i in range(n)]
    cols += [f"y_{i + 1}" for i in range(p)]
    cols += [f"u_{i + 1}" for i in range(m)]
    cols += [f"m_{i + 1}" for i in range(n)]
    cols.append("trace_P")
    cols += [f"w2_H{H}" for H in record.H_list]
    return cols


def write_trajectory_csv(record, path):
    """Dump one rollout: one row per t; u at t = T is the terminal input."""
    profiles = [record.w2_profile(H) for H in record.H_list]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(trajectory_columns(record))
        for t in range(record.horizon + 1):
            row = [t]
            row += [repr(float(v)) for v in record.states[t]]
            row += [repr(float(v)) for v in record.observations[t]]
            row += [repr(float(v)) for v in record.input_at(t)]
            row += [repr(float(v)) for v in record.true_means[t]]
            row.append(repr(float(np.trace(record.true_covs[t]))))
            row += [repr(float(prof[t])) for prof in profiles]
            writer.writerow(row)
