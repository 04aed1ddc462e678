"""H-sweep orchestration and report files."""

import csv
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .control import lqr_gain, zero_gain
from .errors import InsufficientDataError
from .metrics import (cost_report, estimate_epsilon, fit_exponential_decay,
                      fit_gap_scaling, fsum_mean, fsum_stderr)
from .simulation import rollout

log = logging.getLogger(__name__)

SWEEP_COLUMNS = ("H", "eps_mean", "eps_stderr", "J_true", "J_fm", "gap")
FITS_COLUMNS = ("fit", "slope", "intercept", "rho_hat", "r_squared")
PROP1_COLUMNS = ("H", "w2_io_mean", "w2_obs_only_mean", "diff_mean", "diff_stderr")


def fmt(value):
    """Shortest round-trip decimal text for CSV cells."""
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return repr(float(value))


def build_controller(cfg, model):
    if cfg.open_loop:
        return zero_gain(model)
    gain = lqr_gain(model)
    if not gain.spectral_radius < 1.0:
        raise RuntimeError(
            f"closed loop is not stable (spectral radius {gain.spectral_radius:.6f})")
    return gain


def _simulate(job):
    model, gain, H_list, T, seed, obs_only = job
    record = rollout(model, gain, H_list, T, seed, obs_only=obs_only)
    for H in H_list:
        record.w2_profile(H)
        if obs_only:
            record.w2_profile(H, "obs")
    return record


def simulate_all(cfg, model, gain, obs_only=False):
    """One rollout per seed, all H computed on the shared IO sequence.

    Results come back in seed order whatever ``cfg.jobs`` is, so the
    downstream reductions see identical inputs serially or in parallel.
    """
    jobs = [(model, gain, tuple(cfg.h_list), cfg.horizon, cfg.rollout_seed(i), obs_only)
            for i in range(cfg.seeds)]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            return list(pool.map(_simulate, jobs))
    return [_simulate(job) for job in jobs]


@dataclass
class SweepReport:
    rows: list
    estimates: dict
    costs: object
    decay_fit: object
    gap_fit: object
    config_echo: str
    version: str = __version__
    wall_time: float = 0.0
    prop1_rows: list = field(default_factory=list)
    files: list = field(default_factory=list)
    records: list = None


def prop1_rows(records, H_list):
    """Paired per-seed comparison of IO-window and observation-only mismatch.

    The per-seed statistic is the time average of W2 to the true belief.
    """
    rows = []
    for H in H_list:
        io = [fsum_mean(r.w2_profile(H, "fm")) for r in records]
        oo = [fsum_mean(r.w2_profile(H, "obs")) for r in records]
        diff = [b - a for a, b in zip(io, oo)]
        rows.append({"H": H, "w2_io_mean": fsum_mean(io), "w2_obs_only_mean": fsum_mean(oo),
                     "diff_mean": fsum_mean(diff), "diff_stderr": fsum_stderr(diff)})
    return rows


def summarize(cfg, model, records):
    H_list = tuple(cfg.h_list)
    estimates = {H: estimate_epsilon(records, H, cfg.burn_in) for H in H_list}
    costs = cost_report(model, records, H_list, cfg.gamma)
    rows = [{"H": H, "eps_mean": estimates[H].epsilon_hat,
             "eps_stderr": estimates[H].epsilon_stderr,
             "J_true": costs.J, "J_fm": costs.J_hat[H], "gap": costs.gap[H]}
            for H in H_list]
    try:
        decay = fit_exponential_decay([(r["H"], r["eps_mean"]) for r in rows])
    except InsufficientDataError as exc:
        log.warning("no decay fit: %s", exc)
        decay = None
    try:
        gap = fit_gap_scaling([(r["eps_mean"], r["gap"]) for r in rows])
    except InsufficientDataError as exc:
        log.warning("no gap-scaling fit: %s", exc)
        gap = None
    return rows, estimates, costs, decay, gap


def run_sweep(cfg, write=True, keep_records=False):
    start = time.perf_counter()
    model = cfg.build_model()
    gain = build_controller(cfg, model)
    records = simulate_all(cfg, model, gain, obs_only=cfg.obs_only)
    rows, estimates, costs, decay, gap = summarize(cfg, model, records)
    report = SweepReport(rows=rows, estimates=estimates, costs=costs, decay_fit=decay,
                         gap_fit=gap, config_echo=cfg.echo())
    if cfg.obs_only:
        report.prop1_rows = prop1_rows(records, cfg.h_list)
    if keep_records:
        report.records = records
    report.wall_time = time.perf_counter() - start
    if write:
        report.files = write_sweep_files(report, cfg)
    return report


def run_prop1_demo(cfg, write=True):
    model = cfg.build_model()
    gain = build_controller(cfg, model)
    records = simulate_all(cfg, model, gain, obs_only=True)
    rows = prop1_rows(records, cfg.h_list)
    if write:
        os.makedirs(cfg.out_dir, exist_ok=True)
        write_csv(os.path.join(cfg.out_dir, "prop1.csv"), PROP1_COLUMNS, rows)
    return rows


def write_csv(path, columns, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([fmt(row[c]) for c in columns])


def fits_rows(report):
    rows = []
    d = report.decay_fit
    rows.append({"fit": "eps_decay",
                 "slope": d.slope if d else float("nan"),
                 "intercept": d.log_intercept if d else float("nan"),
                 "rho_hat": d.rho_hat if d else float("nan"),
                 "r_squared": d.r_squared if d else float("nan")})
    g = report.gap_fit
    rows.append({"fit": "gap_scaling",
                 "slope": g.slope if g else float("nan"),
                 "intercept": g.intercept if g else float("nan"),
                 "rho_hat": None,
                 "r_squared": g.r_squared if g else float("nan")})
    return rows


def write_sweep_files(report, cfg):
    out = cfg.out_dir
    os.makedirs(out, exist_ok=True)
    paths = []

    path = os.path.join(out, "sweep.csv")
    write_csv(path, SWEEP_COLUMNS, report.rows)
    paths.append(path)

    H_list = [r["H"] for r in report.rows]
    cols = ["t"] + [f"H{H}" for H in H_list]
    T = len(report.estimates[H_list[0]].per_time_mean) - 1
    rows = []
    for t in range(T + 1):
        row = {"t": t}
        row.update({f"H{H}": report.estimates[H].per_time_mean[t] for H in H_list})
        rows.append(row)
    path = os.path.join(out, "timeprofile.csv")
    write_csv(path, cols, rows)
    paths.append(path)

    path = os.path.join(out, "fits.csv")
    fits = fits_rows(report)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(FITS_COLUMNS)
        for row in fits:
            writer.writerow([row["fit"]] + [fmt(row[c]) for c in FITS_COLUMNS[1:]])
    paths.append(path)

    if report.prop1_rows:
        path = os.path.join(out, "prop1.csv")
        write_csv(path, PROP1_COLUMNS, report.prop1_rows)
        paths.append(path)

    path = os.path.join(out, "config.echo.txt")
    with open(path, "w") as fh:
        fh.write(f"# fmbelief {report.version}\n")
        fh.write(report.config_echo)
    paths.append(path)

    if cfg.plots:
        from .plotting import write_figures
        paths.extend(write_figures(report, out))
    return paths
