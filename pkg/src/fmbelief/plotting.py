"""SVG figures for sweep reports.

Output is written with a fixed SVG hash salt and no date stamp so the
files are stable across runs.
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "svg.hashsalt": "fmbelief",
    "svg.fonttype": "path",
    "font.size": 10,
    "axes.labelsize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "lines.linewidth": 1.4,
    "figure.figsize": (5.0, 3.4),
}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def fig_eps_vs_H(report, path):
    H = np.array([r["H"] for r in report.rows], dtype=float)
    eps = np.array([r["eps_mean"] for r in report.rows])
    err = np.array([r["eps_stderr"] for r in report.rows])
    keep = eps > 0
    fig, ax = plt.subplots()
    ax.errorbar(H[keep], eps[keep], yerr=err[keep], fmt="o", color="C0",
                capsize=3, label=r"$\hat\varepsilon_H$")
    fit = report.decay_fit
    if fit is not None:
        hh = np.linspace(H[keep].min(), H[keep].max(), 100)
        ax.plot(hh, np.exp(fit.log_intercept + fit.slope * hh), "--", color="C1",
                label=rf"fit $\hat\rho={fit.rho_hat:.3f}$, $R^2={fit.r_squared:.3f}$")
    ax.set_yscale("log")
    ax.set_xlabel("memory length $H$")
    ax.set_ylabel(r"belief mismatch $\hat\varepsilon_H$")
    ax.legend(frameon=False)
    _save(fig, path)


def fig_gap_vs_eps(report, path):
    eps = np.array([r["eps_mean"] for r in report.rows])
    gap = np.array([r["gap"] for r in report.rows])
    keep = (eps > 0) & (gap > 0)
    fig, ax = plt.subplots()
    ax.loglog(eps[keep], gap[keep], "o", color="C0", label="sweep points")
    for r in report.rows:
        if r["eps_mean"] > 0 and r["gap"] > 0:
            ax.annotate(f"H={r['H']}", (r["eps_mean"], r["gap"]), fontsize=7,
                        xytext=(3, 3), textcoords="offset points")
    fit = report.gap_fit
    if fit is not None:
        ee = np.geomspace(eps[keep].min(), eps[keep].max(), 100)
        ax.loglog(ee, np.exp(fit.intercept) * ee ** fit.slope, "--", color="C1",
                  label=f"slope {fit.slope:.3f}, $R^2={fit.r_squared:.3f}$")
    ax.set_xlabel(r"belief mismatch $\hat\varepsilon_H$")
    ax.set_ylabel(r"cost gap $|J-\hat J_H|$")
    ax.legend(frameon=False)
    _save(fig, path)


def fig_w2_time(report, path, H_values=None):
    if H_values is None:
        H_values = [H for H, est in report.estimates.items() if np.any(est.per_time_mean > 0)]
    fig, ax = plt.subplots()
    for i, H in enumerate(H_values):
        est = report.estimates[H]
        t = np.arange(est.per_time_mean.size)
        mu, se = est.per_time_mean, est.per_time_stderr
        color = f"C{i % 10}"
        ax.plot(t, mu, color=color, label=f"H={H}")
        ax.fill_between(t, mu - se, mu + se, color=color, alpha=0.25, linewidth=0)
    ax.set_xlabel("time step $t$")
    ax.set_ylabel(r"$W_2(b_t,\hat b_t^{(H)})$")
    if H_values:
        ax.legend(frameon=False, ncol=2)
    _save(fig, path)


FIGURES = (
    ("fig1_eps_vs_H.svg", fig_eps_vs_H),
    ("fig2_gap_vs_eps.svg", fig_gap_vs_eps),
    ("fig3_w2_time.svg", fig_w2_time),
)


def write_figures(report, out_dir):
    paths = []
    with plt.rc_context(STYLE):
        for name, draw in FIGURES:
            path = os.path.join(out_dir, name)
            draw(report, path)
            paths.append(path)
    return paths
