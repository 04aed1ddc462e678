"""Command-line entry point: ``fmbelief sweep|prop1|rollout-dump``."""

import argparse
import logging
import os
import sys

from .config import PRESETS, load_config
from .errors import ConfigError, DivergenceError

log = logging.getLogger("fmbelief")


def _common(p):
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--out", help="output directory (overrides output.dir)")
    p.add_argument("--preset", choices=sorted(PRESETS), default="desk",
                   help="base profile applied before the config file (default: desk)")
    p.add_argument("--set", dest="overrides", action="append", default=[],
                   metavar="KEY=VALUE", help="override one config key; repeatable")
    p.add_argument("--seeds", type=int, help="number of random seeds")
    p.add_argument("--no-plots", action="store_true", help="skip SVG figures")
    p.add_argument("--jobs", type=int, help="worker processes for seed-level parallelism")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fmbelief",
        description="Finite-memory belief approximation experiments on an LQG double integrator.")
    sub = parser.add_subparsers(dest="command", required=True)
    _common(sub.add_parser("sweep", help="run the memory-length sweep and write reports"))
    _common(sub.add_parser("prop1", help="compare IO-window and observation-only beliefs"))
    dump = sub.add_parser("rollout-dump", help="write one trajectory CSV per rollout")
    _common(dump)
    return parser


def _load(args):
    direct = {"out_dir": args.out, "seeds": args.seeds, "jobs": args.jobs}
    if args.no_plots:
        direct["plots"] = False
    return load_config(args.config, preset=args.preset, overrides=args.overrides, **direct)


def cmd_sweep(cfg):
    from .experiment import run_sweep
    report = run_sweep(cfg)
    print(f"fmbelief {report.version}: {len(report.rows)} H values, {cfg.seeds} seeds, "
          f"T={cfg.horizon}, {report.wall_time:.1f}s")
    for row in report.rows:
        print(f"  H={row['H']:>4}  eps={row['eps_mean']:.6g} +- {row['eps_stderr']:.2g}"
              f"  gap={row['gap']:.6g}")
    if report.decay_fit:
        d = report.decay_fit
        print(f"  decay fit: rho_hat={d.rho_hat:.4f} R2={d.r_squared:.4f}")
    if report.gap_fit:
        g = report.gap_fit
        print(f"  gap scaling: slope={g.slope:.4f} R2={g.r_squared:.4f}")
    for path in report.files:
        print(f"  wrote {path}")
    return 0


def cmd_prop1(cfg):
    from .experiment import run_prop1_demo
    rows = run_prop1_demo(cfg)
    for row in rows:
        print(f"  H={row['H']:>4}  io={row['w2_io_mean']:.6g}  obs_only={row['w2_obs_only_mean']:.6g}"
              f"  diff={row['diff_mean']:.4g} +- {row['diff_stderr']:.2g}")
    print(f"  wrote {os.path.join(cfg.out_dir, 'prop1.csv')}")
    return 0


def cmd_rollout_dump(cfg, count):
    from .experiment import build_controller
    from .simulation import rollout, write_trajectory_csv
    model = cfg.build_model()
    gain = build_controller(cfg, model)
    os.makedirs(cfg.out_dir, exist_ok=True)
    for i in range(count):
        record = rollout(model, gain, cfg.h_list, cfg.horizon, cfg.rollout_seed(i))
        path = os.path.join(cfg.out_dir, f"rollout_{i:03d}.csv")
        write_trajectory_csv(record, path)
        print(f"  wrote {path}")
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _load(args)
        if args.command == "sweep":
            return cmd_sweep(cfg)
        if args.command == "prop1":
            return cmd_prop1(cfg)
        return cmd_rollout_dump(cfg, args.seeds or 1)
    except ConfigError as exc:
        print(f"fmbelief: config error: {exc}", file=sys.stderr)
        return 2
    except DivergenceError as exc:
        print(f"fmbelief: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
