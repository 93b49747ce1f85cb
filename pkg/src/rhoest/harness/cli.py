"""``rho`` command line: list, run and verify.

Exit codes: 0 success, 2 configuration error, 3 failed check in ``verify``.
"""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, ExperimentConfig, load_config
from .experiments import REGISTRY
from .report import write_report
from .runner import run_experiment
from .verify import SUITES, run_verify

EXIT_OK, EXIT_CONFIG, EXIT_VERIFY = 0, 2, 3


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rho", description="rho-estimator experiments")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("list", help="show the experiment registry")
    run = sub.add_parser("run", help="run one experiment and write records.csv and summary.json")
    run.add_argument("experiment")
    run.add_argument("--config", help="JSON config file; flags below override it")
    run.add_argument("--reps", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--threads", type=int)
    run.add_argument("--out", help="output directory (default: results)")
    ver = sub.add_parser("verify", help="run the invariant and property sweeps")
    ver.add_argument("suites", nargs="*", help=f"subset of {', '.join(SUITES)}")
    return p


def _cmd_list() -> int:
    width = max(map(len, REGISTRY))
    for name, e in REGISTRY.items():
        print(f"{name:<{width}}  n={e.n:<6} reps={e.reps:<6} {e.summary}")
    return EXIT_OK


def _cmd_run(args) -> int:
    if args.config:
        cfg = load_config(args.config)
        if cfg.experiment != args.experiment:
            raise ConfigError(f"config is for {cfg.experiment!r}, not {args.experiment!r}")
    else:
        cfg = ExperimentConfig(args.experiment)
    cfg = cfg.override(reps=args.reps, seed=args.seed, threads=args.threads, out_dir=args.out)
    report = run_experiment(cfg)
    path = write_report(report, cfg.out_dir)
    for c in report.checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: observed {c.observed:.6g}, bound {c.bound:.6g}"
              + (f" ({c.note})" if c.note else ""))
    print(f"wrote {path}/records.csv and {path}/summary.json ({len(report.records)} records, "
          f"{report.wall_time:.1f} s)")
    return EXIT_OK


def _cmd_verify(args) -> int:
    unknown = [s for s in args.suites if s not in SUITES]
    if unknown:
        raise ConfigError(f"unknown suites {unknown}; choose from {list(SUITES)}")
    failed = 0
    for suite, checks in run_verify(args.suites).items():
        for c in checks:
            failed += not c.passed
            print(f"{'PASS' if c.passed else 'FAIL'}  {suite}/{c.name}: observed {c.observed:.6g}, "
                  f"bound {c.bound:.6g}" + (f" ({c.note})" if c.note else ""))
    print("all checks passed" if not failed else f"{failed} checks failed")
    return EXIT_OK if not failed else EXIT_VERIFY


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "list":
            return _cmd_list()
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_verify(args)
    except ConfigError as e:
        print(f"rho: config error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
