"""Run every registry entry (or a chosen subset) and print its checks.

    python3 scripts/run_all.py --reps 20 --out results
    python3 scripts/run_all.py gaussian_submodel pathological_mle
"""

import argparse
import sys

from rhoest.harness.config import ExperimentConfig
from rhoest.harness.experiments import REGISTRY
from rhoest.harness.report import write_report
from rhoest.harness.runner import run_experiment


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("experiments", nargs="*", help="registry names (default: all)")
    p.add_argument("--reps", type=int, help="override each entry's replication count")
    p.add_argument("--seed", type=int, default=20240917)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default="results")
    args = p.parse_args(argv)
    failed = 0
    for name in args.experiments or list(REGISTRY):
        cfg = ExperimentConfig(name, reps=args.reps, seed=args.seed, threads=args.threads, out_dir=args.out)
        rep = run_experiment(cfg)
        write_report(rep, args.out)
        print(f"{name}: {len(rep.records)} records in {rep.wall_time:.1f} s")
        for c in rep.checks:
            failed += not c.passed
            print(f"  {'PASS' if c.passed else 'FAIL'}  {c.name}: {c.observed:.6g} vs {c.bound:.6g} {c.note}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
