"""How often the altered density version sends maximum likelihood to X_(n).

The exotic branch beats the sample mean roughly when X_(n)^2 > log n, so
the frequency approaches one only slowly; this prints the Monte Carlo
frequency next to 1 - Phi(sqrt(log n))^n for a range of sample sizes.

    python3 scripts/pathological_trace.py --reps 2000
"""

import argparse

from rhoest.harness.config import ExperimentConfig
from rhoest.harness.runner import run_experiment


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--reps", type=int, default=1000)
    p.add_argument("--seed", type=int, default=20240917)
    p.add_argument("--sizes", type=int, nargs="+", default=[10, 30, 100, 400, 1000, 10_000])
    args = p.parse_args(argv)
    first, rest = args.sizes[0], args.sizes[1:]
    rep = run_experiment(ExperimentConfig("pathological_mle", n=first, reps=args.reps, seed=args.seed,
                                          params={"extra_n": rest}))
    print(f"{'n':>7}  {'frequency':>9}  {'approx':>7}")
    for setting, v in rep.extras.items():
        print(f"{setting[2:]:>7}  {v['fraction']:9.3f}  {v['approximation']:7.3f}")


if __name__ == "__main__":
    main()
