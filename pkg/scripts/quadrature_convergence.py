"""Convergence of the singularity-aware midpoint rule on the heavy-tailed
translation pair and on the exponential truncation pair.

    python3 scripts/quadrature_convergence.py
"""

import math

from rhoest.densities import Exponential, HeavyTailP, TruncatedExponential
from rhoest.hellinger import hellinger2_analytic, hellinger2_quadrature, quadrature_mass


def main():
    print("mass of the heavy-tailed density")
    for cells in (10_000, 100_000, 1_000_000):
        print(f"  {cells:>9} cells  |mass - 1| = {abs(quadrature_mass(HeavyTailP(), cells=cells) - 1):.2e}")
    print("h2(P_0, P_0.1) for the heavy-tailed translation pair")
    prev = None
    for cells in (10_000, 100_000, 1_000_000, 4_000_000):
        v = hellinger2_quadrature(HeavyTailP(0.0), HeavyTailP(0.1), cells=cells, tail_bound=True)
        step = "" if prev is None else f"  change {abs(v - prev):.2e}"
        print(f"  {cells:>9} cells  {v:.12f}{step}")
        prev = v
    print("exponential against its truncation, quadrature minus closed form")
    for theta in (0.5, 1.0, 2.0):
        for T in (1.0, 3.0, 10.0):
            a, b = Exponential(theta), TruncatedExponential(theta, T)
            q = hellinger2_quadrature(a, b, cells=1_000_000, window=(0.0, T), tail_bound=True)
            exact = 1 - math.sqrt(1 - math.exp(-theta * T))
            print(f"  theta={theta:<4} T={T:<5} {q - hellinger2_analytic(a, b):+.1e}  closed form {exact:.6f}")


if __name__ == "__main__":
    main()
