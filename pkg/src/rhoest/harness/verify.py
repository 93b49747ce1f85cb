"""Invariant and property sweeps behind ``rho verify``.

Every suite is deterministic (fixed seeds) and returns a list of
:class:`~rhoest.harness.report.Check`.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
from scipy import stats

from ..densities import Gaussian, HeavyTailP, UniformInterval, heavy_tail_cdf
from ..estimators import brute_force_oracle, rho_estimate
from ..hellinger import DiscreteDensity, affinity_discrete, hellinger2_discrete, quadrature_mass
from ..models import CandidateFamily, build_histogram_family, build_location_family
from ..psi import HALF_LOG, PSI1, PSI2, check_moment_inequalities, check_psi_axioms
from ..sampling import draw, open_uniforms, rng_stream
from .report import Check

__all__ = ["SUITES", "run_verify"]

VERIFY_SEED = 8675309


def psi_axioms() -> list[Check]:
    grid = np.logspace(-8, 8, 10_000)
    out = []
    for k in (PSI1, PSI2):
        r = check_psi_axioms(k, grid)
        out.append(Check(f"{k.variant}:antisymmetry", r.antisymmetry_defect, 1e-12, r.antisymmetry_defect <= 1e-12))
        out.append(Check(f"{k.variant}:monotone", r.monotonicity_violations, 0, r.monotonicity_violations == 0))
        out.append(Check(f"{k.variant}:range", r.range_violations, 0, r.range_violations == 0))
        for (lo, hi), (mn, mx), floor in zip(r.log_ratio_windows, r.log_ratio_windows.values(), (0.96, 0.86)):
            out.append(Check(f"{k.variant}:log_ratio[{lo:g},{hi:g}]", mn, floor, floor < mn and mx <= 1.0,
                             f"max {mx:.15g}"))
    return out


def random_triple(rng: np.random.Generator, size: int):
    """Three discrete laws on a common support, with some zero masses."""
    laws = []
    for _ in range(3):
        w = rng.exponential(size=size) * (rng.uniform(size=size) > 0.2)
        if w.sum() == 0:
            w[rng.integers(size)] = 1.0
        laws.append(DiscreteDensity.from_weights(w))
    return laws


def moment_inequalities(count: int = 10_000) -> list[Check]:
    rng = rng_stream(VERIFY_SEED, 1)
    worst = {PSI1.variant: math.inf, PSI2.variant: math.inf}
    for _ in range(count):
        r, q, q2 = random_triple(rng, int(rng.integers(1, 17)))
        for k in (PSI1, PSI2):
            rep = check_moment_inequalities(k, r, q, q2)
            worst[k.variant] = min(worst[k.variant], rep.slack_mean, rep.slack_var)
    out = [Check(f"{v}:moment_slack", s, -1e-10, s >= -1e-10) for v, s in worst.items()]
    try:
        check_moment_inequalities(HALF_LOG, *random_triple(rng, 3))
        out.append(Check("halflog:rejected", 0, 1, False))
    except ValueError:
        out.append(Check("halflog:rejected", 1, 1, True))
    return out


def random_instance(rng: np.random.Generator, case: int):
    """A small random family and dataset; ``case`` cycles through the
    dense Gaussian, uniform-location, histogram and free-interval paths."""
    m, n = int(rng.integers(1, 13)), int(rng.integers(1, 51))
    if case == 0:
        fam = CandidateFamily(tuple(Gaussian(rng.normal(), rng.uniform(0.5, 2.0)) for _ in range(m)))
        x = rng.normal(size=n)
    elif case == 1:
        th = np.sort(rng.choice(np.arange(-20, 20) / 10, m, replace=False))
        fam = build_location_family(UniformInterval(0.0, 1.0), th)
        x = np.round(rng.uniform(-2, 2, n), 1)  # rounding forces ties on the edges
    elif case == 2:
        full = build_histogram_family([0.0, 0.3, 0.5, 1.0], 0.25)
        fam = CandidateFamily(full.members[:m])
        x = rng.uniform(-0.2, 1.2, n)
    else:
        a, w = rng.uniform(-1, 0, m), rng.uniform(0.5, 2.0, m)
        fam = CandidateFamily(tuple(UniformInterval(lo, lo + d) for lo, d in zip(a, w)))
        x = rng.uniform(-1, 1, n)
    return fam, x


def oracle_equivalence(count: int = 200) -> list[Check]:
    rng = rng_stream(VERIFY_SEED, 2)
    bad = 0
    for it in range(count):
        fam, x = random_instance(rng, it % 4)
        for k in (PSI1, PSI2):
            if rho_estimate(x, fam, k).chosen_index != brute_force_oracle(x, fam, k).chosen_index:
                bad += 1
    return [Check("rho_estimate_matches_oracle", bad, 0, bad == 0, f"{2 * count} comparisons")]


def uniform_identity(count: int = 100) -> list[Check]:
    rng = rng_stream(VERIFY_SEED, 3)
    bad = 0
    for _ in range(count):
        th = np.unique(np.round(rng.uniform(-1, 2, int(rng.integers(2, 60))), 2))
        fam = build_location_family(UniformInterval(0.0, 1.0), th)
        x = rng.uniform(0, 1, int(rng.integers(1, 80))) + rng.normal(0, 0.3)
        counts = np.array([np.sum((t <= x) & (x <= t + 1)) for t in th])
        for k in (PSI1, PSI2):
            if rho_estimate(x, fam, k, method="dense").chosen_index != int(np.argmax(counts)):
                bad += 1
    return [Check("uniform_location_argmax_count", bad, 0, bad == 0)]


def hellinger_invariants(count: int = 1000) -> list[Check]:
    rng = rng_stream(VERIFY_SEED, 4)
    worst_id, worst_sym, bad_range, worst_tri = 0.0, 0.0, 0, -math.inf
    for _ in range(count):
        p, q, r = random_triple(rng, int(rng.integers(1, 17)))
        h = hellinger2_discrete(p, q)
        worst_id = max(worst_id, abs(h - (1.0 - affinity_discrete(p, q))))
        worst_sym = max(worst_sym, abs(h - hellinger2_discrete(q, p)))
        bad_range += not (0.0 <= h <= 1.0)
        tri = math.sqrt(h) - math.sqrt(hellinger2_discrete(p, r)) - math.sqrt(hellinger2_discrete(r, q))
        worst_tri = max(worst_tri, tri)
    return [
        Check("h2_equals_one_minus_affinity", worst_id, 1e-12, worst_id <= 1e-12),
        Check("h2_symmetric", worst_sym, 0.0, worst_sym == 0.0),
        Check("h2_in_unit_interval", bad_range, 0, bad_range == 0),
        Check("h_triangle_inequality", worst_tri, 1e-12, worst_tri <= 1e-12),
    ]


def heavy_tail_sampler() -> list[Check]:
    u = (np.arange(1000) + 0.5) / 1000
    rt = float(np.max(np.abs(heavy_tail_cdf(HeavyTailP().quantile(u)) - u)))
    mass = quadrature_mass(HeavyTailP())
    x = draw(HeavyTailP(), 100_000, rng_stream(VERIFY_SEED, 5))
    ks = float(stats.kstest(x, heavy_tail_cdf).statistic)
    uo = open_uniforms(rng_stream(VERIFY_SEED, 6), 100_000)
    return [
        Check("heavy_tail_quantile_cdf_roundtrip", rt, 1e-8, rt <= 1e-8),
        Check("heavy_tail_normalization", abs(mass - 1.0), 1e-9, abs(mass - 1.0) <= 1e-9),
        Check("heavy_tail_ks", ks, 0.01, ks < 0.01),
        Check("open_uniforms_interior", float(np.min(np.minimum(uo, 1 - uo))), 0.0,
              bool(np.all((uo > 0) & (uo < 1)))),
    ]


SUITES: dict[str, Callable[[], list[Check]]] = {
    "psi_axioms": psi_axioms,
    "moment_inequalities": moment_inequalities,
    "oracle_equivalence": oracle_equivalence,
    "uniform_identity": uniform_identity,
    "hellinger_invariants": hellinger_invariants,
    "heavy_tail_sampler": heavy_tail_sampler,
}


def run_verify(names=None) -> dict[str, list[Check]]:
    names = list(SUITES) if not names else list(names)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suites {unknown}")
    return {n: SUITES[n]() for n in names}
