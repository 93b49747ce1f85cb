"""Run one registry entry: replications in a thread pool, aggregation in order."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor

from .config import ExperimentConfig
from .experiments import get_experiment
from .report import RiskReport, summarize_records

__all__ = ["run_experiment"]


def run_experiment(cfg: ExperimentConfig) -> RiskReport:
    """Deterministic for a fixed config: replication ``r`` draws only from its
    own stream, and records are concatenated in replication order whatever
    the number of threads."""
    exp = get_experiment(cfg.experiment)
    ctx = exp.context(cfg)
    t0 = time.perf_counter()
    exp.prepare(ctx)
    reps = range(ctx.reps)
    if cfg.threads == 1:
        per_rep = [exp.replicate(ctx, r) for r in reps]
    else:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            per_rep = list(pool.map(lambda r: exp.replicate(ctx, r), reps))
    records = [rec for block in per_rep for rec in block]
    checks, extras = exp.evaluate(ctx, records)
    resolved = cfg.to_dict()
    resolved.update(n=ctx.n, reps=ctx.reps, estimators=list(ctx.estimators), params=ctx.params)
    return RiskReport(exp.name, resolved, records, summarize_records(records), list(checks), extras,
                      time.perf_counter() - t0)
