"""Replication records, Monte Carlo summaries and their on-disk formats."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

__all__ = ["Record", "RiskReport", "Check", "estimate_risk", "records_csv", "write_report", "CSV_HEADER"]

CSV_HEADER = (
    "experiment",
    "setting",
    "rep",
    "seed",
    "estimator",
    "estimate",
    "h2_loss",
    "sq_loss",
    "abs_loss",
    "flags",
)

LOSSES = ("h2_loss", "sq_loss", "abs_loss")


@dataclass
class Record:
    """One estimator's outcome in one replication of one setting."""

    experiment: str
    setting: str
    rep: int
    seed: int
    estimator: str
    estimate: str
    h2_loss: float | None = None
    sq_loss: float | None = None
    abs_loss: float | None = None
    flags: dict = field(default_factory=dict)

    def flag(self, name: str) -> int:
        return int(self.flags.get(name, 0))

    def row(self) -> list[str]:
        def num(v):
            return "" if v is None else repr(float(v))

        flags = ";".join(f"{k}={int(v)}" for k, v in sorted(self.flags.items()))
        return [self.experiment, self.setting, str(self.rep), str(self.seed), self.estimator,
                self.estimate, num(self.h2_loss), num(self.sq_loss), num(self.abs_loss), flags]


def format_estimate(value) -> str:
    """Shortest round-trip text for a scalar or ``;``-joined vector; ``nan`` for none."""
    if value is None:
        return "nan"
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    return ";".join(repr(float(v)) for v in arr)


def _nearest_rank(sorted_vals: np.ndarray, q: float) -> float:
    k = max(1, math.ceil(q * sorted_vals.size))
    return float(sorted_vals[k - 1])


def estimate_risk(records: Iterable[float]) -> dict:
    """Mean, unbiased sd, standard error ``sd / sqrt(reps)`` and nearest-rank
    quantiles 0.5, 0.9, 0.99 of a list of losses. A single value has
    ``nan`` spread."""
    v = np.asarray([float(r) for r in records], dtype=float)
    if v.size == 0:
        raise ValueError("no records to summarize")
    sd = float(np.std(v, ddof=1)) if v.size > 1 else math.nan
    s = np.sort(v)
    return {
        "reps": int(v.size),
        "mean": math.fsum(v) / v.size,
        "sd": sd,
        "se": sd / math.sqrt(v.size) if v.size > 1 else math.nan,
        "q50": _nearest_rank(s, 0.5),
        "q90": _nearest_rank(s, 0.9),
        "q99": _nearest_rank(s, 0.99),
    }


@dataclass
class Check:
    """An observed quantity compared with its bound."""

    name: str
    observed: float
    bound: float
    passed: bool
    note: str = ""


@dataclass
class RiskReport:
    experiment: str
    config: dict
    records: list[Record]
    summary: dict
    checks: list[Check] = field(default_factory=list)
    extras: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def summarize_records(records: Sequence[Record]) -> dict:
    """``{setting: {estimator: {loss: estimate_risk, flags: counts}}}``."""
    groups: dict[str, dict[str, list[Record]]] = {}
    for r in records:
        groups.setdefault(r.setting, {}).setdefault(r.estimator, []).append(r)
    out: dict = {}
    for setting, by_est in groups.items():
        out[setting] = {}
        for est, rs in by_est.items():
            entry: dict = {}
            for loss in LOSSES:
                vals = [getattr(r, loss) for r in rs if getattr(r, loss) is not None]
                if vals and all(math.isfinite(x) for x in vals):
                    entry[loss] = estimate_risk(vals)
                elif vals:
                    entry[loss] = {"reps": len(vals), "non_finite": sum(not math.isfinite(x) for x in vals)}
            names = sorted({k for r in rs for k in r.flags})
            if names:
                entry["flags"] = {k: sum(r.flag(k) for r in rs) for k in names}
            out[setting][est] = entry
    return out


def records_csv(records: Sequence[Record]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else repr(f)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


def write_report(report: RiskReport, out_dir) -> Path:
    """Write ``records.csv`` and ``summary.json`` under ``out_dir/<experiment>``."""
    d = Path(out_dir) / report.experiment
    d.mkdir(parents=True, exist_ok=True)
    with open(d / "records.csv", "w", encoding="utf-8", newline="") as f:
        f.write(records_csv(report.records))
    payload = {
        "experiment": report.experiment,
        "config": report.config,
        "summary": report.summary,
        "checks": [asdict(c) for c in report.checks],
        "all_checks_passed": report.passed,
        "extras": report.extras,
        "wall_time_s": report.wall_time,
    }
    with open(d / "summary.json", "w", encoding="utf-8", newline="\n") as f:
        json.dump(_jsonable(payload), f, indent=2, sort_keys=False)
        f.write("\n")
    return d
