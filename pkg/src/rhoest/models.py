"""Finite candidate families and penalized collections of them.

Continuous models are always discretized: a location model becomes a grid of
shifts, a histogram model a lattice on the probability simplex. Member order
is the tie-breaking order of every estimator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable, Iterator, Sequence

import numpy as np

from .densities import (
    Density,
    PiecewiseConstant,
    RegressionConditional,
    UniformInterval,
    affine_features,
)

__all__ = [
    "DimensionBound",
    "CandidateFamily",
    "PenalizedCollection",
    "build_location_family",
    "build_uniform_scale_family",
    "simplex_lattice",
    "build_histogram_family",
    "build_decreasing_family",
    "build_regression_dictionary",
    "uniform_delta",
    "assign_penalties",
    "LatticeTooLarge",
]

DEFAULT_MEMBER_CAP = 250_000


class LatticeTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class DimensionBound:
    """Penalty-relevant upper bound on the model dimension, as a function of n.

    ``linear``: ``d log(e n / d)``; ``shape``: ``d log_+^3(n / d)``;
    ``constant``: ``d``.
    """

    d: float
    rule: str = "linear"

    def __post_init__(self):
        if self.d < 0:
            raise ValueError("dimension must be nonnegative")
        if self.rule not in ("linear", "shape", "constant"):
            raise ValueError(f"unknown dimension rule {self.rule!r}")

    def __call__(self, n: int) -> float:
        d = float(self.d)
        if d == 0 or self.rule == "constant":
            return d
        if self.rule == "linear":
            return d * math.log(math.e * n / d)
        return d * max(math.log(n / d), 0.0) ** 3


@dataclass(frozen=True)
class CandidateFamily:
    """An ordered, nonempty, finite list of densities on one observation space.

    ``params`` optionally records the parameter behind each member (a shift,
    a weight vector, a coefficient vector) for reporting.
    """

    members: tuple
    label: str = ""
    dimension_bound: DimensionBound | None = None
    params: tuple | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if not self.members:
            raise ValueError("a candidate family needs at least one member")
        if self.params is not None:
            object.__setattr__(self, "params", tuple(self.params))
            if len(self.params) != len(self.members):
                raise ValueError("params must align with members")
        if isinstance(self.dimension_bound, (int, float)):
            object.__setattr__(self, "dimension_bound", DimensionBound(float(self.dimension_bound)))

    def __len__(self) -> int:
        return len(self.members)

    def __getitem__(self, i):
        return self.members[i]

    def __iter__(self) -> Iterator[Density]:
        return iter(self.members)

    def index(self, member: Density) -> int:
        return self.members.index(member)

    def bound(self, n: int) -> float:
        if self.dimension_bound is None:
            raise ValueError(f"family {self.label!r} has no dimension bound")
        return self.dimension_bound(n)

    @cached_property
    def structure(self) -> str:
        """``uniform``, ``step`` (piecewise-constant on shared edges) or ``general``."""
        ms = self.members
        if all(type(m) is UniformInterval for m in ms):
            return "uniform"
        if all(type(m) is PiecewiseConstant for m in ms) and all(m.edges == ms[0].edges for m in ms):
            return "step"
        return "general"

    @cached_property
    def step_levels(self) -> np.ndarray:
        """``(cells, members)`` level matrix of a ``step`` family."""
        return np.array([m.levels for m in self.members], dtype=float).T

    @cached_property
    def intervals(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(a, b, height)`` arrays of a ``uniform`` family."""
        a = np.array([m.a for m in self.members], dtype=float)
        b = np.array([m.b for m in self.members], dtype=float)
        h = np.array([m.height for m in self.members], dtype=float)
        return a, b, h


@dataclass(frozen=True)
class PenalizedCollection:
    """Families with prior weights ``exp(-delta[m])`` and penalties ``pen[m]``."""

    families: tuple
    delta: tuple
    kappa: float | None = None
    pen: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "families", tuple(self.families))
        object.__setattr__(self, "delta", tuple(float(d) for d in self.delta))
        if not self.families:
            raise ValueError("a collection needs at least one family")
        if len(self.delta) != len(self.families):
            raise ValueError("one delta per family")
        if any(d < 0 or math.isnan(d) for d in self.delta):
            raise ValueError("delta values must be nonnegative")
        if self.pen is not None:
            object.__setattr__(self, "pen", tuple(float(p) for p in self.pen))
            if len(self.pen) != len(self.families):
                raise ValueError("one penalty per family")

    @property
    def weight_sum(self) -> float:
        return math.fsum(math.exp(-d) for d in self.delta)

    @cached_property
    def offsets(self) -> np.ndarray:
        sizes = [len(f) for f in self.families]
        return np.concatenate([[0], np.cumsum(sizes)])

    def locate(self, flat: int) -> tuple[int, int]:
        """(family, member) indices of a position in the concatenated member list."""
        f = int(np.searchsorted(self.offsets, flat, side="right") - 1)
        return f, int(flat - self.offsets[f])


def build_location_family(base: Density, thetas: Sequence[float], label: str | None = None) -> CandidateFamily:
    """Shifted copies ``base(. - theta)`` in the order of ``thetas``."""
    t = np.asarray(thetas, dtype=float)
    if t.size == 0:
        raise ValueError("empty parameter grid")
    if np.any(np.diff(t) <= 0):
        raise ValueError("thetas must be strictly increasing")
    members = tuple(base.shifted(float(v)) for v in t)
    return CandidateFamily(members, label or f"location[{type(base).__name__}]",
                           DimensionBound(1.0), params=tuple(float(v) for v in t))


def build_uniform_scale_family(thetas: Sequence[float]) -> CandidateFamily:
    """``U[0, theta]`` for each positive ``theta`` in the grid."""
    t = np.asarray(thetas, dtype=float)
    if t.size == 0:
        raise ValueError("empty parameter grid")
    if np.any(t <= 0) or np.any(np.diff(t) <= 0):
        raise ValueError("thetas must be positive and strictly increasing")
    members = tuple(UniformInterval(0.0, float(v)) for v in t)
    return CandidateFamily(members, "uniform-scale", DimensionBound(1.0), params=tuple(float(v) for v in t))


def _lattice_size(cells: int, total: int) -> int:
    return math.comb(total + cells - 1, cells - 1)


def simplex_lattice(cells: int, total: int) -> Iterator[tuple[int, ...]]:
    """Integer vectors of length ``cells`` summing to ``total``.

    Ordered with the first coordinate descending, then the second, and so on,
    so ``(2, 0), (1, 1), (0, 2)`` for two cells.
    """
    if cells == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in simplex_lattice(cells - 1, total - first):
            yield (first,) + rest


def _lattice_total(step: float) -> int:
    if not (0 < step <= 1):
        raise ValueError("lattice step must lie in (0, 1]")
    k = round(1.0 / step)
    if abs(k * step - 1.0) > 1e-9:
        raise ValueError(f"step {step} does not divide 1 into an integer lattice")
    return k


def _check_partition(partition) -> np.ndarray:
    e = np.asarray(partition, dtype=float)
    if e.ndim != 1 or e.size < 2:
        raise ValueError("a partition needs at least 2 breakpoints")
    if np.any(np.diff(e) <= 0):
        raise ValueError("breakpoints must be strictly increasing")
    return e


def _step_member(edges: np.ndarray, counts: tuple[int, ...], total: int) -> PiecewiseConstant:
    widths = np.diff(edges)
    levels = tuple(c / total / w for c, w in zip(counts, widths))
    return PiecewiseConstant(tuple(edges), levels)


def build_histogram_family(
    partition, weight_grid_step: float, cap: int = DEFAULT_MEMBER_CAP, label: str | None = None
) -> CandidateFamily:
    """Every piecewise-constant density on ``partition`` whose cell masses
    are multiples of ``weight_grid_step``; ``params`` holds the integer
    multiples."""
    e = _check_partition(partition)
    cells = e.size - 1
    total = _lattice_total(weight_grid_step)
    size = _lattice_size(cells, total)
    if size > cap:
        raise LatticeTooLarge(f"histogram lattice has {size} members, cap is {cap}")
    counts = list(simplex_lattice(cells, total))
    members = tuple(_step_member(e, c, total) for c in counts)
    return CandidateFamily(members, label or f"histogram[{cells}]",
                           DimensionBound(float(cells)), params=tuple(counts))


def _non_increasing(edges: np.ndarray, counts) -> bool:
    w = np.diff(edges)
    # c_j / w_j >= c_{j+1} / w_{j+1}, cross-multiplied to stay exact for equal widths
    return all(counts[j] * w[j + 1] >= counts[j + 1] * w[j] for j in range(len(counts) - 1))


def build_decreasing_family(
    grid, level_lattice_step: float, cap: int = DEFAULT_MEMBER_CAP, label: str | None = None
) -> CandidateFamily:
    """The members of the histogram lattice with non-increasing levels."""
    e = _check_partition(grid)
    if e[0] < 0:
        raise ValueError("decreasing densities live on [0, inf)")
    cells = e.size - 1
    total = _lattice_total(level_lattice_step)
    size = _lattice_size(cells, total)
    if size > cap:
        raise LatticeTooLarge(f"histogram lattice has {size} members, cap is {cap}")
    counts = [c for c in simplex_lattice(cells, total) if _non_increasing(e, c)]
    members = tuple(_step_member(e, c, total) for c in counts)
    return CandidateFamily(members, label or f"decreasing[{cells}]",
                           DimensionBound(float(cells), "shape"), params=tuple(counts))


def uniform_delta(k: int) -> tuple[float, ...]:
    """Equal prior weights ``1/k``."""
    return (math.log(k),) * k


def _normalize_delta(delta: Sequence[float]) -> tuple[float, ...]:
    d = np.asarray(delta, dtype=float)
    # -log of weights exp(-d) / sum(exp(-d)), shifted by the minimum for stability
    lw = -(d - d.min())
    lse = math.log(math.fsum(np.exp(lw)))
    return tuple(float(v) for v in np.maximum(-(lw - lse), 0.0))


def build_regression_dictionary(
    feature_map: Callable | None,
    coefficient_grids: Sequence,
    error_densities: Sequence[Density],
    error_labels: Sequence[str] | None = None,
) -> PenalizedCollection:
    """One family per (coefficient grid, error density) pair.

    ``coefficient_grids`` is a list of ``(members, d)`` arrays of coefficient
    vectors. The prior weight of model ``(d, k)`` is proportional to
    ``exp(-(d + a_k))`` with ``sum_k exp(-a_k) = e - 1``; over all ``d >= 1``
    these sum to one, and over the finite dictionary they are renormalized.
    """
    fmap = feature_map or affine_features
    grids = [np.atleast_2d(np.asarray(g, dtype=float)) for g in coefficient_grids]
    if not grids or not error_densities:
        raise ValueError("need at least one coefficient grid and one error density")
    if any(g.size == 0 for g in grids):
        raise ValueError("empty coefficient grid")
    labels = list(error_labels) if error_labels else [type(q).__name__ for q in error_densities]
    K = len(error_densities)
    a_k = math.log(K / (math.e - 1.0))
    families, raw = [], []
    for g in grids:
        d = g.shape[1]
        for q, lab in zip(error_densities, labels):
            members = tuple(RegressionConditional(tuple(row), q, fmap) for row in g)
            families.append(CandidateFamily(members, f"d={d},{lab}", DimensionBound(float(d)),
                                            params=tuple(tuple(row) for row in g)))
            raw.append(d + a_k)
    return PenalizedCollection(tuple(families), _normalize_delta(raw))


def assign_penalties(
    collection: PenalizedCollection, kappa: float = 1.0, n: int = 1, renormalize: bool = True
) -> PenalizedCollection:
    """``pen[m] = kappa * (dimension_bound[m](n) + delta[m])``.

    Weight sums within ``1e-6`` of one are renormalized unless
    ``renormalize`` is off, in which case any drift beyond ``1e-9`` raises.
    """
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    if n < 1:
        raise ValueError("n must be a positive sample size")
    total = collection.weight_sum
    delta = collection.delta
    if abs(total - 1.0) > 1e-9:
        if renormalize and abs(total - 1.0) < 1e-6:
            delta = _normalize_delta(delta)
        else:
            raise ValueError(f"prior weights sum to {total!r}, not 1")
    pen = tuple(kappa * (f.bound(n) + d) for f, d in zip(collection.families, delta))
    return replace(collection, delta=delta, kappa=float(kappa), pen=pen)
