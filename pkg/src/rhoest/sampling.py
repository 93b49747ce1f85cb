"""Seeded samplers for the true laws of the experiments.

Each ``(seed, stream_id)`` pair owns a Philox stream keyed by
``SeedSequence([seed, stream_id, *extra])``, so a replication's sample does
not depend on which worker draws it or in what order. Every draw goes
through a quantile function applied to uniforms on the open interval
``(0, 1)``; there are no rejection loops.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import special

from .densities import Density, PairData, UniformInterval, affine_features, heavy_tail_quantile

__all__ = [
    "rng_stream",
    "open_uniforms",
    "UniformScale",
    "GaussianMean",
    "MixtureAlphaTheta",
    "Contaminated",
    "OutlierInjected",
    "RegressionLaw",
    "SamplerSpec",
    "sample",
    "draw",
    "heavy_tail_quantile",
]

_MASK64 = (1 << 64) - 1


def rng_stream(seed: int, stream_id: int = 0, *extra: int) -> np.random.Generator:
    """Counter-based generator for one replication (and optional sub-stream)."""
    key = [int(seed) & _MASK64, int(stream_id) & _MASK64] + [int(e) & _MASK64 for e in extra]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(key)))


def open_uniforms(rng: np.random.Generator, size) -> np.ndarray:
    """Uniforms on ``(0, 1)``: midpoints of a 2^-53 grid, never 0 or 1."""
    k = rng.integers(0, 1 << 53, size=size, dtype=np.int64)
    return (k.astype(float) + 0.5) * 2.0**-53


@dataclass(frozen=True)
class UniformScale:
    """``U[0, theta]``."""

    theta: float


@dataclass(frozen=True)
class GaussianMean:
    """``N(theta, I)``; one draw is a vector of ``len(theta)`` coordinates."""

    theta: tuple

    def __post_init__(self):
        object.__setattr__(self, "theta", tuple(float(t) for t in np.atleast_1d(self.theta)))


@dataclass(frozen=True)
class MixtureAlphaTheta:
    """``(1 - alpha) U[theta, theta + 1] + alpha U[100 + theta, 101 + theta]``."""

    alpha: float
    theta: float = 0.0

    def __post_init__(self):
        if not 0 <= self.alpha < 0.5:
            raise ValueError("alpha must lie in [0, 1/2)")


@dataclass(frozen=True)
class Contaminated:
    """``(1 - eps) base + eps contaminant``."""

    eps: float
    base: object
    contaminant: object

    def __post_init__(self):
        if not 0 <= self.eps <= 1:
            raise ValueError("eps must lie in [0, 1]")


@dataclass(frozen=True)
class OutlierInjected:
    """Draws from ``base`` with the observations at ``indices`` replaced by ``values``."""

    base: object
    indices: tuple
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        vals = tuple(float(v) for v in np.broadcast_to(np.asarray(self.values, float), (len(self.indices),)))
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class RegressionLaw:
    """``W ~ U[w_low, w_high]^dim``, ``Y = features(W) @ coef + error``."""

    coef: tuple
    error: Density
    dim: int = 1
    w_low: float = -1.0
    w_high: float = 1.0
    feature_map: Callable = field(default=affine_features, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "coef", tuple(float(c) for c in self.coef))

    def regression_function(self, w) -> np.ndarray:
        return self.feature_map(w) @ np.asarray(self.coef)


@dataclass(frozen=True)
class SamplerSpec:
    target: object
    seed: int = 0
    stream_id: int = 0


def _quantile_draw(target: Density, u: np.ndarray) -> np.ndarray:
    return np.asarray(target.quantile(u), dtype=float)


def draw(target, n: int, rng: np.random.Generator):
    """``n`` independent draws of ``target`` from ``rng``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if isinstance(target, UniformScale):
        return target.theta * open_uniforms(rng, n)
    if isinstance(target, GaussianMean):
        z = special.ndtri(open_uniforms(rng, (n, len(target.theta))))
        out = np.asarray(target.theta)[None, :] + z
        return out[0] if n == 1 else out
    if isinstance(target, MixtureAlphaTheta):
        u = open_uniforms(rng, (n, 2))
        far = u[:, 0] < target.alpha
        return target.theta + np.where(far, 100.0, 0.0) + u[:, 1]
    if isinstance(target, Contaminated):
        u = open_uniforms(rng, n)
        pick = u < target.eps
        a = draw(target.base, n, rng)
        b = draw(target.contaminant, n, rng)
        return np.where(pick, b, a)
    if isinstance(target, OutlierInjected):
        x = np.array(draw(target.base, n, rng), dtype=float, copy=True)
        for i, v in zip(target.indices, target.values):
            if not 0 <= i < n:
                raise IndexError(f"outlier index {i} outside sample of size {n}")
            x[i] = v
        return x
    if isinstance(target, RegressionLaw):
        w = target.w_low + (target.w_high - target.w_low) * open_uniforms(rng, (n, target.dim))
        eps = _quantile_draw(target.error, open_uniforms(rng, n))
        return PairData(w, target.regression_function(w) + eps)
    if isinstance(target, Density):
        try:
            return _quantile_draw(target, open_uniforms(rng, n))
        except NotImplementedError:
            raise TypeError(f"no sampler for {type(target).__name__}") from None
    raise TypeError(f"unsupported sampling target {type(target).__name__}")


def sample(spec: SamplerSpec, n: int):
    """Dataset of ``n`` draws; identical for identical ``(seed, stream_id, n)``."""
    return draw(spec.target, n, rng_stream(spec.seed, spec.stream_id))
