"""Closed-form and tabulated densities used as model members and true laws.

Every density evaluates vectorised ``pdf``/``logpdf``; the one-dimensional
Lebesgue families also expose ``cdf`` and ``quantile`` (used for exact cell
masses in quadrature and for inverse-CDF sampling), ``breakpoints`` (points
where the density jumps or blows up) and ``shifted``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import special

__all__ = [
    "Density",
    "UniformInterval",
    "Gaussian",
    "Exponential",
    "TruncatedExponential",
    "HeavyTailP",
    "Cauchy",
    "PiecewiseConstant",
    "Mixture",
    "PathologicalGaussianVersion",
    "RegressionConditional",
    "PairData",
    "affine_features",
    "density_at",
    "heavy_tail_pdf",
    "heavy_tail_cdf",
    "heavy_tail_quantile",
]


class Density:
    """Base class; subclasses are frozen dataclasses."""

    lebesgue = True

    def pdf(self, x):
        with np.errstate(divide="ignore"):
            return np.exp(self.logpdf(x))

    def logpdf(self, x):
        with np.errstate(divide="ignore"):
            return np.log(self.pdf(x))

    def cdf(self, x):
        raise NotImplementedError(f"{type(self).__name__} has no cdf")

    def quantile(self, u):
        raise NotImplementedError(f"{type(self).__name__} has no quantile")

    def mass(self, lo, hi):
        return self.cdf(hi) - self.cdf(lo)

    @property
    def support(self) -> tuple[float, float]:
        return (-math.inf, math.inf)

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return ()

    @property
    def singular_points(self) -> tuple[float, ...]:
        return ()

    def shifted(self, t: float) -> "Density":
        raise NotImplementedError(f"{type(self).__name__} cannot be shifted")

    def window(self, tol: float = 1e-12) -> tuple[float, float]:
        """A finite interval outside which at most ``tol`` mass lies."""
        lo, hi = self.support
        if math.isinf(lo):
            lo = float(self.quantile(tol / 2))
        if math.isinf(hi):
            hi = float(self.quantile(1 - tol / 2))
        return lo, hi


def _arr(x):
    return np.asarray(x, dtype=float)


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


@dataclass(frozen=True)
class UniformInterval(Density):
    """Uniform law on the closed interval ``[a, b]``.

    ``height`` is normally ``1/(b-a)``; shifted copies inherit the parent's
    height so that a location family has bitwise-equal density values.
    """

    a: float
    b: float
    height: float | None = field(default=None, repr=False)

    def __post_init__(self):
        if not (self.a < self.b):
            raise ValueError(f"UniformInterval needs a < b, got [{self.a}, {self.b}]")
        if self.height is None:
            object.__setattr__(self, "height", 1.0 / (self.b - self.a))

    def pdf(self, x):
        x = _arr(x)
        return _out(np.where((x >= self.a) & (x <= self.b), self.height, 0.0))

    def logpdf(self, x):
        x = _arr(x)
        return _out(np.where((x >= self.a) & (x <= self.b), math.log(self.height), -np.inf))

    def cdf(self, x):
        x = _arr(x)
        return _out(np.clip((x - self.a) / (self.b - self.a), 0.0, 1.0))

    def quantile(self, u):
        u = _arr(u)
        return _out(self.a + u * (self.b - self.a))

    @property
    def support(self):
        return (self.a, self.b)

    @property
    def breakpoints(self):
        return (self.a, self.b)

    def shifted(self, t):
        return UniformInterval(self.a + t, self.b + t, self.height)


@dataclass(frozen=True)
class Gaussian(Density):
    mean: float = 0.0
    sd: float = 1.0

    def __post_init__(self):
        if not self.sd > 0:
            raise ValueError("Gaussian sd must be positive")

    def logpdf(self, x):
        z = (_arr(x) - self.mean) / self.sd
        return _out(-0.5 * z * z - math.log(self.sd) - 0.5 * math.log(2 * math.pi))

    def pdf(self, x):
        return _out(np.exp(self.logpdf(x)))

    def cdf(self, x):
        return _out(special.ndtr((_arr(x) - self.mean) / self.sd))

    def mass(self, lo, hi):
        # upper tail via ndtr(-z) keeps precision far to the right
        zl = (_arr(lo) - self.mean) / self.sd
        zh = (_arr(hi) - self.mean) / self.sd
        right = zl > 0
        m = np.where(right, special.ndtr(-zl) - special.ndtr(-zh), special.ndtr(zh) - special.ndtr(zl))
        return _out(m)

    def quantile(self, u):
        return _out(self.mean + self.sd * special.ndtri(_arr(u)))

    def window(self, tol=1e-12):
        z = float(-special.ndtri(tol / 2))
        return (self.mean - z * self.sd, self.mean + z * self.sd)

    def shifted(self, t):
        return Gaussian(self.mean + t, self.sd)


@dataclass(frozen=True)
class Exponential(Density):
    """``rate * exp(-rate (x - shift))`` on ``[shift, +inf)``."""

    rate: float = 1.0
    shift: float = 0.0

    def __post_init__(self):
        if not self.rate > 0:
            raise ValueError("Exponential rate must be positive")

    def logpdf(self, x):
        y = _arr(x) - self.shift
        with np.errstate(invalid="ignore"):
            v = math.log(self.rate) - self.rate * y
        return _out(np.where(y >= 0, v, -np.inf))

    def pdf(self, x):
        with np.errstate(over="ignore"):
            return _out(np.exp(self.logpdf(x)))

    def cdf(self, x):
        y = np.maximum(_arr(x) - self.shift, 0.0)
        return _out(-np.expm1(-self.rate * y))

    def mass(self, lo, hi):
        yl = np.maximum(_arr(lo) - self.shift, 0.0)
        yh = np.maximum(_arr(hi) - self.shift, 0.0)
        return _out(np.exp(-self.rate * yl) - np.exp(-self.rate * yh))

    def quantile(self, u):
        return _out(self.shift - np.log1p(-_arr(u)) / self.rate)

    @property
    def support(self):
        return (self.shift, math.inf)

    @property
    def breakpoints(self):
        return (self.shift,)

    def shifted(self, t):
        return Exponential(self.rate, self.shift + t)


@dataclass(frozen=True)
class TruncatedExponential(Density):
    """Exponential(rate) conditioned on ``[shift, shift + T]``."""

    rate: float = 1.0
    T: float = 1.0
    shift: float = 0.0

    def __post_init__(self):
        if not (self.rate > 0 and self.T > 0):
            raise ValueError("TruncatedExponential needs rate > 0 and T > 0")

    @property
    def _norm(self):
        return -math.expm1(-self.rate * self.T)

    def logpdf(self, x):
        y = _arr(x) - self.shift
        v = math.log(self.rate) - self.rate * y - math.log(self._norm)
        return _out(np.where((y >= 0) & (y <= self.T), v, -np.inf))

    def pdf(self, x):
        with np.errstate(over="ignore"):
            return _out(np.exp(self.logpdf(x)))

    def cdf(self, x):
        y = np.clip(_arr(x) - self.shift, 0.0, self.T)
        return _out(-np.expm1(-self.rate * y) / self._norm)

    def quantile(self, u):
        return _out(self.shift - np.log1p(-_arr(u) * self._norm) / self.rate)

    @property
    def support(self):
        return (self.shift, self.shift + self.T)

    @property
    def breakpoints(self):
        return (self.shift, self.shift + self.T)

    def shifted(self, t):
        return TruncatedExponential(self.rate, self.T, self.shift + t)


def heavy_tail_pdf(y):
    """``(1/6)[|y|^(-1/2) 1{0<|y|<=1} + y^(-2) 1{|y|>1}]``; zero at ``y = 0``."""
    y = np.abs(_arr(y))
    with np.errstate(divide="ignore", invalid="ignore"):
        v = np.where(y <= 1.0, 1.0 / np.sqrt(y), 1.0 / (y * y)) / 6.0
    return _out(np.where(y == 0, 0.0, v))


def heavy_tail_cdf(y):
    y = _arr(y)
    a = np.abs(y)
    with np.errstate(divide="ignore"):
        upper = np.where(a <= 1.0, 0.5 + np.sqrt(a) / 3.0, 1.0 - 1.0 / (6.0 * a))
    return _out(np.where(y >= 0, upper, 1.0 - upper))


def heavy_tail_quantile(u):
    """Inverse of :func:`heavy_tail_cdf` on ``(0, 1)``."""
    u = _arr(u)
    if np.any(~((u > 0) & (u < 1))):
        raise ValueError("heavy_tail_quantile needs u in the open interval (0, 1)")
    v = np.where(u >= 0.5, u, 1.0 - u)
    with np.errstate(divide="ignore"):
        x = np.where(v <= 5.0 / 6.0, (3.0 * (v - 0.5)) ** 2, 1.0 / (6.0 * (1.0 - v)))
    return _out(np.where(u >= 0.5, x, -x))


@dataclass(frozen=True)
class HeavyTailP(Density):
    """Symmetric density unbounded at ``shift`` with ``x^-2`` tails."""

    shift: float = 0.0

    def pdf(self, x):
        return heavy_tail_pdf(_arr(x) - self.shift)

    def logpdf(self, x):
        y = np.abs(_arr(x) - self.shift)
        with np.errstate(divide="ignore"):
            v = np.where(y <= 1.0, -0.5 * np.log(y), -2.0 * np.log(y)) - math.log(6.0)
        return _out(np.where(y == 0, -np.inf, v))

    def cdf(self, x):
        return heavy_tail_cdf(_arr(x) - self.shift)

    def mass(self, lo, hi):
        # the upper tail is 1/(6y); avoid 1 - (1 - small)
        yl = _arr(lo) - self.shift
        yh = _arr(hi) - self.shift
        right = yl > 1.0
        with np.errstate(divide="ignore"):
            tail = 1.0 / (6.0 * np.where(right, yl, 1.0)) - 1.0 / (6.0 * np.where(right, yh, 1.0))
        return _out(np.where(right, tail, heavy_tail_cdf(yh) - heavy_tail_cdf(yl)))

    def quantile(self, u):
        return _out(heavy_tail_quantile(u) + self.shift)

    def window(self, tol=1e-12):
        t = 1.0 / (3.0 * tol)
        return (self.shift - t, self.shift + t)

    @property
    def breakpoints(self):
        return (self.shift - 1.0, self.shift, self.shift + 1.0)

    @property
    def singular_points(self):
        return (self.shift,)

    def shifted(self, t):
        return HeavyTailP(self.shift + t)


@dataclass(frozen=True)
class Cauchy(Density):
    loc: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("Cauchy scale must be positive")

    def logpdf(self, x):
        z = (_arr(x) - self.loc) / self.scale
        return _out(-np.log1p(z * z) - math.log(math.pi * self.scale))

    def pdf(self, x):
        return _out(np.exp(self.logpdf(x)))

    def cdf(self, x):
        return _out(0.5 + np.arctan((_arr(x) - self.loc) / self.scale) / math.pi)

    def quantile(self, u):
        return _out(self.loc + self.scale * np.tan(math.pi * (_arr(u) - 0.5)))

    def shifted(self, t):
        return Cauchy(self.loc + t, self.scale)


@dataclass(frozen=True)
class PiecewiseConstant(Density):
    """Density equal to ``levels[j]`` on ``[edges[j], edges[j+1])``.

    The last cell is closed on the right. Levels are density values, so cell
    masses are ``levels * widths``.
    """

    edges: tuple[float, ...]
    levels: tuple[float, ...]

    def __post_init__(self):
        e = tuple(float(v) for v in self.edges)
        lv = tuple(float(v) for v in self.levels)
        object.__setattr__(self, "edges", e)
        object.__setattr__(self, "levels", lv)
        if len(e) < 2 or len(lv) != len(e) - 1:
            raise ValueError("need len(levels) == len(edges) - 1 >= 1")
        if any(b <= a for a, b in zip(e, e[1:])):
            raise ValueError("edges must be strictly increasing")
        if any(v < 0 for v in lv):
            raise ValueError("levels must be nonnegative")
        total = math.fsum(v * (b - a) for v, a, b in zip(lv, e, e[1:]))
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"piecewise-constant masses sum to {total}, not 1")

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    @property
    def cell_masses(self) -> np.ndarray:
        return np.asarray(self.levels) * self.widths

    def cell_index(self, x):
        """Cell of each point, or -1 outside ``[edges[0], edges[-1]]``."""
        x = _arr(x)
        e = np.asarray(self.edges)
        j = np.searchsorted(e, x, side="right") - 1
        j = np.where(x == e[-1], len(self.levels) - 1, j)
        return np.where((x < e[0]) | (x > e[-1]), -1, j)

    def pdf(self, x):
        j = self.cell_index(x)
        lv = np.append(np.asarray(self.levels), 0.0)
        return _out(lv[j])

    def logpdf(self, x):
        with np.errstate(divide="ignore"):
            return _out(np.log(self.pdf(x)))

    def cdf(self, x):
        x = _arr(x)
        e = np.asarray(self.edges)
        cum = np.concatenate([[0.0], np.cumsum(self.cell_masses)])
        return _out(np.clip(np.interp(x, e, cum, left=0.0, right=1.0), 0.0, 1.0))

    def quantile(self, u):
        u = _arr(u)
        e = np.asarray(self.edges)
        cum = np.concatenate([[0.0], np.cumsum(self.cell_masses)])
        cum[-1] = 1.0
        # skip empty cells so interp stays monotone
        keep = np.concatenate([[True], np.diff(cum) > 0])
        return _out(np.interp(u, cum[keep], e[keep]))

    @property
    def support(self):
        return (self.edges[0], self.edges[-1])

    @property
    def breakpoints(self):
        return self.edges

    def shifted(self, t):
        return PiecewiseConstant(tuple(v + t for v in self.edges), self.levels)


@dataclass(frozen=True)
class Mixture(Density):
    weights: tuple[float, ...]
    components: tuple[Density, ...]

    def __post_init__(self):
        w = tuple(float(v) for v in self.weights)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "components", tuple(self.components))
        if len(w) != len(self.components) or not w:
            raise ValueError("weights and components must have equal nonzero length")
        if any(v < 0 for v in w) or abs(math.fsum(w) - 1.0) > 1e-12:
            raise ValueError("mixture weights must be nonnegative and sum to 1")

    def pdf(self, x):
        x = _arr(x)
        return _out(sum(w * np.asarray(c.pdf(x)) for w, c in zip(self.weights, self.components) if w > 0))

    def cdf(self, x):
        x = _arr(x)
        return _out(sum(w * np.asarray(c.cdf(x)) for w, c in zip(self.weights, self.components)))

    def mass(self, lo, hi):
        return _out(sum(w * np.asarray(c.mass(lo, hi)) for w, c in zip(self.weights, self.components)))

    def quantile(self, u):
        # no closed form; bisection on the cdf, vectorised
        u = _arr(u)
        lo = np.full(u.shape, min(c.window(1e-15)[0] for c in self.components))
        hi = np.full(u.shape, max(c.window(1e-15)[1] for c in self.components))
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            below = np.asarray(self.cdf(mid)) < u
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return _out(0.5 * (lo + hi))

    @property
    def support(self):
        lo = min(c.support[0] for c, w in zip(self.components, self.weights) if w > 0)
        hi = max(c.support[1] for c, w in zip(self.components, self.weights) if w > 0)
        return (lo, hi)

    def window(self, tol=1e-12):
        ws = [c.window(tol) for c, w in zip(self.components, self.weights) if w > 0]
        return (min(a for a, _ in ws), max(b for _, b in ws))

    @property
    def breakpoints(self):
        return tuple(sorted({p for c in self.components for p in c.breakpoints}))

    @property
    def singular_points(self):
        return tuple(sorted({p for c in self.components for p in c.singular_points}))

    def shifted(self, t):
        return Mixture(self.weights, tuple(c.shifted(t) for c in self.components))


@dataclass(frozen=True)
class PathologicalGaussianVersion(Density):
    """A version of ``dN(theta,1)/dN(0,1)`` altered on the null set ``{x = theta}``.

    For ``theta > 0`` the value at exactly ``x == theta`` is
    ``exp(theta x - theta^2/2 + (theta^2/2) exp(x^2))``; everywhere else it is
    the usual ``exp(theta x - theta^2/2)``. Not a Lebesgue density.
    """

    theta: float
    lebesgue = False

    def logpdf(self, x):
        x = _arr(x)
        t = self.theta
        base = t * x - 0.5 * t * t
        if t > 0:
            with np.errstate(over="ignore"):
                extra = 0.5 * t * t * np.exp(x * x)
            base = np.where(x == t, base + extra, base)
        return _out(base)

    def pdf(self, x):
        with np.errstate(over="ignore"):
            return _out(np.exp(self.logpdf(x)))

    def shifted(self, t):
        raise NotImplementedError("the pathological version is not a location family")


def affine_features(w):
    """Design row ``(1, w_1, ..., w_p)`` for each row of ``w``."""
    w = np.asarray(w, dtype=float)
    if w.ndim == 1:
        w = w[:, None]
    return np.hstack([np.ones((w.shape[0], 1)), w])


@dataclass(frozen=True)
class PairData:
    """Regression observations ``(w_i, y_i)``; ``w`` has one row per observation."""

    w: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        if w.ndim == 1:
            w = w[:, None]
        y = np.asarray(self.y, dtype=float).ravel()
        if w.shape[0] != y.shape[0]:
            raise ValueError("w and y must have the same number of rows")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "y", y)

    def __len__(self):
        return self.y.shape[0]


@dataclass(frozen=True)
class RegressionConditional(Density):
    """Conditional density ``(w, y) -> error(y - f(w))`` with ``f = features(w) @ coef``."""

    coef: tuple[float, ...]
    error: Density
    feature_map: Callable = field(default=affine_features, compare=False)
    lebesgue = False

    def __post_init__(self):
        object.__setattr__(self, "coef", tuple(float(c) for c in self.coef))

    def regression_function(self, w) -> np.ndarray:
        F = self.feature_map(w)
        if F.shape[1] != len(self.coef):
            raise ValueError(f"feature map gives {F.shape[1]} columns, coef has {len(self.coef)}")
        return F @ np.asarray(self.coef)

    def residuals(self, data: PairData) -> np.ndarray:
        return data.y - self.regression_function(data.w)

    def logpdf(self, data):
        if not isinstance(data, PairData):
            raise TypeError("regression densities are evaluated on PairData")
        return self.error.logpdf(self.residuals(data))

    def pdf(self, data):
        if not isinstance(data, PairData):
            raise TypeError("regression densities are evaluated on PairData")
        return self.error.pdf(self.residuals(data))


def density_at(spec: Density, x) -> float:
    """Pointwise density value at one observation.

    ``x`` is a real for the univariate families and a ``(w, y)`` pair for
    :class:`RegressionConditional`.
    """
    if isinstance(spec, RegressionConditional):
        try:
            w, y = x
        except (TypeError, ValueError):
            raise ValueError("regression densities need a (w, y) pair") from None
        w = np.atleast_1d(np.asarray(w, dtype=float))
        expected = len(spec.coef) - 1 if spec.feature_map is affine_features else None
        if expected is not None and w.shape[0] != expected:
            raise ValueError(f"w has dimension {w.shape[0]}, model expects {expected}")
        return float(spec.pdf(PairData(w[None, :], [y]))[0])
    if isinstance(x, (tuple, list)) or np.ndim(x) != 0:
        raise ValueError(f"{type(spec).__name__} takes scalar observations")
    return float(spec.pdf(float(x)))
