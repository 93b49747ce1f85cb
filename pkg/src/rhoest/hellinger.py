"""Hellinger distance and affinity: discrete, closed-form and by quadrature.

Conventions: ``h^2(P, Q) = (1/2) * int (sqrt(p) - sqrt(q))^2`` and
``rho(P, Q) = int sqrt(p q)``, so ``h^2 = 1 - rho``. For products of
independent coordinates ``H^2 = sum_i h^2(P_i, Q_i)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .densities import (
    Density,
    Exponential,
    Gaussian,
    Mixture,
    PiecewiseConstant,
    TruncatedExponential,
    UniformInterval,
)

__all__ = [
    "DiscreteDensity",
    "UNSUPPORTED",
    "discretize",
    "hellinger2_discrete",
    "affinity_discrete",
    "total_variation",
    "hellinger2_analytic",
    "hellinger2_quadrature",
    "hellinger2",
    "product_hellinger2",
    "quadrature_mass",
]


@dataclass(frozen=True)
class DiscreteDensity:
    """Probability masses on a finite, strictly increasing support."""

    support: tuple
    mass: tuple

    def __post_init__(self):
        s = tuple(float(v) for v in self.support)
        m = tuple(float(v) for v in self.mass)
        object.__setattr__(self, "support", s)
        object.__setattr__(self, "mass", m)
        if len(s) != len(m) or not s:
            raise ValueError("support and mass must have the same nonzero length")
        if any(b <= a for a, b in zip(s, s[1:])):
            raise ValueError("support must be strictly increasing")
        if any(v < 0 or math.isnan(v) for v in m):
            raise ValueError("masses must be nonnegative")
        total = math.fsum(m)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"masses sum to {total}, not 1")

    @classmethod
    def from_weights(cls, weights, support=None) -> "DiscreteDensity":
        w = np.asarray(weights, dtype=float)
        if support is None:
            support = np.arange(w.size, dtype=float)
        return cls(tuple(support), tuple(w / math.fsum(w)))


def _check_same_support(p: DiscreteDensity, q: DiscreteDensity) -> None:
    if p.support != q.support:
        raise ValueError("discrete densities must share one support grid")


def discretize(density: Density, edges) -> DiscreteDensity:
    """Cell masses of ``density`` on ``edges``, indexed by cell midpoints."""
    e = np.asarray(edges, dtype=float)
    m = np.asarray(density.mass(e[:-1], e[1:]), dtype=float)
    m = np.maximum(m, 0.0)
    return DiscreteDensity(tuple(0.5 * (e[:-1] + e[1:])), tuple(m / math.fsum(m)))


def affinity_discrete(p: DiscreteDensity, q: DiscreteDensity) -> float:
    _check_same_support(p, q)
    return math.fsum(np.sqrt(np.asarray(p.mass) * np.asarray(q.mass)))


def hellinger2_discrete(p: DiscreteDensity, q: DiscreteDensity) -> float:
    _check_same_support(p, q)
    d = np.sqrt(np.asarray(p.mass)) - np.sqrt(np.asarray(q.mass))
    return min(0.5 * math.fsum(d * d), 1.0)


def total_variation(p: DiscreteDensity, q: DiscreteDensity) -> float:
    _check_same_support(p, q)
    return 0.5 * math.fsum(np.abs(np.asarray(p.mass) - np.asarray(q.mass)))


class _Unsupported:
    """Sentinel returned by :func:`hellinger2_analytic` for pairs outside its catalog."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "UNSUPPORTED"

    def __bool__(self):
        return False


UNSUPPORTED = _Unsupported()


def _as_piecewise(d: Density):
    """(edges, levels) for step densities, else None."""
    if isinstance(d, UniformInterval):
        return np.array([d.a, d.b]), np.array([d.height])
    if isinstance(d, PiecewiseConstant):
        return np.asarray(d.edges), np.asarray(d.levels)
    if isinstance(d, Mixture):
        parts = [_as_piecewise(c) for c in d.components]
        if any(p is None for p in parts):
            return None
        edges = np.unique(np.concatenate([p[0] for p in parts]))
        mids = 0.5 * (edges[:-1] + edges[1:])
        levels = np.zeros(mids.size)
        for w, (e, lv) in zip(d.weights, parts):
            j = np.searchsorted(e, mids, side="right") - 1
            inside = (j >= 0) & (j < lv.size)
            levels += w * np.where(inside, lv[np.clip(j, 0, lv.size - 1)], 0.0)
        return edges, levels
    return None


def _step_affinity(pa, pb) -> float:
    ea, la = pa
    eb, lb = pb
    edges = np.unique(np.concatenate([ea, eb]))
    mids = 0.5 * (edges[:-1] + edges[1:])

    def level(e, lv):
        j = np.searchsorted(e, mids, side="right") - 1
        inside = (j >= 0) & (j < lv.size)
        return np.where(inside, lv[np.clip(j, 0, lv.size - 1)], 0.0)

    return math.fsum(np.sqrt(level(ea, la) * level(eb, lb)) * np.diff(edges))


def hellinger2_analytic(a: Density, b: Density):
    """Closed-form ``h^2`` for the supported pairs, otherwise :data:`UNSUPPORTED`.

    Supported: identical specs; two Gaussians; an exponential against its own
    truncation to ``[shift, shift + T]`` (``1 - sqrt(1 - exp(-rate T))``);
    and any two step densities (uniform intervals, piecewise-constant
    densities and finite mixtures of these).
    """
    if a == b:
        return 0.0
    for x, y in ((a, b), (b, a)):
        if isinstance(x, Gaussian) and isinstance(y, Gaussian):
            s2 = x.sd**2 + y.sd**2
            rho = math.sqrt(2 * x.sd * y.sd / s2) * math.exp(-((x.mean - y.mean) ** 2) / (4 * s2))
            return 1.0 - rho
        if (
            isinstance(x, Exponential)
            and isinstance(y, TruncatedExponential)
            and x.rate == y.rate
            and x.shift == y.shift
        ):
            tail = math.exp(-x.rate * y.T)
            # 1 - sqrt(1 - e) written without cancellation
            return tail / (1.0 + math.sqrt(-math.expm1(-x.rate * y.T)))
    pa, pb = _as_piecewise(a), _as_piecewise(b)
    if pa is not None and pb is not None:
        return max(0.0, 1.0 - _step_affinity(pa, pb))
    return UNSUPPORTED


_GRADING = 6


def _segment_mesh(lo, hi, n, grade_to, center, scale):
    t = np.linspace(0.0, 1.0, n + 1)
    if grade_to == "lo":
        x = lo + (hi - lo) * t**_GRADING
    elif grade_to == "hi":
        x = hi - (hi - lo) * (1.0 - t) ** _GRADING
    else:
        # uniform in asinh((x - center) / scale): even spacing near the core,
        # geometric spacing far out in the tails
        u0, u1 = np.arcsinh((lo - center) / scale), np.arcsinh((hi - center) / scale)
        x = center + scale * np.sinh(u0 + (u1 - u0) * t)
    x[0], x[-1] = lo, hi
    return x


def _mesh(window, densities, cells):
    """Cell edges on ``window`` and a mask of cells touching a singular point.

    Breakpoints and singular points of the densities become edges; each
    segment between them gets the same number of cells.
    """
    lo, hi = float(window[0]), float(window[1])
    if not (lo < hi):
        raise ValueError("window must satisfy lo < hi")
    pts = {lo, hi}
    sing = set()
    cores = []
    for d in densities:
        for p in d.breakpoints:
            if lo < p < hi:
                pts.add(float(p))
        for p in d.singular_points:
            if lo <= p <= hi:
                pts.add(float(p))
                sing.add(float(p))
        try:
            cores.append(d.window(1e-4))
        except NotImplementedError:
            pass
    edges = sorted(pts)
    # a segment with singular points at both ends is split so that each half
    # can be graded towards its own singular end
    edges = sorted(set(edges) | {0.5 * (l + r) for l, r in zip(edges, edges[1:]) if l in sing and r in sing})
    if cores:
        c_lo, c_hi = min(cores, key=lambda w: w[1] - w[0])
        center, scale = 0.5 * (c_lo + c_hi), 0.5 * (c_hi - c_lo)
    else:
        center, scale = 0.5 * (lo + hi), 0.5 * (hi - lo)
    gaps = np.diff(edges)
    if gaps.size > 1:
        scale = min(scale, float(gaps.min()))
    scale = max(scale, 1e-12 * max(abs(lo), abs(hi), 1.0))
    nseg = len(edges) - 1
    per = max(2, cells // nseg)
    pieces, exact = [], []
    for i, (l, r) in enumerate(zip(edges, edges[1:])):
        grade = "lo" if l in sing else ("hi" if r in sing else None)
        seg = _segment_mesh(l, r, per, grade, center, scale)
        m = np.zeros(per, dtype=bool)
        if l in sing:
            m[0] = True
        if r in sing:
            m[-1] = True
        pieces.append(seg if i == 0 else seg[1:])
        exact.append(m)
    edges_all, mask = np.concatenate(pieces), np.concatenate(exact)
    for p in sing:
        # graded cells next to p shrink to the float spacing at p, where
        # midpoints are rounded; give those the exact-mass treatment too
        reach = 1e6 * np.spacing(abs(p))
        mask |= (np.abs(edges_all[:-1] - p) <= reach) & (np.abs(edges_all[1:] - p) <= reach)
    return edges_all, mask


def _tail(d: Density, lo, hi) -> float:
    return max(0.0, 1.0 - float(d.mass(lo, hi)))


def hellinger2_quadrature(
    a: Density,
    b: Density,
    cells: int = 100_000,
    window: tuple[float, float] | None = None,
    tail_bound: bool = False,
) -> float:
    """Midpoint-rule ``h^2`` on ``window``.

    Breakpoints of both densities become cell edges and cells next to a
    singular point are graded towards it; there the squared difference is
    taken as ``(mass_a + mass_b)/2 - sqrt(mass_a mass_b)`` with exact cell
    masses.
    Mass outside the window must be below ``1e-6`` unless ``tail_bound`` is
    set, in which case ``(tail_a + tail_b)/2`` (an upper bound for the missing
    part of the integral) is added.
    """
    if cells < 2:
        raise ValueError("need at least 2 cells")
    if not (a.lebesgue and b.lebesgue):
        raise ValueError("quadrature is only defined for Lebesgue densities")
    if window is None:
        wa, wb = a.window(1e-10), b.window(1e-10)
        window = (min(wa[0], wb[0]), max(wa[1], wb[1]))
    lo, hi = window
    ta, tb = _tail(a, lo, hi), _tail(b, lo, hi)
    if (ta > 1e-6 or tb > 1e-6) and not tail_bound:
        raise ValueError(
            f"window [{lo}, {hi}] leaves out mass {max(ta, tb):.3g}; widen it or set tail_bound"
        )
    edges, exact = _mesh(window, (a, b), cells)
    mid = 0.5 * (edges[:-1] + edges[1:])
    w = np.diff(edges)
    pa = np.asarray(a.pdf(mid), dtype=float)
    pb = np.asarray(b.pdf(mid), dtype=float)
    d = np.sqrt(pa) - np.sqrt(pb)
    contrib = 0.5 * d * d * w
    if exact.any():
        el, er = edges[:-1][exact], edges[1:][exact]
        ma = np.asarray(a.mass(el, er), dtype=float)
        mb = np.asarray(b.mass(el, er), dtype=float)
        # int sqrt(ab) over the cell as sqrt(mass_a mass_b): exact when a/b is
        # constant on the cell, so identical densities cancel exactly
        contrib[exact] = 0.5 * (ma + mb) - np.sqrt(ma * mb)
    value = math.fsum(contrib)
    if tail_bound:
        value += 0.5 * (ta + tb)
    return min(max(value, 0.0), 1.0)


def quadrature_mass(density: Density, cells: int = 1_000_000, window=None) -> float:
    """Total mass by the same singularity-aware midpoint rule plus exact tails
    (by default outside the central ``1 - 1e-8`` of the mass)."""
    if window is None:
        window = density.window(1e-8)
    lo, hi = window
    edges, exact = _mesh(window, (density,), cells)
    mid = 0.5 * (edges[:-1] + edges[1:])
    w = np.diff(edges)
    contrib = np.asarray(density.pdf(mid), dtype=float) * w
    if exact.any():
        contrib[exact] = density.mass(edges[:-1][exact], edges[1:][exact])
    return math.fsum(contrib) + float(density.cdf(lo)) + (1.0 - float(density.cdf(hi)))


def hellinger2(a: Density, b: Density, cells: int = 200_000) -> float:
    """Closed form when available, quadrature with a tail bound otherwise."""
    v = hellinger2_analytic(a, b)
    if v is UNSUPPORTED:
        return hellinger2_quadrature(a, b, cells=cells, tail_bound=True)
    return v


def product_hellinger2(pairs: Iterable[tuple[Density, Density]], cells: int = 200_000) -> float:
    """``H^2 = sum_i h^2(P_i, Q_i)`` over independent coordinates."""
    return math.fsum(hellinger2(a, b, cells=cells) for a, b in pairs)
