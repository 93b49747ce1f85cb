"""The T statistic, rho-estimators and the baseline estimators they are compared with.

The rho-estimator over a finite family minimizes
``crit(q) = max_{q'} T(X, q, q')`` with ``T(X, q, q') = sum_i psi(sqrt(q'(X_i)/q(X_i)))``.
The search is exact. One row ``T(q_i, .)`` costs a pass over the cached
density matrix, and antisymmetry ``T(q_j, q_i) = -T(q_i, q_j)`` turns every
evaluated row into lower bounds on all other criteria, so most rows are
never computed. Ties go to the smallest index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from .densities import (
    Density,
    PairData,
    PathologicalGaussianVersion,
    PiecewiseConstant,
    affine_features,
)
from .models import CandidateFamily, PenalizedCollection
from .psi import PSI1, PsiKind, psi_kind, psi_log_ratio

__all__ = [
    "EstimateResult",
    "log_density_matrix",
    "t_statistic",
    "rho_criterion",
    "rho_estimate",
    "rho_estimate_matrix",
    "rho_estimate_penalized",
    "brute_force_oracle",
    "brute_force_oracle_penalized",
    "mle_estimate",
    "median_estimate",
    "grenander_estimate",
    "grenander_blocks",
    "grenander_brute_force",
    "gaussian_submodel_estimate",
    "pathological_loglik",
    "least_squares_fit",
]


@dataclass
class EstimateResult:
    """Outcome of an estimator over a finite family or collection.

    ``chosen_index`` is ``None`` only for maximum likelihood when every member
    has likelihood zero (``all_minus_inf``).
    """

    chosen_index: int | tuple[int, int] | None
    criterion_value: float
    adversary_index: int | tuple[int, int] | None = None
    per_pair_matrix: np.ndarray | None = field(default=None, repr=False)
    rows_evaluated: int = 0
    all_minus_inf: bool = False


# ---------------------------------------------------------------------------
# density matrices


def _n_obs(data) -> int:
    return len(data) if isinstance(data, PairData) else int(np.size(data))


def log_density_matrix(data, members: Sequence[Density]) -> np.ndarray:
    """``L[i, j] = log q_j(X_i)``, one column per member."""
    if isinstance(data, PairData):
        cols = [np.asarray(m.logpdf(data), dtype=float) for m in members]
    else:
        x = np.asarray(data, dtype=float).ravel()
        cols = [np.asarray(m.logpdf(x), dtype=float).reshape(x.shape) for m in members]
    return np.column_stack(cols) if cols else np.empty((_n_obs(data), 0))


def _family_block(data, family: CandidateFamily, per_observation: bool = False):
    """Log-density rows for one family as ``(L, counts)``.

    Step families come back with one row per occupied cell unless
    ``per_observation`` is set; otherwise there is one row per observation.
    """
    if family.structure == "step" and not isinstance(data, PairData) and not per_observation:
        x = np.asarray(data, dtype=float).ravel()
        cell = family.members[0].cell_index(x)
        with np.errstate(divide="ignore"):
            logl = np.log(family.step_levels)
        # an extra all -inf row stands for "outside every cell"
        logl = np.vstack([logl, np.full((1, logl.shape[1]), -np.inf)])
        idx, counts = np.unique(np.where(cell < 0, logl.shape[0] - 1, cell), return_counts=True)
        return logl[idx], counts.astype(float)
    if family.structure == "uniform" and not isinstance(data, PairData):
        x = np.asarray(data, dtype=float).ravel()
        a, b, h = family.intervals
        inside = (x[:, None] >= a[None, :]) & (x[:, None] <= b[None, :])
        return np.where(inside, np.log(h)[None, :], -np.inf), np.ones(x.size)
    return log_density_matrix(data, family.members), np.ones(_n_obs(data))


def _collapse(L: np.ndarray, counts: np.ndarray, drop_constant: bool):
    """Merge identical rows (adding counts) and optionally drop rows that are
    constant across members, whose psi terms are all zero."""
    if drop_constant and L.shape[0]:
        keep = np.all(L == L[:, :1], axis=1)
        L, counts = L[~keep], counts[~keep]
    if L.shape[0] > 1:
        first: dict[bytes, int] = {}
        inv = np.fromiter((first.setdefault(row.tobytes(), len(first)) for row in L), dtype=np.int64, count=L.shape[0])
        if len(first) < L.shape[0]:
            keep = np.unique(inv, return_index=True)[1]
            counts = np.bincount(inv, weights=counts, minlength=len(first))
            L = L[keep]
    return L, counts


def _start_index(L: np.ndarray, counts: np.ndarray, pen=None) -> int:
    """Argmax of a likelihood where each zero density costs 25 nats below the
    best member at that observation; only used to order the exact search."""
    if L.shape[0] == 0:
        return 0
    with np.errstate(invalid="ignore"):
        top = np.max(L, axis=1, keepdims=True)
        floor = np.where(np.isfinite(top), top - 25.0, 0.0)
        clipped = np.maximum(L, floor)
        clipped = np.where(np.isfinite(clipped), clipped, floor)
    score = counts @ clipped
    if pen is not None:
        score = score - pen
    return int(np.argmax(score))


# ---------------------------------------------------------------------------
# row providers: row(i)[j] = T(X, q_i, q_j)


class _DenseRows:
    def __init__(self, L: np.ndarray, counts: np.ndarray, kind: PsiKind):
        self.kind = kind
        self.m = L.shape[1]
        self.counts = np.asarray(counts, dtype=float)
        self.weight = float(self.counts.sum())
        self.L = L
        if kind.bounded and L.shape[0]:
            # sqrt of densities rescaled per observation; psi only sees ratios
            with np.errstate(invalid="ignore"):
                top = np.max(L, axis=1, keepdims=True)
                top = np.where(np.isfinite(top), top, 0.0)
                self.S = np.exp(0.5 * (L - top))
        else:
            self.S = None

    def row(self, i: int) -> np.ndarray:
        if self.L.shape[0] == 0:
            return np.zeros(self.m)
        if self.S is None:
            M = psi_log_ratio(self.kind, self.L, self.L[:, i : i + 1])
        else:
            S, s = self.S, self.S[:, i : i + 1]
            with np.errstate(invalid="ignore"):
                if self.kind.variant == "psi1":
                    M = (S - s) / (S + s)
                else:
                    M = (S - s) / np.sqrt(S * S + s * s)
            M[np.isnan(M)] = 0.0
        return np.add.reduce(self.counts[:, None] * M, axis=0)


class _UniformRows:
    """Interval densities: ``T(i, j) = N_j - N_i + N_ij psi(sqrt(h_j / h_i))``
    with ``N`` counts in closed intervals, from sorted data."""

    def __init__(self, x: np.ndarray, a, b, h, kind: PsiKind):
        self.kind = kind
        self.x = np.sort(np.asarray(x, dtype=float).ravel())
        self.a, self.b = np.asarray(a, float), np.asarray(b, float)
        self.logh = np.log(np.asarray(h, float))
        self.m = self.a.size
        self.weight = float(self.x.size)
        self.N = self._count(self.a, self.b)

    def _count(self, lo, hi):
        c = np.searchsorted(self.x, hi, side="right") - np.searchsorted(self.x, lo, side="left")
        return np.where(lo <= hi, c, 0).astype(float)

    @property
    def equal_heights(self) -> bool:
        return bool(np.all(self.logh == self.logh[0]))

    def row(self, i: int) -> np.ndarray:
        nij = self._count(np.maximum(self.a, self.a[i]), np.minimum(self.b, self.b[i]))
        p = psi_log_ratio(self.kind, self.logh, self.logh[i])
        return (self.N - self.N[i]) + nij * p

    def start(self) -> int:
        n = self.x.size
        floor = np.min(self.logh) - 25.0
        return int(np.argmax(self.N * self.logh + (n - self.N) * floor))


# ---------------------------------------------------------------------------
# exact minimax search


TIE_RTOL = 1e-12


def _tie_tol(weight: float) -> float:
    """Criteria closer than this are ties: sums of ``n`` bounded terms that
    agree in exact arithmetic can differ by rounding."""
    return TIE_RTOL * max(1.0, float(weight))


def _pick(crit: np.ndarray, tol: float) -> int:
    """Smallest index whose criterion is within ``tol`` of the minimum."""
    return int(np.flatnonzero(crit <= np.min(crit) + tol)[0])


def _minimax(rows, pen: np.ndarray | None, start: int, slack: float = 0.0, keep_matrix: bool = False):
    m = rows.m
    idx = np.arange(m)
    pen_v = np.zeros(m) if pen is None else np.asarray(pen, dtype=float)
    tol = _tie_tol(rows.weight)
    if keep_matrix:
        mat = np.vstack([rows.row(i) for i in range(m)])
        vals = mat - pen_v[None, :]
        adv = np.argmax(vals, axis=1)
        crit = vals[idx, adv] + pen_v
        best = _pick(crit, tol)
        return best, float(crit[best]), int(adv[best]), m, mat, list(enumerate(crit.tolist()))

    lb = np.zeros(m)  # the q' = q term gives crit >= 0
    crit = np.full(m, np.inf)
    advs = np.full(m, -1)
    evaluated = np.zeros(m, dtype=bool)
    best_val = math.inf
    cand, visited = start, []
    while True:
        r = rows.row(cand)
        v = r - pen_v
        k = int(np.argmax(v))
        c = float(v[k] + pen_v[cand])
        visited.append((cand, c))
        evaluated[cand] = True
        crit[cand], advs[cand] = c, k
        best_val = min(best_val, c)
        # crit(j) >= T(j, cand) - pen[cand] + pen[j], and T(j, cand) = -r[j] exactly
        with np.errstate(invalid="ignore"):
            lb = np.maximum(lb, (-r - pen_v[cand]) + pen_v)
        if slack > 0.0:
            open_ = ~evaluated & (lb < best_val - slack)
        else:
            open_ = ~evaluated & (lb <= best_val + tol)
        if not open_.any():
            break
        pool = idx[open_]
        cand = int(pool[np.argmin(lb[pool])])
    chosen = _pick(crit, tol) if slack == 0.0 else int(np.argmin(crit))
    return chosen, float(crit[chosen]), int(advs[chosen]), len(visited), None, visited


def _rows_for(data, family: CandidateFamily, kind: PsiKind):
    if family.structure == "uniform" and kind.bounded and not isinstance(data, PairData):
        a, b, h = family.intervals
        rows = _UniformRows(np.asarray(data, dtype=float), a, b, h, kind)
        return rows, rows.start()
    L, counts = _family_block(data, family)
    L, counts = _collapse(L, counts, drop_constant=True)
    return _DenseRows(L, counts, kind), _start_index(L, counts)


def rho_estimate(
    data,
    family: CandidateFamily,
    kind: PsiKind | str = PSI1,
    slack: float = 0.0,
    keep_matrix: bool = False,
    method: str = "auto",
) -> EstimateResult:
    """Exact rho-estimator over a finite family.

    ``method`` is ``auto``, ``dense`` (always use the density matrix) or
    ``uniform`` (interval-counting rows; interval families only). With a
    positive ``slack`` the result is within ``slack`` of the minimum.
    """
    kind = psi_kind(kind)
    if slack < 0:
        raise ValueError("slack must be nonnegative")
    if method == "dense" or (method == "auto" and family.structure != "uniform"):
        L, counts = _family_block(data, family)
        L, counts = _collapse(L, counts, drop_constant=True)
        rows, start = _DenseRows(L, counts, kind), _start_index(L, counts)
    elif method in ("auto", "uniform"):
        if family.structure != "uniform":
            raise ValueError("uniform rows need a family of interval densities")
        if not kind.bounded:
            L, counts = _family_block(data, family)
            L, counts = _collapse(L, counts, drop_constant=True)
            rows, start = _DenseRows(L, counts, kind), _start_index(L, counts)
        else:
            rows, start = _rows_for(data, family, kind)
            if rows.equal_heights and not keep_matrix:
                # psi(1) = 0 on overlaps, so crit(i) = max_j N_j - N_i
                adv = int(np.argmax(rows.N))
                crit = rows.N[adv] - rows.N
                best = int(np.argmin(crit))
                return EstimateResult(best, float(crit[best]), adv, None, 0)
    else:
        raise ValueError(f"unknown method {method!r}")
    chosen, val, adv, count, mat, _ = _minimax(rows, None, start, slack, keep_matrix)
    return EstimateResult(chosen, val, adv, mat, count)


def rho_estimate_matrix(
    log_dens, kind: PsiKind | str = PSI1, counts=None, pen=None, slack: float = 0.0, keep_matrix: bool = False
) -> EstimateResult:
    """Rho-estimator from a precomputed ``(observations, members)`` log-density
    matrix. Rows may describe non-identically distributed coordinates."""
    kind = psi_kind(kind)
    L = np.atleast_2d(np.asarray(log_dens, dtype=float))
    c = np.ones(L.shape[0]) if counts is None else np.asarray(counts, dtype=float)
    L, c = _collapse(L, c, drop_constant=True)
    pen_v = None if pen is None else np.asarray(pen, dtype=float)
    chosen, val, adv, count, mat, _ = _minimax(
        _DenseRows(L, c, kind), pen_v, _start_index(L, c, pen_v), slack, keep_matrix
    )
    return EstimateResult(chosen, val, adv, mat, count)


def _member_index(family: CandidateFamily, q) -> int:
    if isinstance(q, (int, np.integer)):
        if not 0 <= q < len(family):
            raise IndexError("member index out of range")
        return int(q)
    return family.index(q)


def rho_criterion(data, q, family: CandidateFamily, kind: PsiKind | str = PSI1) -> tuple[float, int]:
    """``(max_{q'} T(X, q, q'), first maximizing index)`` for a member ``q``
    (given as a member or its index)."""
    kind = psi_kind(kind)
    i = _member_index(family, q)
    rows, _ = _rows_for(data, family, kind)
    r = rows.row(i)
    k = int(np.argmax(r))
    return float(r[k]), k


def rho_estimate_penalized(
    data, collection: PenalizedCollection, kind: PsiKind | str = PSI1, slack: float = 0.0
) -> EstimateResult:
    """Minimize ``sup_{q'} [T(X, q, q') - pen(q')] + pen(q)`` over the union
    of the families; indices are ``(family, member)`` pairs."""
    kind = psi_kind(kind)
    if collection.pen is None:
        raise ValueError("penalties are not assigned; call assign_penalties first")
    n = _n_obs(data)
    L = np.hstack([_family_block(data, f, per_observation=True)[0] for f in collection.families])
    L, counts = _collapse(L, np.ones(n), drop_constant=True)
    pen = np.concatenate([np.full(len(f), p) for f, p in zip(collection.families, collection.pen)])
    chosen, val, adv, count, _, _ = _minimax(_DenseRows(L, counts, kind), pen, _start_index(L, counts, pen), slack)
    return EstimateResult(collection.locate(chosen), val, collection.locate(adv), None, count)


# ---------------------------------------------------------------------------
# the oracle: naive loops, plain floats, densities rather than log-densities


def _psi_scalar(variant: str, num: float, den: float) -> float:
    if num == 0.0 and den == 0.0:
        return 0.0
    if den == 0.0:
        return math.inf if variant == "halflog" else 1.0
    if num == 0.0:
        return -math.inf if variant == "halflog" else -1.0
    x = math.sqrt(num / den)
    if variant == "psi1":
        return (x - 1.0) / (x + 1.0)
    if variant == "psi2":
        return (x - 1.0) / math.sqrt(x * x + 1.0)
    return 0.5 * math.log(x)


def _oracle_table(data, members) -> list[list[float]]:
    if isinstance(data, PairData):
        return [[float(v) for v in np.asarray(m.pdf(data))] for m in members]
    x = np.asarray(data, dtype=float).ravel()
    return [[float(v) for v in np.broadcast_to(np.asarray(m.pdf(x), dtype=float), x.shape)] for m in members]


def _oracle(table, variant, pen):
    m = len(table)
    tol = TIE_RTOL * max(1.0, float(len(table[0])))
    crit, advs = [], []
    for i in range(m):
        best, arg = -math.inf, -1
        for j in range(m):
            t = 0.0
            for a, b in zip(table[j], table[i]):
                t += _psi_scalar(variant, a, b)
            v = t - pen[j]
            if v > best:
                best, arg = v, j
        crit.append(best + pen[i])
        advs.append(arg)
    lowest = min(crit)
    chosen = next(i for i in range(m) if crit[i] <= lowest + tol)
    return chosen, crit[chosen], advs[chosen]


def brute_force_oracle(data, family: CandidateFamily, kind: PsiKind | str = PSI1) -> EstimateResult:
    """``O(|family|^2 n)`` re-computation of :func:`rho_estimate` for tests."""
    kind = psi_kind(kind)
    table = _oracle_table(data, family.members)
    chosen, val, adv = _oracle(table, kind.variant, [0.0] * len(table))
    return EstimateResult(chosen, val, adv, None, len(table))


def brute_force_oracle_penalized(data, collection: PenalizedCollection, kind: PsiKind | str = PSI1) -> EstimateResult:
    kind = psi_kind(kind)
    if collection.pen is None:
        raise ValueError("penalties are not assigned")
    members = [m for f in collection.families for m in f.members]
    pen = [p for f, p in zip(collection.families, collection.pen) for _ in f.members]
    chosen, val, adv = _oracle(_oracle_table(data, members), kind.variant, pen)
    return EstimateResult(collection.locate(chosen), val, collection.locate(adv), None, len(members))


# ---------------------------------------------------------------------------
# t statistic


def t_statistic(data, q: Density, q2: Density, kind: PsiKind | str = PSI1) -> float:
    """``sum_i psi(sqrt(q2(X_i) / q(X_i)))`` with a correctly rounded sum."""
    kind = psi_kind(kind)
    if isinstance(data, PairData):
        lq, lq2 = q.logpdf(data), q2.logpdf(data)
    else:
        x = np.asarray(data, dtype=float).ravel()
        lq, lq2 = q.logpdf(x), q2.logpdf(x)
    terms = np.atleast_1d(psi_log_ratio(kind, lq2, lq))
    if np.any(np.isnan(terms)):
        raise ValueError("density evaluation failed at some observation")
    return math.fsum(terms)


# ---------------------------------------------------------------------------
# baselines


def mle_estimate(data, family: CandidateFamily) -> EstimateResult:
    """Argmax of the log-likelihood (``log 0 = -inf``), smallest index on ties.

    When every member has likelihood zero the result has ``chosen_index``
    ``None`` and ``all_minus_inf`` set.
    """
    if family.structure == "uniform" and not isinstance(data, PairData):
        x = np.asarray(data, dtype=float).ravel()
        a, b, h = family.intervals
        covers = (a <= x.min()) & (x.max() <= b)
        ll = np.where(covers, x.size * np.log(h), -np.inf)
    else:
        L, counts = _family_block(data, family)
        with np.errstate(invalid="ignore"):
            ll = np.add.reduce(np.where(counts[:, None] > 0, counts[:, None] * L, 0.0), axis=0)
    j = int(np.argmax(ll))
    if ll[j] == -np.inf:
        return EstimateResult(None, -math.inf, None, all_minus_inf=True)
    return EstimateResult(j, float(ll[j]))


def median_estimate(x) -> float:
    """Sample median, lower middle element for even sizes."""
    s = np.sort(np.asarray(x, dtype=float).ravel())
    if s.size == 0:
        raise ValueError("empty data")
    return float(s[(s.size - 1) // 2])


def _bin_counts(data, bin_grid):
    x = np.asarray(data, dtype=float).ravel()
    e = np.asarray(bin_grid, dtype=float)
    if x.size == 0:
        raise ValueError("empty data")
    if np.any(x < 0):
        raise ValueError("data must be nonnegative")
    if e.ndim != 1 or e.size < 2 or np.any(np.diff(e) <= 0):
        raise ValueError("bin grid must be strictly increasing with at least 2 points")
    if x.min() < e[0] or x.max() > e[-1]:
        raise ValueError("bin grid does not cover the data")
    j = np.searchsorted(e, x, side="right") - 1
    j = np.minimum(j, e.size - 2)
    return np.bincount(j, minlength=e.size - 1).astype(float), np.diff(e), x.size


def _pooled_levels(counts, widths, n, blocks):
    lv = np.empty(counts.size)
    for lo, hi in blocks:
        lv[lo:hi] = counts[lo:hi].sum() / (n * widths[lo:hi].sum())
    return lv


def grenander_blocks(counts, widths) -> list[tuple[int, int]]:
    """Pool-adjacent-violators for non-increasing levels ``counts/widths``,
    weighted by the widths. Returns half-open block ranges; neighbouring
    blocks with equal levels are left unmerged."""
    blocks: list[list[float]] = []  # [start, end, count, width]
    for j, (c, w) in enumerate(zip(counts, widths)):
        blocks.append([j, j + 1, float(c), float(w)])
        # merge while the left level is strictly below the right one
        while len(blocks) > 1 and blocks[-2][2] * blocks[-1][3] < blocks[-1][2] * blocks[-2][3]:
            s, _, c1, w1 = blocks[-2]
            _, e, c2, w2 = blocks.pop()
            blocks[-1] = [s, e, c1 + c2, w1 + w2]
    return [(int(b[0]), int(b[1])) for b in blocks]


def grenander_estimate(data, bin_grid) -> PiecewiseConstant:
    """Maximum likelihood over densities that are non-increasing step
    functions on ``bin_grid`` (left derivative of the least concave
    majorant of the binned empirical distribution)."""
    counts, widths, n = _bin_counts(data, bin_grid)
    lv = _pooled_levels(counts, widths, n, grenander_blocks(counts, widths))
    return PiecewiseConstant(tuple(np.asarray(bin_grid, dtype=float)), tuple(lv))


def grenander_brute_force(data, bin_grid) -> PiecewiseConstant:
    """Enumerate every partition of the bins into consecutive blocks, keep the
    ones whose pooled levels are non-increasing, and maximize the likelihood;
    among equal likelihoods the partition with the most blocks wins."""
    counts, widths, n = _bin_counts(data, bin_grid)
    k = counts.size
    best = None
    for r in range(k):
        for cuts in combinations(range(1, k), r):
            edges = (0,) + cuts + (k,)
            blocks = list(zip(edges[:-1], edges[1:]))
            lv = _pooled_levels(counts, widths, n, blocks)
            if np.any(np.diff(lv) > 0):
                continue
            with np.errstate(divide="ignore"):
                ll = math.fsum(c * math.log(v) for c, v in zip(counts, lv) if c > 0)
            key = (ll, len(blocks))
            if best is None or ll > best[0][0] + 1e-12 * abs(best[0][0]) or (
                abs(ll - best[0][0]) <= 1e-12 * abs(best[0][0]) and len(blocks) > best[0][1]
            ):
                best = (key, lv)
    return PiecewiseConstant(tuple(np.asarray(bin_grid, dtype=float)), tuple(best[1]))


def gaussian_submodel_estimate(
    x, step: float = 1e-3, half_width: float = 0.5, kind: PsiKind | str = PSI1
) -> tuple[float, list[tuple[float, float]]]:
    """Rho-estimator of ``theta_0`` on the submodel ``{(theta_0, 0, ..., 0)}``
    of ``N(theta, I_{k+1})`` from one observation vector ``x``.

    ``theta_0`` ranges over ``step * Z`` within ``half_width`` of ``x[0]``.
    Returns the estimate and the ``(theta_0, criterion)`` pairs the exact
    search evaluated.
    """
    x = np.asarray(x, dtype=float).ravel()
    if x.size < 2:
        raise ValueError("need k + 1 >= 2 coordinates")
    if not (step > 0 and half_width >= 0):
        raise ValueError("step must be positive and half_width nonnegative")
    K = int(math.floor(half_width / step))
    center = round(x[0] / step)
    grid = step * (center + np.arange(-K, K + 1))
    # coordinates 1..k have the same density under every member, so their
    # psi terms are psi(1) = 0 and they drop out of every T
    L = (-0.5 * (x[0] - grid) ** 2)[None, :]
    kind = psi_kind(kind)
    rows = _DenseRows(L, np.ones(1), kind)
    chosen, _, _, _, _, visited = _minimax(rows, None, _start_index(L, np.ones(1)))
    return float(grid[chosen]), [(float(grid[i]), c) for i, c in visited]


def pathological_loglik(data, theta: float) -> float:
    """Log-likelihood of ``theta`` under the altered Gaussian version
    (see :class:`~rhoest.densities.PathologicalGaussianVersion`); overflow
    gives ``+inf``."""
    x = np.asarray(data, dtype=float).ravel()
    v = np.atleast_1d(PathologicalGaussianVersion(float(theta)).logpdf(x))
    if np.any(np.isposinf(v)):
        return math.inf
    return math.fsum(v)


def least_squares_fit(data: PairData, feature_map=affine_features) -> np.ndarray:
    """Ordinary least squares coefficients (SVD-based solve)."""
    F = np.asarray(feature_map(data.w), dtype=float)
    if np.linalg.matrix_rank(F) < F.shape[1]:
        raise np.linalg.LinAlgError("design matrix is rank deficient")
    coef, *_ = np.linalg.lstsq(F, data.y, rcond=None)
    return coef
