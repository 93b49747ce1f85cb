"""Bounded comparison functions replacing the logarithm in likelihood ratios.

Two admissible functions are provided, ``PSI1(x) = (x-1)/(x+1)`` and
``PSI2(x) = (x-1)/sqrt(x^2+1)``, together with ``HALF_LOG`` (``x -> log(x)/2``),
which is unbounded and only exists so that maximum likelihood can be run
through the same machinery.

Ratios follow the conventions ``0/0 = 1`` and ``a/0 = +inf`` for ``a > 0``;
``psi(0) = -1`` and ``psi(+inf) = +1`` exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PsiKind",
    "PSI1",
    "PSI2",
    "HALF_LOG",
    "psi_kind",
    "psi_eval",
    "psi_ratio",
    "psi_log_ratio",
    "AxiomReport",
    "check_psi_axioms",
    "InequalityReport",
    "check_moment_inequalities",
]


@dataclass(frozen=True)
class PsiKind:
    """A psi function together with its moment-inequality constants.

    ``a2_sq`` is the square of the variance constant. ``HALF_LOG`` carries
    ``None`` for all three since no such constants exist for it.
    """

    variant: str
    a0: float | None = None
    a1: float | None = None
    a2_sq: float | None = None
    bounded: bool = field(default=True, compare=False)

    def __str__(self) -> str:
        return self.variant


PSI1 = PsiKind("psi1", a0=4.0, a1=3.0 / 8.0, a2_sq=3.0 * math.sqrt(2.0))
PSI2 = PsiKind("psi2", a0=4.97, a1=0.083, a2_sq=3.0 + 2.0 * math.sqrt(2.0))
HALF_LOG = PsiKind("halflog", bounded=False)

_BY_NAME = {k.variant: k for k in (PSI1, PSI2, HALF_LOG)}


def psi_kind(name: str | PsiKind) -> PsiKind:
    """Look up a kind by name (``psi1``, ``psi2``, ``halflog``)."""
    if isinstance(name, PsiKind):
        return name
    try:
        return _BY_NAME[name.lower()]
    except KeyError:
        raise ValueError(f"unknown psi kind {name!r}; expected one of {sorted(_BY_NAME)}") from None


def psi_eval(kind: PsiKind, x):
    """Evaluate psi on ``[0, +inf]``; scalar in, float out, arrays elementwise."""
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0):
        raise ValueError("psi is defined on [0, +inf] only")
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if kind.variant == "psi1":
            out = (arr - 1.0) / (arr + 1.0)
            out = np.where(np.isinf(arr), 1.0, out)
        elif kind.variant == "psi2":
            # for huge x, x*x overflows; (x-1)/x*sqrt(1+1/x^2) is the same value
            big = arr > 1e150
            safe = np.where(big, 1.0, arr)
            out = (safe - 1.0) / np.sqrt(safe * safe + 1.0)
            out = np.where(big, (1.0 - 1.0 / np.where(big, arr, 1.0)), out)
            out = np.where(np.isinf(arr), 1.0, out)
        elif kind.variant == "halflog":
            out = 0.5 * np.log(arr)
        else:
            raise ValueError(f"unknown psi variant {kind.variant!r}")
    return float(out) if out.ndim == 0 else out


def psi_ratio(kind: PsiKind, num, den):
    """``psi(sqrt(num/den))`` with the ``0/0 = 1`` and ``a/0 = +inf`` conventions.

    The bounded kinds use the forms ``(sqrt(a)-sqrt(b))/(sqrt(a)+sqrt(b))`` and
    ``(sqrt(a)-sqrt(b))/sqrt(a+b)``, which are exactly antisymmetric in
    ``(a, b)`` and invariant (to rounding) under a common rescaling.
    """
    a = np.asarray(num, dtype=float)
    b = np.asarray(den, dtype=float)
    if np.any(np.isnan(a)) or np.any(np.isnan(b)) or np.any(a < 0) or np.any(b < 0):
        raise ValueError("psi_ratio needs nonnegative arguments")
    with np.errstate(divide="ignore", invalid="ignore"):
        if kind.variant == "psi1":
            sa, sb = np.sqrt(a), np.sqrt(b)
            out = (sa - sb) / (sa + sb)
        elif kind.variant == "psi2":
            out = (np.sqrt(a) - np.sqrt(b)) / np.sqrt(a + b)
        elif kind.variant == "halflog":
            out = 0.25 * (np.log(a) - np.log(b))
        else:
            raise ValueError(f"unknown psi variant {kind.variant!r}")
    out = np.where((a == 0) & (b == 0), 0.0, out)
    return float(out) if out.ndim == 0 else out


def psi_log_ratio(kind: PsiKind, log_num, log_den):
    """``psi(sqrt(exp(log_num - log_den)))`` on log-densities.

    ``-inf`` entries stand for zero densities and obey the same conventions as
    :func:`psi_ratio`. Used by the estimation engine, where densities are kept
    in log space to avoid underflow.
    """
    la = np.asarray(log_num, dtype=float)
    lb = np.asarray(log_den, dtype=float)
    za = np.isneginf(la)
    zb = np.isneginf(lb)
    with np.errstate(invalid="ignore", over="ignore"):
        # u = log of sqrt(ratio)
        u = 0.5 * (la - lb)
        # both bounded forms are evaluated on |u| and signed, so that swapping
        # the arguments negates the result bit for bit
        au = np.abs(u)
        if kind.variant == "psi1":
            out = np.copysign(np.tanh(0.5 * au), u)
        elif kind.variant == "psi2":
            # (e^u - 1)/sqrt(e^{2u} + 1)
            e = np.exp(-au)
            out = np.copysign(-np.expm1(-au) / np.sqrt(1.0 + e * e), u)
        elif kind.variant == "halflog":
            out = 0.5 * u
        else:
            raise ValueError(f"unknown psi variant {kind.variant!r}")
    if kind.bounded:
        out = np.where(za & ~zb, -1.0, out)
        out = np.where(zb & ~za, 1.0, out)
    else:
        out = np.where(za & ~zb, -np.inf, out)
        out = np.where(zb & ~za, np.inf, out)
    out = np.where(za & zb, 0.0, out)
    return float(out) if out.ndim == 0 else out


@dataclass
class AxiomReport:
    kind: str
    antisymmetry_defect: float
    monotonicity_violations: int
    range_violations: int
    # window -> (min, max) of psi(x) / (log(x)/2); only filled for psi1
    log_ratio_windows: dict[tuple[float, float], tuple[float, float]] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.monotonicity_violations == 0 and self.range_violations == 0


_LOG_WINDOWS = ((0.5, 2.0), (0.25, 4.0))


def check_psi_axioms(kind: PsiKind, grid) -> AxiomReport:
    """Numerically check monotonicity, antisymmetry and boundedness on ``grid``.

    Strict monotonicity is only demanded where neighbouring values differ by
    more than one ulp. For ``PSI1`` the report also carries the range of
    ``psi1(x) / (log(x)/2)`` on the two windows ``[1/2, 2]`` and ``[1/4, 4]``
    (the point ``x = 1``, where the ratio is 0/0, is left out).
    """
    x = np.asarray(grid, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("grid must be a nonempty 1-d sequence")
    if np.any(~np.isfinite(x)) or np.any(x <= 0):
        raise ValueError("grid values must lie in (0, +inf)")
    if np.any(np.diff(x) <= 0):
        raise ValueError("grid must be strictly increasing")

    v = psi_eval(kind, x)
    vinv = psi_eval(kind, 1.0 / x)
    with np.errstate(invalid="ignore"):
        defect = float(np.nanmax(np.abs(v + vinv)))
    dv = np.diff(v)
    tol = np.spacing(np.maximum(np.abs(v[:-1]), np.abs(v[1:])))
    mono = int(np.sum(dv < -tol))
    rng = int(np.sum(~(np.abs(v) <= 1.0)))

    windows: dict[tuple[float, float], tuple[float, float]] = {}
    if kind.variant == "psi1":
        for lo, hi in _LOG_WINDOWS:
            sel = (x >= lo) & (x <= hi) & (x != 1.0)
            if np.any(sel):
                r = v[sel] / (0.5 * np.log(x[sel]))
                windows[(lo, hi)] = (float(r.min()), float(r.max()))
    return AxiomReport(kind.variant, defect, mono, rng, windows)


@dataclass
class InequalityReport:
    kind: str
    lhs_mean: float
    rhs_mean: float
    lhs_var: float
    rhs_var: float

    @property
    def slack_mean(self) -> float:
        return self.rhs_mean - self.lhs_mean

    @property
    def slack_var(self) -> float:
        return self.rhs_var - self.lhs_var


def check_moment_inequalities(kind: PsiKind, r, q, q2) -> InequalityReport:
    """Evaluate both moment inequalities for one triple of discrete laws.

    With ``T = psi(sqrt(q2/q))`` under ``r``, the bounds are
    ``E_r[T] <= a0 h2(r,q) - a1 h2(r,q2)`` and
    ``E_r[T^2] <= a2^2 (h2(r,q) + h2(r,q2))``. Arguments are
    :class:`~rhoest.hellinger.DiscreteDensity` objects on a common support.
    """
    from .hellinger import hellinger2_discrete, _check_same_support

    if not kind.bounded or kind.a0 is None:
        raise ValueError(f"{kind.variant} has no moment-inequality constants")
    _check_same_support(r, q)
    _check_same_support(r, q2)
    t = psi_ratio(kind, q2.mass, q.mass)
    rm = np.asarray(r.mass)
    lhs1 = math.fsum(rm * t)
    lhs2 = math.fsum(rm * t * t)
    h_q = hellinger2_discrete(r, q)
    h_q2 = hellinger2_discrete(r, q2)
    rhs1 = kind.a0 * h_q - kind.a1 * h_q2
    rhs2 = kind.a2_sq * (h_q + h_q2)
    return InequalityReport(kind.variant, lhs1, rhs1, lhs2, rhs2)
