"""Registry of Monte Carlo experiments.

Each entry prepares its model once, then produces a list of
:class:`~rhoest.harness.report.Record` per replication from that
replication's own random stream, and finally compares the pooled records
with the relevant bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import special

from ..densities import (
    Cauchy,
    Exponential,
    Gaussian,
    HeavyTailP,
    Mixture,
    PairData,
    PiecewiseConstant,
    TruncatedExponential,
    UniformInterval,
)
from ..estimators import (
    gaussian_submodel_estimate,
    grenander_brute_force,
    grenander_estimate,
    least_squares_fit,
    median_estimate,
    mle_estimate,
    pathological_loglik,
    rho_criterion,
    rho_estimate,
    rho_estimate_penalized,
)
from ..hellinger import hellinger2_analytic, hellinger2_quadrature
from ..models import (
    assign_penalties,
    build_decreasing_family,
    build_histogram_family,
    build_location_family,
    build_regression_dictionary,
    build_uniform_scale_family,
)
from ..psi import psi_kind
from ..sampling import (
    Contaminated,
    GaussianMean,
    MixtureAlphaTheta,
    OutlierInjected,
    RegressionLaw,
    UniformScale,
    draw,
    rng_stream,
)
from .config import ConfigError, ExperimentConfig
from .report import Check, Record, format_estimate

__all__ = ["Experiment", "Context", "REGISTRY", "get_experiment"]

# sub-stream for quantities reported outside the per-replication records
EXTRA_STREAM = 2**62


@dataclass
class Context:
    name: str
    n: int
    reps: int
    seed: int
    kinds: tuple
    estimators: tuple
    params: dict
    state: dict = field(default_factory=dict)

    def rec(self, setting, rep, estimator, estimate, **kw) -> Record:
        return Record(self.name, setting, rep, self.seed, estimator, format_estimate(estimate), **kw)

    def uses(self, estimator: str) -> bool:
        return estimator in self.estimators


@dataclass(frozen=True)
class Experiment:
    name: str
    summary: str
    n: int
    reps: int
    estimators: tuple
    params: dict
    prepare: Callable[[Context], None]
    replicate: Callable[[Context, int], list]
    evaluate: Callable[[Context, list], tuple]

    def context(self, cfg: ExperimentConfig) -> Context:
        unknown = set(cfg.params) - set(self.params)
        if unknown:
            raise ConfigError(f"{self.name} has no parameters {sorted(unknown)}; known: {sorted(self.params)}")
        est = self.estimators if cfg.estimators is None else cfg.estimators
        bad = [e for e in est if e not in self.estimators]
        if bad:
            raise ConfigError(f"{self.name} does not support estimators {bad}; supported: {list(self.estimators)}")
        params = {**self.params, **cfg.params}
        kinds = tuple(psi_kind(p) for p in cfg.psi)
        return Context(self.name, cfg.n or self.n, cfg.reps or self.reps, cfg.seed, kinds, tuple(est), params)


def _binom_se(p: float, reps: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 0.0) / reps)


def _by(records, setting=None, estimator=None):
    return [r for r in records if (setting is None or r.setting == setting)
            and (estimator is None or r.estimator == estimator)]


def _mean_se(vals):
    v = np.asarray(vals, dtype=float)
    se = float(np.std(v, ddof=1) / math.sqrt(v.size)) if v.size > 1 else math.nan
    return float(v.mean()), se


# ---------------------------------------------------------------------------
# 1. one outlier against U[0, theta]


def _e1_prepare(ctx):
    p = ctx.params
    per_unit = round(1.0 / p["theta_step"])
    k = np.arange(1, round(p["theta_max"] * per_unit) + 1)
    ctx.state["family"] = build_uniform_scale_family(k / per_unit)


def _e1_law(ctx):
    p = ctx.params
    return OutlierInjected(UniformScale(p["truth_theta"]), (0,), (p["outlier"],))


def _e1_rep(ctx, rep):
    fam = ctx.state["family"]
    p = ctx.params
    x = draw(_e1_law(ctx), ctx.n, rng_stream(ctx.seed, rep))
    out = []
    lo, hi = p["rho_window"]
    for k in ctx.kinds:
        if ctx.uses("rho"):
            th = fam.params[rho_estimate(x, fam, k).chosen_index]
            err = abs(th - p["truth_theta"])
            out.append(ctx.rec("outlier", rep, f"rho_{k}", th, sq_loss=err**2, abs_loss=err,
                               flags={"in_window": lo <= th <= hi}))
    if ctx.uses("mle"):
        m = mle_estimate(x, fam)
        th = None if m.chosen_index is None else fam.params[m.chosen_index]
        err = math.inf if th is None else abs(th - p["truth_theta"])
        out.append(ctx.rec("outlier", rep, "mle", th, sq_loss=err**2, abs_loss=err,
                           flags={"all_minus_inf": m.all_minus_inf}))
    return out


def _e1_eval(ctx, records):
    p = ctx.params
    checks, extras = [], {}
    for k in ctx.kinds:
        rs = _by(records, estimator=f"rho_{k}")
        if rs:
            frac = sum(r.flag("in_window") for r in rs) / len(rs)
            checks.append(Check(f"rho_{k}_in_window_fraction", frac, p["rho_fraction"], frac >= p["rho_fraction"],
                                f"theta_hat in {p['rho_window']}"))
    rs = _by(records, estimator="mle")
    if rs:
        exact = sum(r.estimate == repr(float(p["outlier"])) for r in rs)
        checks.append(Check("mle_equals_outlier_fraction", exact / len(rs), 1.0, exact == len(rs)))
        # the model's sample size verbatim, maximum likelihood only
        fam = ctx.state["family"]
        x = draw(_e1_law(ctx), p["mle_n_verbatim"], rng_stream(ctx.seed, EXTRA_STREAM))
        m = mle_estimate(x, fam)
        th = fam.params[m.chosen_index]
        extras["mle_verbatim"] = {"n": p["mle_n_verbatim"], "theta_hat": th, "sample_max": float(x.max())}
        checks.append(Check("mle_verbatim_n_equals_outlier", th, p["outlier"], th == p["outlier"]))
    return checks, extras


# ---------------------------------------------------------------------------
# 2. translation model with an unbounded density


def _e2_prepare(ctx):
    p = ctx.params
    per_unit = round(1.0 / p["theta_step"])
    k = np.arange(round(p["grid_lo"] * per_unit), round(p["grid_hi"] * per_unit) + 1)
    ctx.state["family"] = build_location_family(HeavyTailP(0.0), k / per_unit)


def _e2_rep(ctx, rep):
    fam = ctx.state["family"]
    th0 = ctx.params["theta"]
    x = draw(HeavyTailP(th0), ctx.n, rng_stream(ctx.seed, rep))
    out = []

    def add(name, th, flags=None):
        err = abs(th - th0)
        out.append(ctx.rec("translation", rep, name, th, sq_loss=err**2, abs_loss=ctx.n * err, flags=flags or {}))

    if ctx.uses("rho"):
        for k in ctx.kinds:
            add(f"rho_{k}", fam.params[rho_estimate(x, fam, k).chosen_index])
    if ctx.uses("median"):
        add("median", median_estimate(x))
    if ctx.uses("mle"):
        m = mle_estimate(x, fam)
        th = fam.params[m.chosen_index]
        near = float(np.min(np.abs(x - th)))
        add("mle", th, {"next_to_observation": near <= ctx.params["theta_step"]})
    return out


def _e2_eval(ctx, records):
    extras = {}
    for est in sorted({r.estimator for r in records}):
        v = np.sort([r.abs_loss for r in _by(records, estimator=est)])
        extras[f"{est}_n_abs_error"] = {"median": float(np.median(v)), "q90": float(v[int(0.9 * (v.size - 1))])}
    return [], extras


# ---------------------------------------------------------------------------
# 3. Gaussian submodel: estimate theta_0 with theta' fixed at 0


def _e3_settings(ctx):
    k = ctx.n
    a = np.zeros(k + 1)
    a[0] = k**0.25
    b = np.zeros(k + 1)
    b[1] = ctx.params["theta_prime_norm"]
    return [("theta0=k^(1/4)", a), (f"|theta'|={ctx.params['theta_prime_norm']:g}", b)]


def _e3_rep(ctx, rep):
    p = ctx.params
    out = []
    for si, (name, theta) in enumerate(_e3_settings(ctx)):
        x = draw(GaussianMean(theta), 1, rng_stream(ctx.seed, rep, si))
        tail = float(np.sum(theta[1:] ** 2))
        if ctx.uses("mle"):
            out.append(ctx.rec(name, rep, "mle", x[0], sq_loss=(x[0] - theta[0]) ** 2 + tail))
        if ctx.uses("rho"):
            for k in ctx.kinds:
                th, _ = gaussian_submodel_estimate(x, p["step"], p["half_width"], k)
                nearest = abs(th - x[0]) <= 0.5 * p["step"] * (1 + 1e-9)
                out.append(ctx.rec(name, rep, f"rho_{k}", th, sq_loss=(th - theta[0]) ** 2 + tail,
                                   abs_loss=abs(th - x[0]), flags={"nearest_grid_point": nearest}))
    return out


def _e3_eval(ctx, records):
    checks = []
    for name, theta in _e3_settings(ctx):
        target = 1.0 + float(np.sum(theta[1:] ** 2))
        for est in sorted({r.estimator for r in _by(records, setting=name)}):
            rs = _by(records, name, est)
            mean, se = _mean_se([r.sq_loss for r in rs])
            checks.append(Check(f"{name}:{est}:risk_matches", mean, target, abs(mean - target) <= 3 * se,
                                f"se={se:.4g}"))
            checks.append(Check(f"{name}:{est}:risk_below_5", mean, 5.0 + 3 * se, mean <= 5.0 + 3 * se))
            if est.startswith("rho_"):
                ok = sum(r.flag("nearest_grid_point") for r in rs)
                checks.append(Check(f"{name}:{est}:nearest_grid_point", ok / len(rs), 1.0, ok == len(rs)))
    return checks, {}


# ---------------------------------------------------------------------------
# 4. a density version that breaks maximum likelihood


def _e4_sizes(ctx):
    return [ctx.n] + [int(m) for m in ctx.params["extra_n"] if int(m) != ctx.n]


def _e4_rep(ctx, rep):
    out = []
    for si, n in enumerate(_e4_sizes(ctx)):
        x = draw(Gaussian(0.0, 1.0), n, rng_stream(ctx.seed, rep, si))
        top, mean = float(x.max()), float(x.mean())
        wins = pathological_loglik(x, top) > pathological_loglik(x, mean)
        th = top if wins else mean
        out.append(ctx.rec(f"n={n}", rep, "mle", th, sq_loss=th**2, flags={"max_beats_mean": wins}))
    return out


def _e4_eval(ctx, records):
    checks, extras = [], {}
    need = ctx.params["required_fraction"]
    for n in _e4_sizes(ctx):
        rs = _by(records, setting=f"n={n}")
        frac = sum(r.flag("max_beats_mean") for r in rs) / len(rs)
        # the exotic branch wins about when max^2 > log n, so P ~ 1 - Phi(sqrt(log n))^n
        approx = float(1.0 - special.ndtr(math.sqrt(math.log(n))) ** n)
        extras[f"n={n}"] = {"fraction": frac, "approximation": approx}
        if n == ctx.n:
            checks.append(Check(f"n={n}:max_beats_mean_fraction", frac, need, frac >= need,
                                f"approximate probability {approx:.3f}"))
    return checks, extras


# ---------------------------------------------------------------------------
# 5. misspecified uniform location model under a two-bump mixture


def _e5_prepare(ctx):
    p = ctx.params
    for a in p["alphas"]:
        if not 0 <= a < 0.5:
            raise ConfigError("alphas must lie in [0, 1/2)")
    per_unit = round(1.0 / p["theta_step"])
    k = np.arange(round(p["grid_lo"] * per_unit), round(p["grid_hi"] * per_unit) + 1)
    ctx.state["family"] = build_location_family(UniformInterval(0.0, 1.0), k / per_unit)


def _e5_rep(ctx, rep):
    fam = ctx.state["family"]
    th0 = ctx.params["theta0"]
    out = []
    for si, a in enumerate(ctx.params["alphas"]):
        name = f"alpha={a:g}"
        x = draw(MixtureAlphaTheta(a, th0), ctx.n, rng_stream(ctx.seed, rep, si))
        if ctx.uses("mle"):
            m = mle_estimate(x, fam)
            th = None if m.chosen_index is None else fam.params[m.chosen_index]
            err = math.inf if th is None else abs(th - th0)
            out.append(ctx.rec(name, rep, "mle", th, abs_loss=err, flags={"all_minus_inf": m.all_minus_inf}))
        if ctx.uses("rho"):
            for k in ctx.kinds:
                th = fam.params[rho_estimate(x, fam, k).chosen_index]
                out.append(ctx.rec(name, rep, f"rho_{k}", th, abs_loss=abs(th - th0)))
    return out


def deviation_bound(n: int, alpha: float, c: float) -> float:
    return math.exp(-n * (1 - 2 * alpha) ** 2 / 2) + 2 * math.exp(-(1 - alpha) * c)


def _e5_eval(ctx, records):
    checks, extras = [], {}
    n = ctx.n
    for a in ctx.params["alphas"]:
        name = f"alpha={a:g}"
        rs = _by(records, setting=name, estimator="mle")
        if rs:
            finite = sum(1 - r.flag("all_minus_inf") for r in rs) / len(rs)
            p_th = (1 - a) ** n + a**n
            se = _binom_se(p_th, len(rs))
            checks.append(Check(f"{name}:mle_finite_likelihood_frequency", finite, p_th,
                                abs(finite - p_th) <= 3 * se + 1e-15, f"se={se:.3g}"))
        for k in ctx.kinds:
            rs = _by(records, setting=name, estimator=f"rho_{k}")
            if not rs:
                continue
            err = np.array([r.abs_loss for r in rs])
            for c in ctx.params["cs"]:
                freq = float(np.mean(err > c / n))
                bound = deviation_bound(n, a, c)
                se = _binom_se(freq, len(rs))
                checks.append(Check(f"{name}:rho_{k}:c={c:g}:deviation", freq, bound + 3 * se,
                                    freq <= bound + 3 * se, f"bound={bound:.5g}, se={se:.3g}"))
    return checks, extras


# ---------------------------------------------------------------------------
# 6 and 7. histogram estimation under contamination and outliers


def _hist_prepare(ctx):
    p = ctx.params
    edges = tuple(float(e) for e in p["partition"])
    masses = np.asarray(p["base_masses"], dtype=float)
    widths = np.diff(edges)
    ctx.state["base"] = PiecewiseConstant(edges, tuple(masses / widths))
    ctx.state["family"] = build_histogram_family(edges, p["step"])


def _hist_fit(ctx, x, truth, setting, rep):
    fam = ctx.state["family"]
    out = []

    def add(name, idx):
        q = fam.members[idx]
        out.append(ctx.rec(setting, rep, name, np.asarray(fam.params[idx]) * ctx.params["step"],
                           h2_loss=hellinger2_analytic(truth, q)))

    if ctx.uses("rho"):
        for k in ctx.kinds:
            add(f"rho_{k}", rho_estimate(x, fam, k).chosen_index)
    if ctx.uses("mle"):
        m = mle_estimate(x, fam)
        if m.chosen_index is None:
            out.append(ctx.rec(setting, rep, "mle", None, h2_loss=1.0, flags={"all_minus_inf": True}))
        else:
            add("mle", m.chosen_index)
    return out


def _e6_rep(ctx, rep):
    p = ctx.params
    base = ctx.state["base"]
    q = UniformInterval(*p["contaminant"])
    out = []
    for eps in p["eps"]:
        # one stream for every eps: the samples are coupled across settings
        x = draw(Contaminated(eps, base, q), ctx.n, rng_stream(ctx.seed, rep))
        truth = Mixture((1 - eps, eps), (base, q)) if eps > 0 else base
        out += _hist_fit(ctx, x, truth, f"eps={eps:g}", rep)
    return out


def _e7_rep(ctx, rep):
    p = ctx.params
    base = ctx.state["base"]
    out = []
    for frac in p["fractions"]:
        k = int(round(frac * ctx.n))
        law = OutlierInjected(base, tuple(range(k)), (p["outlier_value"],) * k) if k else base
        x = draw(law, ctx.n, rng_stream(ctx.seed, rep))
        out += _hist_fit(ctx, x, base, f"outliers={frac:g}", rep)
    return out


def _stability_checks(ctx, records, key, levels):
    checks = []
    zero = f"{key}={levels[0]:g}"
    for est in sorted({r.estimator for r in records}):
        if not est.startswith("rho_"):
            continue
        r0 = {r.rep: r.h2_loss for r in _by(records, zero, est)}
        for lv in levels[1:]:
            rs = _by(records, f"{key}={lv:g}", est)
            diff = np.array([r.h2_loss - r0[r.rep] for r in rs])
            mean, se = _mean_se(diff)
            checks.append(Check(f"{key}={lv:g}:{est}:risk_increase", mean, 2 * lv + 3 * se,
                                mean <= 2 * lv + 3 * se, f"paired se={se:.3g}"))
    return checks


def _e6_eval(ctx, records):
    return _stability_checks(ctx, records, "eps", ctx.params["eps"]), {}


def _e7_eval(ctx, records):
    return _stability_checks(ctx, records, "outliers", ctx.params["fractions"]), {}


# ---------------------------------------------------------------------------
# 8. convex models: the maximum likelihood member is a near-saddle point


def _e8_prepare(ctx):
    p = ctx.params
    fams = []
    for part in p["partitions"]:
        fam = build_histogram_family(part, p["step"])
        dec = build_decreasing_family(part, p["step"])
        fams.append((tuple(float(e) for e in part), fam, {c: i for i, c in enumerate(fam.params)}, dec))
    ctx.state["families"] = fams


def nearest_lattice_counts(counts, total: int) -> tuple[int, ...]:
    """Largest-remainder rounding of ``counts`` to integers summing to ``total``."""
    c = np.asarray(counts, dtype=float)
    exact = c / c.sum() * total
    base = np.floor(exact).astype(int)
    short = total - int(base.sum())
    # ties in the remainder go to the earlier cell
    order = sorted(range(c.size), key=lambda j: (-(exact[j] - base[j]), j))
    for j in order[:short]:
        base[j] += 1
    return tuple(int(v) for v in base)


def _e8_rep(ctx, rep):
    p = ctx.params
    part, fam, lookup, dec = ctx.state["families"][rep % len(ctx.state["families"])]
    rng = rng_stream(ctx.seed, rep)
    cells = len(part) - 1
    masses = rng.dirichlet(np.ones(cells))
    truth = PiecewiseConstant(part, tuple(masses / np.diff(part)))
    x = draw(truth, ctx.n, rng)
    setting = f"cells={cells}"
    counts = np.bincount(truth.cell_index(x), minlength=cells)
    total = round(1.0 / p["step"])
    near = lookup[nearest_lattice_counts(counts, total)]
    slack_cap = ctx.n * p["step"]
    out = []
    if ctx.uses("mle"):
        for k in ctx.kinds:
            c_near, _ = rho_criterion(x, near, fam, k)
            best = rho_estimate(x, fam, k)
            slack = c_near - best.criterion_value
            out.append(ctx.rec(setting, rep, f"mle_lattice_{k}", np.asarray(fam.params[near]) / total,
                               abs_loss=slack, flags={"within_slack": slack <= slack_cap}))
    if ctx.uses("grenander"):
        g = grenander_estimate(x, part)
        b = grenander_brute_force(x, part)
        exact = g.levels == b.levels
        gm = g.cell_masses
        # nearest decreasing lattice member to the Grenander masses, in l1
        pts = np.asarray(dec.params, dtype=float) / total
        j = int(np.argmin(np.abs(pts - gm).sum(axis=1)))
        slacks = []
        for k in ctx.kinds:
            c_j, _ = rho_criterion(x, j, dec, k)
            slacks.append(c_j - rho_estimate(x, dec, k).criterion_value)
        out.append(ctx.rec(setting, rep, "grenander", gm, abs_loss=max(slacks),
                           flags={"pava_matches_brute_force": exact}))
    return out


def _e8_eval(ctx, records):
    checks = []
    for k in ctx.kinds:
        rs = _by(records, estimator=f"mle_lattice_{k}")
        if rs:
            ok = sum(r.flag("within_slack") for r in rs)
            worst = max(r.abs_loss for r in rs)
            checks.append(Check(f"mle_lattice_{k}:saddle_within_n_step", ok / len(rs), 1.0, ok == len(rs),
                                f"largest slack {worst:.4g}, cap {ctx.n * ctx.params['step']:g}"))
    rs = _by(records, estimator="grenander")
    if rs:
        ok = sum(r.flag("pava_matches_brute_force") for r in rs)
        checks.append(Check("grenander:pava_matches_brute_force", ok / len(rs), 1.0, ok == len(rs)))
    return checks, {}


# ---------------------------------------------------------------------------
# 9. linear regression with a (coefficient grid, error density) dictionary


_ERRORS = {
    "uniform": lambda: UniformInterval(-1.0, 1.0),
    "cauchy": lambda: Cauchy(0.0, 1.0),
}


def _e9_prepare(ctx):
    p = ctx.params
    g = np.linspace(-1.0, 1.0, p["grid_points"])
    dim = len(p["coef"]) - 1
    grid = np.array(np.meshgrid(*([g] * (dim + 1)), indexing="ij")).reshape(dim + 1, -1).T
    names = list(p["dictionary"])
    for nm in names + [p["errors"]]:
        if nm not in _ERRORS:
            raise ConfigError(f"unknown error law {nm!r}; choose from {sorted(_ERRORS)}")
    col = build_regression_dictionary(None, [grid], [_ERRORS[nm]() for nm in names], names)
    ctx.state["collection"] = assign_penalties(col, p["kappa"], ctx.n)
    # the truth is snapped to the grid so the model contains it
    snap = np.array([g[np.argmin(np.abs(g - c))] for c in p["coef"]])
    ctx.state["coef"] = snap
    ctx.state["law"] = RegressionLaw(tuple(snap), _ERRORS[p["errors"]](), dim=dim)


def _e9_rep(ctx, rep):
    p = ctx.params
    col, beta, law = ctx.state["collection"], ctx.state["coef"], ctx.state["law"]
    clean = draw(law, ctx.n, rng_stream(ctx.seed, rep))
    y = clean.y.copy()
    y[0] += p["outlier"]
    out = []
    for setting, data in (("clean", clean), ("outlier", PairData(clean.w, y))):
        fstar = law.regression_function(data.w)

        def add(name, b):
            b = np.asarray(b, dtype=float)
            fhat = law.feature_map(data.w) @ b
            rloss = float(np.mean(np.abs(fstar - fhat) ** p["r"]))
            out.append(ctx.rec(setting, rep, name, b, sq_loss=float(np.sum((b - beta) ** 2)), abs_loss=rloss))

        if ctx.uses("rho_penalized"):
            for k in ctx.kinds:
                res = rho_estimate_penalized(data, col, k)
                f, j = res.chosen_index
                add(f"rho_{k}", col.families[f].params[j])
        if ctx.uses("least_squares"):
            add("least_squares", least_squares_fit(data))
    return out


def _e9_eval(ctx, records):
    checks = []
    ls = {(r.setting, r.rep): math.sqrt(r.sq_loss) for r in _by(records, estimator="least_squares")}
    for k in ctx.kinds:
        est = f"rho_{k}"
        rs = _by(records, "clean", est)
        if not rs or not ls:
            continue
        med_rho = float(np.median([math.sqrt(r.sq_loss) for r in rs]))
        med_ls = float(np.median([ls[("clean", r.rep)] for r in rs]))
        checks.append(Check(f"clean:{est}:median_coef_error_at_most_ls", med_rho, med_ls, med_rho <= med_ls))
        ro = _by(records, "outlier", est)
        wins = [ls[("outlier", r.rep)] >= ctx.params["ls_ratio"] * math.sqrt(r.sq_loss) for r in ro]
        frac = sum(wins) / len(wins)
        checks.append(Check(f"outlier:{est}:ls_error_10x_fraction", frac, ctx.params["ls_fraction"],
                            frac >= ctx.params["ls_fraction"]))
    return checks, {}


# ---------------------------------------------------------------------------
# 10. exponential against its truncation: closed form versus quadrature


def _e10_rep(ctx, rep):
    if rep != 0:
        return []  # deterministic; computed once
    p = ctx.params
    out = []
    for th in p["thetas"]:
        for T in p["Ts"]:
            a, b = Exponential(th), TruncatedExponential(th, T)
            exact = hellinger2_analytic(a, b)
            quad = hellinger2_quadrature(a, b, cells=p["cells"], window=(0.0, T), tail_bound=True)
            closed = 1.0 - math.sqrt(1.0 - math.exp(-th * T))
            out.append(ctx.rec(f"theta={th:g},T={T:g}", rep, "quadrature", quad, h2_loss=exact,
                               abs_loss=abs(quad - exact), sq_loss=abs(closed - exact)))
    for n in p["rate_ns"]:
        # truncation at theta T = (2/3) log n costs about n^(-2/3) / 2
        T = (2.0 / 3.0) * math.log(n)
        h2 = hellinger2_analytic(Exponential(1.0), TruncatedExponential(1.0, T))
        out.append(ctx.rec(f"n={n:g}", rep, "truncation_rate", T, h2_loss=h2, abs_loss=h2 * n ** (2.0 / 3.0)))
    return out


def _e10_eval(ctx, records):
    checks = []
    tol = ctx.params["tolerance"]
    for r in _by(records, estimator="quadrature"):
        checks.append(Check(f"{r.setting}:quadrature_vs_closed_form", r.abs_loss, tol, r.abs_loss <= tol))
    rates = [r.abs_loss for r in _by(records, estimator="truncation_rate")]
    return checks, {"h2_times_n^(2/3)": rates}


def _nothing(ctx):
    return None


REGISTRY: dict[str, Experiment] = {}


def _register(e: Experiment):
    REGISTRY[e.name] = e


_register(Experiment(
    "outlier_uniform_scale", "U[0, theta] grid, one observation moved to 100; |theta_hat - 1|",
    n=10_000, reps=200, estimators=("rho", "mle"),
    params={"theta_step": 0.01, "theta_max": 101.0, "truth_theta": 1.0, "outlier": 100.0,
            "rho_window": [0.98, 1.05], "rho_fraction": 0.99, "mle_n_verbatim": 1_000_000},
    prepare=_e1_prepare, replicate=_e1_rep, evaluate=_e1_eval))

_register(Experiment(
    "unbounded_likelihood_translation", "translation grid of an unbounded density; n |theta_hat - theta|",
    n=50, reps=200, estimators=("rho", "median", "mle"),
    params={"theta": 0.0, "grid_lo": -1.0, "grid_hi": 1.0, "theta_step": 0.001},
    prepare=_e2_prepare, replicate=_e2_rep, evaluate=_e2_eval))

_register(Experiment(
    "gaussian_submodel", "N(theta, I_{k+1}) with theta' fixed at 0 (n is k); squared error",
    n=128, reps=10_000, estimators=("rho", "mle"),
    params={"step": 0.001, "half_width": 0.5, "theta_prime_norm": 2.0},
    prepare=_nothing, replicate=_e3_rep, evaluate=_e3_eval))

_register(Experiment(
    "pathological_mle", "altered Gaussian density version; does theta = X_(n) beat the mean",
    n=100, reps=1_000, estimators=("mle",),
    params={"extra_n": [400, 1000], "required_fraction": 0.95},
    prepare=_nothing, replicate=_e4_rep, evaluate=_e4_eval))

_register(Experiment(
    "approx_model_mixture", "uniform location grid under a two-bump mixture; deviation frequencies",
    n=100, reps=10_000, estimators=("rho", "mle"),
    params={"alphas": [0.0, 0.05, 0.1, 0.2], "cs": [2.0, 5.0, 10.0], "theta0": 0.0,
            "grid_lo": -1.0, "grid_hi": 101.0, "theta_step": 0.005},
    prepare=_e5_prepare, replicate=_e5_rep, evaluate=_e5_eval))

_register(Experiment(
    "contamination_density", "histogram lattice, contaminated truth; h2(truth, estimate)",
    n=200, reps=200, estimators=("rho", "mle"),
    params={"eps": [0.0, 0.05, 0.1], "partition": [0.0, 0.25, 0.5, 0.75, 1.0], "step": 0.05,
            "base_masses": [0.4, 0.3, 0.2, 0.1], "contaminant": [2.0, 3.0]},
    prepare=_hist_prepare, replicate=_e6_rep, evaluate=_e6_eval))

_register(Experiment(
    "equidistribution_outliers", "histogram lattice, a fraction of observations replaced; h2(base, estimate)",
    n=200, reps=200, estimators=("rho", "mle"),
    params={"fractions": [0.0, 0.05, 0.1], "partition": [0.0, 0.25, 0.5, 0.75, 1.0], "step": 0.05,
            "base_masses": [0.4, 0.3, 0.2, 0.1], "outlier_value": 0.95},
    prepare=_hist_prepare, replicate=_e7_rep, evaluate=_e7_eval))

_register(Experiment(
    "convex_mle_equivalence", "histogram and decreasing lattices; criterion slack of the likelihood maximizer",
    n=100, reps=100, estimators=("mle", "grenander"),
    params={"partitions": [[0.0, 0.5, 1.0], [0.0, 0.3, 0.6, 1.0], [0.0, 0.2, 0.45, 0.7, 1.0]], "step": 0.02},
    prepare=_e8_prepare, replicate=_e8_rep, evaluate=_e8_eval))

_register(Experiment(
    "regression_heavy_tail", "linear model, (grid, error law) dictionary versus least squares",
    n=500, reps=200, estimators=("rho_penalized", "least_squares"),
    params={"coef": [0.2, 0.6, -0.4], "grid_points": 11, "errors": "uniform",
            "dictionary": ["uniform", "cauchy"], "outlier": 1e6, "kappa": 1.0, "r": 1.0,
            "ls_ratio": 10.0, "ls_fraction": 0.95},
    prepare=_e9_prepare, replicate=_e9_rep, evaluate=_e9_eval))

_register(Experiment(
    "exponential_truncation_check", "h2 of an exponential and its truncation: closed form vs quadrature",
    n=1, reps=1, estimators=(),
    params={"thetas": [0.5, 1.0, 2.0], "Ts": [1.0, 3.0, 10.0], "cells": 1_000_000, "tolerance": 1e-8,
            "rate_ns": [1e2, 1e3, 1e4, 1e5, 1e6]},
    prepare=_nothing, replicate=_e10_rep, evaluate=_e10_eval))


def get_experiment(name: str) -> Experiment:
    try:
        return REGISTRY[name]
    except KeyError:
        raise ConfigError(f"unknown experiment {name!r}; see `rho list`") from None
