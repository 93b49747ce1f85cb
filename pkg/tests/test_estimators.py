import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rhoest.densities import (
    Gaussian,
    HeavyTailP,
    PairData,
    UniformInterval,
)
from rhoest.estimators import (
    brute_force_oracle,
    brute_force_oracle_penalized,
    gaussian_submodel_estimate,
    grenander_blocks,
    grenander_brute_force,
    grenander_estimate,
    least_squares_fit,
    log_density_matrix,
    median_estimate,
    mle_estimate,
    pathological_loglik,
    rho_criterion,
    rho_estimate,
    rho_estimate_matrix,
    rho_estimate_penalized,
    t_statistic,
)
from rhoest.models import (
    CandidateFamily,
    PenalizedCollection,
    build_histogram_family,
    build_location_family,
    build_uniform_scale_family,
)
from rhoest.psi import HALF_LOG, PSI1, PSI2

KINDS = (PSI1, PSI2)


def _uniform_location(step, lo, hi):
    k = np.arange(round(lo / step), round(hi / step) + 1)
    return build_location_family(UniformInterval(0.0, 1.0), k * step)


def test_t_statistic_identities():
    x = np.array([0.3, 0.6, 1.4])
    q, q2 = UniformInterval(0, 1), UniformInterval(1, 2)
    for k in KINDS:
        assert t_statistic(x, q, q) == 0.0
        # 0.3 and 0.6 only under q, 1.4 only under q2
        assert t_statistic(x, q, q2, k) == -1.0
        assert t_statistic(x, q2, q, k) == 1.0


def test_rho_criterion_singleton_and_sign():
    fam = CandidateFamily([Gaussian()])
    assert rho_criterion([0.1, 2.0], 0, fam) == (0.0, 0)
    fam = build_location_family(Gaussian(), np.linspace(-1, 1, 9))
    for i in range(len(fam)):
        assert rho_criterion([0.2, -0.4, 0.9], i, fam)[0] >= 0.0


def test_uniform_location_criterion_is_count_gap():
    rng = np.random.default_rng(3)
    fam = _uniform_location(0.1, -1, 2)
    x = rng.uniform(-0.5, 1.5, 30)
    counts = np.array([np.sum((m.a <= x) & (x <= m.b)) for m in fam])
    for i in range(len(fam)):
        for k in KINDS:
            assert rho_criterion(x, i, fam, k)[0] == pytest.approx(counts.max() - counts[i], abs=1e-12)


def test_rho_estimate_uniform_location_example():
    fam = _uniform_location(0.1, 0.0, 4.9)
    x = [0.2, 0.5, 0.7, 5.0]
    for k in KINDS:
        for method in ("auto", "dense", "uniform"):
            res = rho_estimate(x, fam, k, method=method)
            assert fam.params[res.chosen_index] == 0.0
            assert res.criterion_value == 0.0


def test_rho_estimate_singleton():
    fam = CandidateFamily([HeavyTailP(0.3)])
    assert rho_estimate([0.1, 5.0], fam).chosen_index == 0


def test_rho_estimate_rejects_bad_arguments():
    fam = build_location_family(Gaussian(), [0.0, 1.0])
    with pytest.raises(ValueError):
        rho_estimate([0.0], fam, PSI1, slack=-1)
    with pytest.raises(ValueError):
        rho_estimate([0.0], fam, PSI1, method="fast")


def test_rho_estimate_keep_matrix_antisymmetric():
    fam = build_location_family(Gaussian(), np.linspace(-1, 1, 7))
    x = np.array([0.3, -0.2, 0.8, 1.1])
    res = rho_estimate(x, fam, PSI2, keep_matrix=True)
    m = res.per_pair_matrix
    assert m.shape == (7, 7)
    ok = ~np.isnan(m) & ~np.isnan(m.T)
    np.testing.assert_allclose(m[ok], -m.T[ok], atol=1e-12)


def test_slack_result_within_slack():
    fam = build_location_family(Gaussian(), np.linspace(-2, 2, 41))
    x = np.random.default_rng(0).normal(size=25)
    exact = rho_estimate(x, fam, PSI1)
    loose = rho_estimate(x, fam, PSI1, slack=0.5)
    assert loose.criterion_value <= exact.criterion_value + 0.5 + 1e-12
    assert loose.rows_evaluated <= exact.rows_evaluated


def test_rho_estimate_matrix_matches_family_path():
    fam = build_location_family(Gaussian(), np.linspace(-1, 1, 11))
    x = np.random.default_rng(1).normal(size=20)
    L = log_density_matrix(x, fam.members)
    for k in KINDS:
        assert rho_estimate_matrix(L, k).chosen_index == rho_estimate(x, fam, k).chosen_index


def test_penalized_equal_penalties_match_union():
    f1 = build_location_family(Gaussian(), [-1.0, 0.0])
    f2 = build_location_family(Gaussian(0, 2), [0.5, 1.5])
    union = CandidateFamily(f1.members + f2.members)
    col = PenalizedCollection([f1, f2], (math.log(2), math.log(2)), pen=(3.0, 3.0))
    x = np.random.default_rng(2).normal(0.7, 1.5, 30)
    for k in KINDS:
        f, j = rho_estimate_penalized(x, col, k).chosen_index
        assert col.offsets[f] + j == rho_estimate(x, union, k).chosen_index


def test_penalized_single_model_zero_penalty():
    fam = build_location_family(Gaussian(), np.linspace(-1, 1, 5))
    col = PenalizedCollection([fam], (0.0,), pen=(0.0,))
    x = [0.4, 0.1, -0.3]
    assert rho_estimate_penalized(x, col).chosen_index == (0, rho_estimate(x, fam).chosen_index)


def test_penalized_requires_penalties():
    fam = CandidateFamily([Gaussian()])
    with pytest.raises(ValueError):
        rho_estimate_penalized([0.0], PenalizedCollection([fam], (0.0,)))


@pytest.mark.parametrize("kind", KINDS)
def test_penalized_nested_switch(kind):
    # small = {q0}, large = {q0, q1}; with gain g = T(q0, q1) the large
    # model's q1 wins exactly when g exceeds the penalty P of the large model
    q0, q1 = Gaussian(0.0), Gaussian(1.0)
    x = np.array([0.9, 1.2, 0.7, 1.5])
    g = t_statistic(x, q0, q1, kind)
    small, large = CandidateFamily([q0]), CandidateFamily([q0, q1])
    for P, expected in ((0.5 * g, (1, 1)), (2.0 * g, (0, 0))):
        col = PenalizedCollection([small, large], (0.0, 0.0), pen=(0.0, P))
        assert rho_estimate_penalized(x, col, kind).chosen_index == expected
        assert brute_force_oracle_penalized(x, col, kind).chosen_index == expected


def test_mle_uniform_scale_picks_smallest_cover():
    fam = build_uniform_scale_family(np.arange(1, 10101) / 100)
    x = np.r_[np.linspace(0.01, 0.99, 50), 100.0]
    assert fam.params[mle_estimate(x, fam).chosen_index] == 100.0


def test_mle_all_minus_inf():
    fam = _uniform_location(0.005, -1, 101)
    x = np.array([0.3, 0.7, 100.5])
    res = mle_estimate(x, fam)
    assert res.chosen_index is None and res.all_minus_inf


def test_mle_gaussian_location_nearest_mean():
    grid = np.linspace(-2, 2, 401)
    fam = build_location_family(Gaussian(), grid)
    x = np.random.default_rng(4).normal(0.3, 1, 40)
    assert fam.params[mle_estimate(x, fam).chosen_index] == grid[np.argmin(np.abs(grid - x.mean()))]


def test_mle_is_rho_with_half_log():
    fam = build_location_family(Gaussian(), np.linspace(-1, 1, 21))
    x = np.random.default_rng(5).normal(0.2, 1, 15)
    assert rho_estimate(x, fam, HALF_LOG).chosen_index == mle_estimate(x, fam).chosen_index


def test_median_lower_middle():
    assert median_estimate([3, 1, 2, 4]) == 2
    assert median_estimate([5, 1, 3]) == 3
    with pytest.raises(ValueError):
        median_estimate([])


def test_grenander_cases():
    grid = [0.0, 1.0, 2.0]
    g = grenander_estimate([0.5, 1.2, 1.5, 1.7], grid)
    assert g.levels == (0.5, 0.5)
    g = grenander_estimate([0.1, 0.2, 0.3, 1.5], grid)
    assert g.levels == (0.75, 0.25)
    g = grenander_estimate([0.1, 0.7], [0.0, 2.0])
    assert g.levels == (0.5,)
    with pytest.raises(ValueError):
        grenander_estimate([-0.1], grid)


def test_gaussian_submodel_nearest_point():
    x = np.r_[1.7, np.zeros(8)]
    th, visited = gaussian_submodel_estimate(x, step=1e-3)
    assert 1.6995 <= th <= 1.7005
    assert visited


def test_pathological_loglik():
    x = np.zeros(100)
    x[0], x[1] = 2.5, -2.5
    assert pathological_loglik(x, 2.5) == pytest.approx(-312.5 + 3.125 * math.exp(6.25))
    assert pathological_loglik(x, 2.5) == pytest.approx(1306.29, abs=0.01)
    t = -0.3
    assert pathological_loglik(x, t) == pytest.approx(np.sum(t * x - t * t / 2))
    assert pathological_loglik(np.r_[x, 40.0], 40.0) == math.inf


def test_least_squares():
    rng = np.random.default_rng(6)
    w = rng.uniform(-1, 1, (50, 2))
    beta = np.array([0.5, -1.0, 2.0])
    y = beta[0] + w @ beta[1:]
    np.testing.assert_allclose(least_squares_fit(PairData(w, y)), beta, atol=1e-10)
    shifted = least_squares_fit(PairData(w, y + 3.0))
    np.testing.assert_allclose(shifted - beta, [3.0, 0, 0], atol=1e-10)
    # one gross outlier moves the fit by delta (F'F)^{-1} f_j
    F = np.hstack([np.ones((50, 1)), w])
    y2 = y.copy()
    y2[7] += 1e6
    moved = least_squares_fit(PairData(w, y2)) - beta
    np.testing.assert_allclose(moved, 1e6 * np.linalg.solve(F.T @ F, F[7]), rtol=1e-8)
    with pytest.raises(np.linalg.LinAlgError):
        least_squares_fit(PairData(np.zeros((5, 1)), np.ones(5)))


# ---------------------------------------------------------------------------
# properties

small_data = st.lists(st.floats(-2, 2, allow_nan=False).map(lambda v: round(v, 1)), min_size=1, max_size=30)


@settings(max_examples=150, deadline=None)
@given(x=small_data, idx=st.sets(st.integers(-15, 15), min_size=1, max_size=12), kind=st.sampled_from(KINDS))
def test_uniform_location_matches_oracle(x, idx, kind):
    fam = build_location_family(UniformInterval(0, 1), sorted(i / 10 for i in idx))
    assert rho_estimate(x, fam, kind).chosen_index == brute_force_oracle(x, fam, kind).chosen_index
    assert rho_estimate(x, fam, kind, method="dense").chosen_index == brute_force_oracle(x, fam, kind).chosen_index


@settings(max_examples=100, deadline=None)
@given(
    x=st.lists(st.floats(-3, 3), min_size=1, max_size=20),
    means=st.lists(st.floats(-2, 2), min_size=1, max_size=8),
    sds=st.lists(st.floats(0.3, 3), min_size=8, max_size=8),
    kind=st.sampled_from(KINDS),
)
def test_gaussian_family_matches_oracle(x, means, sds, kind):
    fam = CandidateFamily([Gaussian(m, s) for m, s in zip(means, sds)])
    e, o = rho_estimate(x, fam, kind), brute_force_oracle(x, fam, kind)
    assert e.chosen_index == o.chosen_index
    assert e.criterion_value == pytest.approx(o.criterion_value, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(x=st.lists(st.floats(-3, 3), min_size=1, max_size=10), a=st.floats(-2, 2), b=st.floats(-2, 2))
def test_t_statistic_antisymmetric(x, a, b):
    q, q2 = HeavyTailP(a), Gaussian(b)
    for k in KINDS:
        assert t_statistic(x, q, q2, k) == -t_statistic(x, q2, q, k)


@settings(max_examples=100, deadline=None)
@given(x=st.lists(st.floats(0, 1), min_size=1, max_size=30), kind=st.sampled_from(KINDS))
def test_histogram_family_matches_oracle(x, kind):
    fam = build_histogram_family([0, 0.3, 0.5, 1.0], 0.25)
    assert rho_estimate(x, fam, kind).chosen_index == brute_force_oracle(x, fam, kind).chosen_index


@settings(max_examples=200, deadline=None)
@given(counts=st.lists(st.integers(0, 6), min_size=1, max_size=4), widths=st.lists(st.integers(1, 3), min_size=4, max_size=4))
def test_pava_matches_brute_force(counts, widths):
    if sum(counts) == 0:
        return
    edges = np.r_[0.0, np.cumsum(widths[: len(counts)])]
    x = np.concatenate([np.full(c, 0.5 * (edges[j] + edges[j + 1])) for j, c in enumerate(counts)])
    assert grenander_estimate(x, edges).levels == grenander_brute_force(x, edges).levels


@given(counts=st.lists(st.integers(0, 9), min_size=1, max_size=6))
def test_pava_blocks_cover_and_decrease(counts):
    if sum(counts) == 0:
        return
    widths = np.ones(len(counts))
    blocks = grenander_blocks(np.array(counts, float), widths)
    assert blocks[0][0] == 0 and blocks[-1][1] == len(counts)
    assert all(b[1] == c[0] for b, c in zip(blocks, blocks[1:]))
    levels = [sum(counts[a:b]) / (b - a) for a, b in blocks]
    assert all(u >= v for u, v in zip(levels, levels[1:]))
