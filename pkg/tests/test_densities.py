import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, stats

from rhoest.densities import (
    Cauchy,
    Exponential,
    Gaussian,
    HeavyTailP,
    Mixture,
    PairData,
    PathologicalGaussianVersion,
    PiecewiseConstant,
    RegressionConditional,
    TruncatedExponential,
    UniformInterval,
    density_at,
    heavy_tail_cdf,
    heavy_tail_pdf,
    heavy_tail_quantile,
)

unit_open = st.floats(min_value=1e-12, max_value=1 - 1e-12)


def test_density_at_values():
    assert density_at(UniformInterval(0, 1), 0.5) == 1.0
    assert density_at(HeavyTailP(0), 0.25) == pytest.approx(1 / 3, abs=1e-15)
    assert density_at(HeavyTailP(0), 2.0) == pytest.approx(1 / 24, abs=1e-15)
    assert density_at(HeavyTailP(0), 0.0) == 0.0
    assert density_at(UniformInterval(0, 1), 1.5) == 0.0


def test_density_at_regression_pair():
    q = RegressionConditional((1.0, 2.0), UniformInterval(-1, 1))
    assert density_at(q, ((0.5,), 2.2)) == 0.5
    assert density_at(q, ((0.5,), 4.0)) == 0.0
    with pytest.raises(ValueError):
        density_at(q, ((0.5, 0.1), 2.0))
    with pytest.raises(ValueError):
        density_at(UniformInterval(0, 1), (0.1, 0.2))


def test_constructor_validation():
    with pytest.raises(ValueError):
        UniformInterval(1, 1)
    with pytest.raises(ValueError):
        Gaussian(0, 0)
    with pytest.raises(ValueError):
        PiecewiseConstant((0, 1), (0.5,))
    with pytest.raises(ValueError):
        PiecewiseConstant((0, 1, 0.5), (1, 1))
    with pytest.raises(ValueError):
        Mixture((0.5, 0.6), (Gaussian(), Gaussian()))
    with pytest.raises(ValueError):
        TruncatedExponential(1.0, 0.0)


def test_heavy_tail_quantile_known_points():
    # oracle: the cdf as an integral of the density
    def numeric_cdf(y):
        core, _ = integrate.quad(lambda t: heavy_tail_pdf(t), 0, min(y, 1.0), limit=200)
        tail = 0.0
        if y > 1:
            tail, _ = integrate.quad(lambda t: heavy_tail_pdf(t), 1.0, y)
        return 0.5 + core + tail

    assert numeric_cdf(1.0) == pytest.approx(5 / 6, abs=1e-9)
    assert numeric_cdf(2.0) == pytest.approx(11 / 12, abs=1e-9)
    assert heavy_tail_quantile(0.5) == 0.0
    assert heavy_tail_quantile(5 / 6) == pytest.approx(1.0, abs=1e-14)
    assert heavy_tail_quantile(11 / 12) == pytest.approx(2.0, abs=1e-12)
    with pytest.raises(ValueError):
        heavy_tail_quantile(1.0)


def test_heavy_tail_mass_agrees_with_integral():
    m = HeavyTailP(0.3)
    num, _ = integrate.quad(lambda t: heavy_tail_pdf(t), 1.0, 7.0)
    assert m.mass(1.3, 7.3) == pytest.approx(num, abs=1e-12)
    assert m.mass(1e9, 2e9) == pytest.approx(1 / 6e9 - 1 / 12e9, rel=1e-12)


def test_cdf_matches_scipy():
    x = np.linspace(-4, 4, 41)
    np.testing.assert_allclose(Gaussian(0.5, 2).cdf(x), stats.norm(0.5, 2).cdf(x), atol=1e-15)
    np.testing.assert_allclose(Cauchy(1, 0.5).cdf(x), stats.cauchy(1, 0.5).cdf(x), atol=1e-15)
    np.testing.assert_allclose(Exponential(2.0, 1.0).cdf(x), stats.expon(1.0, 0.5).cdf(x), atol=1e-15)


def test_truncated_exponential_normalized():
    d = TruncatedExponential(2.0, 1.5, 0.5)
    total, _ = integrate.quad(d.pdf, 0.5, 2.0)
    assert total == pytest.approx(1.0, abs=1e-12)
    assert d.pdf(2.1) == 0.0


def test_piecewise_constant_cells():
    d = PiecewiseConstant((0, 0.25, 0.5, 0.75, 1.0), (1.6, 1.2, 0.8, 0.4))
    np.testing.assert_allclose(d.cell_masses, [0.4, 0.3, 0.2, 0.1])
    assert list(d.cell_index([-0.1, 0.0, 0.25, 0.99, 1.0, 1.1])) == [-1, 0, 1, 3, 3, -1]
    assert d.cdf(0.5) == pytest.approx(0.7)
    assert d.quantile(0.7) == pytest.approx(0.5)


def test_mixture_quantile_inverts_cdf():
    m = Mixture((0.7, 0.3), (UniformInterval(0, 1), UniformInterval(2, 3)))
    u = np.array([0.1, 0.5, 0.75, 0.95])
    np.testing.assert_allclose(m.cdf(m.quantile(u)), u, atol=1e-12)


def test_uniform_shift_keeps_height_bits():
    base = UniformInterval(0.0, 0.3)
    s = base.shifted(0.7)
    assert s.height == base.height
    assert s.b == 1.0


def test_pathological_version_branches():
    x = np.array([0.1, -0.3, 2.5])
    # theta <= 0: ordinary Gaussian log-likelihood ratio
    t = -0.4
    assert np.sum(PathologicalGaussianVersion(t).logpdf(x)) == pytest.approx(np.sum(t * x - t * t / 2))
    # at theta = x_i the exotic term appears
    v = PathologicalGaussianVersion(2.5).logpdf(2.5)
    assert v == pytest.approx(2.5 * 2.5 - 3.125 + 3.125 * math.exp(6.25))
    assert PathologicalGaussianVersion(2.5).logpdf(2.4) == pytest.approx(2.5 * 2.4 - 3.125)


def test_regression_conditional_residuals():
    q = RegressionConditional((0.5, -1.0, 2.0), Gaussian())
    data = PairData([[1.0, 0.0], [0.0, 1.0]], [0.0, 3.0])
    np.testing.assert_allclose(q.residuals(data), [0.5, 0.5])
    with pytest.raises(TypeError):
        q.logpdf(np.zeros(2))


@given(u=unit_open)
def test_heavy_tail_roundtrip(u):
    assert heavy_tail_cdf(heavy_tail_quantile(u)) == pytest.approx(u, abs=1e-12)


@given(u=unit_open)
def test_heavy_tail_symmetry(u):
    assert heavy_tail_quantile(u) == pytest.approx(-heavy_tail_quantile(1 - u), abs=1e-9 * (1 + abs(heavy_tail_quantile(u))))


@given(x=st.floats(-50, 50), shift=st.floats(-5, 5))
def test_logpdf_consistent_with_pdf(x, shift):
    for d in (Gaussian(shift, 1.5), Cauchy(shift, 2.0), HeavyTailP(shift), Exponential(1.0, shift)):
        p = d.pdf(x)
        if p > 0:
            assert d.logpdf(x) == pytest.approx(math.log(p), abs=1e-12)
        else:
            assert d.logpdf(x) == -math.inf


def test_heavy_tail_quantile_against_numeric_cdf():
    # oracle: integrate the density up to the returned quantile
    def numeric_cdf(y):
        a = abs(y)
        core, _ = integrate.quad(heavy_tail_pdf, 0, min(a, 1.0), epsabs=1e-14, epsrel=1e-13)
        tail = 1.0 / 6.0 - 1.0 / (6.0 * a) if a > 1 else 0.0
        upper = 0.5 + core + tail
        return upper if y >= 0 else 1.0 - upper

    u = np.random.default_rng(12).uniform(0.001, 0.999, 1000)
    err = max(abs(numeric_cdf(heavy_tail_quantile(v)) - v) for v in u)
    assert err <= 1e-8
