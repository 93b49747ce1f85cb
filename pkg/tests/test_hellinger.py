import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from rhoest.densities import (
    Exponential,
    Gaussian,
    HeavyTailP,
    Mixture,
    PiecewiseConstant,
    TruncatedExponential,
    UniformInterval,
)
from rhoest.hellinger import (
    UNSUPPORTED,
    DiscreteDensity,
    affinity_discrete,
    discretize,
    hellinger2,
    hellinger2_analytic,
    hellinger2_discrete,
    hellinger2_quadrature,
    product_hellinger2,
    quadrature_mass,
    total_variation,
)

weights = st.lists(st.floats(0, 10), min_size=1, max_size=16)


def _law(w):
    return DiscreteDensity.from_weights(w)


def test_discrete_identity_and_disjoint():
    p = _law([1, 2, 3, 0])
    assert hellinger2_discrete(p, p) == 0.0
    a, b = _law([1, 1, 0, 0]), _law([0, 0, 1, 1])
    assert hellinger2_discrete(a, b) == 1.0
    assert affinity_discrete(a, b) == 0.0
    assert total_variation(a, b) == 1.0


def test_discrete_validation():
    with pytest.raises(ValueError):
        DiscreteDensity((0.0, 1.0), (0.7, 0.7))
    with pytest.raises(ValueError):
        hellinger2_discrete(_law([1, 1]), DiscreteDensity((5.0, 6.0), (0.5, 0.5)))


def test_discretized_uniforms():
    edges = np.linspace(-1, 3, 10_001)
    p = discretize(UniformInterval(0, 1), edges)
    q = discretize(UniformInterval(0.5, 1.5), edges)
    assert hellinger2_discrete(p, q) == pytest.approx(0.5, abs=1e-3)


def test_analytic_catalog():
    assert hellinger2_analytic(Gaussian(), Gaussian()) == 0.0
    assert hellinger2_analytic(UniformInterval(0, 1), UniformInterval(0.3, 1.3)) == pytest.approx(0.3, abs=1e-15)
    assert hellinger2_analytic(Exponential(1.0), TruncatedExponential(1.0, 3.0)) == pytest.approx(
        1 - math.sqrt(1 - math.exp(-3)), abs=1e-15)
    assert hellinger2_analytic(Exponential(1.0), TruncatedExponential(1.0, 3.0)) == pytest.approx(0.0252113, abs=1e-7)
    assert hellinger2_analytic(Gaussian(), HeavyTailP()) is UNSUPPORTED
    assert not UNSUPPORTED


def test_analytic_against_quadrature_oracle():
    # oracle: scipy adaptive integration of (sqrt p - sqrt q)^2 / 2
    def oracle(a, b, lo, hi, points=None):
        v, _ = integrate.quad(lambda x: 0.5 * (math.sqrt(a.pdf(x)) - math.sqrt(b.pdf(x))) ** 2, lo, hi,
                              points=points, limit=500, epsabs=1e-13)
        return v

    assert hellinger2_analytic(UniformInterval(0, 1), UniformInterval(0.3, 1.3)) == pytest.approx(
        oracle(UniformInterval(0, 1), UniformInterval(0.3, 1.3), -1, 2, [0, 0.3, 1, 1.3]), abs=1e-10)
    g1, g2 = Gaussian(0.0, 1.0), Gaussian(1.0, 2.0)
    assert hellinger2_analytic(g1, g2) == pytest.approx(oracle(g1, g2, -30, 30), abs=1e-10)
    m = Mixture((0.6, 0.4), (UniformInterval(0, 1), UniformInterval(0.5, 2.5)))
    q = PiecewiseConstant((0, 1, 2), (0.7, 0.3))
    assert hellinger2_analytic(m, q) == pytest.approx(oracle(m, q, -1, 3, [0, 0.5, 1, 2, 2.5]), abs=1e-10)


def test_quadrature_exponential_truncation():
    a, b = Exponential(1.0), TruncatedExponential(1.0, 3.0)
    v = hellinger2_quadrature(a, b, cells=1_000_000, window=(0.0, 3.0), tail_bound=True)
    assert v == pytest.approx(hellinger2_analytic(a, b), abs=1e-8)


def test_quadrature_uniform_overlap():
    v = hellinger2_quadrature(UniformInterval(0, 1), UniformInterval(0.5, 1.5), cells=10_000)
    assert v == pytest.approx(0.5, abs=1e-6)


def test_quadrature_same_spec():
    assert hellinger2_quadrature(HeavyTailP(0.2), HeavyTailP(0.2), cells=10_000) == 0.0


def test_quadrature_requires_tail_flag():
    with pytest.raises(ValueError):
        hellinger2_quadrature(Gaussian(), Gaussian(1.0), window=(-1.0, 1.0))


def test_quadrature_mass_heavy_tail():
    assert quadrature_mass(HeavyTailP()) == pytest.approx(1.0, abs=1e-9)
    assert quadrature_mass(HeavyTailP(3.0)) == pytest.approx(1.0, abs=1e-9)


def test_heavy_tail_pair_quadrature_converges():
    a, b = HeavyTailP(0.0), HeavyTailP(0.1)
    coarse = hellinger2_quadrature(a, b, cells=100_000, tail_bound=True)
    fine = hellinger2_quadrature(a, b, cells=1_000_000, tail_bound=True)
    assert abs(coarse - fine) < 1e-6
    assert 0 < fine < 1


def test_product_hellinger():
    pair = (UniformInterval(0, 1), UniformInterval(0.5, 1.5))
    assert product_hellinger2([pair] * 10) == pytest.approx(5.0, abs=1e-12)
    assert product_hellinger2([(Gaussian(), Gaussian())] * 3) == 0.0
    mixed = [pair, (Exponential(1.0), TruncatedExponential(1.0, 3.0))]
    assert product_hellinger2(mixed) == pytest.approx(sum(hellinger2(a, b) for a, b in mixed), abs=1e-15)


@given(p=weights, q=weights)
def test_discrete_invariants(p, q):
    n = min(len(p), len(q))
    p, q = p[:n], q[:n]
    if sum(p) <= 1e-6 or sum(q) <= 1e-6:
        return
    P, Q = _law(p), _law(q)
    h = hellinger2_discrete(P, Q)
    assert 0.0 <= h <= 1.0
    assert h == hellinger2_discrete(Q, P)
    assert abs(h - (1.0 - affinity_discrete(P, Q))) <= 1e-12
    # h2 <= TV <= sqrt(h2 (2 - h2))
    tv = total_variation(P, Q)
    assert h <= tv + 1e-12
    assert tv <= math.sqrt(2 * h * (2 - h)) + 1e-12


@settings(max_examples=50)
@given(a=st.floats(-2, 2), b=st.floats(-2, 2), w1=st.floats(0.1, 3), w2=st.floats(0.1, 3))
def test_uniform_pairs_analytic_equals_overlap(a, b, w1, w2):
    u, v = UniformInterval(a, a + w1), UniformInterval(b, b + w2)
    overlap = max(0.0, min(a + w1, b + w2) - max(a, b))
    assert hellinger2_analytic(u, v) == pytest.approx(1 - overlap / math.sqrt(w1 * w2), abs=1e-12)
