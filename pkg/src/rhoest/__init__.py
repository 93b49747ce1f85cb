"""Rho-estimators over finite statistical models, with Hellinger-loss tools
and a Monte Carlo harness."""

from .densities import (
    Cauchy,
    Density,
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
    affine_features,
    density_at,
)
from .estimators import (
    EstimateResult,
    brute_force_oracle,
    gaussian_submodel_estimate,
    grenander_estimate,
    least_squares_fit,
    median_estimate,
    mle_estimate,
    pathological_loglik,
    rho_criterion,
    rho_estimate,
    rho_estimate_matrix,
    rho_estimate_penalized,
    t_statistic,
)
from .hellinger import (
    UNSUPPORTED,
    DiscreteDensity,
    hellinger2,
    hellinger2_analytic,
    hellinger2_discrete,
    hellinger2_quadrature,
    product_hellinger2,
)
from .models import (
    CandidateFamily,
    DimensionBound,
    PenalizedCollection,
    assign_penalties,
    build_decreasing_family,
    build_histogram_family,
    build_location_family,
    build_regression_dictionary,
    build_uniform_scale_family,
)
from .psi import HALF_LOG, PSI1, PSI2, PsiKind, psi_eval, psi_kind, psi_ratio

__version__ = "0.1.0"
