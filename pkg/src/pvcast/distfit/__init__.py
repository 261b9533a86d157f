"""Distribution fitting and goodness-of-fit testing for forecast errors."""

from .bessel import bessel_k, bessel_k_scaled
from .families import GenHyperbolic, Normal, StudentT
from .fit import (
    FittedDistribution,
    MomentSummary,
    fit_generalized_hyperbolic,
    fit_normal,
    fit_student_t,
    moments,
)
from .gof import GofResult, cvm_limit_cdf, cvm_test, kolmogorov_sf, ks_test, qq_points

__all__ = [
    "bessel_k",
    "bessel_k_scaled",
    "Normal",
    "StudentT",
    "GenHyperbolic",
    "FittedDistribution",
    "MomentSummary",
    "moments",
    "fit_normal",
    "fit_student_t",
    "fit_generalized_hyperbolic",
    "GofResult",
    "ks_test",
    "cvm_test",
    "qq_points",
    "kolmogorov_sf",
    "cvm_limit_cdf",
]
