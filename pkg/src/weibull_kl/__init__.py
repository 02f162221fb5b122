"""Closed-form KL divergence between Weibull distributions, with numerical oracles."""

from .divergence import (
    KernelConfig,
    KlBreakdown,
    kernel_matrix,
    kl_breakdown,
    kl_exponential,
    kl_kernel,
    kl_weibull,
    symmetric_kl,
)
from .oracle import (
    EstimatorResult,
    QuadratureConfig,
    QuadratureError,
    euler_mascheroni_check,
    kl_monte_carlo,
    kl_quadrature,
)
from .special_functions import EULER_GAMMA, gamma, log_gamma
from .weibull import FitResult, WeibullParams, cdf, log_pdf, mle_fit, pdf, quantile, sample

__version__ = "0.1.0"
