"""Extended sine-skewed circular distributions: densities, moments, sampling and inference."""

from .bases import VonMisesBase, WrappedCauchyBase, bessel_ratios, make_base
from .ess import EssModel, ess_density, ess_log_density, ess_sample, wrap_angle
from .inference import FitConfig, FitReport, fit_mle, log_likelihood, observed_information
from .moments import TrigMoments, circular_skewness, moments, skewness_range
from .selection import OrderSelection, sample_circular_stats, select_order, symmetry_test
from .skewing import SkewingPolynomial, skewing_cdf, skewing_pdf, skewing_polynomial

__all__ = [
    "EssModel",
    "FitConfig",
    "FitReport",
    "OrderSelection",
    "SkewingPolynomial",
    "TrigMoments",
    "VonMisesBase",
    "WrappedCauchyBase",
    "bessel_ratios",
    "circular_skewness",
    "ess_density",
    "ess_log_density",
    "ess_sample",
    "fit_mle",
    "log_likelihood",
    "make_base",
    "moments",
    "observed_information",
    "sample_circular_stats",
    "select_order",
    "skewing_cdf",
    "skewing_pdf",
    "skewing_polynomial",
    "skewness_range",
    "symmetry_test",
    "wrap_angle",
]
