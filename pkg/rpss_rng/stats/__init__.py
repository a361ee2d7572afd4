"""Distribution oracles and uniformity validators."""

from .oracles import (
    negbin_pmf,
    negbin_moments,
    compound_time_moments,
    wrapped_residue_pmf,
    wrapped_compound_pmf,
    tail_lower_bound,
    uniform_deviation,
    pmf_entropy,
    expected_chi_square_excess,
    sample_from_pmf,
    TruncationError,
)
from .validators import (
    chi_square_uniform,
    chi_square_fit,
    chi_square_sf,
    min_entropy_mcv,
    mcv_ceiling,
    clt_residuals,
    shannon_entropy,
    residue_mean,
    residue_correlation,
    uniformity_report,
    convergence_verdict,
    Verdict,
    InsufficientSampleError,
)

__all__ = [
    "negbin_pmf",
    "negbin_moments",
    "compound_time_moments",
    "wrapped_residue_pmf",
    "wrapped_compound_pmf",
    "tail_lower_bound",
    "uniform_deviation",
    "pmf_entropy",
    "expected_chi_square_excess",
    "sample_from_pmf",
    "TruncationError",
    "chi_square_uniform",
    "chi_square_fit",
    "chi_square_sf",
    "min_entropy_mcv",
    "mcv_ceiling",
    "clt_residuals",
    "shannon_entropy",
    "residue_mean",
    "residue_correlation",
    "uniformity_report",
    "convergence_verdict",
    "Verdict",
    "InsufficientSampleError",
]
