"""
Uniformity validators for residue histograms.

Three criteria decide whether modular-reduced outputs look uniform:

    chi_square_uniform   goodness of fit against the uniform law
    min_entropy_mcv      most-common-value min-entropy bound
    clt_residuals        share of cell z-scores inside 1, 2 and 3 sigma
"""

from __future__ import annotations

import logging
import math
from enum import Enum

import numpy as np
from scipy.special import gammaincc

from ..models.histogram import Histogram, UniformityReport


logger = logging.getLogger(__name__)

# 99% one-sided normal quantile for the MCV upper bound
MCV_Z = 2.576
MCV_MIN_SAMPLES = 1000
MIN_EXPECTED = 5


class InsufficientSampleError(ValueError):
    """Raised when a histogram has too few samples for a test."""

    def __init__(self, total: int, required: int, test: str = ""):
        self.total = total
        self.required = required
        label = f"{test}: " if test else ""
        super().__init__(f"{label}need at least {required} samples, got {total}")


class Verdict(str, Enum):
    EXCELLENT = "Excellent"
    GOOD = "Good"
    FAIL = "Fail"


def _require(total: int, required: int, test: str):
    if total < required:
        raise InsufficientSampleError(total, required, test)


def chi_square_sf(statistic: float, df: int) -> float:
    """Chi-square survival function via the regularized upper incomplete gamma."""
    if df < 1:
        raise ValueError(f"degrees of freedom must be >= 1, got {df}")
    return float(np.clip(gammaincc(df / 2, max(statistic, 0.0) / 2), 0.0, 1.0))


def chi_square_uniform(h: Histogram, R: int) -> tuple[float, float]:
    """
    Chi-square statistic and p-value of ``h`` against uniform on R cells.

    Raises:
        InsufficientSampleError: If the total is below 5 * R.
    """
    observed = h.cells(R).astype(float)
    total = observed.sum()
    _require(int(total), MIN_EXPECTED * R, "chi-square")
    expected = total / R
    statistic = float(((observed - expected) ** 2).sum() / expected)
    return statistic, chi_square_sf(statistic, R - 1)


def chi_square_fit(observed: np.ndarray, probs: np.ndarray,
                   min_expected: float = MIN_EXPECTED) -> tuple[float, int, float]:
    """
    Goodness of fit of counts against a pmf, pooling sparse cells.

    Cells are visited in order; trailing cells whose expected count is
    below ``min_expected`` are pooled with all remaining mass into one
    tail cell, so ``probs`` may be a truncated head of an infinite law.

    Returns:
        (statistic, degrees of freedom, p-value)
    """
    observed = np.asarray(observed, dtype=float)
    probs = np.asarray(probs, dtype=float)
    total = observed.sum()
    expected = probs * total
    keep = np.flatnonzero(expected >= min_expected)
    if keep.size == 0:
        raise InsufficientSampleError(int(total), int(min_expected / probs.max()) + 1, "chi-square fit")
    last = keep[-1] + 1
    head_obs, head_exp = observed[:last], expected[:last]
    tail_obs = total - head_obs.sum()
    tail_exp = total - head_exp.sum()
    if tail_exp >= min_expected:
        cells_obs = np.append(head_obs, tail_obs)
        cells_exp = np.append(head_exp, tail_exp)
    else:
        cells_obs = head_obs.copy()
        cells_exp = head_exp.copy()
        cells_obs[-1] += tail_obs
        cells_exp[-1] += tail_exp
    mask = cells_exp > 0
    statistic = float(((cells_obs[mask] - cells_exp[mask]) ** 2 / cells_exp[mask]).sum())
    df = int(mask.sum()) - 1
    return statistic, df, chi_square_sf(statistic, df)


def min_entropy_mcv(h: Histogram, n_bits: int) -> float:
    """
    Most-common-value min-entropy estimate in bits.

    p_u = min(1, p + 2.576 sqrt(p(1-p)/(total-1))) with p the modal
    frequency; the result -log2(p_u) is clamped to [0, n_bits].

    Raises:
        InsufficientSampleError: If the total is below 1000.
    """
    total = h.total
    _require(total, MCV_MIN_SAMPLES, "min-entropy")
    p_hat = max(h.bins.values()) / total
    return _mcv_bits(p_hat, total, n_bits)


def _mcv_bits(p_hat: float, total: int, n_bits: int) -> float:
    p_u = min(1.0, p_hat + MCV_Z * math.sqrt(p_hat * (1 - p_hat) / (total - 1)))
    return min(float(n_bits), max(0.0, -math.log2(p_u)))


def mcv_ceiling(total: int, n_bits: int) -> float:
    """MCV estimate of a perfectly uniform histogram with ``total`` samples."""
    _require(total, MCV_MIN_SAMPLES, "min-entropy")
    return _mcv_bits(1 / (1 << n_bits), total, n_bits)


def clt_residuals(h: Histogram, R: int) -> tuple[float, float, float]:
    """
    Share of cells with |z| <= 1, 2, 3 where z = (O - E) / sqrt(E (1 - 1/R)).

    Raises:
        InsufficientSampleError: If the total is below 5 * R.
    """
    observed = h.cells(R).astype(float)
    total = observed.sum()
    _require(int(total), MIN_EXPECTED * R, "CLT residuals")
    expected = total / R
    sigma = math.sqrt(expected * (1 - 1 / R)) if R > 1 else 1.0
    z = np.abs(observed - expected) / sigma
    return tuple(float((z <= k).mean()) for k in (1, 2, 3))


def shannon_entropy(h: Histogram) -> float:
    """-sum (c/total) log2(c/total) over nonzero cells."""
    total = h.total
    if total < 1:
        raise InsufficientSampleError(total, 1, "Shannon entropy")
    counts = np.fromiter((c for c in h.bins.values() if c > 0), dtype=float)
    freqs = counts / total
    return float(-(freqs * np.log2(freqs)).sum())


def residue_mean(h: Histogram) -> float:
    """Arithmetic mean of the residues; (R - 1) / 2 when uniform."""
    return h.mean()


def residue_correlation(a: np.ndarray, b: np.ndarray) -> float:
    """Pearson correlation of paired residues."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"paired samples differ in length: {a.shape} vs {b.shape}")
    if a.size < 2 or a.std() == 0 or b.std() == 0:
        raise ValueError("correlation needs two non-constant samples")
    return float(np.corrcoef(a, b)[0, 1])


def uniformity_report(h: Histogram, n_bits: int) -> UniformityReport:
    """All three criteria plus Shannon entropy and residue mean."""
    R = 1 << n_bits
    statistic, p_value = chi_square_uniform(h, R)
    report = UniformityReport(
        chi_square=statistic,
        degrees_of_freedom=R - 1,
        p_value=p_value,
        min_entropy_bits=min_entropy_mcv(h, n_bits),
        clt_fraction_within=clt_residuals(h, R),
        shannon_bits=shannon_entropy(h),
        residue_mean=residue_mean(h),
        n_bits=n_bits,
        total=h.total,
    )
    logger.debug("Uniformity n_bits=%d: %s", n_bits, report.summary())
    return report


def convergence_verdict(report: UniformityReport, n_bits: int | None = None,
                        total: int | None = None) -> Verdict:
    """
    Excellent, Good or Fail.

    Excellent: p > 0.01 and min-entropy >= n - 0.1.
    Good:      p > 0.001 and min-entropy >= n - 0.25.

    The min-entropy floors are capped at the same margins below the MCV
    estimate of a perfectly uniform histogram with the same total, since
    the estimator cannot exceed that ceiling.
    """
    n_bits = n_bits if n_bits is not None else report.n_bits
    total = total if total is not None else report.total
    ceiling = mcv_ceiling(total, n_bits)
    if report.p_value > 0.01 and report.min_entropy_bits >= min(n_bits - 0.1, ceiling - 0.1):
        return Verdict.EXCELLENT
    if report.p_value > 0.001 and report.min_entropy_bits >= min(n_bits - 0.25, ceiling - 0.25):
        return Verdict.GOOD
    return Verdict.FAIL
