"""
Exact distribution oracles.

Draw counts follow a negative binomial law: n_p is the trial index of
the m-th success with per-draw success probability p = 1/N!. Elapsed
time is the random sum T = X_1 + ... + X_{n_p}. Reducing either modulo
R wraps the law onto R residues, which tends to uniform as M grows.
"""

from __future__ import annotations

import numpy as np
from scipy import stats

from ..timing import RuntimeModel, runtime_model_support


# Neglected tail mass when wrapping an infinite support
WRAP_TOLERANCE = 1e-12
MAX_WRAP_BLOCKS = 10_000


class TruncationError(RuntimeError):
    """Raised when a wrapped sum does not reach its tolerance in time."""

    def __init__(self, remaining: float, blocks: int):
        self.remaining = remaining
        self.blocks = blocks
        super().__init__(
            f"tail mass {remaining:.3g} still above tolerance after {blocks} blocks"
        )


def _check_law(m: int, p: float):
    if int(m) != m or m < 1:
        raise ValueError(f"m must be an integer >= 1, got {m}")
    if not 0 < p <= 1:
        raise ValueError(f"p must be in (0, 1], got {p}")


def negbin_pmf(k: int, m: int, p: float) -> float:
    """
    Pr[n_p = k] = C(k-1, m-1) (1-p)^(k-m) p^m.

    Evaluated in log space through scipy's nbinom over failures k - m.
    With m = 1 this is the geometric law (1-p)^(k-1) p.

    Raises:
        ValueError: If k < m, m < 1 or p is outside (0, 1].
    """
    _check_law(m, p)
    if int(k) != k or k < m:
        raise ValueError(f"k must be an integer >= m={m}, got {k}")
    if p == 1:
        return 1.0 if k == m else 0.0
    return float(np.exp(stats.nbinom.logpmf(k - m, m, p)))


def negbin_moments(m: int, p: float) -> tuple[float, float]:
    """(m/p, m(1-p)/p^2)."""
    _check_law(m, p)
    return m / p, m * (1 - p) / p ** 2


def compound_time_moments(m: int, p: float, mu_x: float, var_x: float) -> tuple[float, float]:
    """
    Mean and variance of T = X_1 + ... + X_{n_p}.

    E[T] = (m/p) mu_x, Var(T) = (m/p) var_x + (m(1-p)/p^2) mu_x^2.
    """
    _check_law(m, p)
    if mu_x <= 0:
        raise ValueError(f"mu_x must be > 0, got {mu_x}")
    if var_x < 0:
        raise ValueError(f"var_x must be >= 0, got {var_x}")
    mean_n, var_n = negbin_moments(m, p)
    return mean_n * mu_x, mean_n * var_x + var_n * mu_x ** 2


def _check_modulus(R: int):
    if R < 1 or R & (R - 1) or R > 1 << 16:
        raise ValueError(f"R must be a power of two up to 2^16, got {R}")


def wrapped_residue_pmf(m: int, p: float, R: int, tol: float = WRAP_TOLERANCE,
                        max_blocks: int = MAX_WRAP_BLOCKS) -> np.ndarray:
    """
    S_r = sum over s of Pr[n_p = r + sR], for r in 0..R-1.

    Summation runs block by block until the negative binomial tail beyond
    the last summed count is below ``tol``.

    Raises:
        TruncationError: If the tail is still above ``tol`` after max_blocks blocks.
    """
    _check_law(m, p)
    _check_modulus(R)
    wrapped = np.zeros(R)
    if p == 1:
        wrapped[m % R] = 1.0
        return wrapped

    block = R * max(1, 4096 // R)
    start = m
    remaining = 1.0
    for _ in range(max_blocks):
        ks = np.arange(start, start + block)
        wrapped += np.bincount(ks % R, weights=stats.nbinom.pmf(ks - m, m, p), minlength=R)
        start += block
        remaining = float(stats.nbinom.sf(start - 1 - m, m, p))
        if remaining < tol:
            return wrapped
    raise TruncationError(remaining, max_blocks)


def wrapped_compound_pmf(m: int, p: float, model: RuntimeModel, R: int) -> np.ndarray:
    """
    Exact law of T mod R for an integer-valued runtime model.

    The count generating function G(z) = (pz / (1 - (1-p)z))^m evaluated
    at the runtime characteristic function on the R-th roots of unity
    gives the residue probabilities through one DFT.
    """
    _check_law(m, p)
    _check_modulus(R)
    phi = model.characteristic(2 * np.pi * np.arange(R) / R)
    generating = (p * phi / (1 - (1 - p) * phi)) ** m
    probs = np.fft.fft(generating).real / R
    return np.clip(probs, 0.0, None)


def tail_lower_bound(m: int, p: float, model: RuntimeModel, k: int, t: int) -> float:
    """
    Pr[T > t] >= Pr[n_p = k] * Pr[X_1 + ... + X_k > t].

    The second factor comes from the exact k-fold convolution of the
    runtime pmf.

    Raises:
        SupportOverflowError: If the runtime pmf spans more than 64 values.
    """
    head = negbin_pmf(k, m, p)
    lo, dense = runtime_model_support(model)
    total = np.array([1.0])
    power, base = k, dense
    # binary powering of the convolution
    while power:
        if power & 1:
            total = np.convolve(total, base)
        power >>= 1
        if power:
            base = np.convolve(base, base)
    # total[i] is Pr[sum = k*lo + i]
    first = t - k * lo + 1
    if first <= 0:
        return head
    return head * float(np.clip(total[first:].sum(), 0.0, 1.0))


def uniform_deviation(pmf: np.ndarray) -> float:
    """max_r |S_r - 1/R|."""
    pmf = np.asarray(pmf, dtype=float)
    return float(np.abs(pmf - 1 / len(pmf)).max())


def pmf_entropy(pmf: np.ndarray) -> float:
    """Shannon entropy in bits of an exact pmf."""
    pmf = np.asarray(pmf, dtype=float)
    nz = pmf[pmf > 0]
    return float(-(nz * np.log2(nz)).sum())


def expected_chi_square_excess(pmf: np.ndarray, samples: int) -> float:
    """
    Non-centrality samples * R * sum (S_r - 1/R)^2.

    The expected uniform chi-square statistic on ``samples`` draws from
    ``pmf`` is about R - 1 plus this value.
    """
    pmf = np.asarray(pmf, dtype=float)
    R = len(pmf)
    return float(samples * R * ((pmf - 1 / R) ** 2).sum())


def sample_from_pmf(pmf: np.ndarray, size: int, seed: int | None = 0) -> np.ndarray:
    """Inverse-CDF draws of residues 0..R-1."""
    cdf = np.cumsum(np.asarray(pmf, dtype=float))
    cdf /= cdf[-1]
    gen = np.random.default_rng(seed)
    return np.searchsorted(cdf, gen.random(size), side="right")

