"""
Histograms of observables and the uniformity report built from them.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np


@dataclass
class Histogram:
    """
    Integer bin counts.

    Attributes:
        bins: Map from observed value to count (counts >= 0).

    Example:
        h = Histogram.from_values([1, 1, 3])
        h.total        # -> 3
        h.cells(4)     # -> array([0, 2, 0, 1])
    """
    bins: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        bins = {}
        for value, count in self.bins.items():
            count = int(count)
            if count < 0:
                raise ValueError(f"negative count {count} for value {value}")
            bins[int(value)] = count
        self.bins = bins

    @classmethod
    def from_values(cls, values: Iterable[int] | np.ndarray) -> Histogram:
        """Count occurrences of each value."""
        if isinstance(values, np.ndarray):
            keys, counts = np.unique(values, return_counts=True)
            return cls(dict(zip(keys.tolist(), counts.tolist())))
        return cls(dict(Counter(int(v) for v in values)))

    @classmethod
    def from_cells(cls, counts: Iterable[int]) -> Histogram:
        """Histogram over 0..len(counts)-1, zero cells included."""
        return cls({i: int(c) for i, c in enumerate(counts)})

    @property
    def total(self) -> int:
        return sum(self.bins.values())

    def __len__(self) -> int:
        return len(self.bins)

    def __getitem__(self, value: int) -> int:
        return self.bins.get(value, 0)

    def __add__(self, other: Histogram) -> Histogram:
        return self.merge(other)

    def add(self, value: int, count: int = 1):
        self.bins[int(value)] = self.bins.get(int(value), 0) + count

    def merge(self, other: Histogram) -> Histogram:
        merged = Counter(self.bins)
        merged.update(other.bins)
        return Histogram(dict(merged))

    def cells(self, R: int) -> np.ndarray:
        """
        Dense count vector over 0..R-1.

        Raises:
            ValueError: If a value lies outside [0, R).
        """
        out = np.zeros(R, dtype=np.int64)
        for value, count in self.bins.items():
            if not 0 <= value < R:
                raise ValueError(f"value {value} outside [0, {R})")
            out[value] = count
        return out

    def reduce(self, n_bits: int) -> Histogram:
        """Histogram of value mod 2^n_bits."""
        R = 1 << n_bits
        reduced = Counter()
        for value, count in self.bins.items():
            reduced[value % R] += count
        return Histogram(dict(reduced))

    def _arrays(self) -> tuple[np.ndarray, np.ndarray]:
        values = np.fromiter(self.bins.keys(), dtype=float, count=len(self.bins))
        counts = np.fromiter(self.bins.values(), dtype=float, count=len(self.bins))
        return values, counts

    def mean(self) -> float:
        if self.total == 0:
            raise ValueError("empty histogram has no mean")
        values, counts = self._arrays()
        return float(values @ counts / counts.sum())

    def variance(self) -> float:
        """Population variance."""
        mu = self.mean()
        values, counts = self._arrays()
        return float(((values - mu) ** 2) @ counts / counts.sum())

    def mode(self) -> int:
        """Most frequent value; the smallest one on ties."""
        if self.total == 0:
            raise ValueError("empty histogram has no mode")
        return min(self.bins, key=lambda v: (-self.bins[v], v))

    def rows(self, R: int | None = None) -> list[tuple[int, int]]:
        """(value, count) ascending; with R every residue 0..R-1 is listed."""
        if R is not None:
            return list(enumerate(self.cells(R).tolist()))
        return sorted(self.bins.items())

    def to_dict(self) -> dict[str, int]:
        return {str(v): c for v, c in sorted(self.bins.items())}

    @classmethod
    def from_dict(cls, data: Mapping[str, int]) -> Histogram:
        return cls({int(k): int(v) for k, v in data.items()})


@dataclass(frozen=True)
class UniformityReport:
    """
    The three uniformity criteria for one residue histogram.

    Attributes:
        chi_square: Statistic against the uniform law.
        degrees_of_freedom: R - 1.
        p_value: Chi-square survival probability.
        min_entropy_bits: MCV min-entropy estimate.
        clt_fraction_within: Share of cell z-scores within 1, 2 and 3 sigma.
        shannon_bits: Shannon entropy of the empirical distribution.
        residue_mean: Arithmetic mean of the residues.
        n_bits: Symbol width.
        total: Sample count.
    """
    chi_square: float
    degrees_of_freedom: int
    p_value: float
    min_entropy_bits: float
    clt_fraction_within: tuple[float, float, float]
    shannon_bits: float = 0.0
    residue_mean: float = 0.0
    n_bits: int = 0
    total: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError(f"p_value {self.p_value} outside [0, 1]")
        if self.min_entropy_bits < 0 or (self.n_bits and self.min_entropy_bits > self.n_bits):
            raise ValueError(f"min-entropy {self.min_entropy_bits} outside [0, {self.n_bits}]")
        f1, f2, f3 = self.clt_fraction_within
        if not f1 <= f2 <= f3:
            raise ValueError(f"CLT fractions must be non-decreasing, got {self.clt_fraction_within}")

    @property
    def ideal_mean(self) -> float:
        return ((1 << self.n_bits) - 1) / 2

    def to_dict(self) -> dict:
        return {
            "chi_square": self.chi_square,
            "degrees_of_freedom": self.degrees_of_freedom,
            "p_value": self.p_value,
            "min_entropy_bits": self.min_entropy_bits,
            "clt_within_1sigma": self.clt_fraction_within[0],
            "clt_within_2sigma": self.clt_fraction_within[1],
            "clt_within_3sigma": self.clt_fraction_within[2],
            "shannon_bits": self.shannon_bits,
            "residue_mean": self.residue_mean,
            "n_bits": self.n_bits,
            "total": self.total,
        }

    def summary(self) -> str:
        f1, f2, f3 = self.clt_fraction_within
        return (
            f"chi2={self.chi_square:.2f} (df={self.degrees_of_freedom}, p={self.p_value:.4g}), "
            f"H_min={self.min_entropy_bits:.4f} bits, H={self.shannon_bits:.4f} bits, "
            f"CLT 1/2/3 sigma={f1:.2f}/{f2:.2f}/{f3:.2f}, "
            f"mean={self.residue_mean:.3f} (ideal {self.ideal_mean:.2f})"
        )
