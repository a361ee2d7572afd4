"""Value types: permutations, engine configuration and histograms."""

from .permutation import (
    Permutation, DataArray, PermutationError,
    identity, compose, inverse, apply, is_sorted, sorting_permutation,
    random_permutation, default_disordered, symmetric_group, cayley_table,
)
from .config import EngineConfig, Mode, ConvergenceWarning
from .histogram import Histogram, UniformityReport

__all__ = [
    "Permutation", "DataArray", "PermutationError",
    "identity", "compose", "inverse", "apply", "is_sorted", "sorting_permutation",
    "random_permutation", "default_disordered", "symmetric_group", "cayley_table",
    "EngineConfig", "Mode", "ConvergenceWarning",
    "Histogram", "UniformityReport",
]
