"""
rpss-rng: random permutation sorting entropy engine.

Sorting a disordered array with random permutation pads yields two
observables per cycle, the permutation count n_p and the elapsed ticks t.
Reduced modulo 2^n both become near-uniform symbols; the TURNG loop feeds
t back into the pad generator and emits n_p.

Example:
    from rpss_rng import EngineConfig, Turng

    cfg = EngineConfig(n=4, m=4, n_bits=4, mode="sim")
    engine = Turng(cfg, seed=1)
    data = engine.read(32)
"""

__version__ = "0.1.0"

# Permutations
from .models.permutation import (
    Permutation, DataArray, PermutationError,
    identity, compose, inverse, apply, is_sorted, sorting_permutation,
    random_permutation, default_disordered, symmetric_group, cayley_table,
)

# Pad generator
from .prng import (
    LcgState, Lcg, LcgParameterError,
    next_word, next_u64, next_bounded, reseed_shift_add,
    set_default_constants, default_constants,
)

# Timing
from .timing import (
    TickSpan, TickSource, MonotonicTickSource, MockTickSource, SimulatedTickSource,
    RuntimeModel, ConstantModel, ShiftedGeometricModel, EmpiricalModel,
    register_runtime_model, list_runtime_models, parse_runtime_model,
    sample_runtime_model, set_default_runtime_model, measure, clock_resolution,
    RuntimeModelError, ScheduleExhaustedError, ClockUnavailableError, SupportOverflowError,
)

# Engine
from .models.config import EngineConfig, Mode, ConvergenceWarning, set_default_draw_cap
from .models.histogram import Histogram, UniformityReport
from .engine import (
    CycleResult, Turng, run_cycle, modular_reduce, turng_next_symbol, byte_stream,
    pack_symbols, unpack_bytes, DrawBudgetExceeded, PackingError,
)
from .simulate import CycleBatch, simulate_cycles

# Statistics
from .stats import (
    negbin_pmf, negbin_moments, compound_time_moments, wrapped_residue_pmf,
    wrapped_compound_pmf, tail_lower_bound, expected_chi_square_excess, pmf_entropy,
    chi_square_uniform, min_entropy_mcv, clt_residuals, shannon_entropy,
    residue_mean, residue_correlation, uniformity_report, convergence_verdict, Verdict,
    InsufficientSampleError, TruncationError,
)

# I/O
from .io import RunManifest, load_schedule, save_schedule

__all__ = [
    "__version__",
    # Permutations
    "Permutation", "DataArray", "PermutationError",
    "identity", "compose", "inverse", "apply", "is_sorted", "sorting_permutation",
    "random_permutation", "default_disordered", "symmetric_group", "cayley_table",
    # Pad generator
    "LcgState", "Lcg", "LcgParameterError",
    "next_word", "next_u64", "next_bounded", "reseed_shift_add",
    "set_default_constants", "default_constants",
    # Timing
    "TickSpan", "TickSource", "MonotonicTickSource", "MockTickSource", "SimulatedTickSource",
    "RuntimeModel", "ConstantModel", "ShiftedGeometricModel", "EmpiricalModel",
    "register_runtime_model", "list_runtime_models", "parse_runtime_model",
    "sample_runtime_model", "set_default_runtime_model", "measure", "clock_resolution",
    "RuntimeModelError", "ScheduleExhaustedError", "ClockUnavailableError",
    "SupportOverflowError",
    # Engine
    "EngineConfig", "Mode", "ConvergenceWarning", "set_default_draw_cap",
    "Histogram", "UniformityReport",
    "CycleResult", "Turng", "run_cycle", "modular_reduce", "turng_next_symbol",
    "byte_stream", "pack_symbols", "unpack_bytes", "DrawBudgetExceeded", "PackingError",
    "CycleBatch", "simulate_cycles",
    # Statistics
    "negbin_pmf", "negbin_moments", "compound_time_moments", "wrapped_residue_pmf",
    "wrapped_compound_pmf", "tail_lower_bound", "expected_chi_square_excess", "pmf_entropy",
    "chi_square_uniform", "min_entropy_mcv", "clt_residuals", "shannon_entropy",
    "residue_mean", "residue_correlation", "uniformity_report", "convergence_verdict",
    "Verdict", "InsufficientSampleError", "TruncationError",
    # I/O
    "RunManifest", "load_schedule", "save_schedule",
]
