"""
Engine configuration.

M = m * N! is the mean permutation count and R = 2^n_bits the number of
output residues. Residues are only expected to look uniform once
log2(M) > n_bits + 2; below that EngineConfig warns but still builds.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

from .permutation import DataArray, PermutationError, default_disordered, is_sorted
from ..prng import LcgParameterError, LcgState, default_constants
from ..timing import RuntimeModel, default_runtime_model, parse_runtime_model


MIN_BITS = 1
MAX_BITS = 16

DEFAULT_DRAW_CAP = 10 ** 9
_draw_cap = {"value": DEFAULT_DRAW_CAP}


def set_default_draw_cap(cap: int):
    """Override the per-cycle draw cap used by new configs."""
    if cap < 1:
        raise ValueError(f"draw cap must be >= 1, got {cap}")
    _draw_cap["value"] = int(cap)


def default_draw_cap() -> int:
    return _draw_cap["value"]


class ConvergenceWarning(UserWarning):
    """log2(M) <= n_bits + 2: residues are not expected to be uniform."""


class Mode(str, Enum):
    """Where per-permutation costs come from."""
    HARDWARE = "hardware"
    SIMULATED = "sim"

    @classmethod
    def parse(cls, value: str | Mode) -> Mode:
        if isinstance(value, Mode):
            return value
        text = str(value).strip().lower()
        if text in ("sim", "simulated"):
            return cls.SIMULATED
        if text in ("hardware", "hw"):
            return cls.HARDWARE
        raise ValueError(f"Unknown mode: {value!r}. Available: hardware, sim")


@dataclass(frozen=True)
class EngineConfig:
    """
    Parameters of one RPSS engine.

    Attributes:
        n: Array size N (2..12).
        m: Sorting successes per cycle.
        n_bits: Output symbol width (1..16).
        k_shift: Reseed shift k.
        disordered: Array to sort; defaults to default_disordered(n).
        mode: HARDWARE times real work, SIMULATED draws costs from runtime_model.
        runtime_model: Per-permutation cost model for simulated mode.
        draw_cap: Maximum draws per cycle.
        warmup: Symbols discarded when a Turng engine starts.
        multiplier: LCG multiplier.
        increment: LCG increment.

    Example:
        cfg = EngineConfig(n=4, m=4, n_bits=4)
        cfg.M, cfg.R   # -> (96, 16)
    """
    n: int = 4
    m: int = 4
    n_bits: int = 4
    k_shift: int | None = None
    disordered: DataArray | None = None
    mode: Mode = Mode.SIMULATED
    runtime_model: RuntimeModel | None = None
    draw_cap: int | None = None
    warmup: int = 0
    multiplier: int | None = None
    increment: int | None = None

    def __post_init__(self):
        default_a, default_c, default_k = default_constants()
        if self.k_shift is None:
            object.__setattr__(self, "k_shift", default_k)
        if self.multiplier is None:
            object.__setattr__(self, "multiplier", default_a)
        if self.increment is None:
            object.__setattr__(self, "increment", default_c)
        if self.draw_cap is None:
            object.__setattr__(self, "draw_cap", default_draw_cap())
        object.__setattr__(self, "mode", Mode.parse(self.mode))
        if isinstance(self.runtime_model, str):
            object.__setattr__(self, "runtime_model", parse_runtime_model(self.runtime_model))
        if self.runtime_model is None:
            object.__setattr__(self, "runtime_model", default_runtime_model())

        if self.disordered is None:
            object.__setattr__(self, "disordered", default_disordered(self.n))
        elif not isinstance(self.disordered, DataArray):
            object.__setattr__(self, "disordered", DataArray(tuple(self.disordered)))

        if self.disordered.size != self.n:
            raise PermutationError(
                f"disordered array has {self.disordered.size} values", size=self.n
            )
        if is_sorted(self.disordered):
            raise ValueError(f"disordered array {list(self.disordered)} is already sorted")
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if not MIN_BITS <= self.n_bits <= MAX_BITS:
            raise ValueError(f"n_bits must be in [{MIN_BITS}, {MAX_BITS}], got {self.n_bits}")
        if not 0 <= self.k_shift < 64:
            raise LcgParameterError(f"k_shift must be in [0, 64), got {self.k_shift}")
        if self.draw_cap < 1:
            raise ValueError(f"draw_cap must be >= 1, got {self.draw_cap}")
        if self.warmup < 0:
            raise ValueError(f"warmup must be >= 0, got {self.warmup}")
        # Hull-Dobell check
        LcgState(0, self.multiplier, self.increment)

        if not self.converged:
            warnings.warn(
                f"log2(M)={math.log2(self.M):.2f} <= n_bits + 2 = {self.n_bits + 2} "
                f"(N={self.n}, m={self.m}); residues will not be uniform",
                ConvergenceWarning,
                stacklevel=3,
            )

    @property
    def M(self) -> int:
        """Characteristic scale m * N!."""
        return self.m * math.factorial(self.n)

    @property
    def R(self) -> int:
        return 1 << self.n_bits

    @property
    def success_probability(self) -> float:
        return 1 / math.factorial(self.n)

    @property
    def converged(self) -> bool:
        """log2(M) > n_bits + 2."""
        return math.log2(self.M) > self.n_bits + 2

    def lcg_state(self, seed: int) -> LcgState:
        return LcgState(seed, self.multiplier, self.increment)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "n_bits": self.n_bits,
            "k_shift": self.k_shift,
            "disordered": list(self.disordered),
            "mode": self.mode.value,
            "runtime_model": self.runtime_model.spec(),
            "draw_cap": self.draw_cap,
            "warmup": self.warmup,
            "multiplier": self.multiplier,
            "increment": self.increment,
        }

    @classmethod
    def from_dict(cls, data: dict) -> EngineConfig:
        data = dict(data)
        if data.get("disordered") is not None:
            data["disordered"] = DataArray(tuple(data["disordered"]))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ConvergenceWarning)
            return cls(**data)
