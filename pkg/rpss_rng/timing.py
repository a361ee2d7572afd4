"""
Tick-granularity timing for sorting cycles.

A sorting cycle's elapsed time is a random sum of per-permutation costs
X_j. Three tick sources are provided:

    MonotonicTickSource  raw time.perf_counter_ns() counts around the work
    MockTickSource       replays a fixed schedule of per-permutation costs
    SimulatedTickSource  draws X_j from a runtime model (simulated mode)

Work being timed calls ``source.charge()`` once per permutation; the
monotonic source ignores the call, the virtual sources add one cost.

Runtime models are pluggable, like BOM exporters:

    register_runtime_model(MyModel)
    parse_runtime_model("empirical:1=0.05,2=0.15,3=0.55,4=0.15,5=0.10")
"""

from __future__ import annotations

import logging
import math
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Mapping

import numpy as np


logger = logging.getLogger(__name__)

# Largest support handled by exact convolution
MAX_CONVOLUTION_SUPPORT = 64

# Calibration table with its mode at 3 ticks
DEFAULT_EMPIRICAL_TABLE = {1: 0.05, 2: 0.15, 3: 0.55, 4: 0.15, 5: 0.10}


class RuntimeModelError(ValueError):
    """Raised for malformed runtime-model strings."""


class ScheduleExhaustedError(RuntimeError):
    """Raised when a mock schedule has no entries left."""

    def __init__(self, consumed: int, length: int):
        self.consumed = consumed
        self.length = length
        super().__init__(
            f"mock schedule exhausted after {consumed} of {length} entries"
        )


class ClockUnavailableError(RuntimeError):
    """Raised when no monotonic counter is available."""


class SupportOverflowError(ValueError):
    """Raised when a runtime model's support is too wide to convolve."""


@dataclass(frozen=True)
class TickSpan:
    """Elapsed clock units for one measured piece of work."""
    ticks: int

    def __post_init__(self):
        if self.ticks < 0:
            raise ValueError(f"tick span must be >= 0, got {self.ticks}")

    def __int__(self) -> int:
        return self.ticks


# ---------------------------------------------------------------------------
# Runtime models
# ---------------------------------------------------------------------------

class RuntimeModel(ABC):
    """
    Distribution of the per-permutation cost X_j in ticks.

    Extend this to add a new model and register it with
    register_runtime_model(). Samples are always >= 1.
    """
    name: str = ""

    @abstractmethod
    def sample(self, gen: np.random.Generator) -> int:
        """Draw one cost."""

    @abstractmethod
    def sample_array(self, gen: np.random.Generator, size: int) -> np.ndarray:
        """Draw ``size`` costs as an int64 array."""

    @abstractmethod
    def pmf(self, tol: float = 1e-15) -> dict[int, float]:
        """Probability of each cost; infinite supports are cut where the tail < tol."""

    @property
    @abstractmethod
    def mean(self) -> float:
        ...

    @property
    @abstractmethod
    def variance(self) -> float:
        ...

    @abstractmethod
    def spec(self) -> str:
        """Round-trippable text form accepted by parse_runtime_model()."""

    @classmethod
    @abstractmethod
    def from_args(cls, args: str) -> RuntimeModel:
        """Build from the text after ``name:``."""

    def characteristic(self, omega: np.ndarray) -> np.ndarray:
        """E[exp(i*omega*X)] evaluated on an array of angular frequencies."""
        table = self.pmf()
        values = np.fromiter(table.keys(), dtype=float)
        probs = np.fromiter(table.values(), dtype=float)
        return np.exp(1j * np.outer(omega, values)) @ probs

    def __eq__(self, other):
        if not isinstance(other, RuntimeModel):
            return NotImplemented
        if type(self) is not type(other):
            return False
        mine, theirs = self.pmf(), other.pmf()
        return mine.keys() == theirs.keys() and all(
            math.isclose(mine[k], theirs[k], rel_tol=1e-12, abs_tol=1e-15) for k in mine
        )

    def __hash__(self):
        return hash((type(self).__name__, tuple(sorted(self.pmf()))))

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.spec()}>"


class ConstantModel(RuntimeModel):
    """Every permutation costs exactly ``ticks``."""
    name = "constant"

    def __init__(self, ticks: int):
        if int(ticks) != ticks or ticks < 1:
            raise RuntimeModelError(f"constant cost must be an integer >= 1, got {ticks}")
        self.ticks = int(ticks)

    def sample(self, gen):
        return self.ticks

    def sample_array(self, gen, size):
        return np.full(size, self.ticks, dtype=np.int64)

    def pmf(self, tol=1e-15):
        return {self.ticks: 1.0}

    @property
    def mean(self):
        return float(self.ticks)

    @property
    def variance(self):
        return 0.0

    def spec(self):
        return f"constant:{self.ticks}"

    @classmethod
    def from_args(cls, args):
        try:
            return cls(int(args))
        except ValueError as e:
            raise RuntimeModelError(f"bad constant model {args!r}: {e}") from None

    def characteristic(self, omega):
        return np.exp(1j * np.asarray(omega, dtype=float) * self.ticks)


class ShiftedGeometricModel(RuntimeModel):
    """
    X = offset + G, G the number of failures before the first success.

    Mean is offset + (1 - p) / p; geometric-shifted(0.5, 1) has mean 2.
    """
    name = "geometric"

    def __init__(self, p: float, offset: int = 1):
        if not 0 < p <= 1:
            raise RuntimeModelError(f"geometric p must be in (0, 1], got {p}")
        if int(offset) != offset or offset < 1:
            raise RuntimeModelError(f"geometric offset must be an integer >= 1, got {offset}")
        self.p = float(p)
        self.offset = int(offset)

    def sample(self, gen):
        return self.offset + int(gen.geometric(self.p)) - 1

    def sample_array(self, gen, size):
        return self.offset + gen.geometric(self.p, size=size).astype(np.int64) - 1

    def pmf(self, tol=1e-15):
        if self.p == 1:
            return {self.offset: 1.0}
        q = 1 - self.p
        # tail beyond k failures is q^(k+1)
        last = max(0, math.ceil(math.log(tol) / math.log(q)) - 1)
        return {self.offset + k: self.p * q ** k for k in range(last + 1)}

    @property
    def mean(self):
        return self.offset + (1 - self.p) / self.p

    @property
    def variance(self):
        return (1 - self.p) / self.p ** 2

    def spec(self):
        return f"geometric:{self.p!r},{self.offset}"

    @classmethod
    def from_args(cls, args):
        parts = [s for s in args.split(",") if s.strip()]
        if not 1 <= len(parts) <= 2:
            raise RuntimeModelError(f"geometric model takes 'p[,offset]', got {args!r}")
        try:
            p = float(parts[0])
            offset = int(parts[1]) if len(parts) > 1 else 1
        except ValueError as e:
            raise RuntimeModelError(f"bad geometric model {args!r}: {e}") from None
        return cls(p, offset)

    def characteristic(self, omega):
        z = np.exp(1j * np.asarray(omega, dtype=float))
        return z ** self.offset * self.p / (1 - (1 - self.p) * z)


class EmpiricalModel(RuntimeModel):
    """Finite table of costs and probabilities (probabilities must sum to 1)."""
    name = "empirical"

    def __init__(self, table: Mapping[int, float]):
        if not table:
            raise RuntimeModelError("empirical table is empty")
        items = sorted((int(k), float(v)) for k, v in table.items())
        if items[0][0] < 1:
            raise RuntimeModelError(f"empirical costs must be >= 1, got {items[0][0]}")
        if any(v < 0 for _, v in items):
            raise RuntimeModelError("empirical probabilities must be >= 0")
        total = sum(v for _, v in items)
        if not math.isclose(total, 1.0, abs_tol=1e-9):
            raise RuntimeModelError(f"empirical probabilities sum to {total}, not 1")
        self.table = {k: v / total for k, v in items}
        self._values = np.array([k for k, _ in items], dtype=np.int64)
        self._cdf = np.cumsum([v / total for _, v in items])
        self._cdf[-1] = 1.0

    def sample(self, gen):
        return int(self._values[np.searchsorted(self._cdf, gen.random(), side="right")])

    def sample_array(self, gen, size):
        return self._values[np.searchsorted(self._cdf, gen.random(size), side="right")]

    def pmf(self, tol=1e-15):
        return dict(self.table)

    @property
    def mean(self):
        return sum(k * v for k, v in self.table.items())

    @property
    def variance(self):
        mu = self.mean
        return sum(v * (k - mu) ** 2 for k, v in self.table.items())

    def spec(self):
        return "empirical:" + ",".join(f"{k}={v!r}" for k, v in self.table.items())

    @classmethod
    def from_args(cls, args):
        table = {}
        for item in args.split(","):
            if not item.strip():
                continue
            try:
                key, value = item.split("=")
                table[int(key)] = float(value)
            except ValueError:
                raise RuntimeModelError(f"bad empirical entry {item!r}, expected cost=prob") from None
        return cls(table)


_runtime_models: dict[str, type[RuntimeModel]] = {
    "constant": ConstantModel,
    "geometric": ShiftedGeometricModel,
    "empirical": EmpiricalModel,
}


def register_runtime_model(model_class: type[RuntimeModel]):
    """
    Register a custom runtime model.

    Example:
        class UniformModel(RuntimeModel):
            name = "uniform"
            ...

        register_runtime_model(UniformModel)
    """
    _runtime_models[model_class.name] = model_class


def list_runtime_models() -> list[str]:
    """Names of all registered runtime models."""
    return list(_runtime_models.keys())


def parse_runtime_model(text: str) -> RuntimeModel:
    """
    Build a runtime model from ``name:args``.

    Example:
        parse_runtime_model("constant:2")
        parse_runtime_model("geometric:0.5,1")
    """
    name, _, args = text.partition(":")
    name = name.strip().lower()
    if name not in _runtime_models:
        available = ", ".join(_runtime_models)
        raise RuntimeModelError(f"Unknown runtime model: {name!r}. Available: {available}")
    return _runtime_models[name].from_args(args)


_default_model: dict[str, RuntimeModel | None] = {"model": None}


def set_default_runtime_model(model: RuntimeModel | str | None):
    """Override the model used by new configs; None restores the bundled table."""
    if isinstance(model, str):
        model = parse_runtime_model(model)
    _default_model["model"] = model


def default_runtime_model() -> RuntimeModel:
    """The configured default, else the bundled calibration table (mode at 3 ticks)."""
    return _default_model["model"] or EmpiricalModel(DEFAULT_EMPIRICAL_TABLE)


def sample_runtime_model(rng: np.random.Generator, model: RuntimeModel | str) -> int:
    """Draw one per-permutation cost from a model or model spec."""
    if isinstance(model, str):
        model = parse_runtime_model(model)
    if not isinstance(model, RuntimeModel):
        raise RuntimeModelError(f"not a runtime model: {model!r}")
    return model.sample(rng)


def runtime_model_support(model: RuntimeModel, tol: float = 1e-15) -> tuple[int, np.ndarray]:
    """
    Dense pmf of a model as (lowest cost, probabilities).

    Raises:
        SupportOverflowError: If the support is wider than 64 values.
    """
    table = model.pmf(tol)
    lo, hi = min(table), max(table)
    if hi - lo + 1 > MAX_CONVOLUTION_SUPPORT:
        raise SupportOverflowError(
            f"runtime model {model.spec()} spans {hi - lo + 1} values "
            f"(limit {MAX_CONVOLUTION_SUPPORT})"
        )
    dense = np.zeros(hi - lo + 1)
    for k, v in table.items():
        dense[k - lo] = v
    return lo, dense


# ---------------------------------------------------------------------------
# Tick sources
# ---------------------------------------------------------------------------

class TickSource(ABC):
    """Clock used to time sorting cycles. One source per engine."""
    kind: str = ""

    def charge(self):
        """Record one permutation's worth of work."""

    @abstractmethod
    def measure(self, work: Callable[[], object]) -> TickSpan:
        """Run ``work`` and return the ticks it took."""

    def describe(self) -> dict:
        return {"kind": self.kind}


class MonotonicTickSource(TickSource):
    """
    Raw counts of the platform's finest monotonic counter.

    Counts are never converted or corrected for timer overhead.
    """
    kind = "hardware"

    def __init__(self, counter: Callable[[], int] = time.perf_counter_ns):
        info = time.get_clock_info("perf_counter")
        if not info.monotonic:
            raise ClockUnavailableError("perf_counter is not monotonic on this platform")
        self._counter = counter
        self.resolution = info.resolution

    def measure(self, work):
        start = self._counter()
        work()
        return TickSpan(max(0, self._counter() - start))

    def describe(self):
        return {"kind": self.kind, "counter": "perf_counter_ns", "resolution": self.resolution}


class _VirtualTickSource(TickSource):
    """Tick source whose time advances only through charge()."""

    def __init__(self):
        self._elapsed = 0

    @abstractmethod
    def _cost(self) -> int:
        ...

    def charge(self):
        self._elapsed += self._cost()

    def measure(self, work):
        self._elapsed = 0
        work()
        return TickSpan(self._elapsed)


class MockTickSource(_VirtualTickSource):
    """
    Replays recorded per-permutation costs in order.

    Example:
        clock = MockTickSource([3])
        clock.measure(lambda: clock.charge())   # -> TickSpan(3)
    """
    kind = "mock"

    def __init__(self, schedule: Iterable[int]):
        super().__init__()
        self.schedule = [int(t) for t in schedule]
        bad = [t for t in self.schedule if t < 1]
        if bad:
            raise ValueError(f"mock schedule entries must be >= 1, got {bad[:3]}")
        self.cursor = 0

    @classmethod
    def from_file(cls, path: str | Path) -> MockTickSource:
        from .io.schedule import load_schedule
        return cls(load_schedule(path))

    @property
    def remaining(self) -> int:
        return len(self.schedule) - self.cursor

    def _cost(self):
        if self.cursor >= len(self.schedule):
            raise ScheduleExhaustedError(self.cursor, len(self.schedule))
        cost = self.schedule[self.cursor]
        self.cursor += 1
        return cost

    def describe(self):
        return {"kind": self.kind, "length": len(self.schedule), "cursor": self.cursor}


class SimulatedTickSource(_VirtualTickSource):
    """Draws each permutation's cost from a runtime model."""
    kind = "simulated"

    def __init__(self, model: RuntimeModel | None = None, seed: int | None = 0):
        super().__init__()
        self.model = model or default_runtime_model()
        self.seed = seed
        self.gen = np.random.default_rng(seed)

    def _cost(self):
        return self.model.sample(self.gen)

    def describe(self):
        return {"kind": self.kind, "model": self.model.spec(), "seed": self.seed}


def measure(source: TickSource, work: Callable[[], object]) -> TickSpan:
    """Time ``work`` on ``source``."""
    return source.measure(work)


def clock_resolution() -> float:
    """Resolution in seconds of the hardware counter."""
    return time.get_clock_info("perf_counter").resolution
