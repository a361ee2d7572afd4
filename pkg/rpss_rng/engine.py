"""
The RPSS sorting cycle and the TURNG feedback loop.

A cycle draws uniform permutations, multiplies each onto a running pad,
applies the pad to the disordered array and checks whether it came out
sorted. Each success resets the pad to the identity; the cycle ends on
the m-th success. The two observables are the draw count n_p and the
elapsed ticks t.

The TURNG loop turns cycles into symbols:

    run a cycle -> reseed the LCG with t mod 2^n -> emit n_p mod 2^n
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable

from .models.config import EngineConfig, Mode
from .models.permutation import apply, compose, identity, is_sorted, random_permutation
from .prng import Lcg, LcgState
from .timing import MockTickSource, MonotonicTickSource, SimulatedTickSource, TickSource, TickSpan


logger = logging.getLogger(__name__)

PACKABLE_BITS = (1, 2, 4, 8)


class DrawBudgetExceeded(RuntimeError):
    """Raised when a cycle hits its draw cap before the m-th success."""

    def __init__(self, cap: int, successes: int, required: int | None = None):
        self.cap = cap
        self.successes = successes
        self.required = required
        need = f" of {required}" if required is not None else ""
        super().__init__(
            f"draw cap {cap} reached after {successes}{need} sorting successes"
        )


class PackingError(ValueError):
    """Raised when symbols of the given width cannot be packed into bytes."""


@dataclass(frozen=True)
class CycleResult:
    """
    Observables of one sorting cycle.

    Attributes:
        n_p: Permutation draws until the m-th success.
        t: Elapsed ticks.
        n_p_mod: n_p mod 2^n_bits.
        t_mod: t mod 2^n_bits.
    """
    n_p: int
    t: TickSpan
    n_p_mod: int
    t_mod: int

    @classmethod
    def from_counts(cls, n_p: int, ticks: int | TickSpan, n_bits: int) -> CycleResult:
        span = ticks if isinstance(ticks, TickSpan) else TickSpan(int(ticks))
        return cls(n_p, span, modular_reduce(n_p, n_bits), modular_reduce(span.ticks, n_bits))

    @property
    def ticks(self) -> int:
        return self.t.ticks


def modular_reduce(value: int, n_bits: int) -> int:
    """value mod 2^n_bits."""
    if not 1 <= n_bits <= 16:
        raise ValueError(f"n_bits must be in [1, 16], got {n_bits}")
    if value < 0:
        raise ValueError(f"value must be unsigned, got {value}")
    return value & ((1 << n_bits) - 1)


def _sort_until(cfg: EngineConfig, rng: Lcg, clock: TickSource) -> int:
    target = cfg.disordered
    pad = identity(cfg.n)
    draws = 0
    successes = 0
    while successes < cfg.m:
        if draws >= cfg.draw_cap:
            raise DrawBudgetExceeded(cfg.draw_cap, successes, cfg.m)
        pad = compose(pad, random_permutation(cfg.n, rng))
        draws += 1
        clock.charge()
        if is_sorted(apply(pad, target)):
            successes += 1
            pad = identity(cfg.n)
    return draws


def run_cycle(cfg: EngineConfig, rng: LcgState | Lcg,
              clock: TickSource) -> tuple[CycleResult, LcgState]:
    """
    Run one sorting cycle.

    Args:
        cfg: Engine configuration.
        rng: LCG state (left untouched) or a mutable Lcg (advanced in place).
        clock: Tick source timing the whole cycle.

    Returns:
        The cycle's observables and the advanced LCG state.

    Raises:
        DrawBudgetExceeded: If cfg.draw_cap draws pass before the m-th success.
    """
    source = rng if isinstance(rng, Lcg) else Lcg(state=rng)
    draws = []
    span = clock.measure(lambda: draws.append(_sort_until(cfg, source, clock)))
    return CycleResult.from_counts(draws[0], span, cfg.n_bits), source.state


def default_clock(cfg: EngineConfig, seed: int | None = 0) -> TickSource:
    """Monotonic counter in hardware mode, the runtime model in simulated mode."""
    if cfg.mode is Mode.HARDWARE:
        return MonotonicTickSource()
    return SimulatedTickSource(cfg.runtime_model, seed)


def _restore_clock(cfg: EngineConfig, saved: dict) -> TickSource:
    kind = saved.get("kind")
    if kind == MockTickSource.kind:
        if "schedule" not in saved:
            raise ValueError("snapshot of a mock clock has no schedule; pass the clock in")
        clock = MockTickSource(saved["schedule"])
        clock.cursor = int(saved.get("cursor", 0))
        return clock
    if kind == MonotonicTickSource.kind:
        return MonotonicTickSource()
    if kind == SimulatedTickSource.kind:
        clock = SimulatedTickSource(cfg.runtime_model, saved.get("seed"))
        if "bit_generator" in saved:
            clock.gen.bit_generator.state = saved["bit_generator"]
        return clock
    if kind is not None:
        raise ValueError(f"unknown clock kind {kind!r} in snapshot")
    return default_clock(cfg, 0)


class Turng:
    """
    Self-reseeding engine state.

    Example:
        engine = Turng(EngineConfig(n=4, m=4, n_bits=4), seed=1)
        engine.symbols(8)
        engine.read(16)    # 16 packed bytes
    """

    def __init__(self, cfg: EngineConfig, seed: int = 0, clock: TickSource | None = None,
                 warmup: bool = True):
        self.cfg = cfg
        self.initial_seed = seed
        self.rng = Lcg(state=cfg.lcg_state(seed))
        self.clock = clock if clock is not None else default_clock(cfg, seed)
        self.cycle_index = 0
        self.last: CycleResult | None = None
        if warmup and cfg.warmup:
            logger.debug("Discarding %d warm-up symbols", cfg.warmup)
            self.symbols(cfg.warmup)

    @property
    def state(self) -> LcgState:
        return self.rng.state

    def cycle(self) -> CycleResult:
        """One cycle followed by the reseed; returns the observables."""
        result, _ = run_cycle(self.cfg, self.rng, self.clock)
        self.rng.reseed(result.t_mod, self.cfg.k_shift)
        self.cycle_index += 1
        self.last = result
        return result

    def next_symbol(self) -> int:
        return self.cycle().n_p_mod

    def symbols(self, count: int) -> list[int]:
        return [self.next_symbol() for _ in range(count)]

    def read(self, count: int) -> bytes:
        return byte_stream(self.cfg, self, count)

    def snapshot(self) -> dict:
        """JSON-ready audit record of the engine."""
        clock = self.clock.describe()
        if isinstance(self.clock, SimulatedTickSource):
            clock["bit_generator"] = self.clock.gen.bit_generator.state
        elif isinstance(self.clock, MockTickSource):
            clock["schedule"] = list(self.clock.schedule)
        return {
            "seed": self.rng.seed,
            "initial_seed": self.initial_seed,
            "multiplier": self.rng.state.multiplier,
            "increment": self.rng.state.increment,
            "config": self.cfg.to_dict(),
            "cycle_index": self.cycle_index,
            "clock": clock,
        }

    @classmethod
    def from_snapshot(cls, data: dict, clock: TickSource | None = None) -> Turng:
        """
        Rebuild an engine from snapshot().

        The clock is rebuilt from the recorded kind unless one is passed in:
        a simulated clock resumes its generator state and a mock clock resumes
        its schedule at the saved cursor.

        Raises:
            ValueError: If a mock clock was recorded without its schedule.
        """
        cfg = EngineConfig.from_dict(data["config"])
        state = LcgState(data["seed"], data["multiplier"], data["increment"])
        if clock is None:
            clock = _restore_clock(cfg, data.get("clock", {}))
        engine = cls(cfg, data.get("initial_seed", 0), clock, warmup=False)
        engine.rng = Lcg(state=state)
        engine.cycle_index = data.get("cycle_index", 0)
        return engine

    def __repr__(self) -> str:
        return (f"Turng(N={self.cfg.n}, m={self.cfg.m}, n_bits={self.cfg.n_bits}, "
                f"clock={self.clock.kind}, cycle={self.cycle_index})")


def turng_next_symbol(cfg: EngineConfig, state: Turng) -> tuple[int, Turng]:
    """Run one cycle on ``state``, reseed, and return the n_bits symbol."""
    if state.cfg != cfg:
        raise ValueError("engine state was built for a different configuration")
    return state.next_symbol(), state


def pack_symbols(symbols: Iterable[int], n_bits: int) -> bytes:
    """
    Pack symbols into bytes, first symbol in the least significant bits.

    Example:
        pack_symbols([13, 2], 4)   # -> b'\\x2d'
    """
    if n_bits not in PACKABLE_BITS:
        raise PackingError(f"cannot pack {n_bits}-bit symbols; use one of {PACKABLE_BITS}")
    per_byte = 8 // n_bits
    limit = 1 << n_bits
    out = bytearray()
    acc = filled = 0
    for symbol in symbols:
        if not 0 <= symbol < limit:
            raise PackingError(f"symbol {symbol} does not fit in {n_bits} bits")
        acc |= symbol << (filled * n_bits)
        filled += 1
        if filled == per_byte:
            out.append(acc)
            acc = filled = 0
    if filled:
        raise PackingError(f"{filled} symbols left over; need multiples of {per_byte}")
    return bytes(out)


def unpack_bytes(data: bytes, n_bits: int) -> list[int]:
    """Inverse of pack_symbols."""
    if n_bits not in PACKABLE_BITS:
        raise PackingError(f"cannot unpack {n_bits}-bit symbols; use one of {PACKABLE_BITS}")
    mask = (1 << n_bits) - 1
    return [(byte >> shift) & mask for byte in data for shift in range(0, 8, n_bits)]


def byte_stream(cfg: EngineConfig, state: Turng, count: int) -> bytes:
    """
    Exactly ``count`` bytes of packed TURNG symbols.

    Raises:
        PackingError: If cfg.n_bits is not 1, 2, 4 or 8.
    """
    if cfg.n_bits not in PACKABLE_BITS:
        raise PackingError(f"cannot pack {cfg.n_bits}-bit symbols; use one of {PACKABLE_BITS}")
    if count < 0:
        raise ValueError(f"byte count must be >= 0, got {count}")
    per_byte = 8 // cfg.n_bits
    return pack_symbols((state.next_symbol() for _ in range(count * per_byte)), cfg.n_bits)

