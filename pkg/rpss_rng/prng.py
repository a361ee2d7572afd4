"""
Deterministic 64-bit linear congruential generator for QPP pads.

    seed' = multiplier * seed + increment   (mod 2^64)

Each step yields the high 32 bits of the new seed; two consecutive words
concatenate (high word first) into a 64-bit value. The TURNG loop reseeds
the generator with the shift-add rule

    seed' = (seed << k) + t_mod             (mod 2^64)

which keeps multiplier and increment untouched.
"""

from __future__ import annotations

from dataclasses import dataclass, replace


MASK64 = (1 << 64) - 1
WORD_BITS = 32
WORD_RANGE = 1 << WORD_BITS

DEFAULT_MULTIPLIER = 6364136223846793005
DEFAULT_INCREMENT = 1442695040888963407
DEFAULT_SHIFT = 7


class LcgParameterError(ValueError):
    """Raised when LCG constants violate the full-period conditions."""


_defaults = {
    "multiplier": DEFAULT_MULTIPLIER,
    "increment": DEFAULT_INCREMENT,
    "shift": DEFAULT_SHIFT,
}


def set_default_constants(multiplier: int | None = None, increment: int | None = None,
                          shift: int | None = None):
    """Override the package-wide default LCG constants and reseed shift."""
    if multiplier is not None or increment is not None:
        LcgState(0, multiplier if multiplier is not None else _defaults["multiplier"],
                 increment if increment is not None else _defaults["increment"])
    if shift is not None and not 0 <= shift < 64:
        raise LcgParameterError(f"shift must be in [0, 64), got {shift}")
    if multiplier is not None:
        _defaults["multiplier"] = multiplier
    if increment is not None:
        _defaults["increment"] = increment
    if shift is not None:
        _defaults["shift"] = shift


def default_constants() -> tuple[int, int, int]:
    """Current (multiplier, increment, shift) defaults."""
    return _defaults["multiplier"], _defaults["increment"], _defaults["shift"]


@dataclass(frozen=True)
class LcgState:
    """
    Immutable LCG state.

    Attributes:
        seed: Current 64-bit state.
        multiplier: Must satisfy multiplier % 4 == 1.
        increment: Must be odd.
    """
    seed: int
    multiplier: int = DEFAULT_MULTIPLIER
    increment: int = DEFAULT_INCREMENT

    def __post_init__(self):
        object.__setattr__(self, "seed", int(self.seed) & MASK64)
        if not 0 < self.multiplier <= MASK64 or self.multiplier % 4 != 1:
            raise LcgParameterError(
                f"multiplier {self.multiplier} must be a 64-bit value with a % 4 == 1"
            )
        if not 0 < self.increment <= MASK64 or self.increment % 2 != 1:
            raise LcgParameterError(f"increment {self.increment} must be odd and 64-bit")

    @classmethod
    def with_defaults(cls, seed: int) -> LcgState:
        """State using the current package defaults."""
        multiplier, increment, _ = default_constants()
        return cls(seed, multiplier, increment)

    def next(self) -> tuple[LcgState, int]:
        return next_word(self)

    def bounded(self, bound: int) -> tuple[LcgState, int]:
        return next_bounded(self, bound)

    def reseed(self, t_mod: int, k: int = DEFAULT_SHIFT) -> LcgState:
        return reseed_shift_add(self, t_mod, k)


def next_word(state: LcgState) -> tuple[LcgState, int]:
    """Advance one step; return the new state and the high 32 bits of its seed."""
    seed = (state.multiplier * state.seed + state.increment) & MASK64
    return replace(state, seed=seed), seed >> WORD_BITS


def next_u64(state: LcgState) -> tuple[LcgState, int]:
    """Two words concatenated, first word in the high half."""
    state, hi = next_word(state)
    state, lo = next_word(state)
    return state, (hi << WORD_BITS) | lo


def next_bounded(state: LcgState, bound: int) -> tuple[LcgState, int]:
    """
    Unbiased integer in [0, bound) by rejection sampling.

    Words at or above the largest multiple of ``bound`` are rejected.
    Bounds up to 2^32 consume one word per attempt; larger bounds use
    64-bit values. bound=1 consumes exactly one word and returns 0;
    power-of-two bounds never reject.
    """
    state, value, _ = _bounded(state, bound)
    return state, value


def _bounded(state: LcgState, bound: int) -> tuple[LcgState, int, int]:
    if bound < 1:
        raise ValueError(f"bound must be >= 1, got {bound}")
    if bound <= WORD_RANGE:
        draw, span, cost = next_word, WORD_RANGE, 1
    elif bound <= 1 << 64:
        draw, span, cost = next_u64, 1 << 64, 2
    else:
        raise ValueError(f"bound {bound} exceeds 2^64")

    limit = span - span % bound
    used = 0
    while True:
        state, word = draw(state)
        used += cost
        if word < limit:
            return state, word % bound, used


def reseed_shift_add(state: LcgState, t_mod: int, k: int = DEFAULT_SHIFT) -> LcgState:
    """seed' = ((seed << k) mod 2^64 + t_mod) mod 2^64."""
    if not 0 <= k < 64:
        raise ValueError(f"shift k must be in [0, 64), got {k}")
    seed = (((state.seed << k) & MASK64) + t_mod) & MASK64
    return replace(state, seed=seed)


class Lcg:
    """
    Mutable random source over an LcgState.

    Implements ``randbelow`` so it can drive Fisher-Yates draws.

    Example:
        rng = Lcg(seed=1)
        rng.randbelow(24)
        rng.reseed(t_mod=5, k=7)
    """

    def __init__(self, seed: int = 0, multiplier: int | None = None,
                 increment: int | None = None, state: LcgState | None = None):
        if state is None:
            default_a, default_c, _ = default_constants()
            state = LcgState(
                seed,
                multiplier if multiplier is not None else default_a,
                increment if increment is not None else default_c,
            )
        self.state = state
        self.words = 0

    @property
    def seed(self) -> int:
        return self.state.seed

    def next_word(self) -> int:
        self.state, word = next_word(self.state)
        self.words += 1
        return word

    def next_u64(self) -> int:
        hi = self.next_word()
        return (hi << WORD_BITS) | self.next_word()

    def randbelow(self, bound: int) -> int:
        self.state, value, used = _bounded(self.state, bound)
        self.words += used
        return value

    def reseed(self, t_mod: int, k: int = DEFAULT_SHIFT):
        self.state = reseed_shift_add(self.state, t_mod, k)

    def __repr__(self) -> str:
        return f"Lcg(seed={self.state.seed:#018x})"
