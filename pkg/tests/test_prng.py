"""Unit tests for the LCG pad generator."""

import numpy as np
import pytest
from scipy import stats

from rpss_rng import (
    Lcg, LcgState, LcgParameterError,
    next_word, next_u64, next_bounded, reseed_shift_add,
    set_default_constants, default_constants,
)
from rpss_rng.prng import DEFAULT_INCREMENT, DEFAULT_MULTIPLIER, MASK64


class TestLcgState:
    """Tests for state construction and stepping."""

    def test_zero_seed_steps_to_increment(self):
        """seed=0 gives seed'=c and the high word of c."""
        state, word = next_word(LcgState(0))
        assert state.seed == DEFAULT_INCREMENT
        assert word == 0x14057B7E

    def test_golden_sequence(self):
        """Three steps of (a=5, c=1) from 2^62."""
        state = LcgState(1 << 62, multiplier=5, increment=1)
        seeds, words = [], []
        for _ in range(3):
            state, word = next_word(state)
            seeds.append(state.seed)
            words.append(word)
        assert seeds == [(1 << 62) + 1, (1 << 62) + 6, (1 << 62) + 31]
        assert words == [1 << 30] * 3

    def test_determinism(self):
        """Equal states give equal outputs."""
        a, b = LcgState(99), LcgState(99)
        assert next_word(a) == next_word(b)
        assert a.next() == b.next()

    def test_u64_concatenates_high_word_first(self):
        """next_u64 is (w1 << 32) | w2."""
        state = LcgState(7)
        s1, w1 = next_word(state)
        _, w2 = next_word(s1)
        assert next_u64(state)[1] == (w1 << 32) | w2

    def test_hull_dobell(self):
        """Multiplier must be 1 mod 4 and increment odd."""
        with pytest.raises(LcgParameterError, match="% 4 == 1"):
            LcgState(0, multiplier=7, increment=1)
        with pytest.raises(LcgParameterError, match="odd"):
            LcgState(0, multiplier=5, increment=2)

    def test_seed_masked_to_64_bits(self):
        """Seeds wrap into 64 bits."""
        assert LcgState((1 << 64) + 3).seed == 3


class TestBounded:
    """Tests for rejection-sampled bounded draws."""

    def test_bound_one(self):
        """bound=1 returns 0 and consumes one word."""
        rng = Lcg(seed=5)
        assert rng.randbelow(1) == 0
        assert rng.words == 1

    def test_power_of_two_never_rejects(self):
        """bound=2^32 uses exactly one word per draw."""
        rng = Lcg(seed=5)
        for _ in range(100):
            rng.randbelow(1 << 32)
        assert rng.words == 100

    def test_rejects_top_word(self):
        """With bound 3 the word 0xFFFFFFFF is rejected."""
        # 5 * seed + 1 == 0xFFFFFFFF << 32
        seed = ((0xFFFFFFFF << 32) - 1) * pow(5, -1, 1 << 64) & MASK64
        rng = Lcg(seed=seed, multiplier=5, increment=1)
        rng.randbelow(3)
        assert rng.words == 2

    def test_large_bound_uses_two_words(self):
        """Bounds above 2^32 draw 64-bit values."""
        rng = Lcg(seed=11)
        value = rng.randbelow((1 << 40) + 1)
        assert 0 <= value <= 1 << 40
        assert rng.words % 2 == 0

    def test_invalid_bound(self):
        """bound must be >= 1."""
        with pytest.raises(ValueError, match="bound"):
            next_bounded(LcgState(0), 0)

    def test_functional_matches_mutable(self):
        """next_bounded and Lcg.randbelow agree."""
        state = LcgState(42)
        rng = Lcg(state=state)
        for bound in (24, 6, 2, 1000):
            state, value = next_bounded(state, bound)
            assert rng.randbelow(bound) == value
        assert rng.state == state

    def test_uniform_bound_24(self):
        """Chi-square over 24 cells passes at alpha=0.001."""
        rng = Lcg(seed=3)
        counts = np.bincount([rng.randbelow(24) for _ in range(120_000)], minlength=24)
        assert stats.chisquare(counts).pvalue > 0.001

    @pytest.mark.slow
    def test_uniform_bound_24_million(self):
        """10^6 draws pass chi-square at alpha=0.001."""
        rng = Lcg(seed=3)
        counts = np.bincount([rng.randbelow(24) for _ in range(10 ** 6)], minlength=24)
        assert stats.chisquare(counts).pvalue > 0.001


class TestReseed:
    """Tests for the shift-add reseed rule."""

    def test_zero_seed(self):
        """(0 << 7) + 5 = 5."""
        assert reseed_shift_add(LcgState(0), 5, 7).seed == 5

    def test_forced_arithmetic(self):
        """(1 << 4) + 3 = 19."""
        assert reseed_shift_add(LcgState(1), 3, 4).seed == 19

    def test_wraps(self):
        """2^63 << 1 wraps to 0."""
        assert reseed_shift_add(LcgState(1 << 63), 0, 1).seed == 0

    def test_constants_preserved(self):
        """Only the seed changes."""
        state = LcgState(17, multiplier=5, increment=3)
        new = state.reseed(9, 7)
        assert (new.multiplier, new.increment) == (5, 3)

    def test_shift_range(self):
        """k must lie in [0, 64)."""
        with pytest.raises(ValueError, match="shift"):
            reseed_shift_add(LcgState(0), 0, 64)


class TestDefaults:
    """Tests for package-wide default constants."""

    def teardown_method(self):
        set_default_constants(DEFAULT_MULTIPLIER, DEFAULT_INCREMENT, 7)

    def test_defaults(self):
        """Documented constants and shift 7."""
        assert default_constants() == (DEFAULT_MULTIPLIER, DEFAULT_INCREMENT, 7)

    def test_override(self):
        """New states pick up overridden constants."""
        set_default_constants(multiplier=5, increment=1, shift=3)
        assert LcgState.with_defaults(0).multiplier == 5
        assert Lcg().state.increment == 1

    def test_override_validated(self):
        """Invalid overrides are rejected and leave defaults alone."""
        with pytest.raises(LcgParameterError):
            set_default_constants(multiplier=6)
        assert default_constants()[0] == DEFAULT_MULTIPLIER
