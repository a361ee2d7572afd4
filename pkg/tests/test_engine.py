"""Tests for sorting cycles, the TURNG loop and byte packing."""

import json
import warnings

import numpy as np
import pytest

from rpss_rng import (
    EngineConfig, Mode, ConvergenceWarning, Turng, CycleResult, Lcg,
    MockTickSource, SimulatedTickSource, MonotonicTickSource, ConstantModel, TickSpan,
    Histogram, min_entropy_mcv, chi_square_uniform,
    run_cycle, modular_reduce, turng_next_symbol, byte_stream,
    pack_symbols, unpack_bytes, reseed_shift_add, simulate_cycles,
    DrawBudgetExceeded, PackingError, PermutationError, LcgParameterError,
    clock_resolution,
)


fine_clock = pytest.mark.skipif(clock_resolution() > 1e-6, reason="perf_counter too coarse")


def quiet_config(**kwargs):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        return EngineConfig(**kwargs)


def mock_schedule():
    return MockTickSource([1, 2, 3, 4, 5] * 10000)


class TestEngineConfig:
    """Tests for configuration validation."""

    def test_defaults(self):
        """N=4, m=4, 4 bits gives M=96 and R=16."""
        cfg = EngineConfig()
        assert (cfg.M, cfg.R) == (96, 16)
        assert cfg.disordered.values == (3, 2, 0, 1)
        assert cfg.mode is Mode.SIMULATED
        assert cfg.k_shift == 7
        assert cfg.converged

    def test_convergence_warning(self):
        """log2(M) <= n_bits + 2 warns but still builds."""
        with pytest.warns(ConvergenceWarning, match="residues will not be uniform"):
            cfg = EngineConfig(n=2, m=1, n_bits=4)
        assert not cfg.converged

    def test_sorted_array_rejected(self):
        """An already sorted array would never need a draw."""
        with pytest.raises(ValueError, match="already sorted"):
            EngineConfig(disordered=(0, 1, 2, 3))

    def test_array_size_mismatch(self):
        """The array must have N values."""
        with pytest.raises(PermutationError, match="3 values"):
            EngineConfig(n=4, disordered=(2, 1, 0))

    @pytest.mark.parametrize("kwargs, match", [
        ({"m": 0}, "m must be"),
        ({"n_bits": 0}, "n_bits"),
        ({"n_bits": 17}, "n_bits"),
        ({"draw_cap": 0}, "draw_cap"),
        ({"warmup": -1}, "warmup"),
    ])
    def test_invalid_values(self, kwargs, match):
        """Out-of-range parameters are rejected."""
        with pytest.raises(ValueError, match=match):
            quiet_config(**kwargs)

    def test_bad_lcg_constants(self):
        """Hull-Dobell violations are rejected at construction."""
        with pytest.raises(LcgParameterError):
            EngineConfig(multiplier=6)
        with pytest.raises(LcgParameterError, match="k_shift"):
            EngineConfig(k_shift=64)

    def test_dict_round_trip(self):
        """to_dict/from_dict preserve the configuration."""
        cfg = EngineConfig(n=5, m=2, n_bits=4, runtime_model="constant:2", warmup=2)
        again = EngineConfig.from_dict(json.loads(json.dumps(cfg.to_dict())))
        assert again == cfg
        assert again.runtime_model.spec() == "constant:2"

    def test_runtime_model_in_equality(self):
        """Configs that differ only in runtime model are not equal."""
        a = EngineConfig(runtime_model="constant:2")
        b = EngineConfig(runtime_model="constant:3")
        assert a != b
        assert a == EngineConfig(runtime_model="constant:2")
        assert hash(a) == hash(EngineConfig(runtime_model="constant:2"))

    def test_empirical_model_survives_round_trip(self):
        """An empirical model comes back equal after to_dict/from_dict."""
        cfg = EngineConfig(runtime_model="empirical:1=0.1,2=0.3,3=0.6")
        again = EngineConfig.from_dict(json.loads(json.dumps(cfg.to_dict())))
        assert again == cfg
        assert again != EngineConfig(runtime_model="empirical:1=0.2,2=0.2,3=0.6")

    def test_mode_aliases(self):
        """Mode accepts its short and long names."""
        assert Mode.parse("simulated") is Mode.SIMULATED
        assert Mode.parse("hw") is Mode.HARDWARE
        with pytest.raises(ValueError, match="Unknown mode"):
            Mode.parse("quantum")


class TestModularReduce:
    """Tests for residue extraction."""

    def test_examples(self):
        """77 mod 16 = 13, 46 mod 16 = 14, 0 mod 16 = 0."""
        assert modular_reduce(77, 4) == 13
        assert modular_reduce(46, 4) == 14
        assert modular_reduce(0, 4) == 0

    def test_invalid(self):
        """Bits outside [1, 16] and negative values are rejected."""
        with pytest.raises(ValueError, match="n_bits"):
            modular_reduce(5, 0)
        with pytest.raises(ValueError, match="unsigned"):
            modular_reduce(-1, 4)

    def test_cycle_result(self):
        """from_counts fills both residues."""
        result = CycleResult.from_counts(77, 46, 4)
        assert (result.n_p_mod, result.t_mod, result.ticks) == (13, 14, 46)
        assert result.t == TickSpan(46)


class TestRunCycle:
    """Tests for a single sorting cycle."""

    def test_n2_mean_is_two(self):
        """N=2, m=1 is geometric with p=1/2."""
        cfg = quiet_config(n=2, m=1, n_bits=1)
        rng = Lcg(seed=1)
        clock = SimulatedTickSource(ConstantModel(1))
        counts = [run_cycle(cfg, rng, clock)[0].n_p for _ in range(20000)]
        assert min(counts) >= 1
        assert np.mean(counts) == pytest.approx(2.0, rel=0.03)

    def test_functional_state_untouched(self):
        """A plain LcgState is not mutated; the advanced state is returned."""
        cfg = EngineConfig()
        state = cfg.lcg_state(5)
        result, advanced = run_cycle(cfg, state, SimulatedTickSource(seed=0))
        assert state.seed == cfg.lcg_state(5).seed
        assert advanced != state
        assert result.n_p >= cfg.m

    def test_constant_cost(self):
        """With constant(c) costs, t = c * n_p."""
        cfg = EngineConfig(n=3, m=4, n_bits=2)
        rng = Lcg(seed=9)
        clock = SimulatedTickSource(ConstantModel(3))
        for _ in range(20):
            result, _ = run_cycle(cfg, rng, clock)
            assert result.ticks == 3 * result.n_p

    def test_mock_schedule_ticks(self):
        """Unit schedule entries make t equal n_p."""
        cfg = EngineConfig(n=3, m=4, n_bits=2)
        result, _ = run_cycle(cfg, Lcg(seed=2), MockTickSource([1] * 5000))
        assert result.ticks == result.n_p

    def test_draw_cap(self):
        """m=2 needs at least two draws, so a cap of 1 always trips."""
        cfg = quiet_config(n=4, m=2, draw_cap=1)
        with pytest.raises(DrawBudgetExceeded, match="draw cap 1") as exc:
            run_cycle(cfg, Lcg(seed=0), SimulatedTickSource(seed=0))
        assert exc.value.cap == 1
        assert exc.value.required == 2


class TestCycleLaw:
    """Tests comparing cycle counts with the negative binomial law."""

    def test_single_success_probability(self):
        """Pr[n_p = 1] = 1/24 for N=4, m=1."""
        cfg = EngineConfig(n=4, m=1, n_bits=2)
        batch = simulate_cycles(cfg, 240_000, seed=4)
        assert np.count_nonzero(batch.n_p == 1) == pytest.approx(10_000, rel=0.05)

    def test_mean_n4_m3(self):
        """Mean draw count is m * N! = 72."""
        cfg = EngineConfig(n=4, m=3, n_bits=4)
        batch = simulate_cycles(cfg, 100_000, seed=8)
        assert batch.n_p.mean() == pytest.approx(72, rel=0.01)

    def test_batch_constant_cost(self):
        """Batched cycles with constant(3) costs have t = 3 * n_p."""
        cfg = EngineConfig(runtime_model="constant:3")
        batch = simulate_cycles(cfg, 1000, seed=1)
        assert np.array_equal(batch.t, 3 * batch.n_p)


class TestTurng:
    """Tests for the self-reseeding loop."""

    def test_mock_determinism(self):
        """Equal seeds and schedules give equal symbol streams."""
        cfg = EngineConfig(n=4, m=4, n_bits=2)
        runs = [Turng(cfg, seed=11, clock=mock_schedule()).symbols(200) for _ in range(2)]
        assert runs[0] == runs[1]
        assert set(runs[0]) <= {0, 1, 2, 3}

    @pytest.mark.slow
    def test_mock_determinism_long(self):
        """Two mock-clocked engines agree bit for bit over 10^4 symbols."""
        cfg = EngineConfig(n=4, m=1, n_bits=2)
        schedule = [1, 2, 3, 1, 4] * 80_000
        runs = [Turng(cfg, seed=11, clock=MockTickSource(schedule)).read(2500) for _ in range(2)]
        assert len(runs[0]) == 2500
        assert runs[0] == runs[1]

    def test_symbol_stream_uniform(self):
        """5000 two-bit TURNG symbols pass chi-square against uniform."""
        cfg = EngineConfig(n=3, m=8, n_bits=2)
        symbols = Turng(cfg, seed=3).symbols(5000)
        _, p_value = chi_square_uniform(Histogram.from_values(symbols), 4)
        assert p_value > 0.001

    @pytest.mark.slow
    def test_symbol_stream_uniform_four_bits(self):
        """20000 four-bit symbols at N=4, m=4 pass chi-square against uniform."""
        symbols = Turng(EngineConfig(n=4, m=4, n_bits=4), seed=1).symbols(20_000)
        _, p_value = chi_square_uniform(Histogram.from_values(symbols), 16)
        assert p_value > 0.001

    def test_reseed_uses_tick_residue(self):
        """After a cycle the seed is (seed << k) + t mod 2^n."""
        cfg = EngineConfig(n=4, m=4, n_bits=2)
        engine = Turng(cfg, seed=11, clock=mock_schedule())
        result, advanced = run_cycle(cfg, cfg.lcg_state(11), mock_schedule())
        assert engine.cycle() == result
        assert engine.state == reseed_shift_add(advanced, result.t_mod, cfg.k_shift)

    def test_constants_survive_reseed(self):
        """Reseeding never changes the multiplier or increment."""
        cfg = EngineConfig(n=4, m=4, n_bits=2)
        engine = Turng(cfg, seed=3, clock=mock_schedule())
        engine.symbols(10)
        assert (engine.state.multiplier, engine.state.increment) == (cfg.multiplier, cfg.increment)
        assert engine.cycle_index == 10

    def test_warmup(self):
        """Warm-up symbols are discarded at start."""
        cfg = EngineConfig(warmup=3)
        assert Turng(cfg, seed=1).cycle_index == 3
        assert Turng(cfg, seed=1, warmup=False).cycle_index == 0

    def test_turng_next_symbol(self):
        """The functional entry point checks its configuration."""
        cfg = EngineConfig(n=4, m=4, n_bits=2)
        engine = Turng(cfg, seed=1)
        symbol, same = turng_next_symbol(cfg, engine)
        assert same is engine and 0 <= symbol < 4
        with pytest.raises(ValueError, match="different configuration"):
            turng_next_symbol(EngineConfig(), engine)

    def test_turng_next_symbol_checks_runtime_model(self):
        """A state built with another cost model is refused."""
        engine = Turng(EngineConfig(n=4, m=4, n_bits=2, runtime_model="constant:2"), seed=1)
        with pytest.raises(ValueError, match="different configuration"):
            turng_next_symbol(EngineConfig(n=4, m=4, n_bits=2, runtime_model="constant:3"), engine)

    def test_snapshot_round_trip(self):
        """A restored engine continues the same stream."""
        cfg = EngineConfig(n=4, m=4, n_bits=4)
        engine = Turng(cfg, seed=21)
        engine.symbols(3)
        snap = json.loads(json.dumps(engine.snapshot()))
        expected = engine.symbols(5)
        restored = Turng.from_snapshot(snap)
        assert restored.cycle_index == 3
        assert restored.symbols(5) == expected

    def test_mock_snapshot_restores_schedule(self):
        """A mock-clocked engine resumes its schedule at the saved cursor."""
        cfg = EngineConfig(n=4, m=1, n_bits=2)
        schedule = [1, 2, 3, 4, 5] * 400
        engine = Turng(cfg, seed=9, clock=MockTickSource(schedule))
        engine.symbols(4)
        snap = json.loads(json.dumps(engine.snapshot()))
        expected = engine.symbols(10)
        first, second = Turng.from_snapshot(snap), Turng.from_snapshot(snap)
        assert first.clock.kind == "mock"
        assert first.clock.cursor == snap["clock"]["cursor"]
        assert first.symbols(10) == expected
        assert second.symbols(10) == expected

    def test_mock_snapshot_without_schedule(self):
        """A mock snapshot missing its schedule needs the clock passed in."""
        cfg = EngineConfig(n=4, m=1, n_bits=2)
        engine = Turng(cfg, seed=9, clock=MockTickSource([2] * 500))
        snap = engine.snapshot()
        del snap["clock"]["schedule"]
        with pytest.raises(ValueError, match="no schedule"):
            Turng.from_snapshot(snap)
        restored = Turng.from_snapshot(snap, clock=MockTickSource([2] * 500))
        assert restored.clock.kind == "mock"

    def test_hardware_snapshot_restores_counter(self):
        """A hardware snapshot comes back on the monotonic counter."""
        cfg = EngineConfig(n=4, m=1, n_bits=2, mode="hardware")
        snap = Turng(cfg, seed=4).snapshot()
        assert isinstance(Turng.from_snapshot(snap).clock, MonotonicTickSource)

    @fine_clock
    def test_hardware_streams_diverge(self):
        """Real timing jitter separates two equally seeded engines."""
        cfg = EngineConfig(n=4, m=1, n_bits=2, mode="hardware")
        a, b = Turng(cfg, seed=5), Turng(cfg, seed=5)
        assert a.symbols(64) != b.symbols(64)


class TestHardwareTiming:
    """Conjugate timing under the real counter."""

    @fine_clock
    def test_fixed_pad_ticks_vary(self):
        """The same pad sequence takes varying time over 100 repetitions."""
        cfg = EngineConfig(n=4, m=1, n_bits=2, mode="hardware")
        clock = MonotonicTickSource()
        ticks = set()
        for _ in range(100):
            result, _ = run_cycle(cfg, cfg.lcg_state(7), clock)
            ticks.add(result.ticks)
        assert len(ticks) > 1

    @fine_clock
    @pytest.mark.slow
    def test_tick_residue_min_entropy(self):
        """10^6 hardware cycles give at least 3.5 bits of tick-residue min-entropy."""
        cfg = EngineConfig(n=4, m=4, n_bits=4, mode="hardware")
        engine = Turng(cfg, seed=1)
        residues = [engine.cycle().t_mod for _ in range(10 ** 6)]
        assert min_entropy_mcv(Histogram.from_values(residues), 4) >= 3.5


class TestPacking:
    """Tests for symbol packing."""

    def test_nibbles_low_first(self):
        """[13, 2] packs to 0x2D."""
        assert pack_symbols([13, 2], 4) == b"\x2d"

    def test_bytes(self):
        """8-bit symbols pack one per byte."""
        assert pack_symbols([0xAB], 8) == b"\xab"

    def test_unpack_inverse(self):
        """unpack_bytes reverses pack_symbols."""
        symbols = [1, 0, 3, 2, 2, 2, 0, 1]
        assert unpack_bytes(pack_symbols(symbols, 2), 2) == symbols

    def test_errors(self):
        """Bad widths, leftovers and oversized symbols raise."""
        with pytest.raises(PackingError, match="3-bit"):
            pack_symbols([1], 3)
        with pytest.raises(PackingError, match="left over"):
            pack_symbols([1, 2, 3], 4)
        with pytest.raises(PackingError, match="does not fit"):
            pack_symbols([16, 0], 4)

    def test_byte_stream(self):
        """byte_stream returns exactly the requested count."""
        cfg = EngineConfig(n=4, m=4, n_bits=4)
        engine = Turng(cfg, seed=1)
        assert byte_stream(cfg, engine, 0) == b""
        assert len(engine.read(6)) == 6
        assert engine.cycle_index == 12

    def test_byte_stream_width(self):
        """Non-packable widths cannot stream."""
        cfg = EngineConfig(n=5, m=4, n_bits=5)
        with pytest.raises(PackingError):
            byte_stream(cfg, Turng(cfg, seed=1), 1)
