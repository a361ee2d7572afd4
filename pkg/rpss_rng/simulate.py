"""
Batched simulated-mode sorting cycles.

Cycles are advanced in lockstep: every active cycle draws one uniform
element of S_N, multiplies it onto its pad through the Cayley table and
charges one runtime-model cost. Pads equal to the sorting permutation
count as a success and reset to the identity. Finished cycles drop out of
the active set, so the work is proportional to the total number of draws.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .engine import CycleResult, DrawBudgetExceeded
from .models.config import EngineConfig, Mode
from .models.histogram import Histogram
from .models.permutation import (
    MAX_TABLE_SIZE, PermutationError, cayley_table, group_index, identity, sorting_permutation,
)


logger = logging.getLogger(__name__)

CHUNK_CYCLES = 1 << 18


@dataclass(frozen=True)
class CycleBatch:
    """
    Observables of many cycles.

    Attributes:
        n_p: Draw counts, one per cycle.
        t: Elapsed ticks, one per cycle.
        n_bits: Residue width.
    """
    n_p: np.ndarray
    t: np.ndarray
    n_bits: int

    def __len__(self) -> int:
        return len(self.n_p)

    def __getitem__(self, i: int) -> CycleResult:
        return CycleResult.from_counts(int(self.n_p[i]), int(self.t[i]), self.n_bits)

    @property
    def R(self) -> int:
        return 1 << self.n_bits

    @property
    def n_p_mod(self) -> np.ndarray:
        return self.n_p & (self.R - 1)

    @property
    def t_mod(self) -> np.ndarray:
        return self.t & (self.R - 1)

    def count_histogram(self) -> Histogram:
        return Histogram.from_values(self.n_p)

    def tick_histogram(self) -> Histogram:
        return Histogram.from_values(self.t)

    def count_residues(self) -> Histogram:
        return Histogram.from_cells(np.bincount(self.n_p_mod, minlength=self.R))

    def tick_residues(self) -> Histogram:
        return Histogram.from_cells(np.bincount(self.t_mod, minlength=self.R))


def simulate_cycles(cfg: EngineConfig, cycles: int, seed: int = 0,
                    chunk: int = CHUNK_CYCLES) -> CycleBatch:
    """
    Run ``cycles`` simulated sorting cycles.

    Args:
        cfg: Simulated-mode configuration with N <= 6.
        cycles: Number of cycles.
        seed: numpy PCG64 seed; equal seeds give equal batches.
        chunk: Cycles advanced together.

    Raises:
        DrawBudgetExceeded: If any cycle reaches cfg.draw_cap draws.
    """
    if cfg.mode is not Mode.SIMULATED:
        raise ValueError("batched cycles need simulated mode")
    if cfg.n > MAX_TABLE_SIZE:
        raise PermutationError(f"batched cycles limited to N <= {MAX_TABLE_SIZE}", size=cfg.n)
    if cycles < 0:
        raise ValueError(f"cycles must be >= 0, got {cycles}")

    table = cayley_table(cfg.n)
    order = table.shape[0]
    start_pad = group_index(identity(cfg.n))
    sorter = group_index(sorting_permutation(cfg.disordered))
    model = cfg.runtime_model
    gen = np.random.default_rng(seed)

    n_p = np.zeros(cycles, dtype=np.int64)
    t = np.zeros(cycles, dtype=np.int64)

    for begin in range(0, cycles, chunk):
        size = min(chunk, cycles - begin)
        active = np.arange(begin, begin + size)
        pad = np.full(size, start_pad, dtype=np.int32)
        successes = np.zeros(size, dtype=np.int64)
        ticks = np.zeros(size, dtype=np.int64)
        step = 0
        while active.size:
            if step >= cfg.draw_cap:
                raise DrawBudgetExceeded(cfg.draw_cap, int(successes.min()), cfg.m)
            pad = table[pad, gen.integers(order, size=active.size)]
            ticks += model.sample_array(gen, active.size)
            step += 1
            hit = pad == sorter
            if not hit.any():
                continue
            successes += hit
            pad[hit] = start_pad
            done = successes >= cfg.m
            if done.any():
                finished = active[done]
                n_p[finished] = step
                t[finished] = ticks[done]
                keep = ~done
                active, pad = active[keep], pad[keep]
                successes, ticks = successes[keep], ticks[keep]
        logger.debug("Simulated cycles %d..%d in %d steps", begin, begin + size, step)

    return CycleBatch(n_p, t, cfg.n_bits)
