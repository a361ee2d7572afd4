"""
Permutation model for the symmetric group S_N.

Pads are products of permutations applied to a disordered array. The
convention is fixed throughout the package:

    apply(p, a)[i]   = a[p[i]]        (position gather)
    compose(p, q)[i] = p[q[i]]        (apply p, then q)

so that ``apply(compose(p, q), a) == apply(q, apply(p, a))``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Protocol, Sequence

import numpy as np


MIN_SIZE = 2
MAX_SIZE = 12

# 720 x 720 at N=6; N=7 would need 5040^2 entries
MAX_TABLE_SIZE = 6


class PermutationError(ValueError):
    """Raised for invalid permutations, sizes or mismatched operands."""

    def __init__(self, message: str, size: int | None = None):
        self.size = size
        super().__init__(message + (f" (N={size})" if size is not None else ""))


class RandomSource(Protocol):
    """Anything that yields unbiased integers in [0, bound)."""

    def randbelow(self, bound: int) -> int:
        ...


def _check_size(n: int) -> None:
    if not MIN_SIZE <= n <= MAX_SIZE:
        raise PermutationError(
            f"array size must be in [{MIN_SIZE}, {MAX_SIZE}]", size=n
        )


@dataclass(frozen=True)
class Permutation:
    """
    A bijection on {0..N-1}.

    Attributes:
        mapping: Tuple of N indices, each appearing exactly once.

    Example:
        p = Permutation((2, 3, 1, 0))
        p.apply((3, 2, 0, 1))   # -> (0, 1, 2, 3)
    """
    mapping: tuple[int, ...]

    def __post_init__(self):
        mapping = tuple(int(i) for i in self.mapping)
        object.__setattr__(self, "mapping", mapping)
        _check_size(len(mapping))
        if sorted(mapping) != list(range(len(mapping))):
            raise PermutationError(f"mapping {list(mapping)} is not a bijection")

    @property
    def size(self) -> int:
        return len(self.mapping)

    def __len__(self) -> int:
        return len(self.mapping)

    def __getitem__(self, i: int) -> int:
        return self.mapping[i]

    def __iter__(self):
        return iter(self.mapping)

    def __mul__(self, other: Permutation) -> Permutation:
        """p * q is compose(p, q)."""
        return compose(self, other)

    def compose(self, other: Permutation) -> Permutation:
        return compose(self, other)

    def apply(self, values: Sequence[int]) -> tuple[int, ...]:
        return apply(self, values)

    def inverse(self) -> Permutation:
        return inverse(self)

    def is_identity(self) -> bool:
        return all(i == v for i, v in enumerate(self.mapping))

    def __repr__(self) -> str:
        return f"Permutation({list(self.mapping)})"


@dataclass(frozen=True)
class DataArray:
    """
    The disordered integer array that pads try to sort.

    Values must be pairwise distinct, otherwise more than one pad sorts
    the array and the success law changes.
    """
    values: tuple[int, ...]

    def __post_init__(self):
        values = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", values)
        _check_size(len(values))
        if len(set(values)) != len(values):
            raise PermutationError(f"array values {list(values)} are not distinct")

    @property
    def size(self) -> int:
        return len(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)


def _mapping(p: Permutation | Sequence[int]) -> tuple[int, ...]:
    if isinstance(p, Permutation):
        return p.mapping
    return Permutation(tuple(p)).mapping


def _values(a: DataArray | Sequence[int]) -> tuple[int, ...]:
    if isinstance(a, DataArray):
        return a.values
    return tuple(a)


def identity(n: int) -> Permutation:
    """Identity permutation on n elements."""
    _check_size(n)
    return Permutation(tuple(range(n)))


def compose(p: Permutation | Sequence[int], q: Permutation | Sequence[int]) -> Permutation:
    """
    Product of two pads: result[i] = p[q[i]].

    Raises:
        PermutationError: If the sizes differ.
    """
    pm, qm = _mapping(p), _mapping(q)
    if len(pm) != len(qm):
        raise PermutationError(f"size mismatch: {len(pm)} vs {len(qm)}")
    return Permutation(tuple(pm[i] for i in qm))


def inverse(p: Permutation | Sequence[int]) -> Permutation:
    """Unique q with compose(p, q) == identity."""
    pm = _mapping(p)
    inv = [0] * len(pm)
    for i, v in enumerate(pm):
        inv[v] = i
    return Permutation(tuple(inv))


def apply(p: Permutation | Sequence[int], a: DataArray | Sequence[int]) -> tuple[int, ...]:
    """
    Act with a pad on an array: result[i] = a[p[i]].

    Raises:
        PermutationError: If the sizes differ.
    """
    pm, values = _mapping(p), _values(a)
    if len(pm) != len(values):
        raise PermutationError(f"size mismatch: pad {len(pm)} vs array {len(values)}")
    return tuple(values[i] for i in pm)


def is_sorted(a: DataArray | Sequence[int]) -> bool:
    """True iff values are strictly ascending."""
    values = _values(a)
    return all(x < y for x, y in zip(values, values[1:]))


def sorting_permutation(a: DataArray | Sequence[int]) -> Permutation:
    """The unique pad p with is_sorted(apply(p, a)) for distinct values."""
    values = DataArray(_values(a)).values
    return Permutation(tuple(sorted(range(len(values)), key=values.__getitem__)))


def random_permutation(n: int, rng: RandomSource) -> Permutation:
    """
    Draw a uniform element of S_n by Fisher-Yates.

    Starting from the identity, for i = n-1 down to 1 a position
    j = rng.randbelow(i + 1) is drawn and entries i and j are swapped.
    With an unbiased source every permutation has probability 1/n!.
    A source that always yields 0 gives [1, 0] for n=2.
    """
    _check_size(n)
    mapping = list(range(n))
    for i in range(n - 1, 0, -1):
        j = rng.randbelow(i + 1)
        mapping[i], mapping[j] = mapping[j], mapping[i]
    return Permutation(tuple(mapping))


def default_disordered(n: int) -> DataArray:
    """Default array to sort: {3, 2, 0, 1} for N=4, descending otherwise."""
    _check_size(n)
    if n == 4:
        return DataArray((3, 2, 0, 1))
    return DataArray(tuple(range(n - 1, -1, -1)))


@lru_cache(maxsize=None)
def symmetric_group(n: int) -> tuple[Permutation, ...]:
    """All n! permutations in lexicographic order (n <= 6)."""
    _check_size(n)
    if n > MAX_TABLE_SIZE:
        raise PermutationError(
            f"enumeration limited to N <= {MAX_TABLE_SIZE}", size=n
        )
    return tuple(Permutation(m) for m in itertools.permutations(range(n)))


@lru_cache(maxsize=None)
def cayley_table(n: int) -> np.ndarray:
    """
    Multiplication table of S_n indexed by position in symmetric_group(n).

    table[i, j] is the position of compose(G[i], G[j]).
    """
    group = symmetric_group(n)
    index = {g.mapping: k for k, g in enumerate(group)}
    order = len(group)
    table = np.empty((order, order), dtype=np.int32)
    for i, g in enumerate(group):
        gm = g.mapping
        for j, h in enumerate(group):
            table[i, j] = index[tuple(gm[k] for k in h.mapping)]
    table.setflags(write=False)
    return table


def group_index(p: Permutation) -> int:
    """Position of p in symmetric_group(p.size)."""
    return symmetric_group(p.size).index(p)
