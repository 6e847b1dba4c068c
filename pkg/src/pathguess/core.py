"""Index sets, patterns, samples and window geometry.

Patterns are plain tuples of symbol ids listed in the order of their (sorted)
support, so Python's tuple ordering is exactly the lexicographic order used for
tie-breaking everywhere in the package.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

Pattern = tuple  # tuple[int, ...] over a sorted support


class PathguessError(Exception):
    """Base class for all package errors."""


class ValidationError(PathguessError, ValueError):
    """Invalid input (bad index sets, malformed model parameters, ...)."""


class ComputationError(PathguessError, RuntimeError):
    """A well-posed request that could not be carried out (budget, convergence)."""


def diam(points: Iterable[int]) -> int:
    """max - min + 1 of a non-empty integer set."""
    pts = list(points)
    if not pts:
        return 0
    return max(pts) - min(pts) + 1


@dataclass(frozen=True)
class IndexPair:
    """Data set D and guess set G, normalized so that min(D | G) == 1."""

    D: tuple[int, ...]
    G: tuple[int, ...]
    offset: int = 0  # original = normalized + offset

    def __post_init__(self):
        if not self.G:
            raise ValidationError("guess set G must be non-empty")
        if set(self.D) & set(self.G):
            raise ValidationError(f"D and G overlap: {sorted(set(self.D) & set(self.G))}")
        if tuple(sorted(set(self.D))) != self.D or tuple(sorted(set(self.G))) != self.G:
            raise ValidationError("D and G must be sorted tuples without repeats")

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(sorted(self.D + self.G))

    @property
    def L(self) -> int:
        return diam(self.support)

    @property
    def K(self) -> int:
        return len(self.D) + len(self.G)

    @property
    def is_normalized(self) -> bool:
        return min(self.support) == 1

    def original(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return (tuple(d + self.offset for d in self.D), tuple(g + self.offset for g in self.G))

    def to_dict(self) -> dict:
        return {"D": list(self.D), "G": list(self.G), "K": self.K, "L": self.L, "offset": self.offset}


def normalize_index_pair(D: Iterable[int], G: Iterable[int]) -> IndexPair:
    """Shift (D, G) so that min(D | G) = 1; the shift is kept in ``offset``.

    >>> normalize_index_pair([5], [6])
    IndexPair(D=(1,), G=(2,), offset=4)
    """
    D = sorted({int(d) for d in D})
    G = sorted({int(g) for g in G})
    if not G:
        raise ValidationError("guess set G must be non-empty")
    overlap = set(D) & set(G)
    if overlap:
        raise ValidationError(f"D and G overlap: {sorted(overlap)}")
    shift = 1 - min(D + G)
    return IndexPair(
        D=tuple(d + shift for d in D),
        G=tuple(g + shift for g in G),
        offset=-shift,
    )


def renormalize(pair: IndexPair) -> IndexPair:
    """Idempotent normalization of an existing pair (offsets compose)."""
    p = normalize_index_pair(pair.D, pair.G)
    return IndexPair(D=p.D, G=p.G, offset=pair.offset + p.offset)


def window_count(n: int, pair: IndexPair) -> int:
    """Number of shifts i >= 0 with the shifted support inside [1, n]."""
    if n < 1:
        raise ValidationError("n must be >= 1")
    return max(0, n - pair.L + 1)


def enumerate_patterns(alphabet_size: int, length: int) -> Iterator[Pattern]:
    """All patterns of the given length, in lexicographic order."""
    return product(range(alphabet_size), repeat=length)


def pattern_code(pattern: Sequence[int], alphabet_size: int) -> int:
    """Rank of a pattern in lexicographic order (mixed radix, first position most significant)."""
    code = 0
    for s in pattern:
        code = code * alphabet_size + int(s)
    return code


def decode_pattern(code: int, alphabet_size: int, length: int) -> Pattern:
    out = []
    for _ in range(length):
        code, r = divmod(code, alphabet_size)
        out.append(r)
    return tuple(reversed(out))


@dataclass(frozen=True)
class Sample:
    """An observed path X_1..X_n of symbol ids.

    ``alphabet_size`` is None for unbounded (count) alphabets.
    """

    symbols: np.ndarray
    alphabet_size: Optional[int] = None
    labels: Optional[tuple[str, ...]] = field(default=None, compare=False)

    def __post_init__(self):
        arr = np.ascontiguousarray(np.asarray(self.symbols, dtype=np.int64))
        if arr.ndim != 1 or arr.size < 1:
            raise ValidationError("a sample is a non-empty 1-d sequence")
        if arr.min() < 0:
            raise ValidationError("symbol ids must be non-negative")
        if self.alphabet_size is not None and arr.max() >= self.alphabet_size:
            raise ValidationError(
                f"symbol id {int(arr.max())} outside alphabet of size {self.alphabet_size}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "symbols", arr)

    @property
    def n(self) -> int:
        return int(self.symbols.size)

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other):
        if not isinstance(other, Sample):
            return NotImplemented
        return self.alphabet_size == other.alphabet_size and np.array_equal(self.symbols, other.symbols)

    def __hash__(self):
        return hash((self.alphabet_size, self.symbols.tobytes()))
