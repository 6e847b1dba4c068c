"""Sliding-window pattern counting and the argmax guess rule.

For every shift i with the shifted window inside the sample, the pattern b read
on D+i and the pattern a read on G+i are tallied. The fitted rule maps each
observed b to the a with the largest joint count; ties go to the
lexicographically smallest a, and unseen b get the most frequent a overall.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .core import IndexPair, Pattern, Sample, ValidationError, window_count


@dataclass(frozen=True)
class CountTable:
    pair: IndexPair
    joint: dict  # (b, a) -> count
    data_marginal: dict  # b -> count
    windows: int

    def merge(self, other: "CountTable") -> "CountTable":
        """Combine counts from disjoint shift ranges (associative, commutative)."""
        if other.pair.D != self.pair.D or other.pair.G != self.pair.G:
            raise ValidationError("cannot merge tables over different index pairs")
        joint = dict(self.joint)
        for key, c in other.joint.items():
            joint[key] = joint.get(key, 0) + c
        marg = dict(self.data_marginal)
        for key, c in other.data_marginal.items():
            marg[key] = marg.get(key, 0) + c
        return CountTable(self.pair, joint, marg, self.windows + other.windows)

    def to_dict(self) -> dict:
        return {
            "pair": self.pair.to_dict(),
            "windows": self.windows,
            "joint": [[list(b), list(a), c] for (b, a), c in sorted(self.joint.items())],
            "data_marginal": [[list(b), c] for b, c in sorted(self.data_marginal.items())],
        }


def _windows(x: np.ndarray, positions: Iterable[int], W: int) -> np.ndarray:
    cols = [x[p - 1:p - 1 + W] for p in positions]
    if not cols:
        return np.zeros((W, 0), dtype=np.int64)
    return np.stack(cols, axis=1)


def count_patterns(sample: Sample, pair: IndexPair, start: int = 0, stop: Optional[int] = None) -> CountTable:
    """Tally (b, a) over shifts i in [start, stop) (default: every fitting shift)."""
    if not pair.is_normalized:
        raise ValidationError("count_patterns needs a normalized index pair")
    x = sample.symbols
    total = window_count(sample.n, pair)
    stop = total if stop is None else min(stop, total)
    start = max(0, start)
    W = max(0, stop - start)
    if W == 0:
        return CountTable(pair, {}, {}, 0)
    x = x[start:start + W + pair.L - 1]
    rows = np.concatenate([_windows(x, pair.D, W), _windows(x, pair.G, W)], axis=1)
    uniq, counts = np.unique(rows, axis=0, return_counts=True)
    nd = len(pair.D)
    joint, marg = {}, {}
    for row, c in zip(uniq.tolist(), counts.tolist()):
        b, a = tuple(row[:nd]), tuple(row[nd:])
        joint[(b, a)] = c
        marg[b] = marg.get(b, 0) + c
    return CountTable(pair, joint, marg, W)


@dataclass(frozen=True)
class GuessRule:
    pair: IndexPair
    table: dict  # b -> a
    fallback: Pattern
    tie_broken: frozenset

    def to_dict(self) -> dict:
        return {
            "pair": self.pair.to_dict(),
            "fallback": list(self.fallback),
            "table": [[list(b), list(a)] for b, a in sorted(self.table.items())],
            "tie_broken": [list(b) for b in sorted(self.tie_broken)],
        }


def _best(items):
    """Max count, smallest pattern among maximizers, and whether that was a tie."""
    best_a, best_c, tie = None, None, False
    for a, c in items:
        if best_c is None or c > best_c:
            best_a, best_c, tie = a, c, False
        elif c == best_c:
            tie = True
            if a < best_a:
                best_a = a
    return best_a, tie


def fit_guess_rule(counts: CountTable) -> GuessRule:
    if counts.windows == 0:
        raise ValidationError("no training windows")
    per_b: dict = {}
    totals: dict = {}
    for (b, a), c in counts.joint.items():
        per_b.setdefault(b, []).append((a, c))
        totals[a] = totals.get(a, 0) + c
    table, ties = {}, set()
    for b, items in per_b.items():
        a, tie = _best(items)
        table[b] = a
        if tie:
            ties.add(b)
    fallback, _ = _best(totals.items())
    return GuessRule(counts.pair, table, fallback, frozenset(ties))


def guess(rule: GuessRule, b: Pattern) -> Pattern:
    b = tuple(int(v) for v in b)
    if len(b) != len(rule.pair.D):
        raise ValidationError(f"pattern {b} does not have support D={rule.pair.D}")
    return rule.table.get(b, rule.fallback)


def fit(sample: Sample, pair: IndexPair) -> GuessRule:
    return fit_guess_rule(count_patterns(sample, pair))


# ---------------------------------------------------------------------------
# dense batch path for finite alphabets (Monte Carlo)


def window_codes(X: np.ndarray, pair: IndexPair, A: int) -> tuple[np.ndarray, np.ndarray]:
    """Lexicographic codes of the b and a patterns for every window of every row."""
    X = np.atleast_2d(X)
    W = X.shape[1] - pair.L + 1
    if W <= 0:
        return np.zeros((X.shape[0], 0), dtype=np.int64), np.zeros((X.shape[0], 0), dtype=np.int64)
    b = np.zeros((X.shape[0], W), dtype=np.int64)
    for d in pair.D:
        b = b * A + X[:, d - 1:d - 1 + W]
    a = np.zeros((X.shape[0], W), dtype=np.int64)
    for g in pair.G:
        a = a * A + X[:, g - 1:g - 1 + W]
    return b, a


def dense_counts(X: np.ndarray, pair: IndexPair, A: int) -> np.ndarray:
    """Joint counts as an array (replicates, A**|D|, A**|G|)."""
    X = np.atleast_2d(X)
    nb, na = A ** len(pair.D), A ** len(pair.G)
    bc, ac = window_codes(X, pair, A)
    R = X.shape[0]
    flat = (np.arange(R)[:, None] * (nb * na) + bc * na + ac).ravel()
    return np.bincount(flat, minlength=R * nb * na).reshape(R, nb, na)


def dense_guess_codes(C: np.ndarray) -> np.ndarray:
    """Guess code per b code for each replicate; unseen b get the global argmax.

    ``np.argmax`` returns the first maximizer, which is the lexicographic tie-break.
    """
    choice = C.argmax(axis=2)
    fallback = C.sum(axis=1).argmax(axis=1)
    unseen = C.sum(axis=2) == 0
    return np.where(unseen, fallback[:, None], choice)
