"""Margin, gap and excess risk of guess rules under exact laws.

All quantities are evaluated in the joint form: with J[b, a] = P(X_D=b, X_G=a),
the regret of guessing c at b is max_a J[b, a] - J[b, c].
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..core import IndexPair, ValidationError, decode_pattern, enumerate_patterns, pattern_code
from ..estimator import GuessRule, dense_counts, dense_guess_codes, guess
from ..models import ExactLaw, ProcessModel, exact_finite_law
from ..sampler import default_burn_in, replicate_seeds, simulate_batch

# gaps at or below this are ties (exact laws carry ~1e-13 error)
GAP_TOL = 1e-12


def joint_matrix(law: ExactLaw, pair: IndexPair) -> np.ndarray:
    """J[b_code, a_code] = P(X_D = b, X_G = a), codes in lexicographic order."""
    missing = set(pair.support) - set(law.support)
    if missing:
        raise ValidationError(f"law support {law.support} does not cover D | G (missing {sorted(missing)})")
    sub = law.marginal(pair.support)
    perm = [sub.support.index(p) for p in pair.D + pair.G]
    A = law.alphabet_size
    return np.transpose(sub.probs, perm).reshape(A ** len(pair.D), A ** len(pair.G))


def regret_matrix(J: np.ndarray) -> np.ndarray:
    return J.max(axis=1, keepdims=True) - J


@dataclass(frozen=True)
class MarginReport:
    delta: float
    per_b: dict


def margin_delta(law: ExactLaw, pair: IndexPair) -> MarginReport:
    """Smallest strictly positive regret gap, per b and overall (0 when none)."""
    J = joint_matrix(law, pair)
    gaps = regret_matrix(J)
    per_b = {}
    for code in range(J.shape[0]):
        pos = gaps[code][gaps[code] > GAP_TOL]
        per_b[decode_pattern(code, law.alphabet_size, len(pair.D))] = float(pos.min()) if pos.size else 0.0
    return MarginReport(min(per_b.values()), per_b)


def beta_gap(law: ExactLaw, pair: IndexPair) -> float:
    J = joint_matrix(law, pair)
    return float((J.max(axis=1) - J.min(axis=1)).max())


@dataclass(frozen=True)
class RiskReport:
    value: float
    per_b: dict
    achieving_b: tuple

    def to_dict(self):
        return {
            "value": self.value,
            "achieving_b": list(self.achieving_b),
            "per_b": [[list(b), v] for b, v in sorted(self.per_b.items())],
        }


def excess_risk_exact(rule: GuessRule, law: ExactLaw) -> RiskReport:
    """sup_b [max_a P(a, b) - P(rule(b), b)] by enumeration of every b."""
    pair = rule.pair
    A = law.alphabet_size
    J = joint_matrix(law, pair)
    best = J.max(axis=1)
    per_b = {}
    for code, b in enumerate(enumerate_patterns(A, len(pair.D))):
        a = guess(rule, b)
        if any(s >= A for s in a):
            raise ValidationError(f"rule guesses {a}, outside the law's alphabet")
        per_b[b] = float(best[code] - J[code, pattern_code(a, A)])
    achieving = max(per_b, key=lambda b: (per_b[b], tuple(-s for s in b)))
    return RiskReport(per_b[achieving], per_b, achieving)


def risk_of_codes(J: np.ndarray, guess_codes: np.ndarray) -> np.ndarray:
    """Excess risk for each row of guess codes (replicates x b codes)."""
    best = J.max(axis=1)
    chosen = J[np.arange(J.shape[0])[None, :], guess_codes]
    return (best[None, :] - chosen).max(axis=1)


def thread_count() -> int:
    env = os.environ.get("PATHGUESS_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass
class MCSummary:
    mean: float
    se: float
    q05: float
    q50: float
    q95: float
    replicates: int
    values: np.ndarray = field(repr=False)

    def to_dict(self):
        return {
            "mean": self.mean,
            "se": self.se,
            "q05": self.q05,
            "q50": self.q50,
            "q95": self.q95,
            "replicates": self.replicates,
        }


def summarize(values: np.ndarray) -> MCSummary:
    values = np.asarray(values, dtype=float)
    R = values.size
    se = float(values.std(ddof=1) / np.sqrt(R)) if R > 1 else 0.0
    q05, q50, q95 = (float(q) for q in np.quantile(values, [0.05, 0.5, 0.95]))
    return MCSummary(float(values.mean()), se, q05, q50, q95, R, values)


def chunked(total: int, n: int, cap: int = 256) -> list[tuple[int, int]]:
    size = max(1, min(cap, 2_000_000 // max(n, 1)))
    return [(s, min(s + size, total)) for s in range(0, total, size)]


def map_replicates(fn, replicates: int, n: int, threads: Optional[int] = None) -> np.ndarray:
    """Run fn(start, stop) -> values over replicate chunks; results in replicate order."""
    chunks = chunked(replicates, n)
    threads = thread_count() if threads is None else max(1, threads)
    if threads == 1 or len(chunks) == 1:
        parts = [fn(s, e) for s, e in chunks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda se: fn(*se), chunks))
    return np.concatenate(parts)


def excess_risk_mc(
    model: ProcessModel,
    pair: IndexPair,
    n: int,
    replicates: int,
    seed: int,
    burn_in: Optional[int] = None,
    threads: Optional[int] = None,
    law: Optional[ExactLaw] = None,
) -> MCSummary:
    """Risk of the fitted rule over independent training samples.

    Each replicate simulates X_1..X_n, fits the rule, and scores it exactly
    against the model's law on D | G.
    """
    if replicates < 1:
        raise ValidationError("replicates must be >= 1")
    law = exact_finite_law(model, pair.support) if law is None else law
    J = joint_matrix(law, pair)
    A = model.alphabet_size
    B = default_burn_in(model) if burn_in is None else burn_in
    if n < pair.L:
        raise ValidationError(f"n={n} leaves no training window for L={pair.L}")

    def run(start, stop):
        X = simulate_batch(model, n, replicate_seeds(seed, start, stop), B)
        return risk_of_codes(J, dense_guess_codes(dense_counts(X, pair, A)))

    return summarize(map_replicates(run, replicates, n, threads))
