"""Two-point minimax construction and the exact optimal-test error."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import kl_div
from scipy.stats import binom

from ..core import ValidationError
from .bounds import minimax_lower_bound

INFINITE_TAIL_TERMS = 64  # 2**-63 mass left off the infinite tail, far below 1e-12
MAX_ORACLE_N = 10**6


def _as_array(P):
    if isinstance(P, dict):
        keys = sorted(P)
        return np.array([P[k] for k in keys], dtype=float)
    return np.asarray(P, dtype=float)


def kl_chi2(P, Q) -> tuple[float, float]:
    """KL(P || Q) and sum (P-Q)^2/Q, with 0 log 0/0 = 0 and 0/0 = 0.

    KL is summed in the form p log(p/q) - p + q, equal to the usual sum for
    probability vectors and bounded term by term by (p-q)^2/q, so rounding in
    the inputs cannot push it above the chi-square value.
    """
    P, Q = _as_array(P), _as_array(Q)
    if P.shape != Q.shape:
        raise ValidationError("P and Q must live on the same alphabet")
    if np.any((P > 0) & (Q <= 0)):
        raise ValidationError("P is not absolutely continuous with respect to Q")
    live = Q > 0
    kl = float(np.sum(kl_div(P[live], Q[live])))
    chi2 = float(np.sum((P[live] - Q[live]) ** 2 / Q[live]))
    assert kl <= chi2 + 1e-12 * max(1.0, chi2), (kl, chi2)
    return kl, chi2


@dataclass(frozen=True, eq=False)
class LeCamPair:
    P0: np.ndarray
    P1: np.ndarray
    perturbation: float = 0.0
    a0: int = 0
    a1: int = 1
    chi2_step: float = 0.0
    kl_bound: float = 0.0
    minimax_value: float = 0.0
    n: Optional[int] = None
    regime: str = "root_n"

    def swapped(self) -> "LeCamPair":
        return LeCamPair(
            self.P1, self.P0, self.perturbation, self.a0, self.a1,
            float(np.sum((self.P1 - self.P0) ** 2 / self.P0)), self.kl_bound,
            self.minimax_value, self.n, self.regime,
        )

    def to_dict(self):
        return {
            "P0": self.P0.tolist(),
            "P1": self.P1.tolist(),
            "perturbation": self.perturbation,
            "a0": self.a0,
            "a1": self.a1,
            "chi2_step": self.chi2_step,
            "kl_bound": self.kl_bound,
            "minimax_value": self.minimax_value,
            "n": self.n,
            "regime": self.regime,
        }


def lecam_masses(alphabet_size: Optional[int], perturbation: float) -> tuple[np.ndarray, np.ndarray]:
    """P0(a0) = 1/4 + h + 2^-A, P0(a1) = 1/4 - h + 2^-A, P0(a_i) = 2^-i for i >= 2; P1 swaps a0, a1.

    ``alphabet_size=None`` is the infinite alphabet (2^-A = 0, tail cut after 64 terms).
    """
    if alphabet_size is None:
        size, corr = INFINITE_TAIL_TERMS, 0.0
    else:
        if alphabet_size < 2:
            raise ValidationError("alphabet size must be >= 2")
        size, corr = alphabet_size, 2.0 ** -alphabet_size
    P0 = np.array([2.0 ** -i for i in range(size)])
    P0[0] = 0.25 + perturbation + corr
    P0[1] = 0.25 - perturbation + corr
    P1 = P0.copy()
    P1[[0, 1]] = P0[[1, 0]]
    return P0, P1


def lecam_pair(
    n: int,
    alphabet_size: Optional[int],
    regime: str = "root_n",
    K: int = 1,
    delta_n: Optional[float] = None,
) -> LeCamPair:
    """The two product hypotheses of the lower-bound argument at sample size n."""
    if n < 2:
        raise ValidationError("n must be >= 2")
    if regime == "root_n":
        h = 1.0 / (8.0 * math.sqrt(n))
    elif regime == "margin":
        if delta_n is None or not 0.0 < delta_n < 2.0:
            raise ValidationError("margin regime needs delta_n in (0, 2)")
        h = delta_n / 8.0
    else:
        raise ValidationError(f"unknown regime {regime!r}")
    P0, P1 = lecam_masses(alphabet_size, h)
    if np.any(P0 <= 0) or np.any(P0 >= 1) or abs(P0.sum() - 1.0) > 1e-12:
        raise ValidationError("perturbed masses are not a valid probability vector")
    chi2 = float(np.sum((P0 - P1) ** 2 / P1))
    limit = 1.0 / n if regime == "root_n" else delta_n ** 2
    if chi2 > limit:
        raise ValidationError(f"chi-square step {chi2} exceeds {limit}")
    value = minimax_lower_bound(n, K, None if regime == "root_n" else delta_n)
    return LeCamPair(P0, P1, h, 0, 1, chi2, n * chi2, value, n, regime)


def _perturbed_symbols(P0, P1):
    diff = np.flatnonzero(P0 != P1)
    if diff.size == 0:
        return None
    if diff.size != 2 or P0[diff[0]] != P1[diff[1]] or P0[diff[1]] != P1[diff[0]]:
        raise ValidationError("hypotheses must differ by swapping two masses")
    i, j = diff
    return (i, j) if P0[i] > P0[j] else (j, i)


def bayes_error_oracle(pair: LeCamPair, n: Optional[int] = None) -> float:
    """Average error of the likelihood-ratio test between P0^n and P1^n.

    With P0(a0) = p > q = P0(a1) and the masses swapped under P1, the test
    answers P0 iff N(a0) >= N(a1). Given M = N(a0) + N(a1) ~ Bin(n, p + q),
    N(a0) is binomial, so the error is a finite sum of binomial terms.
    """
    n = pair.n if n is None else n
    if n is None or n < 1:
        raise ValidationError("n must be >= 1")
    if n > MAX_ORACLE_N:
        raise ValidationError(f"n={n} too large for exact binomial summation")
    P0, P1 = np.asarray(pair.P0), np.asarray(pair.P1)
    sym = _perturbed_symbols(P0, P1)
    if sym is None:
        return 0.5
    i, j = sym
    p, q = P0[i], P0[j]
    m = np.arange(n + 1)
    w = binom.pmf(m, n, p + q)
    cut = np.ceil(m / 2.0) - 1  # N(a0) <= cut  <=>  N(a0) < N(a1)
    err0 = binom.cdf(cut, m, p / (p + q))
    err1 = binom.sf(cut, m, q / (p + q))
    return float(0.5 * (np.dot(w, err0) + np.dot(w, err1)))


def testing_report(pair: LeCamPair, n: Optional[int] = None) -> dict:
    """Optimal-test error against both readings of the KL-to-testing inequality.

    The optimal test has error sum 1 - TV, so 1 - TV = 2 * average error.
    ``printed``: 1 - TV >= exp(-KL). ``classical``: 1 - TV >= exp(-KL) / 2.
    """
    n = pair.n if n is None else n
    err = bayes_error_oracle(pair, n)
    kl_step, chi2_step = kl_chi2(pair.P0, pair.P1)
    kl = n * kl_step
    return {
        "n": n,
        "bayes_error": err,
        "one_minus_tv": 2.0 * err,
        "kl": kl,
        "kl_bound": n * chi2_step,
        "printed_rhs": math.exp(-kl),
        "printed_holds": 2.0 * err >= math.exp(-kl),
        "classical_rhs": 0.5 * math.exp(-kl),
        "classical_holds": 2.0 * err >= 0.5 * math.exp(-kl),
    }
