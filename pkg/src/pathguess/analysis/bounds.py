"""Finite-sample bounds: sample size, concentration, rate regimes."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from ..core import IndexPair, Sample, ValidationError
from ..models import ExactLaw, ProcessModel, exact_finite_law, gamma, pbar
from .risk import beta_gap, margin_delta


def beta_upper_bound(pbar_value: float, K: int) -> float:
    if not 0.0 < pbar_value < 1.0:
        raise ValidationError("pbar must lie in (0, 1)")
    if K < 1:
        raise ValidationError("K must be >= 1")
    return pbar_value ** K


def sample_size_bound(
    epsilon: float, delta: float, beta: float, gamma_: float, K: int, L: int
) -> int:
    """Training length after which the excess risk is at most epsilon ^ beta.

    Returns L - 1 when epsilon >= beta, where the bound holds for any n.
    """
    if not epsilon > 0:
        raise ValidationError("epsilon must be > 0")
    if not 0.0 < gamma_ <= 1.0:
        raise ValidationError("Gamma must lie in (0, 1]")
    if K < 1 or L < K:
        raise ValidationError("need K >= 1 and L >= K")
    if epsilon >= beta:
        return L - 1
    scale = 4.0 / max(epsilon / 2.0, delta) ** 2
    inner = (K / gamma_) ** 2 * math.log(2.0 * beta / epsilon) + 4.0 * K * (1.0 - gamma_) / gamma_ + 2.0
    return math.ceil(scale * inner + L - 2)


@dataclass(frozen=True)
class DKWBound:
    threshold: float
    tail: float


def dkw_bound(u: float, n: int, k: int, S_size: int, gamma_: float) -> DKWBound:
    """Threshold u + sqrt((2|S|(1-G)+G) / (G(n-k+2))) and its tail exp(-2(n-k+2)G^2u^2/|S|^2)."""
    if not u > 0:
        raise ValidationError("u must be > 0")
    if not 0.0 < gamma_ <= 1.0:
        raise ValidationError("Gamma must lie in (0, 1]")
    if not n >= k >= 0:
        raise ValidationError("need n >= k >= 0")
    m = n - k + 2
    threshold = u + math.sqrt((2.0 * S_size * (1.0 - gamma_) + gamma_) / (gamma_ * m))
    tail = math.exp(-2.0 * m * gamma_ ** 2 * u ** 2 / S_size ** 2)
    return DKWBound(threshold, tail)


def empirical_sup_deviation(sample: Sample, S, law: ExactLaw) -> float:
    """sup_sigma |N_S(sigma)/(n-k+2) - P(X_S = sigma)| with k = max S - min S.

    Counts run over shifts keeping S inside the sample; sigma ranges over
    observed patterns and the law's support.
    """
    S = sorted(set(int(s) for s in S))
    k = S[-1] - S[0]
    n = sample.n
    if n < k + 1:
        raise ValidationError("sample shorter than the pattern span")
    _check_law_shape(S, law)
    if sample.symbols.max() >= law.alphabet_size:
        raise ValidationError("sample contains symbols outside the law's alphabet")
    return float(empirical_sup_deviation_batch(sample.symbols[None, :], S, law)[0])


def _check_law_shape(S, law):
    rel = [s - S[0] for s in S]
    lrel = [s - law.support[0] for s in law.support]
    if rel != lrel:
        raise ValidationError(f"law on {law.support} is not a law of X_S for S={S}")


def empirical_sup_deviation_batch(X: np.ndarray, S, law: ExactLaw) -> np.ndarray:
    """Row-wise version of empirical_sup_deviation on a (replicates, n) array."""
    S = sorted(set(int(s) for s in S))
    _check_law_shape(S, law)
    k = S[-1] - S[0]
    R, n = X.shape
    A = law.alphabet_size
    W = n - k
    codes = np.zeros((R, W), dtype=np.int64)
    for s in S:
        codes = codes * A + X[:, s - S[0]:s - S[0] + W]
    nc = A ** len(S)
    flat = (np.arange(R)[:, None] * nc + codes).ravel()
    freq = np.bincount(flat, minlength=R * nc).reshape(R, nc) / (n - k + 2)
    return np.abs(freq - law.probs.ravel()[None, :]).max(axis=1)


def regime_of(delta_n: float, n: int) -> str:
    """Finite-n proxy: compare delta_n * sqrt(n / log n) with 1."""
    if n < 2:
        raise ValidationError("n must be >= 2")
    ratio = delta_n * math.sqrt(n / math.log(n))
    return "subcritical" if ratio < 1.0 else "supercritical"


def subcritical_bound(n: int, beta: float) -> float:
    return min(0.5 * math.sqrt(math.log(n) / n), beta)


def supercritical_bound(n: int, delta_n: float, gamma_: float, K: int, beta: float) -> float:
    return min(math.exp(-(gamma_ ** 2) * n * delta_n ** 2 / (8.0 * K ** 2)), beta)


def rate_regime_bound(delta_n: float, n: int, gamma_: float, K: int, beta: float) -> tuple[str, float]:
    regime = regime_of(delta_n, n)
    if regime == "subcritical":
        return regime, subcritical_bound(n, beta)
    return regime, supercritical_bound(n, delta_n, gamma_, K, beta)


def minimax_lower_bound(n: int, K: int, delta_n: Optional[float] = None) -> float:
    """Two-point floor: e^-1 n^-1/2 4^-K, or delta_n e^(-n delta_n^2) 4^-K when a margin is given."""
    if delta_n is None:
        return math.exp(-1.0) / math.sqrt(n) * 0.25 ** K
    return delta_n * math.exp(-n * delta_n ** 2) * 0.25 ** K


@dataclass(frozen=True)
class BoundReport:
    gamma: float
    delta: float
    beta: float
    epsilon: float
    required_n: int
    regime: str
    dkw_threshold: float
    dkw_tail: float
    lower_bound: float
    pbar: Optional[float] = None
    beta_upper: Optional[float] = None
    rate_bound: Optional[float] = None
    n: Optional[int] = None

    def to_dict(self):
        return asdict(self)


def dkw_u_for(epsilon: float, beta: float, gamma_: float, K: int, L: int, n: int) -> float:
    """Deviation level solving tail = epsilon / (2 beta) at sample size n."""
    if beta <= 0 or epsilon >= 2 * beta:
        return 0.0
    return (K / gamma_) * math.sqrt(math.log(2.0 * beta / epsilon) / (2.0 * (n - L + 2)))


def bound_report(
    model: ProcessModel,
    pair: IndexPair,
    epsilon: float,
    n: Optional[int] = None,
    law: Optional[ExactLaw] = None,
) -> BoundReport:
    """All finite-sample quantities for one model and index pair.

    With ``n`` given, the regime is classified at that n and the rate bound is
    attached; otherwise the regime is ``fixed`` and quantities refer to required_n.
    """
    law = exact_finite_law(model, pair.support) if law is None else law
    g = gamma(model).lower_bound
    if g <= 0:
        raise ValidationError("Gamma lower bound is 0; the sample-size bound does not apply")
    delta = margin_delta(law, pair).delta
    beta = beta_gap(law, pair)
    K, L = pair.K, pair.L
    req = sample_size_bound(epsilon, delta, beta, g, K, L)
    at = max(req, L) if n is None else n
    u = dkw_u_for(epsilon, beta, g, K, L, at)
    m = at - L + 2
    thr = u + math.sqrt((2.0 * K * (1.0 - g) + g) / (g * m))
    tail = min(1.0, math.exp(-2.0 * m * g ** 2 * u ** 2 / K ** 2))
    p = pbar(model)
    if n is None:
        regime, rate = "fixed", None
    else:
        regime, rate = rate_regime_bound(delta, n, g, K, beta)
    lower_n = at if at >= 2 else 2
    lower = minimax_lower_bound(lower_n, K, None if regime != "supercritical" else delta)
    return BoundReport(
        gamma=g,
        delta=delta,
        beta=beta,
        epsilon=epsilon,
        required_n=req,
        regime=regime,
        dkw_threshold=thr,
        dkw_tail=tail,
        lower_bound=lower,
        pbar=p,
        beta_upper=beta_upper_bound(p, K) if p is not None and 0 < p < 1 else None,
        rate_bound=rate,
        n=n,
    )
