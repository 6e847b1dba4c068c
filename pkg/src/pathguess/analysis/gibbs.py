"""Variation and Gamma bounds for one-sided Gibbs specifications.

Potentials enter only through their oscillations D(m): the total oscillation
of the interaction shapes whose minimum is 0 and maximum is m. The variation
bound reads

    Var_k <= (A/2) sum_{i>=k} S(c(i)),   S(m) = sum_{m'>=m} D(m'),

with c(i) = ceil(i/2) the smallest admissible maximum, and Var_0 <= 1 - h0.
Infinite series are split into explicit terms up to a horizon and an integral
majorant beyond it; the majorant needs a power-law envelope D(m) <= C m^-alpha.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

import numpy as np
from scipy.special import zeta

from ..core import ComputationError, ValidationError

DEFAULT_HORIZON = 4096


class DivergentSeriesError(ComputationError):
    """The supplied tail rule does not make the Gamma series summable."""


@dataclass(frozen=True)
class PowerTail:
    """Envelope D(m) <= C * m**-alpha for every m beyond the explicit terms."""

    C: float
    alpha: float

    def __post_init__(self):
        if not self.C >= 0:
            raise ValidationError("tail constant must be >= 0")


def _ptail(s: float, m: int) -> float:
    """Upper bound on sum_{j>=m} j**-s for s > 1 and m >= 1."""
    return m ** -s + m ** (1.0 - s) / (s - 1.0)


@dataclass(frozen=True)
class GibbsGammaReport:
    var_bounds: tuple  # bound used for Var_k, k = 0..k_max
    series_bounds: tuple  # raw (A/2) sum_{i>=k} S(c(i)), k = 0..k_max
    n_star: int
    lower_bound: float
    printed_product: float
    h0: float
    tail_sum: float
    horizon: int

    def to_dict(self):
        return {
            "var_bounds": list(self.var_bounds),
            "series_bounds": list(self.series_bounds),
            "n_star": self.n_star,
            "lower_bound": self.lower_bound,
            "printed_product": self.printed_product,
            "h0": self.h0,
            "tail_sum": self.tail_sum,
            "horizon": self.horizon,
        }


Oscillations = Union[Mapping[int, float], Sequence[tuple]]


def _aggregate(oscillations: Oscillations) -> tuple[dict, float]:
    """Oscillation per span m and the total over shapes containing the origin.

    A mapping {m: D} is read as pair interactions {0, m} (m = 0 is a
    single-site term). A sequence of (shape, D) pairs lists general shapes.
    """
    by_span: dict = {}
    through_origin = 0.0
    if isinstance(oscillations, Mapping):
        items = [((0,) if m == 0 else (0, int(m)), float(v)) for m, v in oscillations.items()]
    else:
        items = [(tuple(sorted(set(int(s) for s in shape))), float(v)) for shape, v in oscillations]
    for shape, v in items:
        if not shape:
            raise ValidationError("empty interaction shape")
        if not v >= 0 or not math.isfinite(v):
            raise ValidationError("oscillations must be finite and >= 0")
        span = shape[-1] - shape[0]
        by_span[span] = by_span.get(span, 0.0) + v
        through_origin += len(shape) * v  # translates of the shape covering 0
    return by_span, through_origin


def gibbs_gamma(
    oscillations: Oscillations,
    A: int,
    k_max: int = 16,
    tail: Optional[PowerTail] = None,
    horizon: Optional[int] = None,
) -> GibbsGammaReport:
    """Variation bounds, n_star and a lower bound on Gamma.

    ``tail=None`` means the listed oscillations are all there is (finite range).
    The returned ``lower_bound`` multiplies 1 - min(series bound, 1 - h0) over
    every k, so the indices before n_star contribute through h0.
    ``printed_product`` is the product over k >= n_star only.
    """
    if A < 2:
        raise ValidationError("alphabet size must be >= 2")
    if k_max < 0:
        raise ValidationError("k_max must be >= 0")
    by_span, through_origin = _aggregate(oscillations)
    top = max(by_span) if by_span else 0
    Mx = max(top, k_max, DEFAULT_HORIZON if horizon is None else horizon, 1)
    if tail is not None and tail.C > 0:
        if tail.alpha <= 3.0:
            raise DivergentSeriesError(
                f"assumption not verifiable: the Gamma series diverges for alpha={tail.alpha} <= 3"
            )
        C, a = tail.C, tail.alpha
        M1 = Mx + 1
        tail_D = C * _ptail(a, M1)
        tail_S2 = 2.0 * C * (_ptail(a, M1) + _ptail(a - 1.0, M1) / (a - 1.0))
        tail_gamma = 2.0 * A * C * (_ptail(a - 1.0, M1) + _ptail(a - 2.0, M1) / (a - 1.0))
    else:
        tail_D = tail_S2 = tail_gamma = 0.0

    d = np.zeros(Mx + 1)
    for m, v in by_span.items():
        d[m] += v
    S = np.cumsum(d[::-1])[::-1] + tail_D  # S[m] for m = 0..Mx
    J = 2 * Mx
    i = np.arange(J + 1)
    c = (i + 1) // 2
    terms = S[c]
    V = 0.5 * A * (np.cumsum(terms[::-1])[::-1] + tail_S2)  # V[k] for k = 0..J

    h0 = 1.0 / (1.0 + (A - 1) * math.exp(through_origin + 2.0 * tail_D))
    below = np.flatnonzero(V < 1.0)
    if below.size == 0:
        raise ComputationError(f"series bound stays >= 1 up to k={J}; n_star not found")
    n_star = int(below[0])
    if tail_gamma >= 1.0:
        raise ComputationError("tail majorant >= 1; increase the horizon")

    used = np.minimum(V, 1.0 - h0)
    used[0] = 1.0 - h0
    correction = math.log1p(-tail_gamma) if tail_gamma > 0 else 0.0
    lower = math.exp(float(np.sum(np.log1p(-used))) + correction)
    printed = math.exp(float(np.sum(np.log1p(-V[n_star:]))) + correction)
    return GibbsGammaReport(
        var_bounds=tuple(float(v) for v in used[: k_max + 1]),
        series_bounds=tuple(float(v) for v in V[: k_max + 1]),
        n_star=n_star,
        lower_bound=lower,
        printed_product=printed,
        h0=h0,
        tail_sum=tail_gamma,
        horizon=Mx,
    )


def ising_oscillations(alpha: float, upto: int = DEFAULT_HORIZON) -> dict:
    """D({0, l}) = 2 l**-alpha for the long-range Ising pair potential on {-1, +1}."""
    if not alpha > 1:
        raise ValidationError("alpha must be > 1")
    return {m: 2.0 * m ** -alpha for m in range(1, upto + 1)}


def ising_gamma(alpha: float, A: int = 2, k_max: int = 16, horizon: int = DEFAULT_HORIZON) -> GibbsGammaReport:
    if not alpha > 1:
        raise ValidationError("alpha must be > 1")
    if alpha <= 3.0:
        raise DivergentSeriesError(
            f"assumption not verifiable: the Gamma series diverges for alpha={alpha} <= 3"
        )
    return gibbs_gamma(ising_oscillations(alpha, horizon), A, k_max, PowerTail(2.0, alpha), horizon)


def ising_h0(alpha: float, beta: float = 1.0) -> float:
    """Closed form 1 / (1 + exp(4 beta zeta(alpha))) for the single-site infimum."""
    if not alpha > 1:
        raise ValidationError("alpha must be > 1")
    return 1.0 / (1.0 + math.exp(4.0 * beta * float(zeta(alpha))))
