"""Seeded trajectory simulation.

Random numbers come from numpy's PCG64 generator. Replicate r of a run seeded
with ``seed`` uses the stream seeded by ``derive_seed(seed, r)`` (a SplitMix64
finalizer over ``seed + (r + 1) * golden_gamma``), so results do not depend
on how replicates are scheduled across workers.

Each step draws one uniform U and returns the smallest symbol id a with
U < CDF(a) under the kernel evaluated on the truncated past (inverse-CDF in id
order). Missing history at the start is filled with id 0; the burn-in prefix is
generated and discarded.
"""
from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import Sample, ValidationError
from .models import (
    BinaryARModel,
    HiddenMarkovModel,
    IIDModel,
    MarkovModel,
    PoissonRegModel,
    ProcessModel,
    as_markov,
    gamma,
    logistic2,
    poisson_truncation,
)

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
TAIL_TOL = 1e-10
LIFT_MAX_CONTEXTS = 1 << 16
VECTOR_MIN_REPLICATES = 32


def splitmix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, replicate: int) -> int:
    return splitmix64(int(seed) + (int(replicate) + 1) * GOLDEN_GAMMA)


def uniforms(seed: int, size: int) -> np.ndarray:
    return np.random.Generator(np.random.PCG64(seed)).random(size)


@dataclass(frozen=True)
class SimulationPlan:
    model: ProcessModel
    n: int
    seed: int
    burn_in: Optional[int] = None  # None: default_burn_in(model)
    memory_truncation: Optional[int] = None  # None: the model's full coefficient list

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError("n must be >= 1")
        if self.burn_in is not None and self.burn_in < 0:
            raise ValidationError("burn_in must be >= 0")
        if self.memory_truncation is not None and self.memory_truncation < 1:
            raise ValidationError("memory truncation must be >= 1")
        if not 0 <= int(self.seed) <= MASK64:
            raise ValidationError("seed must be a 64-bit unsigned integer")

    def resolved_burn_in(self) -> int:
        return default_burn_in(self.model) if self.burn_in is None else self.burn_in


def default_burn_in(model: ProcessModel, tol: float = 1e-6) -> int:
    """Smallest B with ((1-G)/G) * (1-G)**B <= tol, G the Gamma lower bound.

    The per-step rate 1-G is a geometric proxy for the coupling error; finite
    memory models get at least their order.
    """
    base = model.base if isinstance(model, HiddenMarkovModel) else model
    g = gamma(base).lower_bound
    if g <= 0.0:
        raise ValidationError("Gamma lower bound is 0: no burn-in guarantee available")
    if g >= 1.0:
        B = 0
    else:
        B = max(0, math.ceil(math.log(tol * g / (1.0 - g)) / math.log(1.0 - g)))
    order = base.memory
    return max(order, B) if order is not None else B


def truncate_model(model: ProcessModel, M: Optional[int]) -> ProcessModel:
    """Drop coefficients beyond lag M; refuses when the dropped tail exceeds 1e-10."""
    if M is None or not isinstance(model, (BinaryARModel, PoissonRegModel)):
        return model
    dropped = sum(abs(v) for v in model.xi[M:])
    if dropped > TAIL_TOL:
        raise ValidationError(f"coefficient tail beyond lag {M} is {dropped:.3g} > {TAIL_TOL}")
    if isinstance(model, BinaryARModel):
        return BinaryARModel(model.xi0, model.xi[:M])
    return PoissonRegModel(model.xi[:M], model.c)


def _cdf_table(P: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(P, axis=-1)
    cdf[..., -1] = 1.0
    return cdf


def _run_iid(m: IIDModel, U: np.ndarray) -> np.ndarray:
    cdf = _cdf_table(np.asarray(m.probs))
    return np.minimum(np.searchsorted(cdf, U, side="right"), m.alphabet_size - 1)


def _run_markov(m: MarkovModel, U: np.ndarray) -> np.ndarray:
    A, k = m.alphabet_size, m.order
    cdf = _cdf_table(np.asarray(m.transition))
    R, total = U.shape
    X = np.empty((R, total), dtype=np.int64)
    wrap = A ** k
    if R < VECTOR_MIN_REPLICATES:
        rows = cdf.tolist()
        for r in range(R):
            u_r = U[r].tolist()
            out = [0] * total
            ctx = 0
            for t in range(total):
                x = bisect_right(rows[ctx], u_r[t])
                if x >= A:
                    x = A - 1
                out[t] = x
                ctx = (ctx * A + x) % wrap
            X[r] = out
        return X
    ctx = np.zeros(R, dtype=np.int64)
    for t in range(total):
        x = np.minimum((cdf[ctx] <= U[:, t, None]).sum(axis=1), A - 1)
        X[:, t] = x
        ctx = (ctx * A + x) % wrap
    return X


def _run_binary_ar(m: BinaryARModel, U: np.ndarray) -> np.ndarray:
    M = len(m.xi)
    R, total = U.shape
    xi = np.asarray(m.xi[::-1])  # aligned with x_{-M}..x_{-1}
    spins = -np.ones((R, M + total))
    X = np.empty((R, total), dtype=np.int64)
    for t in range(total):
        s = m.xi0 + spins[:, t:t + M] @ xi
        x = (U[:, t] >= logistic2(-s)).astype(np.int64)
        X[:, t] = x
        spins[:, M + t] = 2.0 * x - 1.0
    return X


def _run_poisson(m: PoissonRegModel, U: np.ndarray) -> np.ndarray:
    M = len(m.xi)
    R, total = U.shape
    xi = np.asarray(m.xi[::-1])
    clipped = np.zeros((R, M + total))
    X = np.empty((R, total), dtype=np.int64)
    amax = poisson_truncation(1.0)
    for t in range(total):
        v = np.exp(clipped[:, t:t + M] @ xi) if M else np.ones(R)
        u = U[:, t]
        p = np.exp(-v)
        cdf = p.copy()
        x = np.zeros(R, dtype=np.int64)
        open_ = (cdf <= u) & (cdf < 1.0 - 1e-12)
        a = 0
        # accumulate until every draw is bracketed or its truncation point is reached
        while open_.any() and a < amax:
            a += 1
            x[open_] = a
            p = p * v / a
            cdf = cdf + p
            open_ &= (cdf <= u) & (cdf < 1.0 - 1e-12)
        X[:, t] = x
        clipped[:, M + t] = np.minimum(x, m.c)
    return X


def _run(model: ProcessModel, U: np.ndarray) -> np.ndarray:
    if isinstance(model, IIDModel):
        return _run_iid(model, U)
    if isinstance(model, HiddenMarkovModel):
        return np.asarray(model.projection)[_run_markov(model.base, U)]
    if isinstance(model, PoissonRegModel):
        return _run_poisson(model, U)
    if isinstance(model, BinaryARModel) and 2 ** len(model.xi) > LIFT_MAX_CONTEXTS:
        return _run_binary_ar(model, U)
    m = as_markov(model)
    if m is None:
        raise ValidationError(f"cannot simulate family {model.family!r}")
    return _run_markov(m, U)


def simulate_batch(
    model: ProcessModel,
    n: int,
    seeds: Sequence[int],
    burn_in: int,
    memory_truncation: Optional[int] = None,
) -> np.ndarray:
    """Trajectories for several explicit seeds, shape (len(seeds), n).

    Row r equals ``simulate(SimulationPlan(model, n, seeds[r], burn_in, M)).symbols``.
    """
    model = truncate_model(model, memory_truncation)
    total = burn_in + n
    U = np.empty((len(seeds), total))
    for r, s in enumerate(seeds):
        U[r] = uniforms(s, total)
    return _run(model, U)[:, burn_in:]


def simulate(plan: SimulationPlan) -> Sample:
    X = simulate_batch(
        plan.model, plan.n, [plan.seed], plan.resolved_burn_in(), plan.memory_truncation
    )
    return Sample(X[0], alphabet_size=plan.model.alphabet_size)


def replicate_seeds(seed: int, start: int, stop: int) -> list[int]:
    return [derive_seed(seed, r) for r in range(start, stop)]
