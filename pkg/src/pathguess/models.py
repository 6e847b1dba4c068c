"""Process model catalog.

Every model exposes its left conditional kernel ``p(. | past)``. Finite-alphabet
models with finite memory also give exact stationary finite-dimensional laws,
and each family carries its analytic sup-kernel value and variation bounds.

Symbol ids are dense non-negative integers. The binary autoregressive family
uses ids {0, 1} for spins {-1, +1}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import ClassVar, Optional, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .core import ComputationError, Pattern, ValidationError

PROB_TOL = 1e-12
POISSON_TAIL = 1e-12
DEFAULT_BUDGET = 10**7
STATIONARY_TOL = 1e-13
STATIONARY_MAX_ITER = 10**6


def logistic2(u):
    """Link 1 / (1 + exp(-2u)); satisfies f(u) + f(-u) = 1."""
    return 0.5 * (1.0 + np.tanh(u))


def _check_prob_vector(p, what):
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size < 1:
        raise ValidationError(f"{what}: expected a non-empty probability vector")
    if np.any(p < 0) or abs(p.sum() - 1.0) > PROB_TOL:
        raise ValidationError(f"{what}: entries must be >= 0 and sum to 1 (sum={p.sum()!r})")
    return p


def _check_rows(T, what):
    T = np.asarray(T, dtype=float)
    if T.ndim != 2:
        raise ValidationError(f"{what}: expected a 2-d row-stochastic table")
    if np.any(T < 0) or np.max(np.abs(T.sum(axis=1) - 1.0)) > PROB_TOL:
        raise ValidationError(f"{what}: rows must be non-negative and sum to 1")
    return T


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


class ProcessModel:
    """Common surface of all model families."""

    family: ClassVar[str] = ""

    @property
    def alphabet_size(self) -> Optional[int]:
        raise NotImplementedError

    @property
    def memory(self) -> Optional[int]:
        """Length of the past the kernel looks at (None: not finite)."""
        raise NotImplementedError

    def kernel(self, past: Sequence[int]) -> np.ndarray:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def _check_past(self, past) -> np.ndarray:
        past = np.asarray(past, dtype=np.int64).ravel()
        if past.size and past.min() < 0:
            raise ValidationError("past contains negative symbol ids")
        A = self.alphabet_size
        if A is not None and past.size and past.max() >= A:
            raise ValidationError(f"past contains ids outside alphabet of size {A}")
        return past

    def _padded(self, past, k) -> np.ndarray:
        """Last k symbols, left-padded with id 0 when the past is shorter."""
        past = self._check_past(past)
        if past.size >= k:
            return past[past.size - k:]
        return np.concatenate([np.zeros(k - past.size, dtype=np.int64), past])


@dataclass(frozen=True, eq=False)
class IIDModel(ProcessModel):
    probs: np.ndarray
    family: ClassVar[str] = "iid"

    def __post_init__(self):
        object.__setattr__(self, "probs", _frozen(_check_prob_vector(self.probs, "iid probs")))

    @property
    def alphabet_size(self):
        return int(self.probs.size)

    @property
    def memory(self):
        return 0

    def kernel(self, past=()):
        self._check_past(past)
        return self.probs.copy()

    def to_dict(self):
        return {"family": self.family, "probs": self.probs.tolist()}


@dataclass(frozen=True, eq=False)
class MarkovModel(ProcessModel):
    """Order-k chain. ``transition`` has shape (A**k, A); row index is the
    context x_{-k}..x_{-1} read as a base-A number, oldest symbol first."""

    transition: np.ndarray
    order: int = 1
    family: ClassVar[str] = "markov"

    def __post_init__(self):
        if self.order < 1:
            raise ValidationError("Markov order must be >= 1")
        T = _check_rows(self.transition, "markov transition")
        A = T.shape[1]
        if T.shape[0] != A ** self.order:
            raise ValidationError(
                f"order-{self.order} transition over {A} symbols needs {A ** self.order} rows, got {T.shape[0]}"
            )
        object.__setattr__(self, "transition", _frozen(T))

    @property
    def alphabet_size(self):
        return int(self.transition.shape[1])

    @property
    def memory(self):
        return self.order

    def context_index(self, past) -> int:
        idx = 0
        for s in self._padded(past, self.order):
            idx = idx * self.alphabet_size + int(s)
        return idx

    def kernel(self, past=()):
        return self.transition[self.context_index(past)].copy()

    def to_dict(self):
        return {"family": self.family, "order": self.order, "transition": self.transition.tolist()}


@dataclass(frozen=True, eq=False)
class BinaryARModel(ProcessModel):
    """p(a | x) = logistic2(a * (xi0 + sum_j xi_j x_{-j})) on spins a in {-1, +1}.

    ``xi`` holds xi_1..xi_M; coefficients beyond M are zero.
    """

    xi0: float
    xi: tuple
    family: ClassVar[str] = "binary_ar"

    def __post_init__(self):
        xi = tuple(float(v) for v in self.xi)
        if not all(math.isfinite(v) for v in xi + (float(self.xi0),)):
            raise ValidationError("binary AR coefficients must be finite")
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "xi0", float(self.xi0))

    @property
    def alphabet_size(self):
        return 2

    @property
    def memory(self):
        return len(self.xi)

    def local_field(self, past) -> float:
        M = len(self.xi)
        if M == 0:
            return self.xi0
        spins = 2 * self._padded(past, M)[::-1] - 1  # x_{-1}, x_{-2}, ...
        return self.xi0 + float(np.dot(self.xi, spins))

    def kernel(self, past=()):
        s = self.local_field(past)
        return np.array([logistic2(-s), logistic2(s)])

    def as_markov(self) -> MarkovModel:
        M = len(self.xi)
        if M == 0:
            s = self.xi0
            return MarkovModel(np.tile([logistic2(-s), logistic2(s)], (2, 1)), order=1)
        ctx = np.array(list(np.ndindex(*(2,) * M)), dtype=np.int64)  # oldest first
        spins = 2 * ctx[:, ::-1] - 1
        s = self.xi0 + spins @ np.asarray(self.xi)
        return MarkovModel(np.stack([logistic2(-s), logistic2(s)], axis=1), order=M)

    def to_dict(self):
        return {"family": self.family, "xi0": self.xi0, "xi": list(self.xi)}


@dataclass(frozen=True, eq=False)
class PoissonRegModel(ProcessModel):
    """Count process: X_0 | past ~ Poisson(v), v = exp(sum_j xi_j min(x_{-j}, c)), xi_j <= 0."""

    xi: tuple
    c: float
    family: ClassVar[str] = "poisson_reg"

    def __post_init__(self):
        xi = tuple(float(v) for v in self.xi)
        if any(v > 0 or not math.isfinite(v) for v in xi):
            raise ValidationError("Poisson regression coefficients must be finite and <= 0")
        if not self.c > 0:
            raise ValidationError("clipping constant c must be > 0")
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "c", float(self.c))

    @property
    def alphabet_size(self):
        return None

    @property
    def memory(self):
        return len(self.xi)

    @property
    def v_min(self) -> float:
        return math.exp(self.c * sum(self.xi))

    def intensity(self, past) -> float:
        M = len(self.xi)
        if M == 0:
            return 1.0
        recent = self._padded(past, M)[::-1].astype(float)
        return math.exp(float(np.dot(self.xi, np.minimum(recent, self.c))))

    def kernel(self, past=()):
        """Poisson masses 0..T with T the first point where the CDF reaches 1 - 1e-12."""
        return poisson_masses(self.intensity(past))

    def to_dict(self):
        return {"family": self.family, "xi": list(self.xi), "c": self.c}


def poisson_truncation(v: float) -> int:
    p = math.exp(-v)
    cdf, a = p, 0
    while cdf < 1.0 - POISSON_TAIL:
        a += 1
        p *= v / a
        cdf += p
    return a


def poisson_masses(v: float, upto: Optional[int] = None) -> np.ndarray:
    T = poisson_truncation(v) if upto is None else upto
    out = np.empty(T + 1)
    p = math.exp(-v)
    for a in range(T + 1):
        if a:
            p *= v / a
        out[a] = p
    return out


@dataclass(frozen=True, eq=False)
class HiddenMarkovModel(ProcessModel):
    """Pointwise image f(X_i) of a finite Markov chain X."""

    base: MarkovModel
    projection: tuple
    family: ClassVar[str] = "hidden_markov"

    def __post_init__(self):
        f = tuple(int(v) for v in self.projection)
        if len(f) != self.base.alphabet_size:
            raise ValidationError("projection must map every base state")
        if min(f) < 0 or sorted(set(f)) != list(range(max(f) + 1)):
            raise ValidationError("projection image must be the dense id range 0..B-1")
        if max(f) + 1 >= self.base.alphabet_size:
            raise ValidationError("projection must merge states (|B| < |A|)")
        object.__setattr__(self, "projection", f)

    @property
    def alphabet_size(self):
        return max(self.projection) + 1

    @property
    def memory(self):
        return None

    @property
    def fiber_matrix(self) -> np.ndarray:
        M = np.zeros((self.base.alphabet_size, self.alphabet_size))
        M[np.arange(len(self.projection)), self.projection] = 1.0
        return M

    def kernel(self, past=()):
        """P(Y_0 = . | Y_{-m..-1} = past): forward filter from stationarity.

        The base chain must be first order for filtering; higher orders are lifted.
        """
        past = self._check_past(past)
        Q = lifted_first_order(self.base)
        A, k = self.base.alphabet_size, self.base.order
        last = np.arange(A ** k) % A
        emit = np.asarray(self.projection)[last]
        alpha = stationary_distribution(self.base).ravel()
        for y in past:
            alpha = alpha * (emit == y)
            tot = alpha.sum()
            if tot <= 0:
                raise ValidationError("past has probability zero under the model")
            alpha = (alpha / tot) @ Q
        return np.bincount(emit, weights=alpha, minlength=self.alphabet_size)

    def to_dict(self):
        return {"family": self.family, "base": self.base.to_dict(), "projection": list(self.projection)}


@dataclass(frozen=True, eq=False)
class MixtureModel(ProcessModel):
    """p(a|x) = lambda_0 p0(a) + sum_{j>=1} lambda_j p^[j](a | x_{-j..-1}).

    ``components[j-1]`` is the order-j kernel with shape (A**j, A). The order-0
    part (``order0_weight``, ``order0_probs``) is optional.
    """

    weights: tuple
    components: tuple
    order0_weight: float = 0.0
    order0_probs: Optional[np.ndarray] = None
    family: ClassVar[str] = "mixture"

    def __post_init__(self):
        w = tuple(float(v) for v in self.weights)
        if len(w) != len(self.components) or not w:
            raise ValidationError("need one order-j kernel per weight lambda_j, j >= 1")
        lam0 = float(self.order0_weight)
        if min(w + (lam0,)) < 0 or abs(sum(w) + lam0 - 1.0) > PROB_TOL:
            raise ValidationError("mixture weights must be >= 0 and sum to 1")
        comps = []
        A = None
        for j, comp in enumerate(self.components, start=1):
            T = _check_rows(comp, f"mixture component {j}")
            A = T.shape[1] if A is None else A
            if T.shape != (A ** j, A):
                raise ValidationError(f"component {j} must have shape ({A ** j}, {A})")
            comps.append(_frozen(T))
        p0 = self.order0_probs
        if lam0 > 0 or p0 is not None:
            if p0 is None:
                raise ValidationError("order-0 weight given without order-0 probabilities")
            p0 = _frozen(_check_prob_vector(p0, "order-0 probs"))
            if p0.size != A:
                raise ValidationError("order-0 probabilities have the wrong alphabet size")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "components", tuple(comps))
        object.__setattr__(self, "order0_weight", lam0)
        object.__setattr__(self, "order0_probs", p0)

    @property
    def alphabet_size(self):
        return int(self.components[0].shape[1])

    @property
    def memory(self):
        return len(self.components)

    def kernel(self, past=()):
        A = self.alphabet_size
        recent = self._padded(past, len(self.components))
        out = np.zeros(A)
        if self.order0_probs is not None:
            out += self.order0_weight * self.order0_probs
        for j, (lam, T) in enumerate(zip(self.weights, self.components), start=1):
            idx = 0
            for s in recent[len(recent) - j:]:
                idx = idx * A + int(s)
            out += lam * T[idx]
        return out

    def as_markov(self) -> MarkovModel:
        A, m = self.alphabet_size, len(self.components)
        lifted = np.zeros((A,) * m + (A,))
        if self.order0_probs is not None:
            lifted += self.order0_weight * self.order0_probs
        for j, (lam, T) in enumerate(zip(self.weights, self.components), start=1):
            lifted += lam * T.reshape((A,) * (j + 1))  # broadcasts over the older m-j positions
        return MarkovModel(lifted.reshape(A ** m, A), order=m)

    def to_dict(self):
        d = {
            "family": self.family,
            "weights": list(self.weights),
            "components": [c.tolist() for c in self.components],
        }
        if self.order0_probs is not None:
            d["order0_weight"] = self.order0_weight
            d["order0_probs"] = self.order0_probs.tolist()
        return d


# ---------------------------------------------------------------------------
# kernels and finite-memory lifting


def kernel_next_distribution(model: ProcessModel, past: Sequence[int] = ()) -> np.ndarray:
    """Next-symbol law given a finite past (most recent last).

    Finite alphabets: a length-A vector summing to 1. Poisson regression: masses
    at 0..T where T is the truncation point of cumulative mass 1 - 1e-12.
    """
    return model.kernel(past)


def as_markov(model: ProcessModel) -> Optional[MarkovModel]:
    """Finite-memory, finite-alphabet models as an order-k chain (None otherwise)."""
    if isinstance(model, MarkovModel):
        return model
    if isinstance(model, (BinaryARModel, MixtureModel)):
        return model.as_markov()
    return None


def lifted_first_order(m: MarkovModel) -> np.ndarray:
    """Dense first-order transition on contexts (A**k states)."""
    A, k = m.alphabet_size, m.order
    if k == 1:
        return np.asarray(m.transition)
    S = A ** k
    Q = np.zeros((S, S))
    rows = np.repeat(np.arange(S), A)
    cols = (rows % (A ** (k - 1))) * A + np.tile(np.arange(A), S)
    Q[rows, cols] = m.transition.ravel()
    return Q


def _check_unique_recurrent_class(m: MarkovModel):
    A, k = m.alphabet_size, m.order
    S = A ** k
    rows = np.repeat(np.arange(S), A)
    cols = (rows % (A ** (k - 1))) * A + np.tile(np.arange(A), S)
    mask = m.transition.ravel() > 0
    g = csr_matrix((np.ones(mask.sum()), (rows[mask], cols[mask])), shape=(S, S))
    ncomp, labels = connected_components(g, directed=True, connection="strong")
    if ncomp == 1:
        return
    leaves = np.ones(ncomp, dtype=bool)
    leaving = labels[rows[mask]] != labels[cols[mask]]
    leaves[np.unique(labels[rows[mask]][leaving])] = False
    if leaves.sum() > 1:
        raise ComputationError("chain has several closed classes: no unique stationary law")


def stationary_distribution(m: MarkovModel) -> np.ndarray:
    """Stationary law of the context chain, shape (A,)*k.

    Power iteration from the uniform vector. It stops once the sup-norm step is
    below 1e-13 and the remaining error, extrapolated geometrically from the
    observed contraction of successive steps, is below 1e-13 as well (or the
    steps have hit rounding noise). Reducible chains raise ValidationError.
    """
    _check_unique_recurrent_class(m)
    A, k = m.alphabet_size, m.order
    T = np.asarray(m.transition)
    pi = np.full(A ** k, 1.0 / A ** k)
    prev, best, stalled = None, np.inf, 0
    for _ in range(STATIONARY_MAX_ITER):
        new = (pi[:, None] * T).reshape(A, -1).sum(axis=0)
        new /= new.sum()
        step = float(np.max(np.abs(new - pi)))
        pi = new
        if step == 0.0:
            break
        if step <= STATIONARY_TOL:
            rho = min(step / prev, 1.0 - 1e-9) if prev else 1.0 - 1e-9
            if step * rho / (1.0 - rho) <= STATIONARY_TOL:
                break
            stalled = stalled + 1 if step >= best else 0
            if stalled >= 50:  # rounding noise floor
                break
        best = min(best, step)
        prev = step
    else:
        raise ComputationError("power iteration did not converge (periodic or slowly mixing chain)")
    return pi.reshape((A,) * k)


# ---------------------------------------------------------------------------
# exact finite-dimensional laws


@dataclass(frozen=True, eq=False)
class ExactLaw:
    """Joint law of X_F; ``probs`` has one axis per element of ``support`` (sorted)."""

    support: tuple
    probs: np.ndarray
    alphabet_size: int = field(init=False)

    def __post_init__(self):
        support = tuple(int(s) for s in self.support)
        if tuple(sorted(set(support))) != support:
            raise ValidationError("law support must be sorted without repeats")
        probs = np.asarray(self.probs, dtype=float)
        if probs.ndim != len(support):
            raise ValidationError("one probability axis per support position")
        if np.any(probs < -1e-15) or abs(probs.sum() - 1.0) > 1e-10:
            raise ValidationError("law must be non-negative and sum to 1")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "probs", _frozen(np.clip(probs, 0.0, None)))
        object.__setattr__(self, "alphabet_size", int(probs.shape[0]) if probs.ndim else 1)

    def prob(self, pattern: Pattern) -> float:
        return float(self.probs[tuple(pattern)])

    def as_dict(self) -> dict:
        return {idx: float(p) for idx, p in np.ndenumerate(self.probs)}

    def marginal(self, sub: Sequence[int]) -> "ExactLaw":
        sub = tuple(sorted(set(int(s) for s in sub)))
        missing = set(sub) - set(self.support)
        if missing:
            raise ValidationError(f"positions {sorted(missing)} not in the law's support")
        drop = tuple(i for i, s in enumerate(self.support) if s not in sub)
        return ExactLaw(sub, self.probs.sum(axis=drop) if drop else self.probs)

    def shifted(self, offset: int) -> "ExactLaw":
        return ExactLaw(tuple(s + offset for s in self.support), self.probs)


def _shifted_support(F):
    F = sorted({int(f) for f in F})
    if not F:
        raise ValidationError("support F must be non-empty")
    return F, [f - F[0] + 1 for f in F]


def _markov_law(m: MarkovModel, F_rel, budget) -> np.ndarray:
    A, k = m.alphabet_size, m.order
    span = F_rel[-1]
    keep = set(F_rel)
    if A ** k > budget:
        raise ComputationError(f"context space {A}^{k} exceeds the enumeration budget {budget}")
    pi = stationary_distribution(m)
    T = np.asarray(m.transition).reshape((A,) * (k + 1))
    J = pi
    axes = list(range(1, k + 1))  # positions carried by J's axes
    for t in range(k + 1, span + 1):
        if A ** (J.ndim + 1) > budget:
            raise ComputationError("exact law exceeds the enumeration budget")
        J = J[..., None] * T.reshape((1,) * (J.ndim - k) + T.shape)
        axes.append(t)
        old = t - k
        if old not in keep:
            i = axes.index(old)
            J = J.sum(axis=i)
            axes.pop(i)
    drop = tuple(i for i, pos in enumerate(axes) if pos not in keep)
    if drop:
        J = J.sum(axis=drop)
    return J


def exact_finite_law(model: ProcessModel, F: Sequence[int], budget: int = DEFAULT_BUDGET) -> ExactLaw:
    """Exact stationary joint law of X_F, with F given in any integer coordinates."""
    F, F_rel = _shifted_support(F)
    A = model.alphabet_size
    if A is None:
        raise ValidationError("exact laws need a finite alphabet")
    if isinstance(model, IIDModel):
        if A ** len(F) > budget:
            raise ComputationError("exact law exceeds the enumeration budget")
        J = np.ones(())
        for _ in F:
            J = np.multiply.outer(J, model.probs)
        return ExactLaw(tuple(F), J)
    if isinstance(model, HiddenMarkovModel):
        base = _markov_law(model.base, F_rel, budget)
        M = model.fiber_matrix
        for ax in range(base.ndim):
            base = np.moveaxis(np.tensordot(base, M, axes=([ax], [0])), -1, ax)
        return ExactLaw(tuple(F), base)
    m = as_markov(model)
    if m is None:
        raise ValidationError(f"no exact law for family {model.family!r}")
    return ExactLaw(tuple(F), _markov_law(m, F_rel, budget))


# ---------------------------------------------------------------------------
# analytic per-family quantities


def pbar(model: ProcessModel) -> Optional[float]:
    """sup over pasts and symbols of p(a | past); None when not available."""
    if isinstance(model, IIDModel):
        return float(model.probs.max())
    if isinstance(model, MarkovModel):
        return float(model.transition.max())
    if isinstance(model, MixtureModel):
        return float(model.as_markov().transition.max())
    if isinstance(model, BinaryARModel):
        return float(logistic2(abs(model.xi0) + sum(abs(v) for v in model.xi)))
    if isinstance(model, PoissonRegModel):
        lo = model.v_min
        best = 0.0
        # masses decrease in a past the mode; a <= 1 bounds the mode for v <= 1
        for a in range(0, 3):
            for v in (lo, 1.0, min(max(float(a), lo), 1.0)):
                best = max(best, math.exp(-v) * v ** a / math.factorial(a))
        return best
    return None


@dataclass(frozen=True)
class VariationBound:
    """Upper bounds on Var_0..Var_{j_max} plus a bound on sum_{j > j_max} Var_j."""

    values: np.ndarray
    tail_sum: float
    exact: bool = False


def _tail_sums(coeffs: np.ndarray) -> np.ndarray:
    """s[j] = sum_{k > j} |coeffs_k| for j = 0..M, coeffs indexed from k = 1."""
    c = np.abs(np.asarray(coeffs, dtype=float))
    out = np.zeros(c.size + 1)
    out[:-1] = np.cumsum(c[::-1])[::-1]
    return out


def _markov_variation(m: MarkovModel) -> np.ndarray:
    """Exact Var_j, j < k: worst TV between rows whose contexts share the last j symbols."""
    A, k = m.alphabet_size, m.order
    T = np.asarray(m.transition)
    out = np.zeros(k)
    for j in range(k):
        groups = T.reshape(A ** (k - j), A ** j, A)
        worst = 0.0
        for s in range(A ** j):
            rows = groups[:, s, :]
            tv = 0.5 * np.abs(rows[:, None, :] - rows[None, :, :]).sum(axis=-1)
            worst = max(worst, float(tv.max()))
        out[j] = worst
    return out


def variation_sequence(model: ProcessModel, j_max: int) -> VariationBound:
    if j_max < 0:
        raise ValidationError("j_max must be >= 0")
    size = j_max + 1
    if isinstance(model, IIDModel):
        return VariationBound(np.zeros(size), 0.0, exact=True)
    if isinstance(model, MarkovModel):
        var = np.zeros(max(size, model.order))
        var[: model.order] = _markov_variation(model)
        return VariationBound(var[:size], float(var[size:].sum()), exact=True)
    if isinstance(model, (BinaryARModel, PoissonRegModel, MixtureModel)):
        if isinstance(model, BinaryARModel):
            s = _tail_sums(model.xi)
        elif isinstance(model, PoissonRegModel):
            s = 0.5 * model.c * _tail_sums(model.xi)
        else:
            s = _tail_sums(model.weights)
        full = np.zeros(max(size, s.size))
        full[: s.size] = s
        return VariationBound(full[:size], float(full[size:].sum()))
    raise ValidationError(f"no analytic variation bound for family {model.family!r}")


@dataclass(frozen=True)
class GammaBound:
    """Lower bound on prod_j (1 - Var_j)."""

    truncated_product: float
    lower_bound: float
    violated: bool
    variation: VariationBound
    reason: str = ""

    def to_dict(self):
        return {
            "truncated_product": self.truncated_product,
            "lower_bound": self.lower_bound,
            "violated": self.violated,
            "reason": self.reason,
            "variation": self.variation.values.tolist(),
            "variation_tail_sum": self.variation.tail_sum,
        }


def gamma_from_variation(var: VariationBound) -> GammaBound:
    v = np.asarray(var.values, dtype=float)
    if v[0] >= 1.0:
        return GammaBound(0.0, 0.0, True, var, "Var_0 >= 1: assumption violated")
    prod = float(np.prod(np.clip(1.0 - v, 0.0, None)))
    lower = prod * max(0.0, 1.0 - var.tail_sum)
    if lower <= 0.0:
        return GammaBound(prod, 0.0, True, var, "variation bounds too large to certify Gamma > 0")
    return GammaBound(prod, lower, False, var)


def default_j_max(model: ProcessModel) -> int:
    mem = model.memory
    return max(mem or 0, 1) if mem is not None else 64


def gamma(model: ProcessModel, j_max: Optional[int] = None) -> GammaBound:
    if j_max is None:
        j_max = default_j_max(model)
    return gamma_from_variation(variation_sequence(model, j_max))
