"""Experiment configuration: JSON documents with an explicit model family tag."""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np

from ..core import IndexPair, ValidationError, normalize_index_pair
from ..models import (
    BinaryARModel,
    HiddenMarkovModel,
    IIDModel,
    MarkovModel,
    MixtureModel,
    PoissonRegModel,
    ProcessModel,
)

ANALYSES = ("risk", "bounds", "dkw", "lecam", "gibbs")


def _need(spec: dict, key: str, where: str):
    if key not in spec:
        raise ValidationError(f"{where}: missing field {key!r}")
    return spec[key]


def model_from_spec(spec: dict) -> ProcessModel:
    """Build a fixed model from its JSON description."""
    if not isinstance(spec, dict):
        raise ValidationError("model spec must be a JSON object")
    fam = _need(spec, "family", "model")
    if fam == "iid":
        return IIDModel(np.asarray(_need(spec, "probs", "iid"), dtype=float))
    if fam == "markov":
        return MarkovModel(np.asarray(_need(spec, "transition", "markov"), dtype=float), int(spec.get("order", 1)))
    if fam == "binary_ar":
        return BinaryARModel(float(spec.get("xi0", 0.0)), tuple(float(v) for v in _need(spec, "xi", "binary_ar")))
    if fam == "poisson_reg":
        return PoissonRegModel(tuple(float(v) for v in _need(spec, "xi", "poisson_reg")), float(_need(spec, "c", "poisson_reg")))
    if fam == "hidden_markov":
        base = model_from_spec({**_need(spec, "base", "hidden_markov"), "family": "markov"})
        return HiddenMarkovModel(base, tuple(int(v) for v in _need(spec, "projection", "hidden_markov")))
    if fam == "mixture":
        comps = tuple(np.asarray(c, dtype=float) for c in _need(spec, "components", "mixture"))
        p0 = spec.get("order0_probs")
        return MixtureModel(
            tuple(float(v) for v in _need(spec, "weights", "mixture")),
            comps,
            float(spec.get("order0_weight", 0.0)),
            None if p0 is None else np.asarray(p0, dtype=float),
        )
    raise ValidationError(f"unknown model family {fam!r}")


def model_family(spec: dict) -> Callable[[int], ProcessModel]:
    """n -> model. Fixed families ignore n; ``perturbed_iid`` moves with n.

    perturbed_iid: probs(n) = base + scale * direction * n**-power, e.g. base
    (1/2, 1/2), direction (1, -1), scale 1/8, power 1/2 gives the margin family
    (1/2 + 1/(8 sqrt n), 1/2 - 1/(8 sqrt n)).
    """
    if isinstance(spec, dict) and spec.get("family") == "perturbed_iid":
        base = np.asarray(_need(spec, "base", "perturbed_iid"), dtype=float)
        direction = np.asarray(_need(spec, "direction", "perturbed_iid"), dtype=float)
        if base.shape != direction.shape:
            raise ValidationError("perturbed_iid: base and direction differ in length")
        if abs(direction.sum()) > 1e-12:
            raise ValidationError("perturbed_iid: direction must sum to 0")
        scale = float(_need(spec, "scale", "perturbed_iid"))
        power = float(spec.get("power", 0.5))
        return lambda n: IIDModel(base + scale * direction * float(n) ** -power)
    model = model_from_spec(spec)
    return lambda n: model


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


@dataclass(frozen=True)
class ExperimentConfig:
    raw: dict
    model_at: Callable[[int], ProcessModel] = field(repr=False, compare=False)
    pair: IndexPair
    n_grid: tuple
    replicates: int
    seed: int
    burn_in: Optional[int]
    epsilon: float
    analyses: frozenset
    dkw: dict
    lecam: dict
    gibbs: dict
    output: dict

    @property
    def config_hash(self) -> str:
        """sha256 of the canonical JSON without the output paths, first 16 hex digits."""
        body = {k: v for k, v in self.raw.items() if k != "output"}
        return hashlib.sha256(canonical_json(body).encode()).hexdigest()[:16]


def parse_config(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ValidationError("config must be a JSON object")
    model_at = model_family(_need(raw, "model", "config"))
    pair_spec = _need(raw, "pair", "config")
    pair = normalize_index_pair(pair_spec.get("D", []), _need(pair_spec, "G", "pair"))
    grid = tuple(int(n) for n in _need(raw, "n_grid", "config"))
    if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValidationError("n_grid must be non-empty and strictly increasing")
    if grid[0] < max(pair.L, 2):
        raise ValidationError(f"n_grid values must be >= max(L, 2) = {max(pair.L, 2)}")
    replicates = int(raw.get("replicates", 0))
    if replicates < 1:
        raise ValidationError("replicates must be >= 1")
    if "seed" not in raw or not isinstance(raw["seed"], int) or isinstance(raw["seed"], bool):
        raise ValidationError("config needs an explicit integer seed")
    seed = raw["seed"]
    if not 0 <= seed < 2 ** 64:
        raise ValidationError("seed must be a 64-bit unsigned integer")
    burn_in = raw.get("burn_in")
    if burn_in is not None and (not isinstance(burn_in, int) or burn_in < 0):
        raise ValidationError("burn_in must be a non-negative integer or null")
    epsilon = float(raw.get("epsilon", 0.1))
    if not epsilon > 0 or not math.isfinite(epsilon):
        raise ValidationError("epsilon must be > 0")
    toggles = raw.get("analyses", {"risk": True, "bounds": True})
    unknown = set(toggles) - set(ANALYSES)
    if unknown:
        raise ValidationError(f"unknown analyses {sorted(unknown)}")
    analyses = frozenset(k for k, v in toggles.items() if v)
    dkw = dict(raw.get("dkw", {}))
    if "dkw" in analyses:
        S = dkw.get("S")
        if not S or not all(isinstance(s, int) for s in S):
            raise ValidationError("dkw analysis needs an integer index set S")
        if not float(dkw.get("u", 0)) > 0:
            raise ValidationError("dkw analysis needs u > 0")
    lecam = dict(raw.get("lecam", {}))
    if "lecam" in analyses and lecam.get("regime", "root_n") not in ("root_n", "margin"):
        raise ValidationError("lecam regime must be root_n or margin")
    gibbs = dict(raw.get("gibbs", {}))
    if "gibbs" in analyses and "alpha" not in gibbs and "oscillations" not in gibbs:
        raise ValidationError("gibbs analysis needs alpha or oscillations")
    return ExperimentConfig(
        raw=raw,
        model_at=model_at,
        pair=pair,
        n_grid=grid,
        replicates=replicates,
        seed=seed,
        burn_in=burn_in,
        epsilon=epsilon,
        analyses=analyses,
        dkw=dkw,
        lecam=lecam,
        gibbs=gibbs,
        output=dict(raw.get("output", {})),
    )


def load_json(path) -> Any:
    try:
        with open(Path(path)) as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise ValidationError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from exc


def load_config(path) -> ExperimentConfig:
    return parse_config(load_json(path))
