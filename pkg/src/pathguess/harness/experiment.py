"""Seeded experiment orchestration and persistent outputs.

One CSV row per grid point n. Outputs are byte-identical for a given config:
replicate streams are derived from the seed alone, replicate results are
concatenated in replicate order, floats are written with ``repr`` and wall
times only go to the log.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .. import __version__
from ..analysis.bounds import (
    dkw_bound,
    empirical_sup_deviation_batch,
    minimax_lower_bound,
    regime_of,
    sample_size_bound,
    subcritical_bound,
    supercritical_bound,
)
from ..analysis.gibbs import PowerTail, gibbs_gamma, ising_gamma
from ..analysis.lecam import MAX_ORACLE_N, bayes_error_oracle, lecam_pair
from ..analysis.risk import joint_matrix, map_replicates, margin_delta, beta_gap, risk_of_codes, summarize
from ..core import ValidationError
from ..estimator import dense_counts, dense_guess_codes
from ..models import HiddenMarkovModel, exact_finite_law, gamma
from ..sampler import GOLDEN_GAMMA, MASK64, default_burn_in, replicate_seeds, simulate_batch, splitmix64
from .config import ExperimentConfig

log = logging.getLogger("pathguess")

CSV_COLUMNS = (
    "n",
    "replicates",
    "mean_risk",
    "se_risk",
    "q05",
    "q50",
    "q95",
    "bound_subcritical",
    "bound_supercritical",
    "beta",
    "delta",
    "gamma",
    "required_n",
    "lower_bound",
    "regime",
    "dkw_threshold",
    "dkw_tail",
    "dkw_exceed_frac",
    "chi2_step",
    "minimax_value",
    "bayes_error",
    "burn_in",
    "status",
    "seed",
    "config_hash",
)


def grid_seed(seed: int, n: int) -> int:
    """Seed for grid point n; replicate r then uses derive_seed(grid_seed, r)."""
    return splitmix64((int(seed) ^ ((int(n) * GOLDEN_GAMMA) & MASK64)) & MASK64)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return repr(v) if math.isfinite(v) else ""
    return str(v)


@dataclass
class ExperimentResult:
    config_hash: str
    seed: int
    rows: list = field(default_factory=list)
    gibbs: Optional[dict] = None
    status: str = "ok"
    error: Optional[str] = None
    wall_times: list = field(default_factory=list)  # seconds per row; never written to outputs

    def header_line(self) -> str:
        return f"# pathguess {__version__} config_hash={self.config_hash} seed={self.seed}"

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(self.header_line() + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for row in self.rows:
            w.writerow([_fmt(row.get(c)) for c in CSV_COLUMNS])
        return buf.getvalue()

    def to_json(self, config: dict) -> str:
        doc = {
            "tool": "pathguess",
            "version": __version__,
            "config_hash": self.config_hash,
            "seed": self.seed,
            "config": {k: v for k, v in config.items() if k != "output"},
            "rows": [{c: row.get(c) for c in CSV_COLUMNS} for row in self.rows],
            "gibbs": self.gibbs,
            "status": self.status,
            "error": self.error,
        }
        return json.dumps(_jsonable(doc), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def _gibbs_summary(cfg: ExperimentConfig) -> dict:
    g = cfg.gibbs
    k_max = int(g.get("k_max", 16))
    if "alpha" in g:
        rep = ising_gamma(float(g["alpha"]), int(g.get("A", 2)), k_max)
    else:
        osc = {int(k): float(v) for k, v in g["oscillations"].items()}
        tail = g.get("tail")
        rule = None if tail is None else PowerTail(float(tail["C"]), float(tail["alpha"]))
        rep = gibbs_gamma(osc, int(g.get("A", 2)), k_max, rule)
    return rep.to_dict()


def _theory(cfg: ExperimentConfig, model, n: int, law) -> dict:
    pair = cfg.pair
    K = pair.K
    row: dict = {}
    delta = margin_delta(law, pair).delta
    beta = beta_gap(law, pair)
    g = None
    base = model.base if isinstance(model, HiddenMarkovModel) else None
    if base is None:
        gb = gamma(model)
        g = gb.lower_bound if not gb.violated else None
    row.update(beta=beta, delta=delta, gamma=g)
    row["bound_subcritical"] = subcritical_bound(n, beta)
    regime = regime_of(delta, n)
    row["regime"] = regime
    if g is not None:
        row["bound_supercritical"] = supercritical_bound(n, delta, g, K, beta)
        row["required_n"] = sample_size_bound(cfg.epsilon, delta, beta, g, K, pair.L)
    row["lower_bound"] = minimax_lower_bound(n, K, delta if regime == "supercritical" else None)
    return row


def _run_point(cfg: ExperimentConfig, n: int, threads: Optional[int]) -> dict:
    model = cfg.model_at(n)
    pair = cfg.pair
    seed_n = grid_seed(cfg.seed, n)
    row = {"n": n, "replicates": cfg.replicates, "seed": cfg.seed, "status": "ok"}
    want_risk = "risk" in cfg.analyses
    want_dkw = "dkw" in cfg.analyses
    law = J = None
    if want_risk or "bounds" in cfg.analyses:
        law = exact_finite_law(model, pair.support)
        J = joint_matrix(law, pair)
    if "bounds" in cfg.analyses:
        row.update(_theory(cfg, model, n, law))

    S = law_S = None
    if want_dkw:
        S = sorted(int(s) for s in cfg.dkw["S"])
        shift = 1 - S[0]
        S = [s + shift for s in S]
        law_S = exact_finite_law(model, S)
        k = S[-1] - S[0]
        if n < k + 1:
            raise ValidationError(f"n={n} shorter than the span of S")
        if isinstance(model, HiddenMarkovModel):
            raise ValidationError("dkw analysis needs a Gamma bound; none is available for hidden Markov models")
        g = gamma(model).lower_bound
        if g <= 0:
            raise ValidationError("dkw analysis needs a positive Gamma bound")
        b = dkw_bound(float(cfg.dkw["u"]), n, k, len(S), g)
        row.update(dkw_threshold=b.threshold, dkw_tail=b.tail)

    if want_risk or want_dkw:
        if n < pair.L:
            raise ValidationError(f"n={n} leaves no training window for L={pair.L}")
        B = default_burn_in(model) if cfg.burn_in is None else cfg.burn_in
        row["burn_in"] = B
        A = model.alphabet_size

        def run(start, stop):
            X = simulate_batch(model, n, replicate_seeds(seed_n, start, stop), B)
            cols = []
            if want_risk:
                cols.append(risk_of_codes(J, dense_guess_codes(dense_counts(X, pair, A))))
            if want_dkw:
                cols.append(empirical_sup_deviation_batch(X, S, law_S))
            return np.column_stack(cols)

        out = map_replicates(run, cfg.replicates, n, threads)
        col = 0
        if want_risk:
            s = summarize(out[:, col])
            row.update(mean_risk=s.mean, se_risk=s.se, q05=s.q05, q50=s.q50, q95=s.q95)
            col += 1
        if want_dkw:
            row["dkw_exceed_frac"] = float(np.mean(out[:, col] > row["dkw_threshold"]))

    if "lecam" in cfg.analyses:
        lc = cfg.lecam
        A = lc.get("alphabet_size", model.alphabet_size)
        regime = lc.get("regime", "root_n")
        delta_n = lc.get("delta_n")
        pair_ = lecam_pair(n, None if A in (None, "inf") else int(A), regime, pair.K, delta_n)
        row.update(chi2_step=pair_.chi2_step, minimax_value=pair_.minimax_value)
        if n <= MAX_ORACLE_N:
            row["bayes_error"] = bayes_error_oracle(pair_, n)
    return row


def run_experiment(cfg: ExperimentConfig, threads: Optional[int] = None, write: bool = True) -> ExperimentResult:
    """Run every grid point in order; on failure, flush what exists with a marker and re-raise."""
    result = ExperimentResult(cfg.config_hash, cfg.seed)
    try:
        if "gibbs" in cfg.analyses:
            result.gibbs = _gibbs_summary(cfg)
        for n in cfg.n_grid:
            t0 = time.perf_counter()
            row = _run_point(cfg, n, threads)
            row["config_hash"] = cfg.config_hash
            result.rows.append(row)
            dt = time.perf_counter() - t0
            result.wall_times.append(dt)
            log.info("n=%d done in %.2fs", n, dt)
    except Exception as exc:
        result.status = "failed"
        result.error = f"{type(exc).__name__}: {exc}"
        failed_n = cfg.n_grid[len(result.rows)] if len(result.rows) < len(cfg.n_grid) else None
        result.rows.append(
            {"n": failed_n, "status": "failed", "seed": cfg.seed, "config_hash": cfg.config_hash}
        )
        if write:
            write_outputs(result, cfg)
        raise
    if write:
        write_outputs(result, cfg)
    return result


def write_outputs(result: ExperimentResult, cfg: ExperimentConfig) -> None:
    csv_path = cfg.output.get("csv")
    json_path = cfg.output.get("json")
    if csv_path:
        Path(csv_path).write_text(result.to_csv())
    if json_path:
        Path(json_path).write_text(result.to_json(cfg.raw))
