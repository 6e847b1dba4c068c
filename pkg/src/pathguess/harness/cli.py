"""Command-line entry point.

Exit codes: 0 success, 1 invalid input (including unknown flags), 2 runtime failure.
Results go to --out (or stdout); logs go to stderr.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .. import __version__
from ..analysis.bounds import bound_report, dkw_bound, empirical_sup_deviation
from ..analysis.gibbs import PowerTail, gibbs_gamma, ising_gamma
from ..analysis.lecam import lecam_pair, testing_report
from ..analysis.risk import excess_risk_exact, excess_risk_mc
from ..core import PathguessError, Sample, ValidationError, normalize_index_pair
from ..estimator import count_patterns, fit, guess
from ..models import exact_finite_law
from ..sampler import SimulationPlan, simulate
from .config import load_config, load_json, model_from_spec
from .experiment import run_experiment

log = logging.getLogger("pathguess")

SAMPLE_HEADER = "# pathguess-sample v1"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def write_sample(sample: Sample, path: Optional[str]) -> None:
    text = f"{SAMPLE_HEADER} n={sample.n}\n" + "".join(f"{int(v)}\n" for v in sample.symbols)
    _emit(text, path)


def read_sample(path: str) -> Sample:
    try:
        lines = Path(path).read_text().splitlines()
    except FileNotFoundError as exc:
        raise ValidationError(f"no such file: {path}") from exc
    declared = None
    values = []
    for line in lines:
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line.startswith(SAMPLE_HEADER) and "n=" in line:
                declared = int(line.split("n=")[1].split()[0])
            continue
        try:
            values.extend(int(tok) for tok in line.split())
        except ValueError as exc:
            raise ValidationError(f"{path}: non-integer symbol in {line!r}") from exc
    if declared is not None and declared != len(values):
        raise ValidationError(f"{path}: header says n={declared} but {len(values)} symbols found")
    return Sample(np.asarray(values, dtype=np.int64))


def _emit(text: str, path: Optional[str]) -> None:
    if path and path != "-":
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_json(obj, path: Optional[str]) -> None:
    _emit(json.dumps(obj, sort_keys=True, indent=2) + "\n", path)


def _load_model(path: str):
    spec = load_json(path)
    if isinstance(spec, dict) and "model" in spec and "family" not in spec:
        spec = spec["model"]
    return model_from_spec(spec)


def _pair(args):
    return normalize_index_pair(args.D or [], args.G)


def _add_pair(p):
    p.add_argument("--D", type=int, nargs="*", default=[], help="data index set")
    p.add_argument("--G", type=int, nargs="+", required=True, help="guess index set")


def cmd_simulate(args):
    model = _load_model(args.model)
    plan = SimulationPlan(model, args.n, args.seed, args.burn_in, args.memory_truncation)
    write_sample(simulate(plan), args.out)


def cmd_count(args):
    table = count_patterns(read_sample(args.sample), _pair(args))
    _emit_json(table.to_dict(), args.out)


def cmd_guess(args):
    rule = fit(read_sample(args.sample), _pair(args))
    doc = rule.to_dict()
    if args.query is not None:
        doc["query"] = {"b": list(args.query), "a": list(guess(rule, args.query))}
    _emit_json(doc, args.out)


def cmd_risk(args):
    model = _load_model(args.model)
    pair = _pair(args)
    if args.sample:
        rule = fit(read_sample(args.sample), pair)
        law = exact_finite_law(model, pair.support)
        _emit_json(excess_risk_exact(rule, law).to_dict(), args.out)
        return
    if args.n is None or args.replicates is None or args.seed is None:
        raise ValidationError("Monte Carlo risk needs --n, --replicates and --seed (or give --sample)")
    s = excess_risk_mc(model, pair, args.n, args.replicates, args.seed, args.burn_in, args.threads)
    _emit_json(s.to_dict(), args.out)


def cmd_bounds(args):
    model = _load_model(args.model)
    _emit_json(bound_report(model, _pair(args), args.epsilon, args.n).to_dict(), args.out)


def cmd_dkw(args):
    b = dkw_bound(args.u, args.n, args.k, args.S_size, args.gamma)
    doc = {"threshold": b.threshold, "tail": b.tail}
    if args.sample:
        if not args.model or not args.S:
            raise ValidationError("--sample needs --model and --S")
        S = sorted(args.S)
        law = exact_finite_law(_load_model(args.model), [s - S[0] + 1 for s in S])
        dev = empirical_sup_deviation(read_sample(args.sample), [s - S[0] + 1 for s in S], law)
        doc.update(deviation=dev, exceeds=dev > b.threshold)
    _emit_json(doc, args.out)


def cmd_lecam(args):
    A = None if args.alphabet_size == "inf" else int(args.alphabet_size)
    pair = lecam_pair(args.n, A, args.regime, args.K, args.delta_n)
    doc = pair.to_dict()
    if args.n <= 10**6:
        doc["testing"] = testing_report(pair)
    _emit_json(doc, args.out)


def cmd_gibbs(args):
    if args.alpha is not None:
        rep = ising_gamma(args.alpha, args.A, args.k_max)
    elif args.oscillations:
        spec = load_json(args.oscillations)
        osc = {int(k): float(v) for k, v in spec["oscillations"].items()}
        tail = spec.get("tail")
        rule = None if tail is None else PowerTail(float(tail["C"]), float(tail["alpha"]))
        rep = gibbs_gamma(osc, args.A, args.k_max, rule)
    else:
        raise ValidationError("give --alpha (Ising) or --oscillations FILE")
    _emit_json(rep.to_dict(), args.out)


def cmd_experiment(args):
    cfg = load_config(args.config)
    if args.out:
        cfg.output["csv"] = args.out
    if args.json:
        cfg.output["json"] = args.json
    if not cfg.output.get("csv") and not cfg.output.get("json"):
        raise ValidationError("no output path: give --out or output.csv in the config")
    run_experiment(cfg, threads=args.threads)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pathguess", description="Pattern-based guessing for stationary categorical processes")
    p.add_argument("--version", action="version", version=f"pathguess {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", help="simulate a trajectory")
    s.add_argument("--model", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--burn-in", type=int)
    s.add_argument("--memory-truncation", type=int)
    s.add_argument("--out")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("count", help="pattern counts of a sample")
    s.add_argument("--sample", required=True)
    _add_pair(s)
    s.add_argument("--out")
    s.set_defaults(func=cmd_count)

    s = sub.add_parser("guess", help="fit the guess rule on a sample")
    s.add_argument("--sample", required=True)
    _add_pair(s)
    s.add_argument("--query", type=int, nargs="*")
    s.add_argument("--out")
    s.set_defaults(func=cmd_guess)

    s = sub.add_parser("risk", help="exact or Monte Carlo excess risk")
    s.add_argument("--model", required=True)
    _add_pair(s)
    s.add_argument("--sample")
    s.add_argument("--n", type=int)
    s.add_argument("--replicates", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--burn-in", type=int)
    s.add_argument("--threads", type=int)
    s.add_argument("--out")
    s.set_defaults(func=cmd_risk)

    s = sub.add_parser("bounds", help="sample-size, DKW and rate bounds")
    s.add_argument("--model", required=True)
    _add_pair(s)
    s.add_argument("--epsilon", type=float, required=True)
    s.add_argument("--n", type=int)
    s.add_argument("--out")
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("dkw", help="DKW-type threshold and tail")
    s.add_argument("--u", type=float, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--S-size", type=int, required=True)
    s.add_argument("--gamma", type=float, required=True)
    s.add_argument("--sample")
    s.add_argument("--model")
    s.add_argument("--S", type=int, nargs="*")
    s.add_argument("--out")
    s.set_defaults(func=cmd_dkw)

    s = sub.add_parser("lecam", help="two-point lower-bound construction")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--alphabet-size", default="2", help="integer >= 2 or 'inf'")
    s.add_argument("--regime", choices=("root_n", "margin"), default="root_n")
    s.add_argument("--K", type=int, default=1)
    s.add_argument("--delta-n", type=float)
    s.add_argument("--out")
    s.set_defaults(func=cmd_lecam)

    s = sub.add_parser("gibbs", help="Gamma bound for a Gibbs potential")
    s.add_argument("--alpha", type=float, help="long-range Ising exponent")
    s.add_argument("--oscillations", help="JSON with 'oscillations' {span: value} and optional 'tail'")
    s.add_argument("--A", type=int, default=2)
    s.add_argument("--k-max", type=int, default=16)
    s.add_argument("--out")
    s.set_defaults(func=cmd_gibbs)

    s = sub.add_parser("experiment", help="run a configured experiment")
    s.add_argument("--config", required=True)
    s.add_argument("--out", help="CSV path (overrides output.csv)")
    s.add_argument("--json", help="JSON path (overrides output.json)")
    s.add_argument("--threads", type=int)
    s.set_defaults(func=cmd_experiment)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        args.func(args)
    except (ValidationError, ValueError) as exc:
        log.error("%s", exc)
        return 1
    except (PathguessError, Exception) as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
