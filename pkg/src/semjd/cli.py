"""Command-line interface.

Subcommands: simulate, fit, select, experiment, rank-check.  Exit codes:
0 success, 2 config/spec error, 3 numerical failure.  Output is
deterministic given the seed; floats print with 17 significant digits.
"""

import argparse
import sys

import numpy as np

from .config import load_experiment_config, resolve_candidate, resolve_true_model
from .criteria import CriterionValue
from .dataio import FLOAT_FMT, ingest_csv, write_path_csv, write_selection_csv
from .errors import ConfigError, NumericalError, SpecError
from .estimation import FitConfig, GivenPoint, MultiStart, fit
from .experiment import CRITERIA, run_experiment, select_over_candidates
from .likelihood import TruncationRule, truncation_stats
from .sem import ThetaVector, identifiability_rank
from .simulate import SimConfig, simulate_observations

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _fmt(x: float) -> str:
    return FLOAT_FMT % x


def _print_fit(name: str, result, value: CriterionValue) -> None:
    print(f"model: {name}")
    print(f"  converged:  {result.converged}")
    print(f"  iterations: {result.iterations}")
    print(f"  grad_norm:  {_fmt(result.grad_norm)}")
    print(f"  n_kept:     {result.n_kept}")
    print(f"  h_value:    {_fmt(result.h_value)}")
    print(f"  qbic:       {_fmt(value.qbic)}")
    print(f"  qaic:       {_fmt(value.qaic)}")
    print("  theta_hat:  " + " ".join(_fmt(v) for v in result.theta_hat.values))


def _read_theta(filename: str) -> np.ndarray:
    values = []
    with open(filename) as fh:
        for line in fh:
            fields = line.replace(",", " ").split()
            try:
                values.extend(float(f) for f in fields)
            except ValueError:
                continue  # header line
    if not values:
        raise ConfigError(f"{filename}: no numeric values found")
    return np.asarray(values)


def cmd_simulate(args) -> int:
    model = resolve_true_model(args.preset if args.config is None else args.config)
    path = simulate_observations(model, SimConfig(n=args.n, t_end=args.t, seed=args.seed))
    write_path_csv(path, args.out)
    print(f"wrote {path.x.shape[0]} rows x {path.p + 1} cols to {args.out} (h={_fmt(path.h)})")
    return EXIT_OK


def _fit_one(candidate, path, rule, multi_start: int | None, seed: int):
    stats = truncation_stats(path, rule)
    if multi_start:
        cfg = FitConfig(init=MultiStart(count=multi_start, seed=seed, center=candidate.init))
    else:
        cfg = FitConfig(init=GivenPoint(candidate.init))
    result = fit(candidate.spec, stats, path.n, path.h, cfg)
    value = CriterionValue.from_fit(
        candidate.name, result.h_value, candidate.spec.q, path.n, result.converged
    )
    return result, value


def cmd_fit(args) -> int:
    candidate = resolve_candidate(args.model)
    if args.init_from:
        other = resolve_candidate(args.init_from)
        if other.init.size != candidate.spec.q:
            raise ConfigError(
                f"--init-from supplies {other.init.size} values, model needs {candidate.spec.q}"
            )
        candidate.init = other.init
    path = ingest_csv(args.data)
    rule = TruncationRule(d=args.d, rho=args.rho)
    result, value = _fit_one(candidate, path, rule, args.multi_start, args.seed)
    _print_fit(candidate.name, result, value)
    return EXIT_OK


def cmd_select(args) -> int:
    candidates = [resolve_candidate(tok) for tok in args.models]
    path = ingest_csv(args.data)
    rule = TruncationRule(d=args.d, rho=args.rho)
    stats = truncation_stats(path, rule)
    report = select_over_candidates(candidates, stats, path.n, path.h, FitConfig(GivenPoint(np.empty(0))))
    for value in report.values:
        result = report.fits[value.model_id]
        _print_fit(value.model_id, result, value)
    for criterion in CRITERIA:
        winner = report.winners[criterion]
        crit_values = sorted(getattr(v, criterion) for v in report.values)
        note = ""
        if len(crit_values) > 1 and crit_values[0] == crit_values[1]:
            note = "  (tie broken by smaller q, then model id)"
        print(f"winner[{criterion}]: {winner}{note}")
    return EXIT_OK


def cmd_experiment(args) -> int:
    cfg = load_experiment_config(args.config)
    if args.reps is not None:
        cfg.replications = args.reps
    if args.threads is not None:
        cfg.threads = args.threads
    table = run_experiment(cfg)
    print(table.to_text())
    print(f"runtime: {table.runtime_s:.1f} s")
    if args.out:
        write_selection_csv(table, args.out)
        print(f"wrote {args.out}")
    return EXIT_OK


def cmd_rank_check(args) -> int:
    candidate = resolve_candidate(args.model)
    theta = _read_theta(args.theta)
    tv = ThetaVector.for_spec(candidate.spec, theta)
    rank = identifiability_rank(candidate.spec, tv)
    print(f"q:    {candidate.spec.q}")
    print(f"rank: {rank}")
    if rank < candidate.spec.q:
        print("rank-deficient: the model is not locally identified at this point")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semjd",
        description="Fit and select covariance-structure models for jump-diffusion "
        "observations via the jump-truncated quasi-likelihood.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate an observation path to CSV")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--preset", default="paper", choices=["paper"], help="builtin generative model")
    g.add_argument("--config", help="generative-model config file")
    p.add_argument("--n", type=int, required=True, help="number of increments")
    p.add_argument("--t", type=float, default=1.0, help="horizon T (default 1)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output CSV file")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="fit one model to a CSV path")
    p.add_argument("--model", required=True, help="model config file or builtin name")
    p.add_argument("--data", required=True, help="observation CSV")
    p.add_argument("--d", type=float, required=True, help="truncation scale D")
    p.add_argument("--rho", type=float, required=True, help="truncation exponent in [1/3, 1/2)")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--init-from", help="take the starting point from another model file")
    g.add_argument("--multi-start", type=int, metavar="K", help="best of K randomized starts")
    p.add_argument("--seed", type=int, default=0, help="seed for --multi-start")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("select", help="fit several models and pick QBIC/QAIC winners")
    p.add_argument("--models", required=True, nargs="+", help="model config files or builtin names")
    p.add_argument("--data", required=True)
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--rho", type=float, required=True)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("experiment", help="run the Monte Carlo selection experiment")
    p.add_argument("--config", required=True, help="experiment config file")
    p.add_argument("--reps", type=int, help="override replication count")
    p.add_argument("--threads", type=int, help="cap worker processes (0 = all cores)")
    p.add_argument("--out", help="write the tally as CSV")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("rank-check", help="identifiability rank of a model at a point")
    p.add_argument("--model", required=True)
    p.add_argument("--theta", required=True, help="file of q parameter values")
    p.set_defaults(func=cmd_rank_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, SpecError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
