"""CLI entry point for hpd-depth.

Computes depths, centers and bootstrap confidence regions for samples of
HPD matrices stored as JSON SampleFiles, and runs the simulation
experiments.  Results are ReportFiles on stdout (or ``--output``); notes
and warnings go to stderr.

Usage::

    # In-sample depths and ranks
    python -m src depth sample.json --method zonoid --ties frobenius

    # Depth of one query matrix
    python -m src depth sample.json --method gdd --query y.json

    # Intrinsic mean / median
    python -m src center sample.json --type median

    # Bootstrap confidence region, testing one matrix
    python -m src cr sample.json --alpha 0.05 --B 500 --method gdd --seed 7 --test y.json

    # Experiments (defaults from config/defaults.yaml or --config)
    python -m src simulate --experiment breakdown --csv output/breakdown.csv
    python -m src simulate --experiment coverage --param B=1000 --param simulations=50
    python -m src simulate --replay output/coverage.json

    # Central / outlying observations with radar-chart table
    python -m src explore sample.json -k 3 --csv output/radar.csv

    # Synthetic samples
    python -m src generate --distribution wishart --d 2 --n 100 --dof 8 --seed 3 -o s.json

    # Validate a report
    python -m src validate --report output/coverage.json

Exit codes: 0 success, 1 failed validation or replay mismatch, 2 parse or
usage error, 3 precondition violation, 4 numerical failure.
"""

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np
import pandas as pd
import yaml

from src.config import Settings, load_settings, resolve_threads
from src.depth.functions import depth, depth_values
from src.depth.ranking import rank, region_from_values
from src.errors import ConvergenceError, DomainError, NumericalFailure, ParseError
from src.estimation.centers import fit_mean, fit_median
from src.experiments.explore import explore_ranking
from src.experiments.runner import EXPERIMENTS, diff_results, run_experiment
from src.geometry.hermitian import HpdMatrix
from src.inference.bootstrap import bootstrap_cr
from src.qa.validator import ReportValidator
from src.sampling.generators import (
    sample_lognormal,
    sample_lognormal_curves,
    sample_pgnd,
    sample_wishart_rescaled,
    synthetic_centre_covariances,
)
from src.schema.loader import (
    load_curve,
    load_matrix,
    load_report,
    load_sample,
    save_curve_sample,
    save_sample,
    save_table,
    write_report,
)
from src.schema.models import DepthMethod, HpdCurveSample, SolverConfig, TiePolicy

EXIT_FAILED = 1
EXIT_PARSE = 2
EXIT_DOMAIN = 3
EXIT_NUMERICAL = 4

DISTRIBUTIONS = ["lognormal", "pgnd", "wishart", "lognormal-curves"]


# ---------------------------------------------------------------------------
# Shared setup
# ---------------------------------------------------------------------------

def _settings(args) -> Settings:
    settings = load_settings(getattr(args, "config", None))
    args.threads = resolve_threads(getattr(args, "threads", None), settings)
    if getattr(args, "verbose", False):
        _info(f"Workers: {args.threads}")
    return settings


def _solver(args, settings: Settings) -> SolverConfig:
    """Solver config from settings, overridden by --max-iter / --tol / --step."""
    base = settings.solver
    return SolverConfig(
        max_iter=args.max_iter if getattr(args, "max_iter", None) is not None else base.max_iter,
        tol=args.tol if getattr(args, "tol", None) is not None else base.tol,
        step=args.step if getattr(args, "step", None) is not None else base.step,
    )


def _load_input(args):
    sample = load_sample(args.input)
    kind = "curves" if isinstance(sample, HpdCurveSample) else "matrices"
    _info(f"Loaded {sample.n} {kind} (d={sample.dim}) from {args.input}")
    return sample


def _write_csv(df: pd.DataFrame, path) -> None:
    if path:
        save_table(df, path)
        _info(f"Written: {path} ({len(df)} rows)")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_depth(args):
    """Depths and ranks of every observation, or the depth of one query."""
    settings = _settings(args)
    sample = _load_input(args)
    method = DepthMethod(args.method)
    params = {"input": str(args.input), "method": method.value, "ties": args.ties}

    if args.query:
        params["query"] = str(args.query)
        query = load_curve(args.query) if method.integrated else load_matrix(args.query)
        value = depth(sample, query, method)
        write_report("depth", params, {"method": method.value, "query_depth": value},
                     args.output)
        return

    values = depth_values(sample, method, args.threads)
    report = rank(sample, method, TiePolicy(args.ties), tie_tol=settings.tie_tol,
                  values=values)
    results = report.to_dict()
    if args.alpha is not None:
        params["alpha"] = args.alpha
        results["region"] = region_from_values(values, args.alpha).to_dict()
    if report.tie_groups:
        _info(f"{len(report.tie_groups)} group(s) of tied depths ({args.ties} policy)")
    write_report("depth", params, results, args.output)
    _write_csv(pd.DataFrame({"index": np.arange(sample.n), "depth": report.values,
                             "rank": report.ranks}), args.csv)


def cmd_center(args):
    """Intrinsic mean or median, with its optimality residual."""
    settings = _settings(args)
    sample = _load_input(args)
    if isinstance(sample, HpdCurveSample):
        raise DomainError("center expects a matrix sample, not curves")
    cfg = _solver(args, settings)
    fit = fit_mean if args.type == "mean" else fit_median
    result = fit(sample, cfg=cfg)
    if args.verbose:
        _info(f"Converged in {result.iterations} iteration(s), residual {result.residual:.3e}")
    params = {"input": str(args.input), "type": args.type, "solver": cfg.to_dict()}
    write_report("center", params, result.to_dict(), args.output)


def cmd_cr(args):
    """Percentile-bootstrap confidence region for the intrinsic mean."""
    settings = _settings(args)
    sample = _load_input(args)
    if isinstance(sample, HpdCurveSample):
        raise DomainError("cr expects a matrix sample, not curves")
    cfg = _solver(args, settings)
    _info(f"Bootstrapping {args.B} resamples ({args.method}, alpha={args.alpha})")
    cr = bootstrap_cr(sample, args.B, args.alpha, DepthMethod(args.method), cfg,
                      args.seed, args.threads)
    results = cr.to_dict()
    if not cr.quantile_minimal():
        _warn("beta_star failed the quantile-minimality re-check")
    params = {"input": str(args.input), "alpha": args.alpha, "B": args.B,
              "method": args.method, "seed": args.seed, "solver": cfg.to_dict()}
    if args.test:
        theta = load_matrix(args.test)
        results["contained"] = cr.contains(theta)
        params["test"] = str(args.test)
        _info(f"Test matrix {'inside' if results['contained'] else 'outside'} the region")
    write_report("cr", params, results, args.output)


def _parse_param(text: str) -> tuple[str, object]:
    if "=" not in text:
        raise ParseError(f"--param expects KEY=VALUE, got {text!r}")
    key, raw = text.split("=", 1)
    try:
        return key.strip(), yaml.safe_load(raw)
    except yaml.YAMLError as exc:
        raise ParseError(f"--param {key}: cannot parse {raw!r}") from exc


def cmd_simulate(args):
    """Run an experiment (or replay a report) and emit a ReportFile plus CSV."""
    settings = _settings(args)

    if args.replay:
        doc = load_report(args.replay)
        if doc["command"] != "simulate":
            raise DomainError(f"{args.replay} is a {doc['command']!r} report, not a simulation")
        params = dict(doc["params"])
        name = params.pop("experiment")
        cfg = SolverConfig.from_dict(params.pop("solver", {}))
        _info(f"Replaying {name} from {args.replay}")
        out = run_experiment(name, params, cfg, args.threads)
        diffs = diff_results(doc["results"], out.results)
        if diffs:
            for line in diffs[:20]:
                _warn(line)
            _warn(f"Replay differs in {len(diffs)} place(s)")
            sys.exit(EXIT_FAILED)
        _info("Replay reproduced the report (timing cells excluded)")
        return

    if not args.experiment:
        raise ParseError("simulate needs --experiment or --replay")
    params = settings.experiment(args.experiment)
    for text in args.param or []:
        key, value = _parse_param(text)
        params[key] = value
    if args.seed is not None:
        params["seed"] = args.seed
    cfg = _solver(args, settings)
    _info(f"Running {args.experiment} with {params}")
    out = run_experiment(args.experiment, params, cfg, args.threads)
    write_report("simulate", {"experiment": args.experiment, **params, "solver": cfg.to_dict()},
                 out.results, args.output)
    _write_csv(out.table, args.csv)


def cmd_explore(args):
    """Most central / outlying observations and the radar-chart feature table."""
    settings = _settings(args)
    cfg = _solver(args, settings)
    if args.input:
        sample = _load_input(args)
        if isinstance(sample, HpdCurveSample):
            raise DomainError("explore expects a matrix sample, not curves")
        params = {"input": str(args.input)}
    else:
        sample, outliers = synthetic_centre_covariances(
            args.centres, args.d, args.records, args.outlying, args.seed)
        _info(f"Synthetic data: {args.centres} centres, outlying {outliers}")
        params = {"synthetic": True, "centres": args.centres, "d": args.d,
                  "records": args.records, "outlying": args.outlying}
    params.update({"method": args.method, "k": args.k, "alpha": args.alpha, "B": args.B,
                   "seed": args.seed})
    result = explore_ranking(sample, DepthMethod(args.method), args.k, args.alpha, args.B,
                             args.seed, cfg, args.threads)
    write_report("explore", params, result.to_dict(), args.output)
    _write_csv(result.table, args.csv)


def cmd_generate(args):
    """Write a synthetic SampleFile."""
    _settings(args)
    mu = HpdMatrix.identity(args.d)
    if args.distribution == "lognormal":
        sample = sample_lognormal(mu, args.sigma, args.n, args.seed, complex_valued=not args.real)
    elif args.distribution == "pgnd":
        sample = sample_pgnd(mu, args.p, args.n, args.seed, complex_valued=not args.real)
    elif args.distribution == "wishart":
        sample = sample_wishart_rescaled(mu, args.dof, args.n, args.seed)
    else:
        grid = np.linspace(0.0, 1.0, args.grid_size)
        sample = sample_lognormal_curves(args.n, grid, args.d, args.sigma, args.seed)
        save_curve_sample(sample, args.output)
        _info(f"Generated {sample.n} curves on {sample.T} grid points")
        return
    save_sample(sample, args.output)
    _info(f"Generated {sample.n} {args.distribution} matrices (d={sample.dim})")


def cmd_validate(args):
    """Validate a ReportFile."""
    doc = load_report(args.report)
    result = ReportValidator().validate(doc)
    print(result.report())
    sys.exit(0 if result.passed else EXIT_FAILED)


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------

def _info(msg):
    print(f"  {msg}", file=sys.stderr)


def _warn(msg):
    print(f"  WARNING: {msg}", file=sys.stderr)


def _error(msg, code=EXIT_DOMAIN):
    print(f"  ERROR: {msg}", file=sys.stderr)
    sys.exit(code)


def _show_warning(message, category, filename, lineno, file=None, line=None):
    _warn(str(message))


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def build_parser():
    """Build the argument parser."""
    parser = argparse.ArgumentParser(
        prog="hpd-depth",
        description="Intrinsic data depth for samples of HPD matrices.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    common = _common_args()

    # ---- depth ----
    dep = subparsers.add_parser(
        "depth", parents=[common],
        help="Depths and center-outward ranks of a sample (or one query).",
    )
    _add_input_arg(dep)
    dep.add_argument(
        "--method",
        choices=[m.value for m in DepthMethod],
        default="gdd",
        help="Depth function (default: gdd). izonoid / igdd need a curve sample.",
    )
    dep.add_argument(
        "--query",
        help="Matrix file (or curve file for integrated depths) to evaluate.",
    )
    dep.add_argument(
        "--ties",
        choices=[t.value for t in TiePolicy],
        default="shared",
        help="Tie policy for ranks (default: shared).",
    )
    dep.add_argument(
        "--alpha",
        type=float,
        help="Also report the central 100(1-alpha)%% depth region.",
    )
    _add_output_args(dep)
    dep.set_defaults(func=cmd_depth)

    # ---- center ----
    cen = subparsers.add_parser(
        "center", parents=[common],
        help="Intrinsic mean or median of a sample.",
    )
    _add_input_arg(cen)
    cen.add_argument(
        "--type",
        choices=["mean", "median"],
        default="mean",
        help="Which center (default: mean).",
    )
    _add_solver_args(cen)
    _add_output_args(cen, csv=False)
    cen.set_defaults(func=cmd_center)

    # ---- cr ----
    cr = subparsers.add_parser(
        "cr", parents=[common],
        help="Bootstrap confidence region for the intrinsic mean.",
    )
    _add_input_arg(cr)
    cr.add_argument("--alpha", type=float, default=0.05, help="1 - confidence level (default: 0.05).")
    cr.add_argument("--B", type=int, default=500, help="Bootstrap replicates, >= 50 (default: 500).")
    cr.add_argument(
        "--method",
        choices=["zonoid", "gdd"],
        default="gdd",
        help="Depth used to trim the bootstrap means (default: gdd).",
    )
    cr.add_argument("--seed", type=int, default=0, help="64-bit RNG seed (default: 0).")
    cr.add_argument("--test", help="Matrix file to test for membership.")
    _add_solver_args(cr)
    _add_output_args(cr, csv=False)
    cr.set_defaults(func=cmd_cr)

    # ---- simulate ----
    sim = subparsers.add_parser(
        "simulate", parents=[common],
        help="Run a simulation experiment.",
    )
    group = sim.add_mutually_exclusive_group()
    group.add_argument(
        "--experiment",
        choices=sorted(EXPERIMENTS),
        help="Experiment to run.",
    )
    group.add_argument(
        "--replay",
        help="Re-run the experiment recorded in a ReportFile and compare results.",
    )
    sim.add_argument(
        "--param",
        action="append",
        metavar="KEY=VALUE",
        help="Override an experiment parameter (YAML value, repeatable).",
    )
    sim.add_argument("--seed", type=int, help="Override the experiment seed.")
    _add_solver_args(sim)
    _add_output_args(sim)
    sim.set_defaults(func=cmd_simulate)

    # ---- explore ----
    exp = subparsers.add_parser(
        "explore", parents=[common],
        help="Most central / outlying observations and radar-chart table.",
    )
    exp.add_argument("input", nargs="?", help="SampleFile (omit for synthetic centre data).")
    exp.add_argument(
        "--method",
        choices=[m.value for m in DepthMethod if not m.integrated],
        default="gdd",
        help="Depth used for ranking (default: gdd).",
    )
    exp.add_argument("-k", type=int, default=3, help="Observations per group (default: 3).")
    exp.add_argument("--alpha", type=float, default=0.05, help="Region level (default: 0.05).")
    exp.add_argument("--B", type=int, default=200, help="Bootstrap replicates (default: 200).")
    exp.add_argument("--seed", type=int, default=1, help="64-bit RNG seed (default: 1).")
    synth = exp.add_argument_group("synthetic centre data")
    synth.add_argument("--centres", type=int, default=30, help="Number of centres (default: 30).")
    synth.add_argument("--d", type=int, default=3, help="Covariance dimension (default: 3).")
    synth.add_argument("--records", type=int, default=50, help="Records per centre (default: 50).")
    synth.add_argument("--outlying", type=int, default=3, help="Outlying centres (default: 3).")
    _add_solver_args(exp)
    _add_output_args(exp)
    exp.set_defaults(func=cmd_explore)

    # ---- generate ----
    gen = subparsers.add_parser(
        "generate", parents=[common],
        help="Write a synthetic SampleFile.",
    )
    gen.add_argument("--distribution", choices=DISTRIBUTIONS, default="lognormal",
                     help="Generator (default: lognormal).")
    gen.add_argument("--n", type=int, default=100, help="Sample size (default: 100).")
    gen.add_argument("--d", type=int, default=2, help="Dimension (default: 2).")
    gen.add_argument("--sigma", type=float, default=float(np.sqrt(0.5)),
                     help="Log-normal scale (default: sqrt(1/2)).")
    gen.add_argument("--p", type=float, default=2.0, help="p-GND shape (default: 2).")
    gen.add_argument("--dof", type=int, default=8, help="Wishart degrees of freedom (default: 8).")
    gen.add_argument("--grid-size", dest="grid_size", type=int, default=8,
                     help="Curve grid points (default: 8).")
    gen.add_argument("--real", action="store_true", default=False,
                     help="Real symmetric draws (log-normal / p-GND only).")
    gen.add_argument("--seed", type=int, default=0, help="64-bit RNG seed (default: 0).")
    gen.add_argument("-o", "--output", help="Output SampleFile (default: stdout).")
    gen.set_defaults(func=cmd_generate)

    # ---- validate ----
    val = subparsers.add_parser(
        "validate",
        help="Validate a ReportFile.",
    )
    val.add_argument("--report", required=True, help="Path to the ReportFile.")
    val.set_defaults(func=cmd_validate)

    return parser


def _common_args():
    """--config / --threads / --verbose, shared by the compute commands."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML settings file (see config/defaults.yaml).")
    common.add_argument(
        "--threads",
        type=int,
        help="Worker threads (default: $HPD_DEPTH_THREADS, else logical cores).",
    )
    common.add_argument(
        "-v", "--verbose",
        action="store_true",
        default=False,
        help="Show per-step progress.",
    )
    return common


def _add_input_arg(parser):
    parser.add_argument("input", help="SampleFile path ('-' for stdin).")


def _add_solver_args(parser):
    """Add --max-iter / --tol / --step overrides for the center solvers."""
    solver = parser.add_argument_group("solver")
    solver.add_argument("--max-iter", dest="max_iter", type=int,
                        help="Iteration cap (default: 200).")
    solver.add_argument("--tol", type=float, help="Residual tolerance (default: 1e-10).")
    solver.add_argument("--step", type=float, help="Initial step size (default: 1.0).")


def _add_output_args(parser, csv=True):
    parser.add_argument("-o", "--output", help="ReportFile path (default: stdout).")
    if csv:
        parser.add_argument("--csv", help="Also write the flat result table as CSV.")


# ---------------------------------------------------------------------------
# Main
# ---------------------------------------------------------------------------

def main(argv=None):
    """CLI entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)
    with warnings.catch_warnings():
        warnings.showwarning = _show_warning
        try:
            args.func(args)
        except ParseError as exc:
            _error(str(exc), EXIT_PARSE)
        except DomainError as exc:
            _error(str(exc), EXIT_DOMAIN)
        except ConvergenceError as exc:
            _error(f"{exc} [residual {exc.residual:.3e} after {exc.iterations} iteration(s)]",
                   EXIT_NUMERICAL)
        except NumericalFailure as exc:
            _error(str(exc), EXIT_NUMERICAL)


if __name__ == "__main__":
    main()
