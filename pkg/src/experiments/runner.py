"""Named experiment registry shared by ``simulate`` and report replay.

Every runner takes a flat parameter dict (the ``params`` block of a
ReportFile) and returns the JSON ``results`` plus a flat table for CSV.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Callable

import pandas as pd

from src.errors import DomainError
from src.schema.loader import dumps
from src.schema.models import DepthMethod, SolverConfig, TiePolicy
from .breakdown import breakdown_rank_experiment, median_breakdown_experiment
from .coverage import coverage_experiment
from .efficiency import efficiency_table
from .timing import timing_profile

TIMING_KEYS = frozenset({"median_ms"})


@dataclass
class ExperimentOutput:
    results: dict
    table: pd.DataFrame


def _records(df: pd.DataFrame) -> list[dict]:
    return [{k: _plain(v) for k, v in row.items()} for row in df.to_dict(orient="records")]


def _plain(v: Any) -> Any:
    return v.item() if hasattr(v, "item") else v


def _as_list(value) -> list:
    return list(value) if isinstance(value, (list, tuple)) else [value]


def _coerce(kind: Callable, params: dict, key: str, default: Any = None):
    value = params[key] if default is None else params.get(key, default)
    try:
        return kind(value)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"parameter {key!r}: expected {kind.__name__}, got {value!r}") from exc


def _int(params: dict, key: str, default: int | None = None) -> int:
    return _coerce(int, params, key, default)


def _float(params: dict, key: str, default: float | None = None) -> float:
    return _coerce(float, params, key, default)


def _list(kind: Callable, params: dict, key: str, default: list | None = None) -> list:
    values = _as_list(params[key] if default is None else params.get(key, default))
    return [_coerce(kind, {key: v}, key) for v in values]


def run_breakdown(params: dict, cfg: SolverConfig | None, threads: int) -> ExperimentOutput:
    n, d, seed = _int(params, "n"), _int(params, "d"), _int(params, "seed")
    norm = _float(params, "contamination_norm")
    threshold = _float(params, "threshold", 1e3)
    report = breakdown_rank_experiment(
        n=n, m=_int(params, "m"), d=d, contamination_norm=norm, seed=seed,
        direction=params.get("direction", "identity"),
        threshold=threshold, cfg=cfg, threads=threads)
    results = report.to_dict()
    far_gdd = [r for r in report.rows if r.method == "gdd" and r.scenario == "far"]
    adversarial_zonoid = [r for r in report.rows
                          if r.method == "zonoid" and r.scenario == "adversarial"
                          and r.tie_policy == TiePolicy.FROBENIUS.value]
    results["conclusions"] = {
        "gdd_ranks_contaminants_last": all(
            min(r.contaminant_ranks) > report.n for r in far_gdd if r.contaminant_ranks),
        "gdd_not_broken": not any(r.broken for r in far_gdd),
        "zonoid_broken_by_two": any(r.broken for r in adversarial_zonoid),
    }
    max_m = _int(params, "median_max_m", 0)
    if max_m:
        medians = median_breakdown_experiment(
            n=n, max_m=max_m, d=d, contamination_norm=norm, seed=seed,
            threshold=threshold, cfg=cfg)
        results["median_breakdown"] = _records(medians)
    return ExperimentOutput(results, report.to_frame())


def run_efficiency(params: dict, cfg: SolverConfig | None, threads: int) -> ExperimentOutput:
    table = efficiency_table(
        _list(int, params, "d"), _list(int, params, "n"), _list(float, params, "p"),
        replications=_int(params, "replications"), seed=_int(params, "seed"),
        cfg=cfg, threads=threads)
    return ExperimentOutput({"rows": _records(table)}, table)


def run_timing(params: dict, cfg: SolverConfig | None, threads: int) -> ExperimentOutput:
    table = timing_profile(
        _list(int, params, "d_list"), _list(int, params, "n_list"),
        _list(DepthMethod, params, "methods"),
        seed=_int(params, "seed"), repetitions=_int(params, "repetitions", 20))
    return ExperimentOutput({"rows": _records(table)}, table)


def run_coverage(params: dict, cfg: SolverConfig | None, threads: int) -> ExperimentOutput:
    table = coverage_experiment(
        d=_int(params, "d"), n=_int(params, "n"), p=_float(params, "p"), B=_int(params, "B"),
        simulations=_int(params, "simulations"),
        alpha_list=_list(float, params, "alpha_list"),
        seed=_int(params, "seed"),
        methods=_list(DepthMethod, params, "methods", ["zonoid", "gdd"]),
        cfg=cfg, threads=threads)
    return ExperimentOutput({"rows": _records(table)}, table)


EXPERIMENTS: dict[str, Callable[[dict, SolverConfig | None, int], ExperimentOutput]] = {
    "breakdown": run_breakdown,
    "efficiency": run_efficiency,
    "timing": run_timing,
    "coverage": run_coverage,
}


def run_experiment(name: str, params: dict, cfg: SolverConfig | None = None,
                   threads: int = 1) -> ExperimentOutput:
    if name not in EXPERIMENTS:
        raise DomainError(f"unknown experiment {name!r}; choose from {sorted(EXPERIMENTS)}")
    try:
        return EXPERIMENTS[name](params, cfg, threads)
    except KeyError as exc:
        raise DomainError(f"experiment {name!r} is missing parameter {exc}") from exc


def diff_results(expected: Any, actual: Any, path: str = "results") -> list[str]:
    """Paths where two JSON result trees differ, ignoring timing cells."""
    expected = json.loads(dumps(expected))
    actual = json.loads(dumps(actual))
    return _diff(expected, actual, path)


def _diff(a: Any, b: Any, path: str) -> list[str]:
    if isinstance(a, dict) and isinstance(b, dict):
        out = []
        for key in sorted(set(a) | set(b)):
            if key in TIMING_KEYS:
                continue
            if key not in a or key not in b:
                out.append(f"{path}.{key}: present on one side only")
            else:
                out.extend(_diff(a[key], b[key], f"{path}.{key}"))
        return out
    if isinstance(a, list) and isinstance(b, list):
        if len(a) != len(b):
            return [f"{path}: length {len(a)} != {len(b)}"]
        out = []
        for i, (x, y) in enumerate(zip(a, b)):
            out.extend(_diff(x, y, f"{path}[{i}]"))
        return out
    if a != b and not (isinstance(a, float) and isinstance(b, float) and a != a and b != b):
        return [f"{path}: {a!r} != {b!r}"]
    return []
