"""Runtime settings: YAML configuration, worker count and the parallel map.

Precedence for every value: explicit CLI flag > ``--config`` file >
built-in default.  The worker count additionally falls back to the
``HPD_DEPTH_THREADS`` environment variable and then to the logical core
count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable, TypeVar

import yaml

from src.errors import DomainError, ParseError
from src.schema.models import DEFAULT_TIE_TOL, SolverConfig

THREADS_ENV = "HPD_DEPTH_THREADS"


T = TypeVar("T")
R = TypeVar("R")

# Desk-scale experiment defaults; acceptance-scale values go in a config file.
DEFAULT_EXPERIMENTS: dict[str, dict[str, Any]] = {
    "breakdown": {"n": 50, "m": 25, "d": 2, "contamination_norm": 1e4,
                  "threshold": 1e3, "direction": "identity", "seed": 1},
    "efficiency": {"d": 2, "n": 50, "p": 5.0, "replications": 500, "seed": 1},
    "timing": {"d_list": [1, 2, 3], "n_list": [10, 25, 50, 100],
               "methods": ["zonoid", "gdd", "spatial"], "repetitions": 20, "seed": 1},
    "coverage": {"d": 2, "n": 100, "p": 2.0, "B": 500, "simulations": 200,
                 "alpha_list": [0.05, 0.2], "methods": ["zonoid", "gdd"], "seed": 1},
}


@dataclass
class Settings:
    """Solver and experiment defaults loaded from YAML."""
    solver: SolverConfig = field(default_factory=SolverConfig)
    threads: int | None = None
    tie_tol: float = DEFAULT_TIE_TOL
    experiments: dict[str, dict[str, Any]] = field(
        default_factory=lambda: {k: dict(v) for k, v in DEFAULT_EXPERIMENTS.items()})

    def experiment(self, name: str) -> dict[str, Any]:
        if name not in self.experiments:
            raise DomainError(f"unknown experiment {name!r}")
        return dict(self.experiments[name])

    def to_dict(self) -> dict:
        return {
            "solver": self.solver.to_dict(),
            "threads": self.threads,
            "tie_tol": self.tie_tol,
            "experiments": self.experiments,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Settings":
        experiments = {k: dict(v) for k, v in DEFAULT_EXPERIMENTS.items()}
        for name, block in (d.get("experiments") or {}).items():
            experiments.setdefault(name, {}).update(block or {})
        tie_tol = float(d.get("tie_tol", DEFAULT_TIE_TOL))
        if tie_tol < 0:
            raise DomainError(f"tie_tol must be >= 0, got {tie_tol}")
        return cls(
            solver=SolverConfig.from_dict(d.get("solver") or {}),
            threads=d.get("threads"),
            tie_tol=tie_tol,
            experiments=experiments,
        )


def load_settings(path: str | Path | None) -> Settings:
    """Load Settings from a YAML file; None gives the built-in defaults."""
    if path is None:
        return Settings()
    path = Path(path)
    if not path.exists():
        raise ParseError(f"config file not found: {path}")
    try:
        with open(path) as f:
            data = yaml.safe_load(f) or {}
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        if mark is not None:
            raise ParseError(f"{path}: invalid YAML", line=mark.line + 1,
                             column=mark.column + 1) from exc
        raise ParseError(f"{path}: invalid YAML ({exc})") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{path}: expected a mapping at the top level")
    return Settings.from_dict(data)


def save_settings(settings: Settings, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        yaml.dump(settings.to_dict(), f, default_flow_style=False, sort_keys=False)


# ---------------------------------------------------------------------------
# Worker pool
# ---------------------------------------------------------------------------

def resolve_threads(flag: int | None = None, settings: Settings | None = None) -> int:
    """Worker count: flag, then config, then $HPD_DEPTH_THREADS, then core count."""
    value: Any = flag
    if value is None and settings is not None:
        value = settings.threads
    if value is None:
        value = os.environ.get(THREADS_ENV)
    if value is None or value == "":
        return os.cpu_count() or 1
    try:
        threads = int(value)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"invalid thread count {value!r}") from exc
    if threads < 1:
        raise DomainError(f"thread count must be >= 1, got {threads}")
    return threads


def parallel_map(fn: Callable[[T], R], items: Iterable[T], threads: int = 1) -> list[R]:
    """``[fn(x) for x in items]`` on up to ``threads`` workers, order preserved."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(fn, items))
