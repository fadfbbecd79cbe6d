"""QA validator: checks ReportFile documents against their contract.

Validates that a report carries its command, parameters (with a seed for
every randomized command) and provenance, and that the results have the
shape the command produces.  Invariants that can be re-derived from the
stored numbers are re-asserted: depth values lie in [0, 1] and ranks
follow them, a center's residual meets its threshold, and a bootstrap
cutoff is the minimal (1 - alpha) quantile of its depth values.

Usage::

    from src.qa.validator import ReportValidator

    result = ReportValidator().validate(report_doc)
    assert result.passed, result.summary()
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any

from src.inference.bootstrap import check_quantile_minimality
from src.sampling.generators import SEED_LIMIT
from src.schema.models import DEFAULT_TIE_TOL, DepthMethod

SEEDED_COMMANDS = {"cr", "simulate", "explore"}
VALUE_SLACK = 1e-12


# ---------------------------------------------------------------------------
# Result types
# ---------------------------------------------------------------------------

@dataclass
class Issue:
    """A single QA issue found during validation."""
    severity: str       # "error" or "warning"
    section: str        # "report", "params", "results" or "provenance"
    key: str            # "" for section-level issues
    category: str       # e.g. "missing_key", "seed", "quantile"
    message: str

    def __str__(self) -> str:
        loc = self.section
        if self.key:
            loc += f".{self.key}"
        return f"[{self.severity.upper()}] {loc}: {self.message}"


@dataclass
class QAResult:
    """Aggregated result of QA validation."""
    issues: list[Issue] = field(default_factory=list)

    @property
    def errors(self) -> list[Issue]:
        return [i for i in self.issues if i.severity == "error"]

    @property
    def warnings(self) -> list[Issue]:
        return [i for i in self.issues if i.severity == "warning"]

    @property
    def passed(self) -> bool:
        return len(self.errors) == 0

    @property
    def error_count(self) -> int:
        return len(self.errors)

    @property
    def warning_count(self) -> int:
        return len(self.warnings)

    def summary(self) -> str:
        """One-line summary string."""
        status = "PASS" if self.passed else "FAIL"
        return (
            f"QA {status}: {self.error_count} error(s), "
            f"{self.warning_count} warning(s)"
        )

    def report(self) -> str:
        """Multi-line report of all issues."""
        lines = [self.summary()]
        for issue in self.issues:
            lines.append(f"  {issue}")
        return "\n".join(lines)

    def add(self, severity: str, section: str, key: str, category: str, message: str) -> None:
        self.issues.append(Issue(severity, section, key, category, message))


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _require_keys(results: Any, keys: tuple[str, ...], label: str, result: QAResult) -> bool:
    """Record a missing_key error per absent key; True when all are present."""
    if not isinstance(results, dict):
        result.add("error", "results", "", "type", f"{label} results must be an object")
        return False
    missing = [key for key in keys if key not in results]
    for key in missing:
        result.add("error", "results", key, "missing_key", f"missing {key!r}")
    return not missing


# ---------------------------------------------------------------------------
# ReportValidator
# ---------------------------------------------------------------------------

class ReportValidator:
    """Validates ReportFile documents produced by the CLI."""

    def validate(self, doc: Any) -> QAResult:
        result = QAResult()
        if not isinstance(doc, dict):
            result.add("error", "report", "", "type", "report must be a JSON object")
            return result
        for key in ("command", "params", "results", "provenance"):
            if key not in doc:
                result.add("error", "report", key, "missing_key", f"missing required key {key!r}")
        if not result.passed:
            return result

        self._check_provenance(doc["provenance"], result)
        self._check_seed(doc["command"], doc["params"], result)
        check = getattr(self, f"_check_{doc['command']}_results", None)
        if check is None:
            result.add("warning", "report", "command", "unknown_command",
                       f"no result checks for command {doc['command']!r}")
        else:
            check(doc["params"], doc["results"], result)
        return result

    # ------------------------------------------------------------------
    # Envelope checks
    # ------------------------------------------------------------------

    def _check_provenance(self, prov: Any, result: QAResult) -> None:
        if not isinstance(prov, dict):
            result.add("error", "provenance", "", "type", "provenance must be an object")
            return
        for key in ("version", "timestamp", "rng"):
            if key not in prov:
                result.add("error", "provenance", key, "missing_key", f"missing {key!r}")
        stamp = prov.get("timestamp")
        if isinstance(stamp, str):
            try:
                datetime.fromisoformat(stamp)
            except ValueError:
                result.add("warning", "provenance", "timestamp", "format",
                           f"timestamp {stamp!r} is not ISO 8601")

    def _check_seed(self, command: str, params: Any, result: QAResult) -> None:
        if command not in SEEDED_COMMANDS:
            return
        seed = params.get("seed") if isinstance(params, dict) else None
        if seed is None:
            result.add("error", "params", "seed", "seed",
                       f"command {command!r} must record its seed")
        elif not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < SEED_LIMIT:
            result.add("error", "params", "seed", "seed", f"seed {seed!r} is not a 64-bit integer")

    # ------------------------------------------------------------------
    # Per-command result checks
    # ------------------------------------------------------------------

    def _check_depth_results(self, params: dict, results: Any, result: QAResult) -> None:
        if isinstance(results, dict) and "query_depth" in results:
            v = results["query_depth"]
            if not _is_number(v) or not -VALUE_SLACK <= v <= 1 + VALUE_SLACK:
                result.add("error", "results", "query_depth", "range",
                           f"depth {v!r} outside [0, 1]")
            return
        if not _require_keys(results, ("values",), "depth", result):
            return
        values = results["values"]
        method = results.get("method")
        if method is not None and method not in {m.value for m in DepthMethod}:
            result.add("error", "results", "method", "value", f"unknown method {method!r}")
        for i, v in enumerate(values):
            if not _is_number(v) or not -VALUE_SLACK <= v <= 1 + VALUE_SLACK:
                result.add("error", "results", f"values[{i}]", "range",
                           f"depth {v!r} outside [0, 1]")
        ranks = results.get("ranks")
        if ranks is None:
            return
        if len(ranks) != len(values):
            result.add("error", "results", "ranks", "shape",
                       f"{len(ranks)} ranks for {len(values)} values")
            return
        for i in range(len(values)):
            for j in range(len(values)):
                gap = values[i] - values[j]
                if gap > DEFAULT_TIE_TOL * max(1.0, abs(values[i])) and ranks[i] >= ranks[j]:
                    result.add("error", "results", "ranks", "order",
                               f"observation {i} is deeper than {j} but not ranked ahead")
                    return

    def _check_center_results(self, params: dict, results: Any, result: QAResult) -> None:
        if not _require_keys(results, ("matrix", "residual", "threshold"), "center", result):
            return
        if results["residual"] > results["threshold"]:
            result.add("error", "results", "residual", "convergence",
                       f"residual {results['residual']:.3e} exceeds {results['threshold']:.3e}")

    def _check_cr_results(self, params: dict, results: Any, result: QAResult) -> None:
        if not _require_keys(results, ("beta_star", "alpha", "depth_values", "B"), "cr", result):
            return
        values = results["depth_values"]
        if len(values) != results["B"]:
            result.add("warning", "results", "depth_values", "shape",
                       f"{len(values)} depth values for B = {results['B']} "
                       f"({results.get('n_failed', 0)} failed)")
        if not check_quantile_minimality(values, results["beta_star"], results["alpha"]):
            result.add("error", "results", "beta_star", "quantile",
                       "beta_star is not the minimal (1 - alpha) quantile of the depth values")
        if "contained" in results and not isinstance(results["contained"], bool):
            result.add("error", "results", "contained", "type", "'contained' must be a boolean")

    def _check_simulate_results(self, params: dict, results: Any, result: QAResult) -> None:
        experiment = params.get("experiment")
        rows = results.get("rows", []) if isinstance(results, dict) else []
        if experiment == "timing":
            for row in rows:
                if row.get("method") == "zonoid" and row["d"] ** 2 >= row["n"]:
                    result.add("error", "results", "rows", "feasibility",
                               f"zonoid timing cell with d^2 >= n (d={row['d']}, n={row['n']})")
        elif experiment == "coverage":
            for row in rows:
                cov = row.get("coverage")
                if not _is_number(cov) or not 0.0 <= cov <= 1.0:
                    result.add("error", "results", "rows", "range",
                               f"coverage {cov!r} outside [0, 1]")
        elif experiment == "efficiency":
            for row in rows:
                re = row.get("re")
                if _is_number(re) and not math.isnan(re) and re <= 0:
                    result.add("error", "results", "rows", "range", f"RE {re!r} must be positive")
        elif experiment == "breakdown":
            if "conclusions" not in (results or {}):
                result.add("warning", "results", "conclusions", "missing_key",
                           "breakdown report has no conclusions block")

    def _check_explore_results(self, params: dict, results: Any, result: QAResult) -> None:
        _require_keys(results, ("central", "outlying"), "explore", result)


# ---------------------------------------------------------------------------
# Convenience function
# ---------------------------------------------------------------------------

def validate_report(doc: Any) -> QAResult:
    """One-shot convenience: validate a ReportFile document."""
    return ReportValidator().validate(doc)
