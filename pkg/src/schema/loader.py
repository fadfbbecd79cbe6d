"""File formats: JSON samples, matrices and reports, CSV tables.

Samples are written with every float in shortest round-trip form, so
``load_sample(save_sample(s))`` reproduces the observations exactly.
A path of ``"-"`` reads from stdin / writes to stdout.

SampleFile::

    {"dim": d, "complex": bool,
     "observations": [{"re": [[...]], "im": [[...]]}, ...],
     "grid": [t, ...]}            # curve samples only; observations are n x T

ReportFile::

    {"command": str, "params": {...}, "results": {...},
     "provenance": {"version": str, "timestamp": str, "rng": str}}
"""

from __future__ import annotations

import json
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from src import __version__
from src.errors import DomainError, ParseError
from src.geometry.hermitian import HpdMatrix
from .models import HpdCurveSample, HpdSample, _matrices_from_entries

RNG_NAME = "numpy PCG64 via SeedSequence(seed, spawn_key=(stream,))"


# ---------------------------------------------------------------------------
# Raw JSON
# ---------------------------------------------------------------------------

def _read_text(path: str | Path) -> str:
    if str(path) == "-":
        return sys.stdin.read()
    path = Path(path)
    if not path.exists():
        raise ParseError(f"file not found: {path}")
    return path.read_text()


def _write_text(text: str, path: str | Path | None) -> None:
    if path is None or str(path) == "-":
        sys.stdout.write(text + "\n")
        return
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text + "\n")


def _json_default(obj: Any):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    if hasattr(obj, "value"):          # Enum
        return obj.value
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, default=_json_default)


def read_json(path: str | Path) -> Any:
    """Parse a JSON file, mapping syntax errors to ParseError with a position."""
    text = _read_text(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc.msg}", line=exc.lineno, column=exc.colno) from exc


def _require(doc: Any, key: str, path) -> Any:
    if not isinstance(doc, dict) or key not in doc:
        raise ParseError(f"{path}: missing required key {key!r}")
    return doc[key]


# ---------------------------------------------------------------------------
# Samples
# ---------------------------------------------------------------------------

def load_sample(path: str | Path) -> HpdSample | HpdCurveSample:
    """Load a SampleFile; a "grid" key yields a curve sample."""
    doc = read_json(path)
    _require(doc, "observations", path)
    try:
        if doc.get("grid") is not None:
            return HpdCurveSample.from_dict(doc)
        return HpdSample.from_dict(doc)
    except DomainError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: malformed observations ({exc})") from exc


def load_curve_sample(path: str | Path) -> HpdCurveSample:
    sample = load_sample(path)
    if not isinstance(sample, HpdCurveSample):
        raise DomainError(f"{path}: integrated depths need a curve sample with a 'grid'")
    return sample


def save_sample(sample: HpdSample, path: str | Path | None) -> None:
    _write_text(dumps(sample.to_dict()), path)


def save_curve_sample(sample: HpdCurveSample, path: str | Path | None) -> None:
    _write_text(dumps(sample.to_dict()), path)


# ---------------------------------------------------------------------------
# Single matrices and query curves
# ---------------------------------------------------------------------------

def load_matrix(path: str | Path) -> HpdMatrix:
    """Load one HPD matrix: ``{"re": ..., "im": ...}`` or a report's ``{"matrix": {...}}``."""
    doc = read_json(path)
    if isinstance(doc, dict) and "matrix" in doc:
        doc = doc["matrix"]
    if isinstance(doc, dict) and "results" in doc and isinstance(doc["results"], dict):
        doc = doc["results"].get("matrix", doc)
    _require(doc, "re", path)
    try:
        return HpdMatrix.from_dict(doc)
    except DomainError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: malformed matrix ({exc})") from exc


def load_curve(path: str | Path) -> np.ndarray:
    """Load a query curve: a JSON list of matrices (or ``{"curve": [...]}``) as (T, d, d)."""
    doc = read_json(path)
    if isinstance(doc, dict):
        doc = _require(doc, "curve", path)
    if not isinstance(doc, list):
        raise ParseError(f"{path}: expected a list of matrices")
    try:
        return _matrices_from_entries(doc, None)
    except DomainError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: malformed curve ({exc})") from exc


def save_matrix(m: HpdMatrix, path: str | Path | None) -> None:
    _write_text(dumps(m.to_dict()), path)


# ---------------------------------------------------------------------------
# Reports and tables
# ---------------------------------------------------------------------------

def make_report(command: str, params: dict, results: Any) -> dict:
    """Assemble a ReportFile document with provenance."""
    return {
        "command": command,
        "params": params,
        "results": results,
        "provenance": {
            "version": __version__,
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "rng": RNG_NAME,
        },
    }


def write_report(command: str, params: dict, results: Any,
                 path: str | Path | None = None) -> dict:
    """Write a ReportFile to ``path`` (stdout when None) and return the document.

    The returned document is the parsed form of what was written, so numpy
    values have already been converted to plain JSON types.
    """
    text = dumps(make_report(command, params, results))
    _write_text(text, path)
    return json.loads(text)


def load_report(path: str | Path) -> dict:
    doc = read_json(path)
    for key in ("command", "params", "results"):
        _require(doc, key, path)
    return doc


def save_table(df: pd.DataFrame, path: str | Path) -> None:
    """Write a flat result table as CSV."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False, float_format="%.17g")
