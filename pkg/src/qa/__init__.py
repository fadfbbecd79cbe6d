"""QA validation package for hpd-depth.

Validates ReportFile documents: required keys, seed and provenance,
per-command result shape, and the invariants that can be re-derived from
the stored numbers.
"""

from .validator import (
    Issue,
    QAResult,
    ReportValidator,
    validate_report,
)

__all__ = [
    "Issue",
    "QAResult",
    "ReportValidator",
    "validate_report",
]
