"""Schema package: typed models and file formats.

Provides the contract between the numerical layers and the CLI:

- models.py: sample containers, solver configuration, depth enums and
  ranking results
- loader.py: JSON sample / matrix / report files and CSV tables
"""

from .loader import (
    load_curve_sample,
    load_matrix,
    load_report,
    load_sample,
    save_curve_sample,
    save_matrix,
    save_sample,
    save_table,
    write_report,
)
from .models import (
    DepthMethod,
    DepthRegion,
    DepthReport,
    HpdCurveSample,
    HpdSample,
    SolverConfig,
    TiePolicy,
)

__all__ = [
    # Models
    "DepthMethod",
    "DepthRegion",
    "DepthReport",
    "HpdCurveSample",
    "HpdSample",
    "SolverConfig",
    "TiePolicy",
    # Loader
    "load_sample",
    "save_sample",
    "load_curve_sample",
    "save_curve_sample",
    "load_matrix",
    "save_matrix",
    "load_report",
    "write_report",
    "save_table",
]
