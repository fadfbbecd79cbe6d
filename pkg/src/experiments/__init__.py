"""Experiments package: simulation harnesses.

- breakdown.py: rank breakdown under contamination, depth-median breakdown
- efficiency.py: relative efficiency of the mean against the median
- timing.py: computation-time profile of single depth evaluations
- coverage.py: coverage of bootstrap confidence regions
- explore.py: central / outlying observations and radar-chart tables
- runner.py: name -> runner registry used by the CLI and report replay
"""

from .breakdown import breakdown_rank_experiment, median_breakdown_experiment
from .coverage import coverage_experiment
from .efficiency import efficiency_experiment, efficiency_table
from .explore import explore_ranking
from .runner import EXPERIMENTS, diff_results, run_experiment
from .timing import timing_profile

__all__ = [
    "EXPERIMENTS",
    "breakdown_rank_experiment",
    "coverage_experiment",
    "diff_results",
    "efficiency_experiment",
    "efficiency_table",
    "explore_ranking",
    "median_breakdown_experiment",
    "run_experiment",
    "timing_profile",
]
