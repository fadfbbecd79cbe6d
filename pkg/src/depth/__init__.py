"""Depth package: intrinsic depth functions, ranking and depth regions.

- lp.py: bounded-variable simplex for the zonoid depth program
- functions.py: zonoid, geodesic distance and spatial depths, their
  integrated curve versions, and in-sample depth vectors
- ranking.py: center-outward ranks with tie policies, central regions
"""

from .functions import (
    depth,
    depth_values,
    gdd,
    grid_average,
    integrated_gdd,
    integrated_zonoid_depth,
    spatial_depth,
    zonoid_depth,
)
from .lp import ZonoidLp, ZonoidSolution, zonoid_alpha
from .ranking import depth_region, rank, region_from_values, tie_groups

__all__ = [
    "ZonoidLp",
    "ZonoidSolution",
    "zonoid_alpha",
    "depth",
    "depth_values",
    "gdd",
    "grid_average",
    "integrated_gdd",
    "integrated_zonoid_depth",
    "spatial_depth",
    "zonoid_depth",
    "depth_region",
    "rank",
    "region_from_values",
    "tie_groups",
]
