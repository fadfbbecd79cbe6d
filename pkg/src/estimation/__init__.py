"""Estimation package: intrinsic centers of HPD samples.

- centers.py: Karcher (intrinsic) mean and Weiszfeld (intrinsic) median
"""

from .centers import (
    CenterResult,
    fit_mean,
    fit_median,
    intrinsic_mean,
    intrinsic_median,
    mean_residual,
    median_residual,
)

__all__ = [
    "CenterResult",
    "fit_mean",
    "fit_median",
    "intrinsic_mean",
    "intrinsic_median",
    "mean_residual",
    "median_residual",
]
