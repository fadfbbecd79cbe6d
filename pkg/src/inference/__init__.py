"""Inference package: bootstrap confidence regions for the intrinsic mean."""

from .bootstrap import (
    BootstrapCR,
    EquivarianceReport,
    bootstrap_cr,
    bootstrap_means,
    cr_contains,
    cr_equivariance_check,
)

__all__ = [
    "BootstrapCR",
    "EquivarianceReport",
    "bootstrap_cr",
    "bootstrap_means",
    "cr_contains",
    "cr_equivariance_check",
]
