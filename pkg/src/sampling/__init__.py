"""Sampling package: seeded random HPD samples for simulations."""

from .generators import (
    RngSeed,
    make_rng,
    sample_lognormal,
    sample_lognormal_curves,
    sample_pgnd,
    sample_wishart,
    sample_wishart_rescaled,
    sigma_p,
    synthetic_centre_covariances,
    wishart_bias_correction,
)

__all__ = [
    "RngSeed",
    "make_rng",
    "sample_lognormal",
    "sample_lognormal_curves",
    "sample_pgnd",
    "sample_wishart",
    "sample_wishart_rescaled",
    "sigma_p",
    "synthetic_centre_covariances",
    "wishart_bias_correction",
]
