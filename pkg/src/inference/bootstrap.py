"""Percentile-bootstrap depth regions for the intrinsic mean.

B resamples of size n are drawn with replacement; resample b uses the
index stream ``SeedSequence(seed, spawn_key=(b,))`` so two runs with the
same seed (for instance on a sample and on its congruence image) see the
same indices.  The intrinsic means of the resamples are ranked by their
in-sample depth, and the confidence region keeps the deepest 100(1-alpha)%
of them: its cutoff beta_star is the smallest realized depth value with at
least ceil((1 - alpha) B) means at or above it.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from src.config import parallel_map
from src.depth.functions import depth, depth_values
from src.depth.ranking import region_from_values
from src.errors import ConvergenceError, DomainError, NumericalFailure
from src.estimation.centers import fit_mean
from src.geometry.hermitian import HpdMatrix, congruence
from src.geometry.manifold import distances_from, unwhiten_exp
from src.sampling.generators import RngSeed, make_rng, random_unit_direction
from src.schema.models import (
    DEFAULT_TIE_TOL,
    DepthMethod,
    HpdSample,
    SolverConfig,
    required_count,
)

MIN_REPLICATES = 50
MAX_FAILURE_RATE = 0.01
CR_METHODS = (DepthMethod.ZONOID, DepthMethod.GDD)
TEST_POINT_STREAM = 2 ** 32          # stream key for equivariance test points


def resample_indices(n: int, b: int, seed: int | RngSeed) -> np.ndarray:
    """Indices of bootstrap resample b (deterministic in seed and b)."""
    return make_rng(seed, b).integers(0, n, size=n)


def bootstrap_means(sample: HpdSample, B: int, seed: int | RngSeed,
                    cfg: SolverConfig | None = None, threads: int = 1) -> tuple[np.ndarray, int]:
    """Intrinsic means of B resamples as a (B_ok, d, d) stack, and the failure count.

    Resamples whose mean solver does not converge are dropped and counted;
    more than 1% failures abort the run.
    """
    sample.distance_matrix()               # resamples reuse the cached sub-matrices

    def one(b: int):
        resample = sample.take(resample_indices(sample.n, b, seed))
        try:
            return fit_mean(resample, cfg=cfg).point.data
        except ConvergenceError:
            return None

    results = parallel_map(one, range(B), threads)
    means = [m for m in results if m is not None]
    failed = B - len(means)
    if failed > MAX_FAILURE_RATE * B:
        raise NumericalFailure(
            f"{failed} of {B} bootstrap means failed to converge (limit {MAX_FAILURE_RATE:.0%})")
    if failed:
        warnings.warn(f"{failed} of {B} bootstrap means failed to converge and were dropped",
                      RuntimeWarning, stacklevel=2)
    return np.stack(means), failed


@dataclass
class BootstrapCR:
    """Bootstrap means, their depths and the 100(1-alpha)% cutoff."""
    means: HpdSample
    depth_values: np.ndarray
    beta_star: float
    alpha: float
    method: DepthMethod
    seed: RngSeed
    center: HpdMatrix
    n_failed: int = 0
    tie_tol: float = field(default=DEFAULT_TIE_TOL, repr=False)

    @property
    def B(self) -> int:
        return self.means.n

    @property
    def boot_means(self) -> list[HpdMatrix]:
        return list(self.means)

    @property
    def member_indices(self) -> list[int]:
        return np.flatnonzero(self.depth_values >= self.beta_star).tolist()

    @property
    def size(self) -> float:
        """Distance from the full-sample mean to the furthest member mean."""
        members = self.means.obs[self.member_indices]
        return float(distances_from(self.center, members).max())

    def at_level(self, alpha: float) -> "BootstrapCR":
        """The region at another level, on the same bootstrap draws."""
        region = region_from_values(self.depth_values, alpha)
        return BootstrapCR(self.means, self.depth_values, region.beta_star, float(alpha),
                           self.method, self.seed, self.center, self.n_failed, self.tie_tol)

    def contains(self, theta: HpdMatrix) -> bool:
        return cr_contains(self, theta)

    def quantile_minimal(self) -> bool:
        """True when beta_star is the largest realized cutoff keeping >= (1-alpha) of the means."""
        return check_quantile_minimality(self.depth_values, self.beta_star, self.alpha)

    def to_dict(self) -> dict:
        return {
            "method": self.method.value,
            "alpha": self.alpha,
            "B": self.B,
            "beta_star": self.beta_star,
            "size": self.size,
            "n_members": len(self.member_indices),
            "n_failed": self.n_failed,
            "seed": self.seed.seed,
            "center": self.center.to_dict(),
            "depth_values": [float(v) for v in self.depth_values],
        }


def check_quantile_minimality(values, beta_star: float, alpha: float) -> bool:
    """At least ceil((1-alpha) B) values reach beta_star, and no larger realized value does."""
    v = np.asarray(values, dtype=float)
    k = required_count(alpha, v.size)
    if np.count_nonzero(v >= beta_star) < k:
        return False
    higher = v[v > beta_star]
    return not higher.size or np.count_nonzero(v >= higher.min()) < k


def _check_cr_args(sample: HpdSample, B: int, method: DepthMethod) -> DepthMethod:
    method = DepthMethod(method)
    if method not in CR_METHODS:
        raise DomainError(f"confidence regions support zonoid and gdd, got {method.value!r}")
    if int(B) < MIN_REPLICATES:
        raise DomainError(f"B must be >= {MIN_REPLICATES}, got {B}")
    d2 = sample.dim * sample.dim
    if method is DepthMethod.ZONOID and sample.n <= d2:
        raise DomainError(f"zonoid requires n > d^2 (n={sample.n}, d^2={d2})")
    return method


def bootstrap_cr(sample: HpdSample, B: int, alpha: float, method: DepthMethod,
                 cfg: SolverConfig | None = None, seed: int | RngSeed = 0,
                 threads: int = 1, center: HpdMatrix | None = None) -> BootstrapCR:
    """Percentile-bootstrap 100(1-alpha)% confidence region for the intrinsic mean."""
    method = _check_cr_args(sample, B, method)
    required_count(alpha, int(B))
    seed = seed if isinstance(seed, RngSeed) else RngSeed(seed)
    means, failed = bootstrap_means(sample, int(B), seed, cfg, threads)
    if center is None:
        center = fit_mean(sample, cfg=cfg).point
    return cr_from_means(means, alpha, method, seed, center, failed, threads)


def cr_from_means(means: np.ndarray, alpha: float, method: DepthMethod, seed: RngSeed,
                  center: HpdMatrix, n_failed: int = 0, threads: int = 1) -> BootstrapCR:
    """Rank precomputed bootstrap means and cut the region at level 1 - alpha."""
    method = DepthMethod(method)
    boot = HpdSample(means, _validated=True)
    values = depth_values(boot, method, threads)
    region = region_from_values(values, alpha)
    return BootstrapCR(boot, values, region.beta_star, float(alpha), method, seed,
                       center, n_failed)


def cr_contains(cr: BootstrapCR, theta: HpdMatrix) -> bool:
    """Whether theta's depth among the bootstrap means reaches beta_star."""
    cr.means.check_dim(theta)
    value = depth(cr.means, theta, cr.method)
    return value >= cr.beta_star - cr.tie_tol * max(1.0, abs(cr.beta_star))


# ---------------------------------------------------------------------------
# Congruence equivariance
# ---------------------------------------------------------------------------

@dataclass
class EquivarianceReport:
    """Membership agreement between CR(sample) and CR(a* sample a)."""
    agreements: int
    total: int
    mismatches: list[int]
    contained: list[bool]
    max_depth_gap: float

    @property
    def passed(self) -> bool:
        return self.agreements == self.total

    def to_dict(self) -> dict:
        return {
            "agreements": self.agreements,
            "total": self.total,
            "passed": self.passed,
            "mismatches": self.mismatches,
            "contained": self.contained,
            "max_depth_gap": self.max_depth_gap,
        }


def equivariance_test_points(cr: BootstrapCR, count: int) -> list[HpdMatrix]:
    """Points around the center at radii from inside to well outside the region."""
    rng = make_rng(cr.seed, TEST_POINT_STREAM)
    radii = np.linspace(0.1, 2.5, count) * max(cr.size, 1e-8)
    d = cr.center.dim
    return [unwhiten_exp(cr.center, r * random_unit_direction(d, rng, not cr.means.is_real))
            for r in radii]


def cr_equivariance_check(sample: HpdSample, a, B: int = MIN_REPLICATES, alpha: float = 0.05,
                          method: DepthMethod = DepthMethod.GDD,
                          cfg: SolverConfig | None = None, seed: int | RngSeed = 0,
                          thetas: list[HpdMatrix] | None = None, n_test: int = 20,
                          threads: int = 1) -> EquivarianceReport:
    """Compare memberships of test points in CR(sample) and of a* theta a in CR(a* sample a).

    Both regions are built from the same seed, hence the same resample indices.
    """
    base = bootstrap_cr(sample, B, alpha, method, cfg, seed, threads)
    moved_sample = sample.congruence(a)
    moved = bootstrap_cr(moved_sample, B, alpha, method, cfg, seed, threads)
    if thetas is None:
        thetas = equivariance_test_points(base, n_test)
    contained, mismatches = [], []
    for i, theta in enumerate(thetas):
        inside = base.contains(theta)
        contained.append(inside)
        if moved.contains(congruence(a, theta)) != inside:
            mismatches.append(i)
    if base.depth_values.shape == moved.depth_values.shape:
        gap = float(np.max(np.abs(base.depth_values - moved.depth_values)))
    else:
        gap = float("nan")
    return EquivarianceReport(
        agreements=len(thetas) - len(mismatches),
        total=len(thetas),
        mismatches=mismatches,
        contained=contained,
        max_depth_gap=gap,
    )
