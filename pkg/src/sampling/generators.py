"""Random HPD samples for simulations.

Every generator takes a 64-bit seed plus an optional stream key and draws
from ``numpy.random.Generator(PCG64(SeedSequence(seed, spawn_key=stream)))``,
so identical (seed, stream, parameters) give bit-identical output and
parallel replicates use independent streams.

- Riemannian log-normal: mu^{1/2} Exp(sum_k Z_k e_k) mu^{1/2}, Z_k ~ N(0, sigma^2)
- p-generalized normal: same construction with exponential-power Z_k of
  standard deviation sigma_p = p^{1/p} sqrt(Gamma(3/p) / Gamma(1/p))
- rescaled complex Wishart: e^{-c(d, B)} W with W ~ CW(B, mu / B), whose
  intrinsic mean is mu
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import digamma, gamma

from src.errors import DomainError
from src.geometry.hermitian import (
    HpdMatrix,
    coordinates_to_stack,
    expm_stack,
    hermitian_part,
)
from src.geometry.manifold import geodesic
from src.schema.models import HpdCurveSample, HpdSample

SEED_LIMIT = 2 ** 64


@dataclass(frozen=True)
class RngSeed:
    """A 64-bit seed; ``generator(*stream)`` derives independent streams from it."""
    seed: int

    def __post_init__(self):
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)):
            raise DomainError(f"seed must be an integer, got {self.seed!r}")
        if not 0 <= int(self.seed) < SEED_LIMIT:
            raise DomainError(f"seed must lie in [0, 2^64), got {self.seed}")
        object.__setattr__(self, "seed", int(self.seed))

    def generator(self, *stream: int) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=tuple(int(s) for s in stream))
        return np.random.Generator(np.random.PCG64(ss))

    def derive(self, *stream: int) -> "RngSeed":
        """A new 64-bit seed drawn from the given stream, for nested experiments."""
        ss = np.random.SeedSequence(self.seed, spawn_key=tuple(int(s) for s in stream))
        return RngSeed(int(ss.generate_state(1, np.uint64)[0]))

    def to_dict(self) -> dict:
        return {"seed": self.seed}


def make_rng(seed: int | RngSeed, *stream: int) -> np.random.Generator:
    if not isinstance(seed, RngSeed):
        seed = RngSeed(seed)
    return seed.generator(*stream)


def _check_n(n: int) -> int:
    if int(n) < 1:
        raise DomainError(f"sample size must be >= 1, got {n}")
    return int(n)


def _tangent_to_sample(mu: HpdMatrix, coords: np.ndarray, complex_valued: bool) -> np.ndarray:
    """mu^{1/2} Exp(H) mu^{1/2} for tangent coordinates at the identity, as an array stack."""
    d = mu.dim
    if not complex_valued:
        coords = coords.copy()
        coords[..., d + 1::2] = 0.0            # antisymmetric (imaginary) directions
    h = coordinates_to_stack(coords, d)
    r = mu.sqrt()
    out = hermitian_part(r @ expm_stack(h) @ r)
    if not complex_valued and np.all(mu.data.imag == 0):
        out = out.real.astype(np.complex128)
    return out


# ---------------------------------------------------------------------------
# Log-normal and p-generalized normal
# ---------------------------------------------------------------------------

def sample_lognormal(mu: HpdMatrix, sigma: float, n: int, seed: int | RngSeed,
                     stream: tuple[int, ...] = (), complex_valued: bool = True) -> HpdSample:
    """Riemannian log-normal sample with intrinsic mean mu."""
    if not sigma > 0:
        raise DomainError(f"sigma must be > 0, got {sigma}")
    n = _check_n(n)
    rng = make_rng(seed, *stream)
    z = rng.normal(0.0, sigma, size=(n, mu.dim * mu.dim))
    return HpdSample(_tangent_to_sample(mu, z, complex_valued))


def sigma_p(p: float) -> float:
    """Standard deviation of the p-generalized normal, p^{1/p} sqrt(Gamma(3/p)/Gamma(1/p))."""
    if not p >= 1:
        raise DomainError(f"p must be >= 1, got {p}")
    return float(p ** (1.0 / p) * np.sqrt(gamma(3.0 / p) / gamma(1.0 / p)))


def pgnd_variates(p: float, size, rng: np.random.Generator) -> np.ndarray:
    """Exponential-power variates with density proportional to exp(-|z|^p / p)."""
    if not p >= 1:
        raise DomainError(f"p must be >= 1, got {p}")
    magnitude = (p * rng.gamma(1.0 / p, 1.0, size=size)) ** (1.0 / p)
    sign = np.where(rng.random(size=size) < 0.5, -1.0, 1.0)
    return sign * magnitude


def sample_pgnd(mu: HpdMatrix, p: float, n: int, seed: int | RngSeed,
                stream: tuple[int, ...] = (), complex_valued: bool = True) -> HpdSample:
    """Sample whose tangent coordinates at mu are iid p-generalized normal."""
    n = _check_n(n)
    rng = make_rng(seed, *stream)
    z = pgnd_variates(p, (n, mu.dim * mu.dim), rng)
    return HpdSample(_tangent_to_sample(mu, z, complex_valued))


# ---------------------------------------------------------------------------
# Complex Wishart
# ---------------------------------------------------------------------------

def wishart_bias_correction(d: int, B: int) -> float:
    """c(d, B) = -log B + (1/d) sum_{i=1}^{d} psi(B - (d - i))."""
    if B <= d - 1:
        raise DomainError(f"Wishart degrees of freedom must exceed d - 1 = {d - 1}, got {B}")
    i = np.arange(1, d + 1)
    return float(-np.log(B) + digamma(B - (d - i)).mean())


def sample_wishart(mu: HpdMatrix, B: int, n: int, seed: int | RngSeed,
                   stream: tuple[int, ...] = ()) -> HpdSample:
    """Complex Wishart draws W = sum_b v_b v_b* with v_b ~ CN(0, mu / B), so E[W] = mu."""
    d = mu.dim
    if int(B) != B or B <= d - 1:
        raise DomainError(f"Wishart degrees of freedom must be an integer > d - 1 = {d - 1}, got {B}")
    B, n = int(B), _check_n(n)
    rng = make_rng(seed, *stream)
    chol = np.linalg.cholesky(mu.data / B)
    g = (rng.standard_normal((n, d, B)) + 1j * rng.standard_normal((n, d, B))) / np.sqrt(2.0)
    v = chol @ g
    return HpdSample(hermitian_part(v @ np.conj(np.swapaxes(v, -1, -2))))


def sample_wishart_rescaled(mu: HpdMatrix, B: int, n: int, seed: int | RngSeed,
                            stream: tuple[int, ...] = ()) -> HpdSample:
    """Bias-corrected complex Wishart e^{-c(d, B)} W with intrinsic mean mu."""
    c = wishart_bias_correction(mu.dim, B)
    raw = sample_wishart(mu, B, n, seed, stream)
    return HpdSample(np.exp(-c) * raw.obs)


# ---------------------------------------------------------------------------
# Curves and synthetic covariance data
# ---------------------------------------------------------------------------

def sample_lognormal_curves(n: int, grid, d: int, sigma: float, seed: int | RngSeed,
                            trend_end: HpdMatrix | None = None,
                            stream: tuple[int, ...] = ()) -> HpdCurveSample:
    """Curves around the geodesic trend Id -> trend_end with smooth log-normal noise.

    Curve i is x_i(t) = mu(t)^{1/2} Exp(H_i(t)) mu(t)^{1/2}, where H_i(t)
    interpolates linearly between two iid Gaussian tangent draws, so the
    pointwise intrinsic mean of the population is mu(t).
    """
    if not sigma > 0:
        raise DomainError(f"sigma must be > 0, got {sigma}")
    n = _check_n(n)
    g = np.asarray(grid, dtype=float)
    if g.ndim != 1 or g.size < 1:
        raise DomainError("grid must be a non-empty 1-D sequence")
    if trend_end is None:
        trend_end = HpdMatrix(np.diag(np.exp(np.linspace(0.5, -0.5, d))))
    identity = HpdMatrix.identity(d)
    rng = make_rng(seed, *stream)
    start = rng.normal(0.0, sigma, size=(n, d * d))
    end = rng.normal(0.0, sigma, size=(n, d * d))
    span = g[-1] - g[0]
    curves = np.empty((n, g.size, d, d), dtype=np.complex128)
    for k, t in enumerate(g):
        s = 0.0 if span == 0 else (t - g[0]) / span
        mu_t = geodesic(identity, trend_end, s)
        curves[:, k] = _tangent_to_sample(mu_t, (1.0 - s) * start + s * end, True)
    return HpdCurveSample(g, curves)


def toeplitz_covariance(d: int, rho: float) -> np.ndarray:
    idx = np.arange(d)
    return rho ** np.abs(idx[:, None] - idx[None, :])


def synthetic_centre_covariances(n_centres: int, d: int, n_per_centre: int, n_outlying: int,
                                 seed: int | RngSeed, rho: float = 0.5,
                                 outlier_scale: float = 4.0) -> tuple[HpdSample, list[int]]:
    """Sample covariance matrices of multivariate normal data from several centres.

    The last ``n_outlying`` centres draw their data from a covariance with
    inflated variances and reversed correlation; their indices are returned.
    """
    if n_per_centre <= d:
        raise DomainError(f"each centre needs more than d = {d} records, got {n_per_centre}")
    if not 0 <= n_outlying < n_centres:
        raise DomainError(f"n_outlying must lie in [0, {n_centres}), got {n_outlying}")
    rng = make_rng(seed)
    base = toeplitz_covariance(d, rho)
    scales = np.linspace(1.0, outlier_scale, d)
    outlying = np.diag(scales) @ toeplitz_covariance(d, -rho) @ np.diag(scales)
    covs = []
    for c in range(n_centres):
        sigma = outlying if c >= n_centres - n_outlying else base
        records = rng.multivariate_normal(np.zeros(d), sigma, size=n_per_centre)
        covs.append(np.cov(records, rowvar=False).reshape(d, d))
    outliers = list(range(n_centres - n_outlying, n_centres))
    return HpdSample(np.array(covs)), outliers


def random_unit_direction(d: int, rng: np.random.Generator,
                          complex_valued: bool = True) -> np.ndarray:
    """Uniform unit tangent direction at the identity, as a Hermitian array."""
    c = rng.standard_normal(d * d)
    if not complex_valued:
        c[d + 1::2] = 0.0
    h = coordinates_to_stack(c / np.linalg.norm(c), d)
    return h
