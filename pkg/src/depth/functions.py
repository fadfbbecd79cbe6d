"""Intrinsic depth functions of HPD matrices with respect to a finite sample.

The empirical measure of the sample stands in for the distribution, and
in-sample depths count the observation itself.  All four depths are
evaluated in the whitened frame at the query point y, where the tangent
vectors Log_y(x_i) become Log(y^{-1/2} x_i y^{-1/2}); this makes every
depth invariant under congruence of the sample and the query together.

- zonoid: Euclidean zonoid depth of the origin in the basis coordinates of
  the whitened logarithms (requires n > d^2)
- gdd: exp(-mean distance)
- spatial: 1 - || mean unit tangent vector ||
- izonoid / igdd: the pointwise depths of curve samples averaged over the
  grid with the trapezoid rule and normalized by the grid length
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import trapezoid

from src.config import parallel_map
from src.errors import DomainError
from src.geometry.hermitian import HpdMatrix, coordinates_stack
from src.geometry.manifold import whitened_logs
from src.schema.models import DepthMethod, HpdCurveSample, HpdSample
from .lp import ZonoidLp, zonoid_alpha

EPS_SPATIAL = 1e-12        # tangent terms shorter than this are dropped


def grid_average(values, grid) -> float:
    """Trapezoid average of ``values`` over ``grid``; a single grid point returns the value."""
    v = np.asarray(values, dtype=float)
    g = np.asarray(grid, dtype=float)
    if v.shape != g.shape:
        raise DomainError(f"{v.size} values for a grid of {g.size} points")
    if g.size == 1:
        return float(v[0])
    return float(trapezoid(v, g) / (g[-1] - g[0]))


def _check_zonoid_size(n: int, d: int) -> None:
    if n <= d * d:
        raise DomainError(f"zonoid requires n > d^2 (n={n}, d^2={d * d})")


# ---------------------------------------------------------------------------
# Depth of a single query
# ---------------------------------------------------------------------------

def zonoid_depth(sample: HpdSample, y: HpdMatrix) -> float:
    """Intrinsic zonoid depth of y with respect to the sample, in [0, 1]."""
    sample.check_dim(y)
    _check_zonoid_size(sample.n, sample.dim)
    logs, _ = whitened_logs(y, sample.obs)
    return zonoid_alpha(ZonoidLp(coordinates_stack(logs)))


def gdd(sample: HpdSample, y: HpdMatrix) -> float:
    """Geodesic distance depth exp(-(1/n) sum_i dist(y, x_i)), in (0, 1]."""
    return float(np.exp(-sample.distances_to(y).mean()))


def spatial_depth(sample: HpdSample, y: HpdMatrix) -> float:
    """Intrinsic spatial depth 1 - ||(1/n) sum_i Log_y(x_i) / dist(y, x_i)||, in [0, 1]."""
    sample.check_dim(y)
    logs, d = whitened_logs(y, sample.obs)
    keep = d >= EPS_SPATIAL
    if not keep.any():
        return 1.0
    mean_unit = np.einsum("i,ijk->jk", 1.0 / d[keep], logs[keep]) / sample.n
    return float(np.clip(1.0 - np.linalg.norm(mean_unit), 0.0, 1.0))


def integrated_zonoid_depth(curves: HpdCurveSample, y) -> float:
    """Grid-averaged pointwise zonoid depth of the query curve y."""
    y = curves.check_curve(y)
    _check_zonoid_size(curves.n, curves.dim)
    values = [zonoid_depth(curves.at(k), HpdMatrix._wrap(y[k])) for k in range(curves.T)]
    return grid_average(values, curves.grid)


def integrated_gdd(curves: HpdCurveSample, y) -> float:
    """exp of minus the grid-averaged mean distance of the query curve y."""
    y = curves.check_curve(y)
    mean_dist = [curves.at(k).distances_to(HpdMatrix._wrap(y[k])).mean()
                 for k in range(curves.T)]
    return float(np.exp(-grid_average(mean_dist, curves.grid)))


_POINT_DEPTHS = {
    DepthMethod.ZONOID: zonoid_depth,
    DepthMethod.GDD: gdd,
    DepthMethod.SPATIAL: spatial_depth,
}

_CURVE_DEPTHS = {
    DepthMethod.IZONOID: integrated_zonoid_depth,
    DepthMethod.IGDD: integrated_gdd,
}


def _check_method(sample, method: DepthMethod) -> None:
    if isinstance(sample, HpdCurveSample) != method.integrated:
        kind = "curve" if isinstance(sample, HpdCurveSample) else "matrix"
        raise DomainError(f"method {method.value!r} does not apply to a {kind} sample")


def depth(sample: HpdSample | HpdCurveSample, y, method: DepthMethod) -> float:
    """Depth of a query (matrix or curve) by the named method."""
    method = DepthMethod(method)
    _check_method(sample, method)
    if method.integrated:
        return _CURVE_DEPTHS[method](sample, y)
    return _POINT_DEPTHS[method](sample, y)


# ---------------------------------------------------------------------------
# In-sample depth vectors
# ---------------------------------------------------------------------------

def gdd_values(sample: HpdSample) -> np.ndarray:
    """gdd of every observation, from the cached distance matrix."""
    return np.exp(-sample.distance_matrix().mean(axis=1))


def zonoid_values(sample: HpdSample, threads: int = 1) -> np.ndarray:
    _check_zonoid_size(sample.n, sample.dim)
    return np.array(parallel_map(lambda i: zonoid_depth(sample, sample[i]),
                                 range(sample.n), threads))


def spatial_values(sample: HpdSample, threads: int = 1) -> np.ndarray:
    return np.array(parallel_map(lambda i: spatial_depth(sample, sample[i]),
                                 range(sample.n), threads))


def izonoid_values(curves: HpdCurveSample, threads: int = 1) -> np.ndarray:
    _check_zonoid_size(curves.n, curves.dim)
    slices = parallel_map(lambda k: zonoid_values(curves.at(k)), range(curves.T), threads)
    pointwise = np.column_stack(slices)                      # (n, T)
    return np.array([grid_average(row, curves.grid) for row in pointwise])


def igdd_values(curves: HpdCurveSample, threads: int = 1) -> np.ndarray:
    slices = parallel_map(lambda k: curves.at(k).distance_matrix().mean(axis=1),
                          range(curves.T), threads)
    pointwise = np.column_stack(slices)
    return np.exp(-np.array([grid_average(row, curves.grid) for row in pointwise]))


def depth_values(sample: HpdSample | HpdCurveSample, method: DepthMethod,
                 threads: int = 1) -> np.ndarray:
    """In-sample depths of every observation w.r.t. the full empirical distribution."""
    method = DepthMethod(method)
    _check_method(sample, method)
    if method is DepthMethod.GDD:
        return gdd_values(sample)
    if method is DepthMethod.ZONOID:
        return zonoid_values(sample, threads)
    if method is DepthMethod.SPATIAL:
        return spatial_values(sample, threads)
    if method is DepthMethod.IZONOID:
        return izonoid_values(sample, threads)
    return igdd_values(sample, threads)
