"""Intrinsic mean and median of an HpdSample under the affine-invariant metric.

Both solvers work in the whitened frame at the current iterate p: the
tangent vector Log_p(x) is represented by Log(p^{-1/2} x p^{-1/2}), whose
Frobenius norm is the Riemannian norm.  Residuals and step sizes are
therefore congruence invariant, and so are the returned centers.

Both start from the sample medoid (the observation with the smallest sum
of distances), take full steps and halve the step whenever the objective
would increase.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from src.errors import ConvergenceError, DomainError
from src.geometry.hermitian import HpdMatrix
from src.geometry.manifold import unwhiten_exp, whitened_logs
from src.schema.models import HpdSample, SolverConfig

EPS_MED = 1e-12            # observations closer than this coincide with the iterate
MIN_STEP = 1e-10           # step halving gives up below this
OBJECTIVE_SLACK = 1e-12    # relative increase tolerated as rounding noise


@dataclass
class CenterResult:
    """A computed center with its optimality residual."""
    point: HpdMatrix
    residual: float
    threshold: float
    iterations: int
    kind: str

    @property
    def converged(self) -> bool:
        return self.residual <= self.threshold

    def to_dict(self) -> dict:
        return {
            "type": self.kind,
            "matrix": self.point.to_dict(),
            "residual": self.residual,
            "threshold": self.threshold,
            "iterations": self.iterations,
        }


def _check_weights(weights, n: int) -> np.ndarray:
    if weights is None:
        return np.full(n, 1.0 / n)
    w = np.asarray(weights, dtype=float)
    if w.shape != (n,):
        raise DomainError(f"expected {n} weights, got shape {w.shape}")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise DomainError("weights must be finite and nonnegative")
    if abs(w.sum() - 1.0) > 1e-9:
        raise DomainError(f"weights must sum to 1, got {w.sum():.12g}")
    return w


def _medoid(sample: HpdSample, weights: np.ndarray) -> int:
    return int(np.argmin(sample.distance_matrix() @ weights))


def _mean_scale(sample: HpdSample) -> float:
    dm = sample.distance_matrix()
    n = sample.n
    return float(dm.sum() / (n * (n - 1))) if n > 1 else 0.0


# ---------------------------------------------------------------------------
# Mean
# ---------------------------------------------------------------------------

def mean_residual(sample: HpdSample, p: HpdMatrix, weights=None) -> float:
    """Riemannian norm of the weighted sum of Log_p(x_i) (zero at the mean)."""
    sample.check_dim(p)
    w = _check_weights(weights, sample.n)
    logs, _ = whitened_logs(p, sample.obs)
    return float(np.linalg.norm(np.einsum("i,ijk->jk", w, logs)))


def fit_mean(sample: HpdSample, weights=None,
             cfg: SolverConfig | None = None) -> CenterResult:
    """Karcher mean by Riemannian gradient descent, returning the residual too.

    Stops when ||sum_i w_i Log_mu(x_i)|| <= tol * (mean pairwise distance).
    """
    cfg = cfg or SolverConfig()
    w = _check_weights(weights, sample.n)
    start = _medoid(sample, w)
    p = sample[start]
    threshold = cfg.tol * _mean_scale(sample)
    if sample.n == 1 or threshold == 0.0:
        return CenterResult(p, 0.0, threshold, 0, "mean")

    obs = sample.obs
    logs, d = whitened_logs(p, obs)
    grad = np.einsum("i,ijk->jk", w, logs)
    f = float(w @ d ** 2)
    res = float(np.linalg.norm(grad))

    for it in range(cfg.max_iter):
        if res <= threshold:
            return CenterResult(p, res, threshold, it, "mean")
        t = cfg.step
        while True:
            cand = unwhiten_exp(p, t * grad)
            logs_c, d_c = whitened_logs(cand, obs)
            f_c = float(w @ d_c ** 2)
            if f_c <= f * (1.0 + OBJECTIVE_SLACK):
                break
            t *= 0.5
            if t < MIN_STEP:
                raise ConvergenceError(
                    f"intrinsic mean stalled (residual {res:.3e} > {threshold:.3e})",
                    iterate=p, residual=res, iterations=it)
        p, f = cand, f_c
        grad = np.einsum("i,ijk->jk", w, logs_c)
        res = float(np.linalg.norm(grad))

    if res <= threshold:
        return CenterResult(p, res, threshold, cfg.max_iter, "mean")
    raise ConvergenceError(
        f"intrinsic mean did not converge in {cfg.max_iter} iterations "
        f"(residual {res:.3e} > {threshold:.3e})",
        iterate=p, residual=res, iterations=cfg.max_iter)


def intrinsic_mean(sample: HpdSample, weights=None,
                   cfg: SolverConfig | None = None) -> HpdMatrix:
    """Intrinsic (Karcher) mean: the minimizer of sum_i w_i dist(p, x_i)^2."""
    return fit_mean(sample, weights, cfg).point


# ---------------------------------------------------------------------------
# Median
# ---------------------------------------------------------------------------

def _weiszfeld_terms(logs: np.ndarray, d: np.ndarray):
    near = d < EPS_MED
    inv = np.zeros_like(d)
    inv[~near] = 1.0 / d[~near]
    unit_sum = np.einsum("i,ijk->jk", inv, logs)   # sum of unit tangents
    return unit_sum, inv, int(near.sum())


def median_residual(sample: HpdSample, m: HpdMatrix) -> float:
    """Optimality residual max(0, ||sum_i Log_m(x_i)/d_i|| - eta) of the median.

    eta counts observations coinciding with m; the median sits at a data
    point exactly when the remaining unit tangents sum to at most eta.
    """
    sample.check_dim(m)
    logs, d = whitened_logs(m, sample.obs)
    unit_sum, _, eta = _weiszfeld_terms(logs, d)
    return max(0.0, float(np.linalg.norm(unit_sum)) - eta)


def fit_median(sample: HpdSample, cfg: SolverConfig | None = None) -> CenterResult:
    """Intrinsic (geometric) median by the manifold Weiszfeld iteration.

    Uses the Vardi-Zhang modification when the iterate coincides with
    observations, so medians located at a data point converge.  Stops when
    the residual is at most tol * n.
    """
    cfg = cfg or SolverConfig()
    n = sample.n
    p = sample[_medoid(sample, np.full(n, 1.0 / n))]
    threshold = cfg.tol * n
    obs = sample.obs

    logs, d = whitened_logs(p, obs)
    f = float(d.sum())
    for it in range(cfg.max_iter):
        unit_sum, inv, eta = _weiszfeld_terms(logs, d)
        r = float(np.linalg.norm(unit_sum))
        res = max(0.0, r - eta)
        if res <= threshold or eta == n:
            return CenterResult(p, res, threshold, it, "median")
        step_dir = unit_sum / inv.sum()
        if eta:
            step_dir *= max(0.0, 1.0 - eta / r)
        t = cfg.step
        while True:
            cand = unwhiten_exp(p, t * step_dir)
            logs_c, d_c = whitened_logs(cand, obs)
            f_c = float(d_c.sum())
            if f_c <= f * (1.0 + OBJECTIVE_SLACK):
                break
            t *= 0.5
            if t < MIN_STEP:
                raise ConvergenceError(
                    f"intrinsic median stalled (residual {res:.3e} > {threshold:.3e})",
                    iterate=p, residual=res, iterations=it)
        p, f, logs, d = cand, f_c, logs_c, d_c

    res = median_residual(sample, p)
    if res <= threshold:
        return CenterResult(p, res, threshold, cfg.max_iter, "median")
    raise ConvergenceError(
        f"intrinsic median did not converge in {cfg.max_iter} iterations "
        f"(residual {res:.3e} > {threshold:.3e})",
        iterate=p, residual=res, iterations=cfg.max_iter)


def intrinsic_median(sample: HpdSample, cfg: SolverConfig | None = None) -> HpdMatrix:
    """Intrinsic (geometric) median: the minimizer of sum_i dist(m, x_i)."""
    return fit_median(sample, cfg).point
