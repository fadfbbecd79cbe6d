"""Dense bounded-variable simplex for the zonoid depth linear program.

The empirical zonoid depth of a target t with respect to points p_1..p_n is

    sup{ alpha : sum_i lam_i (p_i - t) = 0, sum_i lam_i = 1, 0 <= lam_i <= 1/(n alpha) }.

Substituting u = lam / gamma with gamma = max_i lam_i gives the equivalent
program solved here:

    maximize   sum_i u_i
    subject to sum_i u_i (p_i - t) = 0,   0 <= u_i <= 1

whose optimum satisfies sum(u*) = 1 / gamma*, so the depth is sum(u*) / n.
u = 0 is always feasible: phase one starts from it with one artificial per
equation held at zero (bounds [0, 0]).  Equations that are linearly
dependent, including rows that are identically zero, keep their
artificial basic at zero for the whole solve.  An optimum of zero means
the target lies outside the convex hull of the points.

Pivoting follows Bland's rule for both the entering and the leaving
variable, with a pivot threshold of 1e-9 on the rescaled data.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from src.errors import DomainError, NumericalFailure

PIVOT_TOL = 1e-9
COST_TOL = 1e-9
ITER_FACTOR = 50


@dataclass(frozen=True, eq=False)
class ZonoidLp:
    """Point cloud (rows of an n x k matrix) and the target to locate in it."""
    points: np.ndarray
    target: np.ndarray | None = None

    def __post_init__(self):
        p = np.asarray(self.points, dtype=float)
        if p.ndim == 1:
            p = p[:, None]
        if p.ndim != 2 or p.shape[0] < 1 or p.shape[1] < 1:
            raise DomainError(f"points must be an n x k matrix with n >= 1, got shape {p.shape}")
        if not np.all(np.isfinite(p)):
            raise DomainError("points contain non-finite entries")
        t = np.zeros(p.shape[1]) if self.target is None else np.asarray(self.target, dtype=float)
        if t.shape != (p.shape[1],):
            raise DomainError(f"target must have length {p.shape[1]}, got shape {t.shape}")
        if not np.all(np.isfinite(t)):
            raise DomainError("target contains non-finite entries")
        object.__setattr__(self, "points", p)
        object.__setattr__(self, "target", t)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def k(self) -> int:
        return self.points.shape[1]

    def solve(self) -> "ZonoidSolution":
        return _BoundedSimplex(self.points - self.target).solve()


@dataclass
class ZonoidSolution:
    """Optimal scaled weights u* and the depth sum(u*)/n."""
    alpha: float
    weights: np.ndarray = field(repr=False)
    iterations: int = 0

    @property
    def inside_hull(self) -> bool:
        return self.alpha > 0.0

    @property
    def gamma(self) -> float:
        """Smallest achievable maximal weight; inf when the target is outside the hull."""
        total = float(self.weights.sum())
        return 1.0 / total if total > 0 else float("inf")


class _BoundedSimplex:
    """Tableau simplex for max sum(u) s.t. A u = 0, 0 <= u <= 1.

    Columns 0..n-1 are the weights, n..n+k-1 the artificials.  Nonbasic
    variables sit at one of their bounds; ``at_upper`` records which.
    """

    def __init__(self, shifted: np.ndarray):
        n, k = shifted.shape
        scale = float(np.max(np.abs(shifted)))
        a = shifted.T / scale if scale > 0 else shifted.T.copy()
        self.n, self.k = n, k
        self.tableau = np.hstack([a, np.eye(k)])
        self.upper = np.concatenate([np.ones(n), np.zeros(k)])
        self.cost = np.concatenate([np.ones(n), np.zeros(k)])
        self.x = np.zeros(n + k)
        self.basis = list(range(n, n + k))
        self.at_upper = np.zeros(n + k, dtype=bool)
        self.reduced = self.cost.copy()          # c - c_B T, c_B = 0 initially
        self.max_iter = ITER_FACTOR * (n + k)

    def _is_basic(self) -> np.ndarray:
        mask = np.zeros(self.n + self.k, dtype=bool)
        mask[self.basis] = True
        return mask

    def _pivot_col(self) -> tuple[int, int] | None:
        """Lowest-index improving nonbasic weight and its direction (+1 / -1)."""
        basic = self._is_basic()
        for j in range(self.n):
            if basic[j]:
                continue
            if not self.at_upper[j] and self.reduced[j] > COST_TOL:
                return j, 1
            if self.at_upper[j] and self.reduced[j] < -COST_TOL:
                return j, -1
        return None

    def _pivot_row(self, j: int, direction: int) -> tuple[int | None, float, bool]:
        """Ratio test: (leaving row or None for a bound flip, step, leaves at upper)."""
        col = direction * self.tableau[:, j]
        best_step = self.upper[j]                 # bound flip
        best_row, best_var, to_upper = None, None, False
        for r, var in enumerate(self.basis):
            a = col[r]
            if a > PIVOT_TOL:
                step = (self.x[var] - 0.0) / a
                hits_upper = False
            elif a < -PIVOT_TOL:
                step = (self.upper[var] - self.x[var]) / -a
                hits_upper = True
            else:
                continue
            step = max(step, 0.0)
            if step < best_step or (step == best_step and best_row is not None
                                    and var < best_var):
                best_step, best_row, best_var, to_upper = step, r, var, hits_upper
        return best_row, best_step, to_upper

    def _pivot(self, r: int, j: int) -> None:
        t = self.tableau
        t[r] /= t[r, j]
        others = np.arange(self.k) != r
        t[others] -= np.outer(t[others, j], t[r])
        self.reduced -= self.reduced[j] * t[r]
        self.basis[r] = j

    def solve(self) -> ZonoidSolution:
        for it in range(self.max_iter):
            entering = self._pivot_col()
            if entering is None:
                u = np.clip(self.x[:self.n], 0.0, 1.0)
                alpha = float(np.clip(u.sum() / self.n, 0.0, 1.0))
                return ZonoidSolution(alpha=alpha, weights=u, iterations=it)
            j, direction = entering
            r, step, to_upper = self._pivot_row(j, direction)
            delta = direction * step
            self.x[self.basis] -= delta * self.tableau[:, j]
            self.x[j] += delta
            if r is None:
                self.at_upper[j] = not self.at_upper[j]
                self.x[j] = self.upper[j] if self.at_upper[j] else 0.0
                continue
            leaving = self.basis[r]
            self.x[leaving] = self.upper[leaving] if to_upper else 0.0
            self.at_upper[leaving] = to_upper
            self.at_upper[j] = False
            self._pivot(r, j)
        raise NumericalFailure(
            f"zonoid LP hit the iteration cap ({self.max_iter}) without reaching an optimum")


def zonoid_alpha(lp: ZonoidLp) -> float:
    """Zonoid depth of ``lp.target`` in the cloud ``lp.points``, in [0, 1]."""
    return lp.solve().alpha
