"""Center-outward ranking and central depth regions.

Depth values within ``tie_tol`` of each other (relative to max(1, |value|))
are treated as tied.  Under the shared policy tied observations share the
smallest rank of their group (competition ranking 1, 2, 2, 4); under the
Frobenius policy they are ordered by ascending ||Log(x)||_F, grid-averaged
for curves, and the ranks form a permutation of 1..n.
"""

from __future__ import annotations

import numpy as np

from src.schema.models import (
    DEFAULT_TIE_TOL,
    DepthMethod,
    DepthRegion,
    DepthReport,
    HpdCurveSample,
    HpdSample,
    TiePolicy,
    required_count,
)
from .functions import depth_values


def tie_groups(values: np.ndarray, tie_tol: float = DEFAULT_TIE_TOL) -> list[list[int]]:
    """Indices grouped by tied depth, deepest group first.

    Each group is anchored at its largest value, so a slow drift of
    near-equal values never chains into one group.
    """
    v = np.asarray(values, dtype=float)
    order = np.lexsort((np.arange(v.size), -v))
    groups: list[list[int]] = []
    anchor = None
    for i in order:
        if anchor is not None and anchor - v[i] <= tie_tol * max(1.0, abs(anchor)):
            groups[-1].append(int(i))
        else:
            groups.append([int(i)])
            anchor = v[i]
    return groups


def ranks_from_values(values: np.ndarray, tie_policy: TiePolicy = TiePolicy.SHARED,
                      log_norms: np.ndarray | None = None,
                      tie_tol: float = DEFAULT_TIE_TOL) -> tuple[np.ndarray, list[list[int]]]:
    """Ranks (1 = deepest) and the tie groups of size > 1."""
    tie_policy = TiePolicy(tie_policy)
    groups = tie_groups(values, tie_tol)
    ranks = np.zeros(len(values), dtype=int)
    start = 1
    for group in groups:
        if tie_policy is TiePolicy.SHARED or len(group) == 1:
            ranks[group] = start
        else:
            norms = np.asarray(log_norms)[group]
            ordered = [group[k] for k in np.lexsort((group, norms))]
            ranks[ordered] = np.arange(start, start + len(group))
        start += len(group)
    return ranks, [g for g in groups if len(g) > 1]


def rank(sample: HpdSample | HpdCurveSample, method: DepthMethod,
         tie_policy: TiePolicy = TiePolicy.SHARED, tie_tol: float = DEFAULT_TIE_TOL,
         threads: int = 1, values: np.ndarray | None = None) -> DepthReport:
    """Depth-rank every observation of the sample.

    ``values`` may carry precomputed in-sample depths for the same method.
    """
    method = DepthMethod(method)
    tie_policy = TiePolicy(tie_policy)
    if values is None:
        values = depth_values(sample, method, threads)
    norms = sample.log_norms() if tie_policy is TiePolicy.FROBENIUS else None
    ranks, groups = ranks_from_values(values, tie_policy, norms, tie_tol)
    return DepthReport(method=method, values=np.asarray(values, dtype=float),
                       ranks=ranks, tie_policy=tie_policy, tie_groups=groups)


def region_from_values(values: np.ndarray, alpha: float) -> DepthRegion:
    """Smallest depth cutoff keeping at least ceil((1 - alpha) n) observations."""
    v = np.asarray(values, dtype=float)
    k = required_count(alpha, v.size)
    beta_star = float(np.sort(v)[::-1][k - 1])
    members = np.flatnonzero(v >= beta_star).tolist()
    return DepthRegion(alpha=float(alpha), beta_star=beta_star, member_indices=members)


def depth_region(sample: HpdSample | HpdCurveSample, method: DepthMethod, alpha: float,
                 threads: int = 1) -> DepthRegion:
    """Central 100(1 - alpha)% depth region of the sample."""
    required_count(alpha, sample.n)
    return region_from_values(depth_values(sample, method, threads), alpha)
