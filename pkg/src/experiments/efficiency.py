"""Relative efficiency of the zonoid depth-median against the gdd depth-median.

The deepest point of the intrinsic zonoid depth is the intrinsic mean and
that of the geodesic distance depth is the intrinsic median, so the study
compares the two estimators on p-generalized normal samples centred at the
identity:

    RE = E[dist(median, Id)^2] / E[dist(mean, Id)^2]

RE > 1 means the mean is the more efficient center.  The standard error of
the Monte-Carlo ratio comes from the delta method.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import product

import numpy as np
import pandas as pd

from src.config import parallel_map
from src.errors import ConvergenceError
from src.estimation.centers import fit_mean, fit_median
from src.geometry.hermitian import HpdMatrix
from src.sampling.generators import sample_pgnd
from src.schema.models import SolverConfig


@dataclass
class EfficiencyResult:
    d: int
    n: int
    p: float
    replications: int
    re: float
    se: float
    mse_mean: float
    mse_median: float
    failed: int = 0

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def ratio_standard_error(num: np.ndarray, den: np.ndarray) -> float:
    """Delta-method standard error of mean(num) / mean(den)."""
    k = num.size
    if k < 2:
        return float("nan")
    mx, my = den.mean(), num.mean()
    cov = np.cov(np.vstack([num, den]), ddof=1)
    var = (cov[0, 0] / mx ** 2 - 2 * my * cov[0, 1] / mx ** 3 + my ** 2 * cov[1, 1] / mx ** 4) / k
    return float(np.sqrt(max(var, 0.0)))


def efficiency_experiment(d: int = 2, n: int = 50, p: float = 5.0, replications: int = 500,
                          seed: int = 1, cfg: SolverConfig | None = None,
                          threads: int = 1) -> EfficiencyResult:
    """Monte-Carlo relative efficiency RE with its standard error."""
    identity = HpdMatrix.identity(d)

    def one(r: int):
        sample = sample_pgnd(identity, p, n, seed, stream=(r,))
        try:
            mean = fit_mean(sample, cfg=cfg).point
            median = fit_median(sample, cfg=cfg).point
        except ConvergenceError:
            return None
        return mean.log_norm() ** 2, median.log_norm() ** 2

    results = parallel_map(one, range(replications), threads)
    errors = np.array([r for r in results if r is not None])
    failed = replications - len(errors)
    if failed:
        warnings.warn(f"{failed} of {replications} replications failed to converge",
                      RuntimeWarning, stacklevel=2)
    if errors.size == 0:
        nan = float("nan")
        return EfficiencyResult(d, n, float(p), replications, nan, nan, nan, nan, failed)
    mse_mean, mse_median = errors[:, 0], errors[:, 1]
    return EfficiencyResult(
        d=d, n=n, p=float(p), replications=replications,
        re=float(mse_median.mean() / mse_mean.mean()),
        se=ratio_standard_error(mse_median, mse_mean),
        mse_mean=float(mse_mean.mean()),
        mse_median=float(mse_median.mean()),
        failed=failed,
    )


def efficiency_table(d_list, n_list, p_list, replications: int = 500, seed: int = 1,
                     cfg: SolverConfig | None = None, threads: int = 1) -> pd.DataFrame:
    """RE over a (d, n, p) grid as a flat table."""
    rows = [efficiency_experiment(d, n, p, replications, seed, cfg, threads).to_dict()
            for d, n, p in product(d_list, n_list, p_list)]
    return pd.DataFrame(rows)
