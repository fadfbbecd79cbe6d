"""Coverage study of the percentile-bootstrap confidence regions.

Each simulation draws a p-generalized normal sample around the identity,
computes one set of bootstrap means and reuses it for every depth method
and confidence level, so the levels are nested within a simulation.
"""

from __future__ import annotations

import numpy as np
import pandas as pd

from src.config import parallel_map
from src.estimation.centers import fit_mean
from src.geometry.hermitian import HpdMatrix
from src.inference.bootstrap import bootstrap_means, cr_from_means
from src.sampling.generators import RngSeed, sample_pgnd
from src.schema.models import DepthMethod, SolverConfig

COVERAGE_COLUMNS = ["method", "alpha", "level", "ave_beta", "ave_size", "size_se",
                    "coverage", "simulations"]


def coverage_trials(d: int = 2, n: int = 100, p: float = 2.0, B: int = 500,
                    simulations: int = 200, alpha_list=(0.05, 0.2), seed: int = 1,
                    methods=(DepthMethod.ZONOID, DepthMethod.GDD),
                    cfg: SolverConfig | None = None, threads: int = 1) -> pd.DataFrame:
    """One row per (simulation, method, alpha): beta_star, size and whether Id is covered."""
    identity = HpdMatrix.identity(d)
    root = RngSeed(seed)
    alphas = [float(a) for a in alpha_list]

    def one(s: int) -> list[dict]:
        sample = sample_pgnd(identity, p, n, root, stream=(s,))
        boot_seed = root.derive(s, 1)
        means, failed = bootstrap_means(sample, B, boot_seed, cfg)
        center = fit_mean(sample, cfg=cfg).point
        rows = []
        for method in map(DepthMethod, methods):
            cr = cr_from_means(means, alphas[0], method, boot_seed, center, failed)
            for alpha in alphas:
                level = cr.at_level(alpha)
                rows.append({
                    "simulation": s,
                    "method": method.value,
                    "alpha": alpha,
                    "beta_star": level.beta_star,
                    "size": level.size,
                    "covered": level.contains(identity),
                })
        return rows

    trials = parallel_map(one, range(simulations), threads)
    return pd.DataFrame([row for rows in trials for row in rows])


def summarize_coverage(trials: pd.DataFrame) -> pd.DataFrame:
    grouped = trials.groupby(["method", "alpha"], sort=True)
    out = grouped.agg(
        ave_beta=("beta_star", "mean"),
        ave_size=("size", "mean"),
        size_sd=("size", "std"),
        coverage=("covered", "mean"),
        simulations=("covered", "size"),
    ).reset_index()
    out["size_se"] = out["size_sd"].fillna(0.0) / np.sqrt(out["simulations"])
    out["level"] = 1.0 - out["alpha"]
    return out[COVERAGE_COLUMNS]


def coverage_experiment(d: int = 2, n: int = 100, p: float = 2.0, B: int = 500,
                        simulations: int = 200, alpha_list=(0.05, 0.2), seed: int = 1,
                        methods=(DepthMethod.ZONOID, DepthMethod.GDD),
                        cfg: SolverConfig | None = None, threads: int = 1) -> pd.DataFrame:
    """Average beta_star, average size and empirical coverage of Id per (method, alpha)."""
    trials = coverage_trials(d, n, p, B, simulations, alpha_list, seed, methods, cfg, threads)
    return summarize_coverage(trials)
