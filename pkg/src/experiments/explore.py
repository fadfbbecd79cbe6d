"""Exploratory depth ranking of a covariance sample (radar-chart tables).

Ranks the observations, picks the k most central and k most outlying, and
tabulates the variances and correlations of those observations together
with the intrinsic mean and the elementwise envelope (min / max) of the
bootstrap confidence-region members.  Rendering is left to the caller.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from src.depth.ranking import rank
from src.estimation.centers import fit_mean
from src.inference.bootstrap import CR_METHODS, bootstrap_cr
from src.schema.models import DepthMethod, HpdSample, SolverConfig, TiePolicy


def feature_names(d: int) -> list[str]:
    names = [f"var_{i + 1}" for i in range(d)]
    names += [f"corr_{i + 1}{j + 1}" for i in range(d) for j in range(i + 1, d)]
    return names


def covariance_features(obs: np.ndarray) -> np.ndarray:
    """Variances and correlations of each covariance in a stack, shape (n, d + d(d-1)/2).

    Complex correlations are reported by modulus.
    """
    obs = np.asarray(obs)
    d = obs.shape[-1]
    var = np.real(np.diagonal(obs, axis1=-2, axis2=-1))
    iu, ju = np.triu_indices(d, 1)
    off = obs[..., iu, ju]
    off = off.real if np.all(off.imag == 0) else np.abs(off)
    corr = off / np.sqrt(var[..., iu] * var[..., ju])
    return np.concatenate([var, corr], axis=-1)


def _cell(v):
    if v is None or v is pd.NA:
        return None
    v = v.item() if hasattr(v, "item") else v
    return None if isinstance(v, float) and np.isnan(v) else v


@dataclass
class ExploreResult:
    method: DepthMethod
    central: list[int]
    outlying: list[int]
    depths: np.ndarray
    table: pd.DataFrame

    def to_dict(self) -> dict:
        return {
            "method": self.method.value,
            "central": [{"index": i, "depth": float(self.depths[i])} for i in self.central],
            "outlying": [{"index": i, "depth": float(self.depths[i])} for i in self.outlying],
            "table": [{k: _cell(v) for k, v in row.items()}
                      for row in self.table.to_dict(orient="records")],
        }


def explore_ranking(sample: HpdSample, method: DepthMethod = DepthMethod.GDD, k: int = 3,
                    alpha: float = 0.05, B: int = 200, seed: int = 1,
                    cfg: SolverConfig | None = None, threads: int = 1) -> ExploreResult:
    """Central / outlying observations and the radar-chart feature table."""
    method = DepthMethod(method)
    k = max(1, min(int(k), sample.n // 2 or 1))
    report = rank(sample, method, TiePolicy.FROBENIUS, threads=threads)
    order = report.order()
    central = [int(i) for i in order[:k]]
    outlying = [int(i) for i in order[::-1][:k]]

    names = feature_names(sample.dim)
    feats = covariance_features(sample.obs)
    rows = []
    for label, idx in [("central", central), ("outlying", outlying)]:
        for pos, i in enumerate(idx, start=1):
            rows.append({"label": f"{label}_{pos}", "index": i,
                         "depth": float(report.values[i]), **dict(zip(names, feats[i]))})

    mean = fit_mean(sample, cfg=cfg).point
    rows.append({"label": "mean", "index": None, "depth": None,
                 **dict(zip(names, covariance_features(mean.data[None])[0]))})
    cr_method = method if method in CR_METHODS else DepthMethod.GDD
    cr = bootstrap_cr(sample, B, alpha, cr_method, cfg, seed, threads, center=mean)
    member_feats = covariance_features(cr.means.obs[cr.member_indices])
    rows.append({"label": "cr_min", "index": None, "depth": None,
                 **dict(zip(names, member_feats.min(axis=0)))})
    rows.append({"label": "cr_max", "index": None, "depth": None,
                 **dict(zip(names, member_feats.max(axis=0)))})
    table = pd.DataFrame(rows)
    table["index"] = table["index"].astype("Int64")
    return ExploreResult(method, central, outlying, report.values, table)
