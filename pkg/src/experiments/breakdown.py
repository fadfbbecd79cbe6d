"""Breakdown experiments: how far contamination can carry ranked observations and centers.

A clean log-normal sample X of size n around the identity is joined by m
contaminating observations Y.  The ranking of Z = X u Y breaks down when one
of its first n ranked observations is carried past ``threshold`` in
Frobenius norm.

Scenarios
---------
far          m copies of one contaminant y with ||y||_F = contamination_norm
adversarial  two contaminants: a scalar matrix y1 = e^c Id large enough to
             drag the intrinsic mean of X u {y1} past contamination_norm,
             and y2 = that mean.  Adding y2 leaves the mean in place, so y2
             is the unique zonoid-deepest observation of Z.

Norms of matrices as large as e^c are evaluated from eigenvalues with an
overflow-safe norm.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy.optimize import brentq
from scipy.special import logsumexp

from src.depth.functions import depth_values
from src.depth.ranking import rank
from src.errors import DomainError
from src.estimation.centers import fit_mean, fit_median
from src.geometry.hermitian import (
    EXP_OVERFLOW,
    HpdMatrix,
    eigh_stack,
    scaled_norm,
)
from src.sampling.generators import make_rng, random_unit_direction, sample_lognormal
from src.schema.models import DepthMethod, HpdSample, SolverConfig, TiePolicy

CLEAN_SIGMA = float(np.sqrt(0.5))
DIRECTIONS = ("identity", "e1", "random")
SCENARIOS = ("far", "adversarial")


def frobenius_norms(obs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(||z||_F, ||Log z||_F) for each matrix in an HPD stack."""
    lam, _ = eigh_stack(obs)
    return scaled_norm(lam, axis=-1), np.sqrt(np.sum(np.log(lam) ** 2, axis=-1))


def contaminant(d: int, contamination_norm: float, direction: str = "identity",
                rng: np.random.Generator | None = None) -> HpdMatrix:
    """exp(s h) for a unit direction h, with s chosen so ||exp(s h)||_F = contamination_norm."""
    if direction not in DIRECTIONS:
        raise DomainError(f"unknown contaminant direction {direction!r}; use one of {DIRECTIONS}")
    if not contamination_norm > np.sqrt(d):
        raise DomainError(f"contamination_norm must exceed sqrt(d) = {np.sqrt(d):.4g}")
    if direction == "identity":
        h = np.eye(d) / np.sqrt(d)
    elif direction == "e1":
        h = np.zeros((d, d))
        h[0, 0] = 1.0
    else:
        h = random_unit_direction(d, rng if rng is not None else make_rng(0))
    eta, vec = eigh_stack(h.astype(np.complex128))
    if eta[-1] <= 0:
        eta, vec = -eta[::-1], vec[:, ::-1]
    target = np.log(contamination_norm)

    def excess(s: float) -> float:
        return 0.5 * logsumexp(2.0 * s * eta) - target

    s = brentq(excess, 0.0, target / eta[-1] + 1.0, xtol=1e-14)
    return HpdMatrix((vec * np.exp(s * eta)) @ vec.conj().T)


def adversarial_scale(sample: HpdSample, contamination_norm: float) -> float:
    """c such that the intrinsic mean of X u {e^c Id} has det^{1/d} > contamination_norm.

    The determinant of the intrinsic mean is the geometric mean of the
    determinants, so log det(mean)/d = (sum_i log det x_i / d + c) / (n + 1).
    """
    lam, _ = eigh_stack(sample.obs)
    mean_logdet = np.log(lam).sum() / sample.dim
    c = (sample.n + 1) * np.log(contamination_norm) - mean_logdet + 1.0
    if c >= EXP_OVERFLOW:
        raise DomainError(
            f"adversarial contaminant e^{c:.1f} overflows; lower n or contamination_norm")
    return float(c)


@dataclass
class BreakdownRow:
    method: str
    tie_policy: str
    scenario: str
    max_norm: float               # max ||z||_F over the first n ranks
    max_log_norm: float           # max ||Log z||_F over the first n ranks
    rank1_norm: float
    broken: bool
    contaminant_ranks: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "tie_policy": self.tie_policy,
            "scenario": self.scenario,
            "max_norm": self.max_norm,
            "max_log_norm": self.max_log_norm,
            "rank1_norm": self.rank1_norm,
            "broken": self.broken,
            "contaminant_ranks": self.contaminant_ranks,
        }


@dataclass
class BreakdownReport:
    n: int
    m: int
    d: int
    contamination_norm: float
    threshold: float
    clean_max_norm: float
    rows: list[BreakdownRow]

    def row(self, method: str, tie_policy: str, scenario: str = "far") -> BreakdownRow:
        for r in self.rows:
            if (r.method, r.tie_policy, r.scenario) == (method, tie_policy, scenario):
                return r
        raise KeyError((method, tie_policy, scenario))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([{k: v for k, v in r.to_dict().items() if k != "contaminant_ranks"}
                             for r in self.rows])

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "d": self.d,
            "contamination_norm": self.contamination_norm,
            "threshold": self.threshold,
            "clean_max_norm": self.clean_max_norm,
            "rows": [r.to_dict() for r in self.rows],
        }


def _score(z: HpdSample, n: int, method: DepthMethod, tie_policy: TiePolicy,
           scenario: str, threshold: float, values: np.ndarray) -> BreakdownRow:
    report = rank(z, method, tie_policy, values=values)
    norms, log_norms = frobenius_norms(z.obs)
    first = report.ranks <= n
    deepest = report.order()[0]
    max_norm = float(norms[first].max())
    return BreakdownRow(
        method=method.value,
        tie_policy=tie_policy.value,
        scenario=scenario,
        max_norm=max_norm,
        max_log_norm=float(log_norms[first].max()),
        rank1_norm=float(norms[deepest]),
        broken=max_norm > threshold,
        contaminant_ranks=sorted(int(r) for r in report.ranks[n:]),
    )


def breakdown_rank_experiment(n: int = 50, m: int = 25, d: int = 2,
                              contamination_norm: float = 1e4, seed: int = 1,
                              methods=(DepthMethod.ZONOID, DepthMethod.GDD),
                              tie_policies=(TiePolicy.SHARED, TiePolicy.FROBENIUS),
                              scenarios=SCENARIOS, direction: str = "identity",
                              threshold: float = 1e3, cfg: SolverConfig | None = None,
                              threads: int = 1) -> BreakdownReport:
    """Rank a contaminated sample under every method, tie policy and scenario."""
    if m < 0:
        raise DomainError(f"m must be >= 0, got {m}")
    clean = sample_lognormal(HpdMatrix.identity(d), CLEAN_SIGMA, n, seed, stream=(0,))
    clean_norms, _ = frobenius_norms(clean.obs)
    rows: list[BreakdownRow] = []
    for scenario in scenarios:
        if scenario == "far":
            y = contaminant(d, contamination_norm, direction, make_rng(seed, 1))
            z = HpdSample(np.concatenate([clean.obs, np.repeat(y.data[None], m, axis=0)]),
                          _validated=True)
        elif scenario == "adversarial":
            c = adversarial_scale(clean, contamination_norm)
            y1 = HpdMatrix.scalar(np.exp(c), d)
            y2 = fit_mean(clean.append(y1), cfg=cfg).point
            z = clean.append(y1).append(y2)
        else:
            raise DomainError(f"unknown scenario {scenario!r}; use one of {SCENARIOS}")
        for method in map(DepthMethod, methods):
            values = depth_values(z, method, threads)
            for policy in map(TiePolicy, tie_policies):
                rows.append(_score(z, n, method, policy, scenario, threshold, values))
    return BreakdownReport(n=n, m=m, d=d, contamination_norm=float(contamination_norm),
                           threshold=float(threshold), clean_max_norm=float(clean_norms.max()),
                           rows=rows)


# ---------------------------------------------------------------------------
# Depth-median breakdown
# ---------------------------------------------------------------------------

@dataclass
class MedianBreakdownRow:
    m: int
    mean_norm: float
    mean_log_norm: float
    median_norm: float
    median_log_norm: float
    mean_broken: bool
    median_broken: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def median_breakdown_experiment(n: int = 50, max_m: int = 5, d: int = 2,
                                contamination_norm: float = 1e4, seed: int = 1,
                                threshold: float = 1e3,
                                cfg: SolverConfig | None = None) -> pd.DataFrame:
    """Norms of the zonoid depth-median (intrinsic mean) and gdd depth-median
    (intrinsic median) after adding m = 0..max_m copies of the adversarial
    scalar contaminant.

    The mean is carried past ``threshold`` by a single copy; the median stays
    with the clean data while m < n.
    """
    if max_m < 0:
        raise DomainError(f"max_m must be >= 0, got {max_m}")
    clean = sample_lognormal(HpdMatrix.identity(d), CLEAN_SIGMA, n, seed, stream=(0,))
    y = HpdMatrix.scalar(np.exp(adversarial_scale(clean, contamination_norm)), d)
    rows = []
    z = clean
    for m in range(max_m + 1):
        if m:
            z = z.append(y)
        mean = fit_mean(z, cfg=cfg).point
        median = fit_median(z, cfg=cfg).point
        norms, log_norms = frobenius_norms(np.stack([mean.data, median.data]))
        rows.append(MedianBreakdownRow(
            m=m,
            mean_norm=float(norms[0]),
            mean_log_norm=float(log_norms[0]),
            median_norm=float(norms[1]),
            median_log_norm=float(log_norms[1]),
            mean_broken=bool(norms[0] > threshold),
            median_broken=bool(norms[1] > threshold),
        ).to_dict())
    return pd.DataFrame(rows)
