"""Data models shared by the depth, estimation, inference and CLI layers.

Defines the sample containers (``HpdSample``, ``HpdCurveSample``), the
solver configuration, the depth method / tie policy enums and the result
types produced by ranking (``DepthReport``, ``DepthRegion``).  Every model
round-trips through ``to_dict`` / ``from_dict`` so it can be written to the
JSON sample and report files.

Indices of observations are 0-based throughout; ranks are 1-based with
rank 1 the deepest observation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterator, Sequence

import numpy as np

from src.errors import DomainError
from src.geometry.hermitian import (
    EPS_PD,
    HERMITIAN_TOL,
    HpdMatrix,
    check_congruence_matrix,
    eigh_stack,
    hermitian_part,
)
from src.geometry.manifold import distances_from, pairwise_distances


# ---------------------------------------------------------------------------
# Enums
# ---------------------------------------------------------------------------

class DepthMethod(Enum):
    """Which intrinsic depth function to evaluate."""
    ZONOID = "zonoid"        # intrinsic zonoid depth
    GDD = "gdd"              # geodesic distance depth
    SPATIAL = "spatial"      # intrinsic spatial depth
    IZONOID = "izonoid"      # integrated zonoid depth (curves)
    IGDD = "igdd"            # integrated geodesic distance depth (curves)

    @property
    def integrated(self) -> bool:
        return self in (DepthMethod.IZONOID, DepthMethod.IGDD)


class TiePolicy(Enum):
    """How observations with equal depth are ranked."""
    SHARED = "shared"        # equal depths share the smallest rank (1, 2, 2, 4)
    FROBENIUS = "frobenius"  # ties ordered by ascending ||Log(x)||_F


# ---------------------------------------------------------------------------
# Solver configuration
# ---------------------------------------------------------------------------

@dataclass
class SolverConfig:
    """Stopping rule and step size for the intrinsic mean / median solvers."""
    max_iter: int = 200
    tol: float = 1e-10       # threshold on the tangent-update norm
    step: float = 1.0        # initial step, halved when the objective increases

    def __post_init__(self):
        if int(self.max_iter) < 1:
            raise DomainError(f"max_iter must be >= 1, got {self.max_iter}")
        if not self.tol > 0:
            raise DomainError(f"tol must be > 0, got {self.tol}")
        if not self.step > 0:
            raise DomainError(f"step must be > 0, got {self.step}")
        self.max_iter = int(self.max_iter)

    def to_dict(self) -> dict:
        return {"max_iter": self.max_iter, "tol": self.tol, "step": self.step}

    @classmethod
    def from_dict(cls, d: dict) -> "SolverConfig":
        return cls(
            max_iter=d.get("max_iter", 200),
            tol=d.get("tol", 1e-10),
            step=d.get("step", 1.0),
        )


# ---------------------------------------------------------------------------
# Validation helpers
# ---------------------------------------------------------------------------

def _validate_stack(obs: np.ndarray) -> np.ndarray:
    """Check a (..., d, d) stack is Hermitian positive definite, return a copy."""
    a = np.array(obs, dtype=np.complex128)
    if a.ndim < 3 or a.shape[-1] != a.shape[-2] or a.shape[-1] == 0:
        raise DomainError(f"expected a stack of square matrices, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError("observations contain non-finite entries")
    asym = np.abs(a - np.conj(np.swapaxes(a, -1, -2))).max(axis=(-1, -2))
    scale = np.maximum(1.0, np.abs(a).max(axis=(-1, -2)))
    bad = np.flatnonzero((asym > HERMITIAN_TOL * scale).ravel())
    if bad.size:
        raise DomainError(f"observation {int(bad[0])} is not Hermitian")
    a = hermitian_part(a)
    lam, _ = eigh_stack(a)
    bad = np.flatnonzero(((lam[..., -1] <= 0) | (lam[..., 0] <= EPS_PD * lam[..., -1])).ravel())
    if bad.size:
        raise DomainError(f"observation {int(bad[0])} is not positive definite")
    a.setflags(write=False)
    return a


def _pack_lower(full: np.ndarray) -> np.ndarray:
    n = full.shape[0]
    i, j = np.tril_indices(n, -1)
    return full[i, j].copy()


def _unpack_lower(packed: np.ndarray, n: int) -> np.ndarray:
    full = np.zeros((n, n))
    i, j = np.tril_indices(n, -1)
    full[i, j] = packed
    full[j, i] = packed
    return full


# ---------------------------------------------------------------------------
# HpdSample
# ---------------------------------------------------------------------------

class HpdSample:
    """Ordered sample of n HPD matrices of a common dimension d.

    The observations are stored as one read-only ``(n, d, d)`` array.  The
    pairwise distance matrix is built on first use and kept as a packed
    lower triangle (row i holds the distances to observations 0..i-1), so
    ``append`` only has to compute the new row.
    """

    def __init__(self, obs, dist_cache: np.ndarray | None = None,
                 _validated: bool = False):
        if isinstance(obs, (list, tuple)) and obs and isinstance(obs[0], HpdMatrix):
            obs = np.stack([o.data for o in obs])
            _validated = True
        self._obs = obs if _validated else _validate_stack(obs)
        if self._obs.ndim != 3:
            raise DomainError(f"expected (n, d, d) observations, got shape {self._obs.shape}")
        if self._obs.shape[0] < 1:
            raise DomainError("a sample needs at least one observation")
        self._packed = None
        if dist_cache is not None:
            self._packed = self._coerce_cache(np.asarray(dist_cache, dtype=float))

    def _coerce_cache(self, cache: np.ndarray) -> np.ndarray:
        n = self.n
        if cache.ndim == 2:
            if cache.shape != (n, n):
                raise DomainError(f"distance cache must be {n}x{n}, got {cache.shape}")
            if np.any(np.diag(cache) != 0) or not np.allclose(cache, cache.T):
                raise DomainError("distance cache must be symmetric with zero diagonal")
            cache = _pack_lower(cache)
        if cache.shape != (n * (n - 1) // 2,):
            raise DomainError("packed distance cache has the wrong length")
        if np.any(cache < 0):
            raise DomainError("distance cache has negative entries")
        return cache

    @classmethod
    def from_matrices(cls, mats: Sequence[HpdMatrix]) -> "HpdSample":
        if not mats:
            raise DomainError("a sample needs at least one observation")
        dims = {m.dim for m in mats}
        if len(dims) != 1:
            raise DomainError(f"observations have mixed dimensions {sorted(dims)}")
        return cls(np.stack([m.data for m in mats]), _validated=True)

    # -- shape ------------------------------------------------------------

    @property
    def obs(self) -> np.ndarray:
        return self._obs

    @property
    def n(self) -> int:
        return self._obs.shape[0]

    @property
    def dim(self) -> int:
        return self._obs.shape[1]

    @property
    def is_real(self) -> bool:
        return bool(np.all(self._obs.imag == 0))

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> HpdMatrix:
        return HpdMatrix._wrap(self._obs[i])

    def __iter__(self) -> Iterator[HpdMatrix]:
        for i in range(self.n):
            yield self[i]

    def check_dim(self, x: HpdMatrix) -> None:
        if x.dim != self.dim:
            raise DomainError(f"dimension mismatch: sample has d={self.dim}, query has d={x.dim}")

    # -- distances --------------------------------------------------------

    @property
    def has_distance_cache(self) -> bool:
        return self._packed is not None

    def distance_matrix(self) -> np.ndarray:
        """Full n x n distance matrix, computed once and cached."""
        if self._packed is None:
            self._packed = _pack_lower(pairwise_distances(self._obs))
        return _unpack_lower(self._packed, self.n)

    def distances_to(self, y: HpdMatrix) -> np.ndarray:
        self.check_dim(y)
        return distances_from(y, self._obs)

    def append(self, x: HpdMatrix) -> "HpdSample":
        """New sample with x appended; an existing cache gains one row only."""
        self.check_dim(x)
        obs = np.concatenate([self._obs, x.data[None]])
        obs.setflags(write=False)
        out = HpdSample(obs, _validated=True)
        if self._packed is not None:
            out._packed = np.concatenate([self._packed, distances_from(x, self._obs)])
        return out

    def take(self, indices) -> "HpdSample":
        """Resample by index (repeats allowed), carrying the cache along."""
        idx = np.asarray(indices, dtype=int)
        obs = self._obs[idx]
        obs.setflags(write=False)
        out = HpdSample(obs, _validated=True)
        if self._packed is not None:
            full = _unpack_lower(self._packed, self.n)
            out._packed = _pack_lower(full[np.ix_(idx, idx)])
        return out

    def congruence(self, a) -> "HpdSample":
        """a* x a for every observation; distances are invariant so the cache is kept."""
        a = check_congruence_matrix(a, self.dim)
        obs = hermitian_part(a.conj().T @ self._obs @ a)
        out = HpdSample(obs)
        out._packed = None if self._packed is None else self._packed.copy()
        return out

    def log_norms(self) -> np.ndarray:
        """||Log(x_i)||_F for every observation."""
        lam, _ = eigh_stack(self._obs)
        return np.sqrt(np.sum(np.log(lam) ** 2, axis=-1))

    # -- serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        is_real = self.is_real
        observations = []
        for x in self._obs:
            entry: dict[str, Any] = {"re": x.real.tolist()}
            if not is_real:
                entry["im"] = x.imag.tolist()
            observations.append(entry)
        return {"dim": self.dim, "complex": not is_real, "observations": observations}

    @classmethod
    def from_dict(cls, d: dict) -> "HpdSample":
        obs = _matrices_from_entries(d["observations"], d.get("dim"))
        return cls(obs)

    def __repr__(self) -> str:
        return f"HpdSample(n={self.n}, dim={self.dim})"


def _matrices_from_entries(entries: list, dim: int | None) -> np.ndarray:
    if not entries:
        raise DomainError("no observations")
    mats = []
    for k, e in enumerate(entries):
        re = np.asarray(e["re"], dtype=float)
        im = np.asarray(e["im"], dtype=float) if e.get("im") is not None else np.zeros_like(re)
        if re.shape != im.shape:
            raise DomainError(f"observation {k}: 're' and 'im' shapes differ")
        if re.ndim != 2 or (dim is not None and re.shape != (dim, dim)):
            raise DomainError(f"observation {k}: expected a {dim}x{dim} matrix, got shape {re.shape}")
        mats.append(re + 1j * im)
    try:
        return np.stack(mats)
    except ValueError as exc:
        raise DomainError(f"observations have mixed shapes: {exc}") from exc


# ---------------------------------------------------------------------------
# HpdCurveSample
# ---------------------------------------------------------------------------

class HpdCurveSample:
    """n curves of HPD matrices observed on a common ascending grid of T indices."""

    def __init__(self, grid, curves, _validated: bool = False):
        g = np.asarray(grid, dtype=float)
        if g.ndim != 1 or g.size < 1:
            raise DomainError("grid must be a non-empty 1-D sequence")
        if g.size > 1 and np.any(np.diff(g) <= 0):
            raise DomainError("grid must be strictly ascending")
        c = curves if _validated else _validate_stack(curves)
        if c.ndim != 4 or c.shape[1] != g.size:
            raise DomainError(
                f"curves must have shape (n, {g.size}, d, d), got {np.shape(c)}")
        g.setflags(write=False)
        self._grid = g
        self._curves = c
        self._slices: dict[int, HpdSample] = {}

    @property
    def grid(self) -> np.ndarray:
        return self._grid

    @property
    def curves(self) -> np.ndarray:
        return self._curves

    @property
    def n(self) -> int:
        return self._curves.shape[0]

    @property
    def T(self) -> int:
        return self._grid.size

    @property
    def dim(self) -> int:
        return self._curves.shape[-1]

    def __len__(self) -> int:
        return self.n

    def at(self, k: int) -> HpdSample:
        """Cross-sectional sample at grid index k (cached)."""
        if k not in self._slices:
            obs = np.ascontiguousarray(self._curves[:, k])
            obs.setflags(write=False)
            self._slices[k] = HpdSample(obs, _validated=True)
        return self._slices[k]

    def curve(self, i: int) -> np.ndarray:
        return self._curves[i]

    def check_curve(self, y) -> np.ndarray:
        """Validate a query curve against the grid and return it as (T, d, d)."""
        if isinstance(y, (list, tuple)) and y and isinstance(y[0], HpdMatrix):
            y = np.stack([m.data for m in y])
        else:
            y = _validate_stack(y)
        if y.shape != (self.T, self.dim, self.dim):
            raise DomainError(
                f"query curve has shape {y.shape}, grid requires ({self.T}, {self.dim}, {self.dim})")
        return y

    def log_norms(self) -> np.ndarray:
        """Grid-averaged ||Log(x_i(t))||_F per curve (trapezoid rule)."""
        from src.depth.functions import grid_average

        lam, _ = eigh_stack(self._curves)
        norms = np.sqrt(np.sum(np.log(lam) ** 2, axis=-1))
        return np.array([grid_average(row, self._grid) for row in norms])

    def to_dict(self) -> dict:
        is_real = bool(np.all(self._curves.imag == 0))
        curves = []
        for c in self._curves:
            row = []
            for x in c:
                entry: dict[str, Any] = {"re": x.real.tolist()}
                if not is_real:
                    entry["im"] = x.imag.tolist()
                row.append(entry)
            curves.append(row)
        return {"dim": self.dim, "complex": not is_real,
                "grid": self._grid.tolist(), "observations": curves}

    @classmethod
    def from_dict(cls, d: dict) -> "HpdCurveSample":
        grid = d["grid"]
        rows = d["observations"]
        if not rows:
            raise DomainError("no curves")
        curves = []
        for i, row in enumerate(rows):
            if len(row) != len(grid):
                raise DomainError(f"curve {i} has {len(row)} points, grid has {len(grid)}")
            curves.append(_matrices_from_entries(row, d.get("dim")))
        return cls(grid, np.stack(curves))

    def __repr__(self) -> str:
        return f"HpdCurveSample(n={self.n}, T={self.T}, dim={self.dim})"


# ---------------------------------------------------------------------------
# Ranking results
# ---------------------------------------------------------------------------

@dataclass
class DepthReport:
    """Per-observation depths and center-outward ranks (1 = deepest)."""
    method: DepthMethod
    values: np.ndarray
    ranks: np.ndarray
    tie_policy: TiePolicy
    tie_groups: list[list[int]] = field(default_factory=list)  # indices sharing a depth

    def order(self) -> np.ndarray:
        """Observation indices from deepest to most outlying."""
        return np.lexsort((np.arange(len(self.ranks)), self.ranks))

    def to_dict(self) -> dict:
        return {
            "method": self.method.value,
            "tie_policy": self.tie_policy.value,
            "values": [float(v) for v in self.values],
            "ranks": [int(r) for r in self.ranks],
            "tie_groups": [list(map(int, g)) for g in self.tie_groups],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DepthReport":
        return cls(
            method=DepthMethod(d["method"]),
            values=np.asarray(d["values"], dtype=float),
            ranks=np.asarray(d["ranks"], dtype=int),
            tie_policy=TiePolicy(d["tie_policy"]),
            tie_groups=[list(g) for g in d.get("tie_groups", [])],
        )


@dataclass
class DepthRegion:
    """Central 100(1-alpha)% depth region of a sample."""
    alpha: float
    beta_star: float
    member_indices: list[int]

    @property
    def size(self) -> int:
        return len(self.member_indices)

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "level": 1.0 - self.alpha,
            "beta_star": self.beta_star,
            "member_indices": [int(i) for i in self.member_indices],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DepthRegion":
        return cls(alpha=d["alpha"], beta_star=d["beta_star"],
                   member_indices=list(d["member_indices"]))


DEFAULT_TIE_TOL = 1e-9       # relative tolerance under which depth values are tied


def required_count(alpha: float, n: int) -> int:
    """ceil((1 - alpha) n), guarded against floating-point overshoot."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    return max(1, min(n, math.ceil((1.0 - alpha) * n - 1e-9)))
