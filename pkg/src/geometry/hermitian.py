"""Dense Hermitian matrix arithmetic.

Provides the two matrix types the rest of the package is built on
(``HermitianMatrix`` for tangent vectors, ``HpdMatrix`` for manifold points),
the Hermitian eigendecomposition, spectral calculus (log, exp, powers), the
canonical Frobenius-orthonormal basis of the real vector space of Hermitian
matrices, and congruence transformations.

Real symmetric input is the zero-imaginary special case; there is no separate
real code path.

Two layers are exposed:

- typed functions (``eigh``, ``matrix_function``, ``congruence``, ...) taking
  and returning the immutable matrix types;
- array helpers (``eigh_stack``, ``funm_stack``, ``coordinates_stack``) that
  operate on stacks of shape ``(..., d, d)`` and are used by the manifold,
  depth and estimation modules in their inner loops.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from src.errors import DomainError, NumericalFailure


# ---------------------------------------------------------------------------
# Tolerances
# ---------------------------------------------------------------------------

HERMITIAN_TOL = 1e-12        # relative asymmetry accepted before re-symmetrizing
EPS_PD = 1e-10               # smallest eigenvalue must exceed EPS_PD * largest
MAX_COND = 1e12              # congruence matrices must be better conditioned
EXP_OVERFLOW = 700.0         # exp of eigenvalues beyond this overflows downstream
JACOBI_SWEEPS_PER_DIM = 30


def _as_square(data, name: str = "matrix") -> np.ndarray:
    a = np.array(data, dtype=np.complex128)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise DomainError(f"{name} must be a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError(f"{name} has non-finite entries")
    return a


def hermitian_part(a: np.ndarray) -> np.ndarray:
    """Return (a + a*)/2 for a stack of square matrices."""
    return (a + np.conj(np.swapaxes(a, -1, -2))) / 2


def scaled_norm(values: np.ndarray, axis=None) -> np.ndarray:
    """Euclidean norm that does not overflow for entries near the float limit."""
    v = np.abs(values)
    scale = np.max(v, axis=axis, keepdims=True)
    safe = np.where(scale > 0, scale, 1.0)
    out = np.squeeze(safe, axis=axis) * np.sqrt(np.sum((v / safe) ** 2, axis=axis))
    return out


# ---------------------------------------------------------------------------
# Matrix types
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    """Immutable d x d complex Hermitian matrix.

    Construction checks Hermitian symmetry within a relative tolerance and
    stores the re-symmetrized matrix as a read-only complex array.
    """
    data: np.ndarray

    def __post_init__(self):
        a = _as_square(self.data, type(self).__name__)
        asym = np.max(np.abs(a - a.conj().T))
        if asym > HERMITIAN_TOL * max(1.0, float(np.max(np.abs(a)))):
            raise DomainError(f"matrix is not Hermitian (asymmetry {asym:.3e})")
        a = hermitian_part(a)
        a.setflags(write=False)
        object.__setattr__(self, "data", a)
        self._validate()

    def _validate(self) -> None:
        pass

    @classmethod
    def _wrap(cls, a: np.ndarray):
        """Wrap an array already known to be Hermitian, skipping validation."""
        obj = object.__new__(cls)
        a = hermitian_part(np.asarray(a, dtype=np.complex128))
        a.setflags(write=False)
        object.__setattr__(obj, "data", a)
        return obj

    @classmethod
    def zeros(cls, d: int) -> "HermitianMatrix":
        return HermitianMatrix._wrap(np.zeros((d, d), dtype=np.complex128))

    @classmethod
    def identity(cls, d: int):
        return cls(np.eye(d, dtype=np.complex128))

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.data.imag == 0))

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        _check_same_dim(self, other)
        return HermitianMatrix._wrap(self.data + other.data)

    def __sub__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        _check_same_dim(self, other)
        return HermitianMatrix._wrap(self.data - other.data)

    def __mul__(self, scalar: float) -> "HermitianMatrix":
        return HermitianMatrix._wrap(self.data * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "HermitianMatrix":
        return HermitianMatrix._wrap(-self.data)

    def frobenius_norm(self) -> float:
        return float(scaled_norm(self.data.ravel()))

    def frobenius_inner(self, other: "HermitianMatrix") -> float:
        """Re tr(self* other), the Frobenius inner product."""
        _check_same_dim(self, other)
        return float(np.vdot(self.data, other.data).real)

    def allclose(self, other: "HermitianMatrix", atol: float = 1e-10) -> bool:
        return self.dim == other.dim and bool(
            np.max(np.abs(self.data - other.data)) <= atol)

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        d = {"re": self.data.real.tolist()}
        if not self.is_real:
            d["im"] = self.data.imag.tolist()
        return d

    @classmethod
    def from_dict(cls, d: dict):
        re = np.asarray(d["re"], dtype=float)
        im = np.asarray(d.get("im", np.zeros_like(re)), dtype=float)
        if re.shape != im.shape:
            raise DomainError(f"'re' shape {re.shape} does not match 'im' shape {im.shape}")
        return cls(re + 1j * im)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dim={self.dim})"


@dataclass(frozen=True, eq=False)
class HpdMatrix(HermitianMatrix):
    """Hermitian positive definite matrix, a point on the manifold.

    The eigensystem computed by the positivity check is cached and reused by
    ``power``, ``sqrt``, ``inv_sqrt`` and ``log``.
    """

    def _validate(self) -> None:
        self._cache_eigensystem()
        lam = self._eigvals
        if lam[-1] <= 0 or lam[0] <= EPS_PD * lam[-1]:
            raise DomainError(
                f"matrix is not positive definite (eigenvalues {lam[0]:.3e} .. {lam[-1]:.3e})")

    def _cache_eigensystem(self) -> None:
        lam, vec = eigh_stack(self.data)
        object.__setattr__(self, "_eigvals", lam)
        object.__setattr__(self, "_eigvecs", vec)

    @classmethod
    def _wrap(cls, a: np.ndarray) -> "HpdMatrix":
        obj = super()._wrap(a)
        obj._cache_eigensystem()
        if obj._eigvals[0] <= 0:
            raise NumericalFailure("computed matrix lost positive definiteness")
        return obj

    @classmethod
    def scalar(cls, value: float, d: int) -> "HpdMatrix":
        return cls(value * np.eye(d))

    @property
    def base(self) -> HermitianMatrix:
        return HermitianMatrix._wrap(self.data)

    @property
    def eigenvalues(self) -> np.ndarray:
        return self._eigvals

    def power(self, alpha: float) -> np.ndarray:
        """Array of self**alpha via the cached eigensystem."""
        u = self._eigvecs
        return (u * self._eigvals ** alpha) @ u.conj().T

    def sqrt(self) -> np.ndarray:
        return self.power(0.5)

    def inv_sqrt(self) -> np.ndarray:
        return self.power(-0.5)

    def log(self) -> HermitianMatrix:
        u = self._eigvecs
        return HermitianMatrix._wrap((u * np.log(self._eigvals)) @ u.conj().T)

    def log_norm(self) -> float:
        """||Log(self)||_F, the distance to the identity."""
        return float(np.sqrt(np.sum(np.log(self._eigvals) ** 2)))

    def frobenius_norm(self) -> float:
        return float(scaled_norm(self._eigvals))


@dataclass(frozen=True, eq=False)
class Eigensystem:
    """Eigenvalues in ascending order with unitary eigenvectors as columns."""
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T


@dataclass(frozen=True, eq=False)
class BasisCoordinates:
    """Real coordinates of a Hermitian matrix in the canonical basis."""
    dim: int
    coords: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float)
        if c.shape != (self.dim * self.dim,):
            raise DomainError(f"expected {self.dim * self.dim} coordinates, got shape {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)


def _check_same_dim(*mats: HermitianMatrix) -> int:
    dims = {m.dim for m in mats}
    if len(dims) != 1:
        raise DomainError(f"dimension mismatch: {sorted(dims)}")
    return dims.pop()


# ---------------------------------------------------------------------------
# Eigendecomposition
# ---------------------------------------------------------------------------

def eigh_stack(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Batched LAPACK eigendecomposition of Hermitian matrices (ascending)."""
    try:
        lam, vec = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"Hermitian eigensolver failed: {exc}") from exc
    if not np.all(np.isfinite(lam)):
        raise NumericalFailure("Hermitian eigensolver returned non-finite eigenvalues")
    return lam, vec


def jacobi_eigh(a: np.ndarray, max_sweeps: int | None = None,
                eps: float = 1e-15) -> tuple[np.ndarray, np.ndarray, int]:
    """Cyclic Jacobi eigendecomposition of a complex Hermitian matrix.

    Each rotation first removes the phase of the pivot a_pq with a diagonal
    unitary, then applies the real rotation that annihilates it.

    Returns (eigenvalues ascending, eigenvectors as columns, sweeps used).
    """
    a = hermitian_part(np.array(a, dtype=np.complex128))
    d = a.shape[0]
    if max_sweeps is None:
        max_sweeps = JACOBI_SWEEPS_PER_DIM * d
    v = np.eye(d, dtype=np.complex128)
    total = float(scaled_norm(a.ravel()))
    threshold = eps * max(total, np.finfo(float).tiny)

    sweeps = 0
    while True:
        off = float(scaled_norm(a[np.triu_indices(d, 1)])) if d > 1 else 0.0
        if off <= threshold:
            break
        if sweeps >= max_sweeps:
            raise NumericalFailure(
                f"Jacobi eigensolver did not converge in {max_sweeps} sweeps "
                f"(off-diagonal norm {off:.3e})")
        sweeps += 1
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                r = abs(apq)
                if r <= threshold * 1e-3:
                    continue
                phase = apq / r
                theta = 0.5 * math.atan2(2 * r, (a[p, p] - a[q, q]).real)
                c, s = math.cos(theta), math.sin(theta)
                rot = np.array([[c, -s], [np.conj(phase) * s, np.conj(phase) * c]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ rot
                a[idx, :] = rot.conj().T @ a[idx, :]
                v[:, idx] = v[:, idx] @ rot
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real

    lam = np.diag(a).real.copy()
    order = np.argsort(lam, kind="stable")
    return lam[order], v[:, order], sweeps


def eigh(m: HermitianMatrix, backend: str = "lapack") -> Eigensystem:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    ``backend="lapack"`` uses numpy's LAPACK driver; ``backend="jacobi"`` uses
    the cyclic Jacobi solver with a cap of 30*d sweeps.
    """
    if backend == "lapack":
        lam, vec = eigh_stack(m.data)
    elif backend == "jacobi":
        lam, vec, _ = jacobi_eigh(m.data)
    else:
        raise DomainError(f"unknown eigensolver backend {backend!r}; use 'lapack' or 'jacobi'")
    return Eigensystem(eigenvalues=lam, eigenvectors=vec)


# ---------------------------------------------------------------------------
# Spectral calculus
# ---------------------------------------------------------------------------

def funm_stack(a: np.ndarray, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """U diag(f(lam)) U* for a stack of Hermitian matrices."""
    lam, vec = eigh_stack(a)
    with np.errstate(all="ignore"):
        flam = np.asarray(f(lam), dtype=float)
    if not np.all(np.isfinite(flam)):
        raise DomainError("matrix function is undefined at some eigenvalue")
    return (vec * flam[..., None, :]) @ np.conj(np.swapaxes(vec, -1, -2))


def expm_stack(a: np.ndarray) -> np.ndarray:
    """Matrix exponential of Hermitian matrices with an overflow guard."""
    lam, vec = eigh_stack(a)
    if np.max(lam) > EXP_OVERFLOW:
        raise NumericalFailure(
            f"matrix exponential overflows (eigenvalue {np.max(lam):.1f} > {EXP_OVERFLOW:.0f})")
    return (vec * np.exp(lam)[..., None, :]) @ np.conj(np.swapaxes(vec, -1, -2))


def matrix_function(m: HermitianMatrix, f: Callable[[np.ndarray], np.ndarray]) -> HermitianMatrix:
    """Apply a real scalar function to a Hermitian matrix through its spectrum."""
    return HermitianMatrix._wrap(funm_stack(m.data, f))


def logm(p: HpdMatrix) -> HermitianMatrix:
    if not isinstance(p, HpdMatrix):
        return matrix_function(p, np.log)
    return p.log()


def expm(h: HermitianMatrix) -> HpdMatrix:
    return HpdMatrix._wrap(expm_stack(h.data))


def sqrtm(p: HpdMatrix) -> HpdMatrix:
    return HpdMatrix._wrap(p.sqrt())


def inv_sqrtm(p: HpdMatrix) -> HpdMatrix:
    return HpdMatrix._wrap(p.inv_sqrt())


# ---------------------------------------------------------------------------
# Canonical basis and coordinates
# ---------------------------------------------------------------------------
#
# Ordering: E_ii for i = 1..d, then for each pair i < j in row-major order
# the symmetric element (E_ij + E_ji)/sqrt(2) followed by the antisymmetric
# element i(E_ij - E_ji)/sqrt(2).

_SQRT2 = math.sqrt(2.0)


def hermitian_basis(d: int) -> list[HermitianMatrix]:
    """Frobenius-orthonormal basis of the d^2-dimensional space of Hermitian matrices."""
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    basis = []
    for k in range(d * d):
        c = np.zeros(d * d)
        c[k] = 1.0
        basis.append(HermitianMatrix._wrap(coordinates_to_stack(c, d)))
    return basis


def coordinates_stack(a: np.ndarray) -> np.ndarray:
    """Basis coordinates of a stack of Hermitian matrices, shape (..., d^2)."""
    d = a.shape[-1]
    diag = np.real(np.diagonal(a, axis1=-2, axis2=-1))
    iu, ju = np.triu_indices(d, 1)
    upper = a[..., iu, ju]
    pairs = np.stack([_SQRT2 * upper.real, _SQRT2 * upper.imag], axis=-1)
    pairs = pairs.reshape(*upper.shape[:-1], 2 * len(iu))
    return np.concatenate([diag, pairs], axis=-1)


def coordinates_to_stack(c: np.ndarray, d: int) -> np.ndarray:
    """Inverse of ``coordinates_stack``."""
    c = np.asarray(c, dtype=float)
    if c.shape[-1] != d * d:
        raise DomainError(f"expected {d * d} coordinates, got {c.shape[-1]}")
    out = np.zeros(c.shape[:-1] + (d, d), dtype=np.complex128)
    idx = np.arange(d)
    out[..., idx, idx] = c[..., :d]
    iu, ju = np.triu_indices(d, 1)
    pairs = c[..., d:].reshape(*c.shape[:-1], len(iu), 2)
    upper = (pairs[..., 0] + 1j * pairs[..., 1]) / _SQRT2
    out[..., iu, ju] = upper
    out[..., ju, iu] = np.conj(upper)
    return out


def to_coordinates(m: HermitianMatrix) -> BasisCoordinates:
    return BasisCoordinates(dim=m.dim, coords=coordinates_stack(m.data))


def from_coordinates(c: BasisCoordinates) -> HermitianMatrix:
    return HermitianMatrix._wrap(coordinates_to_stack(c.coords, c.dim))


# ---------------------------------------------------------------------------
# Congruence
# ---------------------------------------------------------------------------

def check_congruence_matrix(a, d: int) -> np.ndarray:
    """Validate an invertible d x d congruence matrix and return it as an array."""
    a = np.array(a, dtype=np.complex128)
    if a.shape != (d, d):
        raise DomainError(f"congruence matrix must be {d}x{d}, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError("congruence matrix has non-finite entries")
    cond = np.linalg.cond(a)
    if not np.isfinite(cond) or cond >= MAX_COND:
        raise DomainError(f"congruence matrix is singular or near-singular (condition {cond:.3e})")
    return a


def congruence(a, m: HermitianMatrix) -> HermitianMatrix:
    """Return a* m a.  HPD input gives HPD output."""
    a = check_congruence_matrix(a, m.dim)
    out = a.conj().T @ m.data @ a
    if isinstance(m, HpdMatrix):
        return HpdMatrix(hermitian_part(out))
    return HermitianMatrix._wrap(out)
