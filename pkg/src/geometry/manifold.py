"""Affine-invariant Riemannian structure on HPD matrices.

All maps are expressed through the whitening congruence x -> p^{-1/2} x p^{-1/2},
which moves the base point p to the identity.  p^{-1/2} is computed once per
call from the eigensystem cached on ``HpdMatrix``.

Array helpers at the bottom work on stacks of observations and return the
whitened logarithms Log(p^{-1/2} x p^{-1/2}) together with the distances
(the norms of those logarithms).  They are the building block for the
depth functions and the mean/median solvers.
"""

from __future__ import annotations

import numpy as np

from src.errors import DomainError
from src.geometry.hermitian import (
    HermitianMatrix,
    HpdMatrix,
    _check_same_dim,
    eigh_stack,
    expm_stack,
    hermitian_part,
)


def _whiten(s: np.ndarray, x: np.ndarray) -> np.ndarray:
    return hermitian_part(s @ x @ s)


def inner(p: HpdMatrix, h1: HermitianMatrix, h2: HermitianMatrix) -> float:
    """Riemannian inner product Tr((p^{-1/2} h1 p^{-1/2})(p^{-1/2} h2 p^{-1/2}))."""
    _check_same_dim(p, h1, h2)
    s = p.inv_sqrt()
    return float(np.vdot(_whiten(s, h1.data), _whiten(s, h2.data)).real)


def norm(p: HpdMatrix, h: HermitianMatrix) -> float:
    return float(np.sqrt(max(inner(p, h, h), 0.0)))


def dist(p1: HpdMatrix, p2: HpdMatrix) -> float:
    """Riemannian distance ||Log(p1^{-1/2} p2 p1^{-1/2})||_F."""
    _check_same_dim(p1, p2)
    lam, _ = eigh_stack(_whiten(p1.inv_sqrt(), p2.data))
    return float(np.sqrt(np.sum(np.log(lam) ** 2)))


def exp_map(p: HpdMatrix, h: HermitianMatrix) -> HpdMatrix:
    """Exp_p(h) = p^{1/2} Exp(p^{-1/2} h p^{-1/2}) p^{1/2}."""
    _check_same_dim(p, h)
    r = p.sqrt()
    return HpdMatrix._wrap(r @ expm_stack(_whiten(p.inv_sqrt(), h.data)) @ r)


def log_map(p: HpdMatrix, q: HpdMatrix) -> HermitianMatrix:
    """Log_p(q) = p^{1/2} Log(p^{-1/2} q p^{-1/2}) p^{1/2}."""
    _check_same_dim(p, q)
    logs, _ = whitened_logs(p, q.data[None])
    r = p.sqrt()
    return HermitianMatrix._wrap(r @ logs[0] @ r)


def geodesic(p: HpdMatrix, q: HpdMatrix, t: float) -> HpdMatrix:
    """Point at fraction t in [0, 1] along the geodesic from p to q."""
    _check_same_dim(p, q)
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"geodesic parameter must lie in [0, 1], got {t}")
    lam, vec = eigh_stack(_whiten(p.inv_sqrt(), q.data))
    r = p.sqrt()
    return HpdMatrix._wrap(r @ ((vec * lam ** t) @ vec.conj().T) @ r)


# ---------------------------------------------------------------------------
# Stack helpers
# ---------------------------------------------------------------------------

def whitened_logs(p: HpdMatrix, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Log(p^{-1/2} x p^{-1/2}) for each x in the stack, with dist(p, x).

    The Frobenius norm of each whitened logarithm is the Riemannian distance,
    and its basis coordinates are the normal coordinates of Log_p(x).
    """
    s = p.inv_sqrt()
    lam, vec = eigh_stack(_whiten(s, xs))
    loglam = np.log(lam)
    logs = (vec * loglam[..., None, :]) @ np.conj(np.swapaxes(vec, -1, -2))
    return logs, np.sqrt(np.sum(loglam ** 2, axis=-1))


def distances_from(p: HpdMatrix, xs: np.ndarray) -> np.ndarray:
    """dist(p, x) for each x in the stack."""
    lam, _ = eigh_stack(_whiten(p.inv_sqrt(), xs))
    return np.sqrt(np.sum(np.log(lam) ** 2, axis=-1))


def inv_sqrt_stack(xs: np.ndarray) -> np.ndarray:
    lam, vec = eigh_stack(xs)
    return (vec * (lam ** -0.5)[..., None, :]) @ np.conj(np.swapaxes(vec, -1, -2))


def pairwise_distances(xs: np.ndarray) -> np.ndarray:
    """Symmetric n x n matrix of Riemannian distances with zero diagonal."""
    n = xs.shape[0]
    out = np.zeros((n, n))
    if n < 2:
        return out
    s = inv_sqrt_stack(xs)
    for i in range(n - 1):
        lam, _ = eigh_stack(_whiten(s[i], xs[i + 1:]))
        row = np.sqrt(np.sum(np.log(lam) ** 2, axis=-1))
        out[i, i + 1:] = row
        out[i + 1:, i] = row
    return out


def unwhiten_exp(p: HpdMatrix, w: np.ndarray) -> HpdMatrix:
    """p^{1/2} Exp(w) p^{1/2}: the exponential map for a whitened tangent w."""
    r = p.sqrt()
    return HpdMatrix._wrap(r @ expm_stack(w) @ r)
