"""Geometry package: HPD matrices and the affine-invariant metric.

- hermitian.py: Hermitian / HPD matrix types, eigensolvers, spectral
  calculus, the canonical Hermitian basis and congruence transforms
- manifold.py: inner product, distance, Exp/Log maps and geodesics,
  plus batched helpers over stacks of observations
"""

from .hermitian import (
    BasisCoordinates,
    Eigensystem,
    HermitianMatrix,
    HpdMatrix,
    congruence,
    eigh,
    expm,
    from_coordinates,
    hermitian_basis,
    jacobi_eigh,
    logm,
    matrix_function,
    sqrtm,
    inv_sqrtm,
    to_coordinates,
)
from .manifold import (
    dist,
    exp_map,
    geodesic,
    inner,
    log_map,
    norm,
    pairwise_distances,
)

__all__ = [
    # Types
    "BasisCoordinates",
    "Eigensystem",
    "HermitianMatrix",
    "HpdMatrix",
    # Spectral calculus
    "eigh",
    "jacobi_eigh",
    "matrix_function",
    "logm",
    "expm",
    "sqrtm",
    "inv_sqrtm",
    # Basis
    "hermitian_basis",
    "to_coordinates",
    "from_coordinates",
    "congruence",
    # Metric
    "inner",
    "norm",
    "dist",
    "exp_map",
    "log_map",
    "geodesic",
    "pairwise_distances",
]
