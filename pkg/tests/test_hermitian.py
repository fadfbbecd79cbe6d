"""Tests for Hermitian / HPD matrix types, spectral calculus and the basis."""

import numpy as np
import pytest

from src.errors import DomainError, NumericalFailure
from src.geometry.hermitian import (
    BasisCoordinates,
    HermitianMatrix,
    HpdMatrix,
    check_congruence_matrix,
    congruence,
    coordinates_stack,
    eigh,
    expm,
    from_coordinates,
    hermitian_basis,
    inv_sqrtm,
    jacobi_eigh,
    logm,
    scaled_norm,
    sqrtm,
    to_coordinates,
)


# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------

def random_hermitian(d, rng, scale=1.0):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return HermitianMatrix(scale * (a + a.conj().T) / 2)


def random_hpd(d, rng):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return HpdMatrix(a @ a.conj().T + d * np.eye(d))


@pytest.fixture
def rng():
    return np.random.default_rng(7)


# ===================================================================
# Construction
# ===================================================================

class TestConstruction:
    """Validation of HermitianMatrix / HpdMatrix inputs."""

    def test_rejects_non_hermitian(self):
        with pytest.raises(DomainError, match="not Hermitian"):
            HermitianMatrix(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_rejects_non_square(self):
        with pytest.raises(DomainError):
            HermitianMatrix(np.ones((2, 3)))

    def test_rejects_non_finite(self):
        with pytest.raises(DomainError):
            HermitianMatrix(np.array([[np.nan, 0.0], [0.0, 1.0]]))

    def test_rejects_indefinite(self):
        with pytest.raises(DomainError, match="positive definite"):
            HpdMatrix(np.diag([1.0, -1.0]))

    def test_rejects_near_singular(self):
        with pytest.raises(DomainError):
            HpdMatrix(np.diag([1.0, 1e-14]))

    def test_domain_error_is_value_error(self):
        with pytest.raises(ValueError):
            HpdMatrix(np.zeros((2, 2)))

    def test_scalar_is_accepted_as_1x1(self):
        m = HpdMatrix(3.0)
        assert m.dim == 1
        assert m.eigenvalues[0] == pytest.approx(3.0)

    def test_identity_and_scalar(self):
        assert HpdMatrix.identity(3).allclose(HpdMatrix.scalar(1.0, 3))

    def test_data_is_read_only(self, rng):
        m = random_hpd(2, rng)
        with pytest.raises(ValueError):
            m.data[0, 0] = 5.0

    def test_is_real(self, rng):
        assert HpdMatrix(np.diag([1.0, 2.0])).is_real
        assert not random_hpd(2, rng).is_real

    def test_arithmetic_stays_hermitian(self, rng):
        h1, h2 = random_hermitian(3, rng), random_hermitian(3, rng)
        out = 2.0 * (h1 - h2) + h2
        assert np.allclose(out.data, out.data.conj().T)

    def test_to_dict_omits_imaginary_part_for_real(self):
        d = HpdMatrix(np.diag([1.0, 2.0])).to_dict()
        assert "im" not in d
        assert d["re"] == [[1.0, 0.0], [0.0, 2.0]]


# ===================================================================
# Spectral calculus
# ===================================================================

class TestSpectral:
    """Matrix log / exp / sqrt and the eigensolver backends."""

    @pytest.mark.parametrize("d", [1, 2, 3, 5])
    def test_exp_inverts_log(self, d, rng):
        p = random_hpd(d, rng)
        assert expm(logm(p)).allclose(p, atol=1e-9 * np.abs(p.data).max())

    def test_sqrt_squares_back(self, rng):
        p = random_hpd(3, rng)
        r = sqrtm(p).data
        assert np.allclose(r @ r, p.data)

    def test_inv_sqrt(self, rng):
        p = random_hpd(3, rng)
        s = inv_sqrtm(p).data
        assert np.allclose(s @ p.data @ s, np.eye(3), atol=1e-12)

    def test_log_norm_is_frobenius_norm_of_log(self, rng):
        p = random_hpd(3, rng)
        assert p.log_norm() == pytest.approx(p.log().frobenius_norm())

    def test_log_of_diagonal(self):
        p = HpdMatrix(np.diag([1.0, np.e]))
        assert np.allclose(logm(p).data, np.diag([0.0, 1.0]))

    def test_expm_overflow_guard(self):
        with pytest.raises(NumericalFailure, match="overflows"):
            expm(HermitianMatrix(800.0 * np.eye(2)))

    def test_frobenius_norm_without_overflow(self):
        p = HpdMatrix.scalar(1e300, 2)
        assert p.frobenius_norm() == pytest.approx(np.sqrt(2) * 1e300)

    def test_scaled_norm_matches_plain_norm(self, rng):
        v = rng.normal(size=10)
        assert scaled_norm(v) == pytest.approx(np.linalg.norm(v))

    @pytest.mark.parametrize("d", [1, 2, 3, 5])
    def test_jacobi_matches_lapack(self, d, rng):
        h = random_hermitian(d, rng)
        lam_j, vec_j, _ = jacobi_eigh(h.data)
        lam_l = np.linalg.eigvalsh(h.data)
        assert np.allclose(lam_j, lam_l, atol=1e-12)
        assert np.allclose((vec_j * lam_j) @ vec_j.conj().T, h.data, atol=1e-12)

    def test_eigh_backends_agree(self, rng):
        h = random_hermitian(4, rng)
        a = eigh(h, backend="lapack")
        b = eigh(h, backend="jacobi")
        assert np.allclose(a.eigenvalues, b.eigenvalues, atol=1e-12)
        assert np.allclose(b.reconstruct(), h.data, atol=1e-12)

    def test_eigh_unknown_backend(self, rng):
        with pytest.raises(DomainError, match="backend"):
            eigh(random_hermitian(2, rng), backend="qr")


# ===================================================================
# Basis and coordinates
# ===================================================================

class TestBasis:
    """The Frobenius-orthonormal basis of Hermitian matrices."""

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_basis_is_orthonormal(self, d):
        basis = hermitian_basis(d)
        assert len(basis) == d * d
        gram = np.array([[b1.frobenius_inner(b2) for b2 in basis] for b1 in basis])
        assert np.allclose(gram, np.eye(d * d))

    def test_basis_ordering(self):
        basis = hermitian_basis(2)
        assert np.allclose(basis[0].data, np.diag([1, 0]))
        assert np.allclose(basis[1].data, np.diag([0, 1]))
        assert np.allclose(basis[2].data, np.array([[0, 1], [1, 0]]) / np.sqrt(2))
        assert np.allclose(basis[3].data, np.array([[0, 1j], [-1j, 0]]) / np.sqrt(2))

    def test_coordinates_preserve_norm(self, rng):
        h = random_hermitian(3, rng)
        c = to_coordinates(h)
        assert np.linalg.norm(c.coords) == pytest.approx(h.frobenius_norm())
        assert from_coordinates(c).allclose(h)

    def test_real_matrices_have_zero_imaginary_coordinates(self, rng):
        a = rng.normal(size=(3, 3))
        c = coordinates_stack(a + a.T)
        assert np.all(c[3 + 1::2] == 0.0)

    def test_wrong_coordinate_count(self):
        with pytest.raises(DomainError):
            BasisCoordinates(dim=2, coords=np.zeros(3))

    def test_invalid_dimension(self):
        with pytest.raises(DomainError):
            hermitian_basis(0)


# ===================================================================
# Congruence
# ===================================================================

class TestCongruence:
    """a* m a and the congruence-matrix check."""

    def test_hpd_stays_hpd(self, rng):
        p = random_hpd(3, rng)
        a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        out = congruence(a, p)
        assert isinstance(out, HpdMatrix)
        assert np.allclose(out.data, a.conj().T @ p.data @ a)

    def test_hermitian_stays_hermitian(self, rng):
        h = random_hermitian(2, rng)
        out = congruence(np.eye(2) * 2.0, h)
        assert type(out) is HermitianMatrix
        assert np.allclose(out.data, 4.0 * h.data)

    def test_singular_matrix_rejected(self):
        with pytest.raises(DomainError, match="singular"):
            check_congruence_matrix(np.array([[1.0, 1.0], [1.0, 1.0]]), 2)

    def test_wrong_shape_rejected(self):
        with pytest.raises(DomainError):
            check_congruence_matrix(np.eye(3), 2)
