"""Tests for the affine-invariant Riemannian structure (src.geometry.manifold)."""

import numpy as np
import pytest

from src.errors import DomainError
from src.geometry.hermitian import HermitianMatrix, HpdMatrix, congruence
from src.geometry.manifold import (
    dist,
    distances_from,
    exp_map,
    geodesic,
    inner,
    log_map,
    norm,
    pairwise_distances,
    whitened_logs,
)


# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------

def random_hpd(d, rng, spread=1.0):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    h = spread * (a + a.conj().T) / 2
    lam, vec = np.linalg.eigh(h)
    return HpdMatrix((vec * np.exp(lam)) @ vec.conj().T)


def random_invertible(d, rng):
    return rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)) + 2 * np.eye(d)


@pytest.fixture
def rng():
    return np.random.default_rng(11)


# ===================================================================
# Metric axioms
# ===================================================================

class TestDistance:
    """Riemannian distance."""

    @pytest.mark.parametrize("d", [1, 2, 3, 5])
    def test_metric_axioms(self, d, rng):
        for _ in range(20):
            p, q, r = (random_hpd(d, rng) for _ in range(3))
            assert dist(p, p) == pytest.approx(0.0, abs=1e-12)
            assert dist(p, q) == pytest.approx(dist(q, p), rel=1e-10)
            assert dist(p, r) <= dist(p, q) + dist(q, r) + 1e-10

    def test_distance_to_identity_is_log_norm(self, rng):
        p = random_hpd(3, rng)
        assert dist(HpdMatrix.identity(3), p) == pytest.approx(p.log_norm())

    def test_scalar_matrices(self):
        p = HpdMatrix.scalar(np.e, 2)
        assert dist(HpdMatrix.identity(2), p) == pytest.approx(np.sqrt(2))

    @pytest.mark.parametrize("d", [1, 2, 3, 5])
    def test_congruence_isometry(self, d, rng):
        for _ in range(20):
            p, q = random_hpd(d, rng), random_hpd(d, rng)
            a = random_invertible(d, rng)
            moved = dist(congruence(a, p), congruence(a, q))
            assert moved == pytest.approx(dist(p, q), rel=1e-8, abs=1e-10)

    def test_inversion_isometry(self, rng):
        p, q = random_hpd(3, rng), random_hpd(3, rng)
        p_inv = HpdMatrix(np.linalg.inv(p.data))
        q_inv = HpdMatrix(np.linalg.inv(q.data))
        assert dist(p_inv, q_inv) == pytest.approx(dist(p, q), rel=1e-8)

    def test_dimension_mismatch(self):
        with pytest.raises(DomainError, match="dimension"):
            dist(HpdMatrix.identity(2), HpdMatrix.identity(3))


# ===================================================================
# Exp / Log
# ===================================================================

class TestExpLog:
    """Exponential and logarithm maps and the inner product."""

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_exp_inverts_log(self, d, rng):
        p, q = random_hpd(d, rng), random_hpd(d, rng)
        back = exp_map(p, log_map(p, q))
        assert back.allclose(q, atol=1e-9 * np.abs(q.data).max())

    def test_norm_of_log_is_distance(self, rng):
        p, q = random_hpd(3, rng), random_hpd(3, rng)
        assert norm(p, log_map(p, q)) == pytest.approx(dist(p, q), rel=1e-9)

    def test_inner_at_identity_is_frobenius(self, rng):
        h1 = HermitianMatrix(random_hpd(2, rng).data)
        h2 = HermitianMatrix(random_hpd(2, rng).data)
        assert inner(HpdMatrix.identity(2), h1, h2) == pytest.approx(h1.frobenius_inner(h2))

    def test_log_at_self_is_zero(self, rng):
        p = random_hpd(2, rng)
        assert log_map(p, p).frobenius_norm() == pytest.approx(0.0, abs=1e-10)

    def test_exp_of_zero_is_base(self, rng):
        p = random_hpd(2, rng)
        assert exp_map(p, HermitianMatrix.zeros(2)).allclose(p, atol=1e-12)


# ===================================================================
# Geodesics
# ===================================================================

class TestGeodesic:
    """Geodesic interpolation."""

    def test_endpoints(self, rng):
        p, q = random_hpd(3, rng), random_hpd(3, rng)
        assert geodesic(p, q, 0.0).allclose(p, atol=1e-10)
        assert geodesic(p, q, 1.0).allclose(q, atol=1e-9 * np.abs(q.data).max())

    def test_constant_speed(self, rng):
        p, q = random_hpd(2, rng), random_hpd(2, rng)
        mid = geodesic(p, q, 0.25)
        assert dist(p, mid) == pytest.approx(0.25 * dist(p, q), rel=1e-8)
        assert dist(mid, q) == pytest.approx(0.75 * dist(p, q), rel=1e-8)

    def test_commuting_midpoint(self):
        p = HpdMatrix(np.diag([1.0, 4.0]))
        q = HpdMatrix(np.diag([4.0, 1.0]))
        assert geodesic(p, q, 0.5).allclose(HpdMatrix.scalar(2.0, 2), atol=1e-12)

    @pytest.mark.parametrize("t", [-0.1, 1.5])
    def test_parameter_out_of_range(self, t):
        with pytest.raises(DomainError):
            geodesic(HpdMatrix.identity(2), HpdMatrix.scalar(2.0, 2), t)


# ===================================================================
# Stack helpers
# ===================================================================

class TestStackHelpers:
    """Vectorised distances and whitened logarithms."""

    def test_pairwise_matches_dist(self, rng):
        mats = [random_hpd(2, rng) for _ in range(5)]
        full = pairwise_distances(np.stack([m.data for m in mats]))
        assert np.allclose(np.diag(full), 0.0)
        assert np.allclose(full, full.T)
        for i in range(5):
            for j in range(5):
                assert full[i, j] == pytest.approx(dist(mats[i], mats[j]), abs=1e-10)

    def test_distances_from(self, rng):
        p = random_hpd(3, rng)
        mats = [random_hpd(3, rng) for _ in range(4)]
        out = distances_from(p, np.stack([m.data for m in mats]))
        assert np.allclose(out, [dist(p, m) for m in mats])

    def test_whitened_logs_norms_are_distances(self, rng):
        p = random_hpd(2, rng)
        mats = np.stack([random_hpd(2, rng).data for _ in range(4)])
        logs, d = whitened_logs(p, mats)
        assert np.allclose(np.linalg.norm(logs, axis=(1, 2)), d)
        assert np.allclose(d, distances_from(p, mats))

    def test_single_observation_pairwise(self):
        out = pairwise_distances(np.eye(2)[None].astype(complex))
        assert out.shape == (1, 1)
        assert out[0, 0] == 0.0
