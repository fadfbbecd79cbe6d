"""Tests for the sample containers and result models (src.schema.models)."""

import numpy as np
import pytest

from src.errors import DomainError
from src.geometry.hermitian import HpdMatrix, congruence
from src.geometry.manifold import dist
from src.sampling.generators import sample_lognormal, sample_lognormal_curves
from src.schema.models import (
    DepthMethod,
    DepthRegion,
    DepthReport,
    HpdCurveSample,
    HpdSample,
    SolverConfig,
    TiePolicy,
    required_count,
)


# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------

@pytest.fixture
def sample():
    return sample_lognormal(HpdMatrix.identity(2), 0.5, 12, seed=3)


@pytest.fixture
def curves():
    return sample_lognormal_curves(6, np.linspace(0.0, 1.0, 4), 2, 0.4, seed=5)


# ===================================================================
# HpdSample
# ===================================================================

class TestHpdSample:
    """Construction, access and validation."""

    def test_shape(self, sample):
        assert sample.n == 12
        assert sample.dim == 2
        assert len(sample) == 12
        assert isinstance(sample[0], HpdMatrix)

    def test_from_matrices(self):
        mats = [HpdMatrix.identity(2), HpdMatrix.scalar(2.0, 2)]
        s = HpdSample.from_matrices(mats)
        assert s.n == 2
        assert s.is_real

    def test_mixed_dimensions_rejected(self):
        with pytest.raises(DomainError, match="mixed"):
            HpdSample.from_matrices([HpdMatrix.identity(2), HpdMatrix.identity(3)])

    def test_empty_rejected(self):
        with pytest.raises(DomainError):
            HpdSample.from_matrices([])

    def test_non_pd_observation_named(self):
        obs = np.stack([np.eye(2), np.diag([1.0, -1.0])])
        with pytest.raises(DomainError, match="observation 1"):
            HpdSample(obs)

    def test_non_hermitian_observation_named(self):
        obs = np.stack([np.eye(2), np.array([[1.0, 0.5], [0.0, 1.0]])])
        with pytest.raises(DomainError, match="not Hermitian"):
            HpdSample(obs)

    def test_observations_read_only(self, sample):
        with pytest.raises(ValueError):
            sample.obs[0, 0, 0] = 1.0

    def test_check_dim(self, sample):
        with pytest.raises(DomainError, match="dimension mismatch"):
            sample.check_dim(HpdMatrix.identity(3))

    def test_log_norms(self, sample):
        expected = [x.log_norm() for x in sample]
        assert np.allclose(sample.log_norms(), expected)


# ===================================================================
# Distance cache
# ===================================================================

class TestDistanceCache:
    """The lazily built pairwise distance matrix and its online updates."""

    def test_distance_matrix_matches_dist(self, sample):
        full = sample.distance_matrix()
        assert full.shape == (12, 12)
        assert full[3, 7] == pytest.approx(dist(sample[3], sample[7]))
        assert sample.has_distance_cache

    def test_append_extends_cache(self, sample):
        sample.distance_matrix()
        y = HpdMatrix(np.diag([2.0, 0.5]))
        grown = sample.append(y)
        assert grown.n == 13
        assert grown.has_distance_cache
        fresh = HpdSample(grown.obs)
        assert np.allclose(grown.distance_matrix(), fresh.distance_matrix(), atol=1e-12)

    def test_append_without_cache_stays_lazy(self, sample):
        grown = sample.append(HpdMatrix.identity(2))
        assert not grown.has_distance_cache

    def test_take_reuses_sub_matrix(self, sample):
        full = sample.distance_matrix()
        idx = [4, 4, 0, 9]
        sub = sample.take(idx)
        assert sub.has_distance_cache
        assert np.array_equal(sub.distance_matrix(), full[np.ix_(idx, idx)])

    def test_congruence_keeps_cache(self, sample):
        sample.distance_matrix()
        a = np.array([[2.0, 1.0], [0.0, 1.0]])
        moved = sample.congruence(a)
        assert moved.has_distance_cache
        assert moved[5].allclose(congruence(a, sample[5]), atol=1e-12)
        assert moved.distance_matrix()[1, 2] == pytest.approx(dist(moved[1], moved[2]))

    def test_supplied_cache_validated(self, sample):
        with pytest.raises(DomainError):
            HpdSample(sample.obs, dist_cache=np.ones((12, 12)))
        with pytest.raises(DomainError):
            HpdSample(sample.obs, dist_cache=np.zeros(5))

    def test_supplied_full_cache(self, sample):
        full = sample.distance_matrix()
        s = HpdSample(sample.obs, dist_cache=full)
        assert np.array_equal(s.distance_matrix(), full)


# ===================================================================
# HpdCurveSample
# ===================================================================

class TestHpdCurveSample:
    """Curve samples on a common grid."""

    def test_shape(self, curves):
        assert curves.n == 6
        assert curves.T == 4
        assert curves.dim == 2
        assert curves.at(2).n == 6

    def test_slice_is_cached(self, curves):
        assert curves.at(1) is curves.at(1)

    def test_grid_must_ascend(self, curves):
        with pytest.raises(DomainError, match="ascending"):
            HpdCurveSample([0.0, 0.5, 0.5, 1.0], curves.curves)

    def test_grid_length_must_match(self, curves):
        with pytest.raises(DomainError):
            HpdCurveSample([0.0, 1.0], curves.curves)

    def test_check_curve_shape(self, curves):
        with pytest.raises(DomainError, match="query curve"):
            curves.check_curve(curves.curve(0)[:2])
        assert curves.check_curve(curves.curve(0)).shape == (4, 2, 2)

    def test_log_norms_single_grid_point(self, sample):
        one = HpdCurveSample([0.0], sample.obs[:, None])
        assert np.allclose(one.log_norms(), sample.log_norms())


# ===================================================================
# Result models
# ===================================================================

class TestResultModels:
    """SolverConfig, DepthReport, DepthRegion and required_count."""

    def test_solver_defaults(self):
        cfg = SolverConfig()
        assert (cfg.max_iter, cfg.tol, cfg.step) == (200, 1e-10, 1.0)
        assert SolverConfig.from_dict(cfg.to_dict()) == cfg

    @pytest.mark.parametrize("kwargs", [{"max_iter": 0}, {"tol": 0.0}, {"step": -1.0}])
    def test_solver_validation(self, kwargs):
        with pytest.raises(DomainError):
            SolverConfig(**kwargs)

    def test_depth_report_order(self):
        report = DepthReport(DepthMethod.GDD, np.array([0.2, 0.9, 0.5]),
                             np.array([3, 1, 2]), TiePolicy.SHARED)
        assert list(report.order()) == [1, 2, 0]
        back = DepthReport.from_dict(report.to_dict())
        assert back.method is DepthMethod.GDD
        assert list(back.ranks) == [3, 1, 2]

    def test_depth_region_dict(self):
        region = DepthRegion(alpha=0.25, beta_star=0.4, member_indices=[0, 2, 3])
        d = region.to_dict()
        assert d["level"] == 0.75
        assert region.size == 3
        assert DepthRegion.from_dict(d).member_indices == [0, 2, 3]

    def test_required_count_guard(self):
        assert required_count(0.05, 100) == 95
        assert required_count(0.2, 10) == 8
        assert required_count(0.5, 5) == 3

    @pytest.mark.parametrize("alpha", [0.0, 1.0, -0.1])
    def test_required_count_alpha_range(self, alpha):
        with pytest.raises(DomainError, match="alpha"):
            required_count(alpha, 10)

    def test_integrated_flag(self):
        assert DepthMethod.IGDD.integrated
        assert not DepthMethod.ZONOID.integrated
