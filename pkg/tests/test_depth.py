"""Tests for the intrinsic depth functions (src.depth.functions)."""

import numpy as np
import pytest

from src.depth.functions import (
    depth,
    depth_values,
    gdd,
    grid_average,
    integrated_gdd,
    integrated_zonoid_depth,
    spatial_depth,
    zonoid_depth,
)
from src.errors import DomainError
from src.estimation.centers import intrinsic_mean, intrinsic_median
from src.geometry.hermitian import HermitianMatrix, HpdMatrix, congruence
from src.geometry.manifold import exp_map, geodesic, norm
from src.sampling.generators import sample_lognormal, sample_lognormal_curves
from src.schema.models import DepthMethod, HpdCurveSample, HpdSample, SolverConfig

POINT_METHODS = [DepthMethod.ZONOID, DepthMethod.GDD, DepthMethod.SPATIAL]


# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------

@pytest.fixture
def sample():
    return sample_lognormal(HpdMatrix.identity(2), 0.6, 20, seed=8)


@pytest.fixture
def curves():
    return sample_lognormal_curves(12, np.linspace(0.0, 1.0, 5), 2, 0.5, seed=4)


def _congruence_matrix():
    return np.array([[1.2, 0.4j], [0.1, 0.9 - 0.3j]])


# ===================================================================
# Closed-form values
# ===================================================================

class TestClosedForm:
    """Depths that can be computed by hand."""

    def test_gdd_one_dimensional(self):
        s = HpdSample(np.exp([0.0, 1.0, 3.0]).reshape(3, 1, 1))
        values = depth_values(s, DepthMethod.GDD)
        assert np.allclose(values, np.exp([-4 / 3, -1.0, -5 / 3]))

    def test_gdd_matches_per_point(self, sample):
        values = depth_values(sample, DepthMethod.GDD)
        assert values[3] == pytest.approx(gdd(sample, sample[3]))

    def test_zonoid_one_dimensional(self):
        s = HpdSample(np.exp([-1.0, 1.0, 3.0]).reshape(3, 1, 1))
        assert zonoid_depth(s, HpdMatrix(1.0)) == pytest.approx(2 / 3, abs=1e-12)

    def test_spatial_at_symmetric_centre(self):
        s = HpdSample(np.exp([-1.0, 1.0]).reshape(2, 1, 1))
        assert spatial_depth(s, HpdMatrix(1.0)) == pytest.approx(1.0)

    def test_spatial_at_extreme_point(self):
        s = HpdSample(np.exp([0.0, 1.0, 2.0]).reshape(3, 1, 1))
        assert spatial_depth(s, s[0]) == pytest.approx(1.0 - 2 / 3)

    def test_zonoid_at_mean_is_one(self, sample):
        mean = intrinsic_mean(sample)
        assert zonoid_depth(sample, mean) == pytest.approx(1.0, abs=1e-6)

    def test_far_point(self, sample):
        far = HpdMatrix.scalar(1e6, 2)
        assert zonoid_depth(sample, far) == pytest.approx(0.0, abs=1e-12)
        assert gdd(sample, far) < 1e-5
        assert spatial_depth(sample, far) < 0.05


# ===================================================================
# Properties
# ===================================================================

class TestProperties:
    """Range, invariance and maximality."""

    @pytest.mark.parametrize("method", POINT_METHODS)
    def test_range(self, sample, method):
        values = depth_values(sample, method)
        assert values.shape == (20,)
        assert np.all((values >= 0.0) & (values <= 1.0))

    @pytest.mark.parametrize("method", POINT_METHODS)
    def test_congruence_invariance(self, sample, method):
        a = _congruence_matrix()
        moved = sample.congruence(a)
        for y in [sample[0], HpdMatrix(np.diag([1.5, 0.7])), HpdMatrix.scalar(3.0, 2)]:
            assert depth(moved, congruence(a, y), method) == pytest.approx(
                depth(sample, y, method), abs=1e-8)

    @pytest.mark.parametrize("method", POINT_METHODS)
    def test_decreasing_along_ray(self, sample, method):
        centre = intrinsic_mean(sample)
        far = HpdMatrix(np.diag([40.0, 0.05]))
        near_value = depth(sample, geodesic(centre, far, 0.3), method)
        far_value = depth(sample, geodesic(centre, far, 1.0), method)
        assert far_value <= near_value

    def test_gdd_maximal_at_median(self, sample):
        median = intrinsic_median(sample, SolverConfig(max_iter=2000))
        best = gdd(sample, median)
        rng = np.random.default_rng(1)
        for _ in range(20):
            step = rng.normal(scale=0.05, size=(2, 2)) + 1j * rng.normal(scale=0.05, size=(2, 2))
            moved = HpdMatrix(median.data + (step + step.conj().T) / 2)
            assert gdd(sample, moved) <= best + 1e-12

    def test_spatial_maximal_at_median(self, sample):
        median = intrinsic_median(sample, SolverConfig(max_iter=2000))
        best = spatial_depth(sample, median)
        assert best == pytest.approx(1.0, abs=1e-8)
        rng = np.random.default_rng(2)
        for scale in (0.01, 0.05, 0.1):
            for _ in range(10):
                step = rng.normal(scale=scale, size=(2, 2)) + 1j * rng.normal(scale=scale, size=(2, 2))
                moved = HpdMatrix(median.data + (step + step.conj().T) / 2)
                assert spatial_depth(sample, moved) <= best + 1e-9

    @pytest.mark.parametrize("method", [DepthMethod.ZONOID, DepthMethod.GDD])
    def test_vanishes_far_from_the_centre(self, sample, method):
        centre = intrinsic_mean(sample)
        root = centre.sqrt()
        rng = np.random.default_rng(3)
        for _ in range(5):
            g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            g = (g + g.conj().T) / 2
            w = np.eye(2) + 0.2 * g / np.linalg.norm(g)
            w *= rng.choice([-1.0, 1.0]) / np.linalg.norm(w)
            h = HermitianMatrix(root @ w @ root)
            assert norm(centre, h) == pytest.approx(1.0)
            for s in (40.0, 60.0):
                assert depth(sample, exp_map(centre, h * s), method) < 1e-3

    def test_in_sample_spatial_counts_the_point(self, sample):
        values = depth_values(sample, DepthMethod.SPATIAL)
        assert values[0] == pytest.approx(spatial_depth(sample, sample[0]))


# ===================================================================
# Preconditions
# ===================================================================

class TestPreconditions:
    """Errors for invalid inputs."""

    def test_zonoid_needs_more_than_d_squared(self):
        s = sample_lognormal(HpdMatrix.identity(2), 0.5, 4, seed=1)
        with pytest.raises(DomainError, match=r"n > d\^2"):
            zonoid_depth(s, HpdMatrix.identity(2))
        with pytest.raises(DomainError, match=r"n > d\^2"):
            depth_values(s, DepthMethod.ZONOID)

    def test_dimension_mismatch(self, sample):
        with pytest.raises(DomainError, match="dimension"):
            gdd(sample, HpdMatrix.identity(3))

    def test_integrated_method_on_matrix_sample(self, sample):
        with pytest.raises(DomainError, match="does not apply"):
            depth_values(sample, DepthMethod.IGDD)

    def test_point_method_on_curve_sample(self, curves):
        with pytest.raises(DomainError, match="does not apply"):
            depth_values(curves, DepthMethod.GDD)


# ===================================================================
# Integrated depths
# ===================================================================

class TestIntegrated:
    """Curve depths averaged over the grid."""

    def test_grid_average(self):
        assert grid_average([0.0, 1.0], [0.0, 1.0]) == pytest.approx(0.5)
        assert grid_average([2.0, 2.0, 2.0], [0.0, 0.5, 3.0]) == pytest.approx(2.0)
        assert grid_average([7.0], [0.3]) == 7.0

    def test_grid_average_shape_mismatch(self):
        with pytest.raises(DomainError):
            grid_average([1.0, 2.0], [0.0, 1.0, 2.0])

    def test_single_grid_point_reduces_exactly(self, sample):
        one = HpdCurveSample([0.0], sample.obs[:, None])
        y = sample[2]
        assert integrated_gdd(one, y.data[None]) == gdd(sample, y)
        assert integrated_zonoid_depth(one, y.data[None]) == zonoid_depth(sample, y)
        assert np.array_equal(depth_values(one, DepthMethod.IGDD),
                              depth_values(sample, DepthMethod.GDD))

    def test_constant_curves_match_pointwise(self, sample):
        obs = np.repeat(sample.obs[:, None], 4, axis=1)
        const = HpdCurveSample(np.linspace(0.0, 2.0, 4), obs)
        y = np.repeat(HpdMatrix(np.diag([1.3, 0.8])).data[None], 4, axis=0)
        assert integrated_gdd(const, y) == pytest.approx(gdd(sample, HpdMatrix._wrap(y[0])))
        assert integrated_zonoid_depth(const, y) == pytest.approx(
            zonoid_depth(sample, HpdMatrix._wrap(y[0])), abs=1e-12)

    def test_in_sample_values_match_queries(self, curves):
        igdd = depth_values(curves, DepthMethod.IGDD)
        izd = depth_values(curves, DepthMethod.IZONOID)
        assert igdd[5] == pytest.approx(integrated_gdd(curves, curves.curve(5)))
        assert izd[5] == pytest.approx(integrated_zonoid_depth(curves, curves.curve(5)))
        assert np.all((izd >= 0) & (izd <= 1))

    def test_pointwise_mean_curve_is_deepest(self, curves):
        mean_curve = np.stack([intrinsic_mean(curves.at(k)).data for k in range(curves.T)])
        top = integrated_zonoid_depth(curves, mean_curve)
        assert top == pytest.approx(1.0, abs=1e-6)
        assert top >= depth_values(curves, DepthMethod.IZONOID).max()

    def test_pointwise_median_curve_maximizes_igdd(self, curves):
        cfg = SolverConfig(max_iter=2000)
        median_curve = np.stack([intrinsic_median(curves.at(k), cfg).data for k in range(curves.T)])
        top = integrated_gdd(curves, median_curve)
        assert top >= depth_values(curves, DepthMethod.IGDD).max()
        rng = np.random.default_rng(5)
        for _ in range(10):
            step = rng.normal(scale=0.05, size=(curves.T, 2, 2))
            moved = median_curve + (step + np.swapaxes(step, -1, -2)) / 2
            assert integrated_gdd(curves, moved) <= top + 1e-12

    def test_query_curve_on_wrong_grid(self, curves):
        with pytest.raises(DomainError, match="query curve"):
            integrated_gdd(curves, curves.curve(0)[:3])

    def test_threads_do_not_change_values(self, curves):
        assert np.array_equal(depth_values(curves, DepthMethod.IZONOID, threads=1),
                              depth_values(curves, DepthMethod.IZONOID, threads=3))
