import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from posekit.exceptions import DegenerateConfiguration, InvalidIntrinsics, NonPositiveDepth, ShapeMismatch
from posekit.geometry import PinholeCamera, backproject, procrustes_align, project


@pytest.fixture
def camera():
    return PinholeCamera(fx=1000.0, fy=1100.0, cx=500.0, cy=400.0)


def umeyama(source, target, with_scale):
    """Closed-form similarity fit written independently of the library code."""
    mu_x, mu_y = source.mean(axis=0), target.mean(axis=0)
    x0, y0 = source - mu_x, target - mu_y
    u, d, vt = np.linalg.svd(y0.T @ x0)
    s = np.diag([1.0, 1.0, np.sign(np.linalg.det(u) * np.linalg.det(vt))])
    rotation = u @ s @ vt
    scale = np.trace(np.diag(d) @ s) / np.sum(x0 ** 2) if with_scale else 1.0
    return scale * x0 @ rotation.T + mu_y


class TestCamera:
    def test_known_projection(self, camera):
        pixels = project(np.array([100.0, -50.0, 1000.0]), camera)
        np.testing.assert_allclose(pixels, [600.0, 345.0])

    def test_backprojection_inverts_projection(self, camera, rng):
        points = rng.normal(scale=300.0, size=(17, 3)) + [0.0, 0.0, 5000.0]
        restored = backproject(project(points, camera), points[:, 2], camera)
        np.testing.assert_allclose(restored, points, rtol=1e-12, atol=1e-9)

    def test_scalar_depth_broadcasts(self, camera):
        points = camera.backproject(np.array([[500.0, 400.0], [1500.0, 400.0]]), 2000.0)
        np.testing.assert_allclose(points, [[0.0, 0.0, 2000.0], [2000.0, 0.0, 2000.0]])

    @pytest.mark.parametrize("depth", [0.0, -1.0, np.nan])
    def test_depth_must_be_positive(self, camera, depth):
        with pytest.raises(NonPositiveDepth):
            backproject(np.zeros((1, 2)), depth, camera)

    def test_points_behind_camera(self, camera):
        with pytest.raises(NonPositiveDepth):
            project(np.array([[0.0, 0.0, -5.0]]), camera)

    def test_wrong_coordinate_count(self, camera):
        with pytest.raises(ShapeMismatch):
            project(np.zeros((4, 2)), camera)

    def test_intrinsics(self):
        with pytest.raises(InvalidIntrinsics):
            PinholeCamera(fx=0.0, fy=1.0, cx=0.0, cy=0.0)
        with pytest.raises(InvalidIntrinsics):
            PinholeCamera.from_dict({"fx": 1.0, "fy": 1.0, "cx": 0.0})

    def test_dict_round_trip(self, camera):
        assert PinholeCamera.from_dict(camera.to_dict()) == camera
        np.testing.assert_array_equal(camera.matrix()[:2, 2], [500.0, 400.0])


class TestProcrustes:
    def test_recovers_a_similarity(self, rng):
        source = rng.normal(size=(17, 3))
        rotation = Rotation.from_rotvec(rng.normal(size=3)).as_matrix()
        target = 1.7 * source @ rotation.T + [10.0, -3.0, 250.0]
        aligned, transform = procrustes_align(source, target)
        np.testing.assert_allclose(aligned, target, atol=1e-9)
        np.testing.assert_allclose(transform.rotation, rotation, atol=1e-9)
        assert transform.scale == pytest.approx(1.7)

    def test_rigid_mode_keeps_scale(self, rng):
        source = rng.normal(size=(10, 3))
        _, transform = procrustes_align(source, 2.0 * source, scale=False)
        assert transform.scale == 1.0
        np.testing.assert_allclose(transform.rotation, np.eye(3), atol=1e-9)

    @pytest.mark.parametrize("with_scale", [True, False])
    def test_matches_closed_form(self, rng, with_scale):
        for _ in range(50):
            source = rng.normal(size=(17, 3))
            rotation = Rotation.from_rotvec(rng.normal(size=3)).as_matrix()
            target = source @ rotation.T + rng.normal(scale=0.3, size=(17, 3))
            aligned, _ = procrustes_align(source, target, scale=with_scale)
            np.testing.assert_allclose(aligned, umeyama(source, target, with_scale), atol=1e-9)

    def test_never_reflects(self, rng):
        source = rng.normal(size=(17, 3))
        mirrored = source * [1.0, 1.0, -1.0]
        _, transform = procrustes_align(source, mirrored)
        assert np.linalg.det(transform.rotation) == pytest.approx(1.0)

    def test_too_few_points(self):
        with pytest.raises(DegenerateConfiguration):
            procrustes_align(np.zeros((2, 3)), np.ones((2, 3)))

    def test_collinear_target(self, rng):
        line = np.outer(np.arange(5.0), [1.0, 2.0, 3.0])
        with pytest.raises(DegenerateConfiguration):
            procrustes_align(rng.normal(size=(5, 3)), line)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            procrustes_align(np.zeros((5, 3)), np.zeros((4, 3)))
