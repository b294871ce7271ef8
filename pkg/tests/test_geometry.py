"""Unit tests for the camera model and pose machinery."""

import numpy as np
import pytest

from edgevo.geometry import (
    TUM_INTRINSICS,
    CameraIntrinsics,
    Pose,
    PoseDelta,
    backproject,
    backproject_pixels,
    cayley_to_rotation,
    compose,
    load_intrinsics,
    pose_between,
    pose_inverse,
    pose_multiply,
    project,
    project_points,
    rotation_angle_deg,
    rotation_to_cayley,
    skew,
)


def random_rotation(rng):
    return cayley_to_rotation(rng.normal(scale=0.4, size=3))


class TestProject:
    def test_optical_axis(self):
        intr = CameraIntrinsics(1.0, 1.0, 0.5, 0.5, 2, 2)
        # principal point must be interior, so use a slightly offset model
        np.testing.assert_allclose(project(intr, [0.0, 0.0, 1.0]), [0.5, 0.5])

    def test_plain_numbers(self):
        intr = CameraIntrinsics(100.0, 100.0, 320.0, 240.0, 640, 480)
        np.testing.assert_allclose(project(intr, [1.0, 0.0, 2.0]), [370.0, 240.0])

    def test_rejects_nonpositive_depth(self):
        intr = CameraIntrinsics(100.0, 100.0, 320.0, 240.0, 640, 480)
        with pytest.raises(ValueError):
            project(intr, [0.0, 0.0, 0.0])
        with pytest.raises(ValueError):
            project(intr, [0.0, 0.0, -1.0])

    def test_roundtrip_with_backproject(self):
        intr = CameraIntrinsics(525.0, 520.0, 319.5, 239.5, 640, 480)
        rng = np.random.default_rng(0)
        pixels = rng.uniform([0, 0], [639, 479], size=(1000, 2))
        depths = rng.uniform(0.3, 5.0, size=1000)
        for p, d in zip(pixels, depths):
            ray = backproject(intr, p)
            np.testing.assert_allclose(project(intr, d * ray), p, atol=1e-9)

    def test_project_points_masks_behind(self):
        intr = CameraIntrinsics(100.0, 100.0, 50.0, 50.0, 100, 100)
        pts = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]])
        uv, ok = project_points(intr, pts)
        assert ok.tolist() == [True, False]
        np.testing.assert_allclose(uv[0], [50.0, 50.0])


class TestBackproject:
    def test_principal_point(self):
        intr = CameraIntrinsics(525.0, 520.0, 319.5, 239.5, 640, 480)
        np.testing.assert_allclose(backproject(intr, [319.5, 239.5]), [0, 0, 1], atol=1e-12)

    def test_45_degree_ray(self):
        intr = CameraIntrinsics(100.0, 100.0, 50.0, 50.0, 100, 100)
        ray = backproject(intr, [150.0, 50.0])
        np.testing.assert_allclose(ray, np.array([1.0, 0.0, 1.0]) / np.sqrt(2), atol=1e-12)

    def test_unit_norm_and_unnormalized_z(self):
        intr = CameraIntrinsics(525.0, 520.0, 319.5, 239.5, 640, 480)
        rng = np.random.default_rng(1)
        pixels = rng.uniform([0, 0], [639, 479], size=(1000, 2))
        rays = backproject_pixels(intr, pixels)
        np.testing.assert_allclose(np.linalg.norm(rays, axis=1), 1.0, atol=1e-12)
        # the pre-normalization ray has z exactly 1
        unnorm = rays / rays[:, 2:3]
        np.testing.assert_allclose(
            unnorm[:, 0] * intr.fx + intr.cx, pixels[:, 0], atol=1e-9
        )


class TestCayley:
    def test_zero_is_exact_identity(self):
        R = cayley_to_rotation(np.zeros(3))
        assert np.array_equal(R, np.eye(3))

    def test_z_axis_90_degrees(self):
        # c = (0, 0, tan(45 deg)) rotates 90 degrees about z
        R = cayley_to_rotation([0.0, 0.0, 1.0])
        np.testing.assert_allclose(R @ [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], atol=1e-12)
        assert rotation_angle_deg(R) == pytest.approx(90.0, abs=1e-9)

    def test_small_angle_linearization(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            c = rng.normal(scale=1e-3, size=3)
            R = cayley_to_rotation(c)
            lin = np.eye(3) + 2.0 * skew(c)
            err = np.linalg.norm(R - lin)
            assert err <= 10.0 * (c @ c)

    def test_orthonormal_for_random_inputs(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            R = cayley_to_rotation(rng.normal(scale=2.0, size=3))
            np.testing.assert_allclose(R.T @ R, np.eye(3), atol=1e-12)
            assert np.linalg.det(R) == pytest.approx(1.0, abs=1e-12)

    def test_roundtrip(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            c = rng.normal(scale=0.5, size=3)
            np.testing.assert_allclose(rotation_to_cayley(cayley_to_rotation(c)), c, atol=1e-9)


class TestCompose:
    def test_zero_delta_keeps_pose(self):
        rng = np.random.default_rng(5)
        base = Pose(random_rotation(rng), rng.normal(size=3))
        out = compose(base, PoseDelta.zero())
        np.testing.assert_allclose(out.R, base.R, atol=1e-15)
        np.testing.assert_allclose(out.t, base.t, atol=1e-15)

    def test_translation_from_identity(self):
        out = compose(Pose.identity(), PoseDelta(np.array([0, 0, 0, 1.0, 2.0, 3.0])))
        np.testing.assert_allclose(out.t, [1.0, 2.0, 3.0])
        np.testing.assert_allclose(out.R, np.eye(3))

    def test_translation_only_inverse(self):
        rng = np.random.default_rng(6)
        base = Pose(random_rotation(rng), rng.normal(size=3))
        d = np.array([0, 0, 0, 0.3, -0.2, 0.1])
        forth = compose(base, PoseDelta(d))
        back = compose(forth, PoseDelta(-d))
        np.testing.assert_allclose(back.R, base.R, atol=1e-9)
        np.testing.assert_allclose(back.t, base.t, atol=1e-9)

    def test_orthonormality_over_many_chained_updates(self):
        rng = np.random.default_rng(7)
        pose = Pose.identity()
        for _ in range(100_000):
            delta = np.concatenate([rng.normal(scale=1e-3, size=3), rng.normal(scale=1e-3, size=3)])
            pose = compose(pose, PoseDelta(delta))
        assert np.linalg.norm(pose.R.T @ pose.R - np.eye(3)) <= 1e-6

    def test_pose_validation(self):
        with pytest.raises(ValueError):
            Pose(np.eye(3) * 1.1, np.zeros(3))


class TestPoseAlgebra:
    def test_between_and_multiply(self):
        rng = np.random.default_rng(8)
        a = Pose(random_rotation(rng), rng.normal(size=3))
        b = Pose(random_rotation(rng), rng.normal(size=3))
        rel = pose_between(a, b)
        back = pose_multiply(a, rel)
        np.testing.assert_allclose(back.matrix(), b.matrix(), atol=1e-12)

    def test_inverse(self):
        rng = np.random.default_rng(9)
        a = Pose(random_rotation(rng), rng.normal(size=3))
        ident = pose_multiply(a, pose_inverse(a))
        np.testing.assert_allclose(ident.matrix(), np.eye(4), atol=1e-12)


class TestIntrinsicsIO:
    def test_validation(self):
        with pytest.raises(ValueError):
            CameraIntrinsics(-1.0, 1.0, 10.0, 10.0, 20, 20)
        with pytest.raises(ValueError):
            CameraIntrinsics(10.0, 10.0, 30.0, 10.0, 20, 20)

    def test_load_file(self, tmp_path):
        path = tmp_path / "intr.txt"
        path.write_text("525.0 520.0 319.5 239.5 640 480\n")
        intr = load_intrinsics(path)
        assert intr.fx == 525.0 and intr.width == 640

    def test_tum_presets(self):
        for intr in TUM_INTRINSICS.values():
            assert intr.width == 640 and intr.height == 480

    def test_scaled(self):
        intr = TUM_INTRINSICS["fr2"].scaled(0.5)
        assert intr.width == 320 and intr.fx == pytest.approx(260.45)
