"""Unit tests for the synthetic scene renderer."""

import numpy as np
import pytest

from edgevo.geometry import Pose, pose_between, rotation_angle_deg
from edgevo.image import extractor_pipeline
from edgevo.synthetic import (
    Patch,
    SyntheticScene,
    _rect,
    default_intrinsics,
    make_blocks_scene,
    make_pebbles_scene,
    make_planar_scene,
    make_smooth_trajectory,
    render_frame,
    render_sequence,
    X,
    Y,
)


class TestPatchRendering:
    def test_depth_is_analytic_plane_depth(self):
        # fronto-parallel square: every covered pixel must carry exactly z
        intr = default_intrinsics(160, 120)
        scene = SyntheticScene(
            patches=[Patch(_rect([0.0, 0.0, 2.0], X, Y, 0.4, 0.3), 0.8)],
            trajectory=[Pose.identity()],
            intr=intr,
        )
        gray, depth = render_frame(scene, Pose.identity())
        covered = depth.data > 0
        assert covered.sum() > 500
        np.testing.assert_allclose(depth.data[covered], 2.0, atol=1e-4)

    def test_depth_of_tilted_plane(self):
        intr = default_intrinsics(160, 120)
        e2 = np.array([0.0, 0.6, 0.8])
        scene = SyntheticScene(
            patches=[Patch(_rect([0.0, 0.0, 2.0], X, e2, 0.5, 0.5), 0.8)],
            trajectory=[Pose.identity()],
            intr=intr,
        )
        gray, depth = render_frame(scene, Pose.identity())
        covered = np.nonzero(depth.data > 0)
        # plane: n . x = d with n = e1 x e2
        n = np.cross(X, e2)
        d = n @ np.array([0.0, 0.0, 2.0])
        v, u = covered
        rays_z = d / (
            n[0] * (u - intr.cx) / intr.fx + n[1] * (v - intr.cy) / intr.fy + n[2]
        )
        np.testing.assert_allclose(depth.data[covered], rays_z, atol=1e-4)

    def test_occlusion_order(self):
        intr = default_intrinsics(160, 120)
        scene = SyntheticScene(
            patches=[
                Patch(_rect([0.0, 0.0, 3.0], X, Y, 1.5, 1.2), 0.3),
                Patch(_rect([0.0, 0.0, 1.5], X, Y, 0.2, 0.2), 0.9),
            ],
            trajectory=[Pose.identity()],
            intr=intr,
        )
        gray, depth = render_frame(scene, Pose.identity())
        cy, cx = int(intr.cy), int(intr.cx)
        assert depth.data[cy, cx] == pytest.approx(1.5, abs=1e-6)
        assert gray.data[cy, cx] == pytest.approx(0.9, abs=1e-6)

    def test_empty_view_raises(self):
        intr = default_intrinsics(160, 120)
        scene = SyntheticScene(
            patches=[Patch(_rect([100.0, 0.0, 3.0], X, Y, 0.1, 0.1), 0.9)],
            trajectory=[Pose.identity()],
            intr=intr,
        )
        with pytest.raises(ValueError):
            render_frame(scene, Pose.identity())

    def test_render_is_deterministic(self):
        scene = make_blocks_scene(n_frames=1, width=160, height=120)
        g1, d1 = render_frame(scene, scene.trajectory[0])
        g2, d2 = render_frame(scene, scene.trajectory[0])
        assert np.array_equal(g1.data, g2.data)
        assert np.array_equal(d1.data, d2.data)


class TestStrokeCurves:
    def test_line_region_collinear(self):
        # A thin stroke renders as a straight double-front band; each
        # gradient side must be collinear to sub-pixel RMS.
        intr = default_intrinsics()
        line = np.array([[-0.8, -0.35, 2.0], [0.9, 0.42, 2.0]])
        scene = SyntheticScene(
            patches=[], curves=[line], trajectory=[Pose.identity()], intr=intr, stroke=1.0
        )
        gray, depth = render_frame(scene, Pose.identity())
        region = extractor_pipeline(gray, "sobel", 0.30)
        p0 = np.array([intr.fx * (-0.8) / 2.0 + intr.cx, intr.fy * (-0.35) / 2.0 + intr.cy])
        p1 = np.array([intr.fx * 0.9 / 2.0 + intr.cx, intr.fy * 0.42 / 2.0 + intr.cy])
        direction = (p1 - p0) / np.linalg.norm(p1 - p0)
        normal = np.array([-direction[1], direction[0]])
        perp = (region.pixels.astype(float) - p0) @ normal
        side = np.sign(region.grad_dirs @ normal)
        for s in (1.0, -1.0):
            offsets = perp[side == s]
            assert len(offsets) > 100
            centered = offsets - offsets.mean()
            assert np.sqrt(np.mean(centered**2)) <= 0.5

    def test_stroke_depth_matches_curve_depth(self):
        intr = default_intrinsics(160, 120)
        line = np.array([[-0.3, 0.0, 2.0], [0.3, 0.0, 2.0]])
        scene = SyntheticScene(
            patches=[], curves=[line], trajectory=[Pose.identity()], intr=intr, stroke=1.0
        )
        gray, depth = render_frame(scene, Pose.identity())
        covered = depth.data > 0
        assert covered.sum() > 50
        np.testing.assert_allclose(depth.data[covered], 2.0, atol=1e-4)


class TestSceneFactories:
    def test_trajectory_lengths_and_distinct_poses(self):
        poses = make_smooth_trajectory(10)
        assert len(poses) == 10
        moved = pose_between(poses[0], poses[5])
        assert np.linalg.norm(moved.t) > 1e-4

    def test_standard_scenes_render(self):
        for factory in (make_blocks_scene, make_planar_scene):
            scene = factory(n_frames=2, width=160, height=120)
            frames = render_sequence(scene)
            assert len(frames) == 2
            gray, depth, pose = frames[0]
            assert (gray.data > 0.1).sum() > 1000

    def test_pebbles_scene_renders(self):
        scene = make_pebbles_scene(n_frames=1, width=160, height=120)
        gray, depth = render_frame(scene, scene.trajectory[0])
        region = extractor_pipeline(gray, "sobel", 0.10)
        assert len(region) > 500


class TestNoiseInjection:
    def test_noise_changes_frames_but_seed_reproduces(self):
        scene = make_pebbles_scene(n_frames=2, width=160, height=120, pixel_noise=1.0)
        a = render_sequence(scene)
        b = render_sequence(scene)
        assert np.array_equal(a[0][0].data, b[0][0].data)
        assert not np.array_equal(a[0][0].data, a[1][0].data)

    def test_depth_noise_perturbs_depth(self):
        quiet = make_pebbles_scene(n_frames=1, width=160, height=120)
        noisy = make_pebbles_scene(n_frames=1, width=160, height=120, depth_noise=0.01)
        _, d0 = render_frame(quiet, quiet.trajectory[0])
        rng = np.random.default_rng(0)
        _, d1 = render_frame(noisy, noisy.trajectory[0], rng)
        sel = (d0.data > 0) & (d1.data > 0)
        diff = (d1.data - d0.data)[sel]
        assert 0.005 < diff.std() < 0.02

    def test_bad_noise_kind_rejected(self):
        with pytest.raises(ValueError):
            make_pebbles_scene(noise_kind="poisson")
