"""Shared fixtures: rendered scenes are expensive, so they are session-scoped."""

from __future__ import annotations

import numpy as np
import pytest

from edgevo import annf, image, mapping, synthetic
from edgevo.geometry import Pose


@pytest.fixture(scope="session")
def pebbles_frame():
    """One rendered pebbles frame at 640x480 with its map and field.

    The registration-study fixture: map and field both come from the same
    view, so the exact pose is the exact optimum of the objective.
    """
    scene = synthetic.make_pebbles_scene(n_frames=1)
    pose = Pose.identity()
    gray, depth = synthetic.render_frame(scene, pose)
    region = image.extractor_pipeline(gray, "sobel", 0.10)
    kf_map = mapping.build_keyframe_map(region, depth, scene.intr, pose, 0)
    field = annf.build_annf(region, scene.intr.width, scene.intr.height)
    return {
        "scene": scene,
        "pose": pose,
        "gray": gray,
        "depth": depth,
        "region": region,
        "map": kf_map,
        "field": field,
        "intr": scene.intr,
    }


@pytest.fixture(scope="session")
def pebbles_pair_small():
    """Two nearby rendered pebbles views at 320x240 (realistic baseline)."""
    scene = synthetic.make_pebbles_scene(
        n_frames=2, width=320, height=240, translation_amplitude=0.012,
        rotation_amplitude_deg=0.3,
    )
    p0, p1 = scene.trajectory[0], scene.trajectory[1]
    g0, d0 = synthetic.render_frame(scene, p0)
    g1, d1 = synthetic.render_frame(scene, p1)
    r0 = image.extractor_pipeline(g0, "sobel", 0.10)
    r1 = image.extractor_pipeline(g1, "sobel", 0.10)
    kf_map = mapping.build_keyframe_map(r0, d0, scene.intr, p0, 0)
    field = annf.build_annf(r1, scene.intr.width, scene.intr.height)
    return {
        "scene": scene,
        "poses": (p0, p1),
        "grays": (g0, g1),
        "depths": (d0, d1),
        "regions": (r0, r1),
        "map": kf_map,
        "field": field,
        "intr": scene.intr,
    }


@pytest.fixture(scope="session")
def warm_numba():
    """Force numba kernels to compile before any timing-sensitive test."""
    region = image.SemiDenseRegion(
        np.array([[1, 1]]), np.array([[1.0, 0.0]]), 4, 4
    )
    annf.build_annf(region, 4, 4)
    depth = image.DepthImage.from_array(np.full((8, 8), 2.0))
    mapping.foreground_depth(depth, (4, 4))
    return True
