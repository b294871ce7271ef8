"""Keyframe map construction with foreground depth reasoning.

Each semi-dense pixel of a keyframe is lifted to 3D along its viewing ray.
Depth values come from a 5x5 patch vote: patch depths are sorted and
single-linkage clustered, and if a cluster nearer than the centre pixel's
cluster exists its centre replaces the measurement.  This keeps edge
points on the foreground object when the depth map straddles an occlusion
boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .geometry import CameraIntrinsics, Pose, backproject_pixels
from .image import DepthImage, SemiDenseRegion

# Single-linkage gap: base plus a range-proportional term, mirroring how
# RGB-D depth noise grows with distance.
DEPTH_GAP_BASE = 0.05
DEPTH_GAP_REL = 0.02

# Minimum surviving points for a trackable keyframe.
N_MIN_POINTS = 300


@dataclass(eq=False)
class KeyframeMap:
    """3D semi-dense map anchored to a keyframe.

    Per-point arrays: ``points`` (N, 3) positions in the keyframe camera
    frame, ``bearings`` (N, 3) unit rays, ``ray_depths`` (N,) distances
    along the ray (points = ray_depths * bearings), ``pixels`` (N, 2)
    source pixel coordinates, ``grad_dirs`` (N, 2) unit image-gradient
    directions frozen from the keyframe.
    """

    points: np.ndarray
    bearings: np.ndarray
    ray_depths: np.ndarray
    pixels: np.ndarray
    grad_dirs: np.ndarray
    pose: Pose
    frame_id: int

    def __len__(self) -> int:
        return self.points.shape[0]

    def world_points(self) -> np.ndarray:
        return self.points @ self.pose.R.T + self.pose.t


@njit(cache=True)
def _foreground_kernel(depth, us, vs, gap_base, gap_rel, out):  # pragma: no cover
    h, w = depth.shape
    vals = np.empty(25, dtype=np.float64)
    for i in range(us.shape[0]):
        u = us[i]
        v = vs[i]
        n = 0
        for dv in range(-2, 3):
            vv = v + dv
            if vv < 0 or vv >= h:
                continue
            for du in range(-2, 3):
                uu = u + du
                if uu < 0 or uu >= w:
                    continue
                z = depth[vv, uu]
                if z > 0.0:
                    vals[n] = z
                    n += 1
        if n == 0:
            out[i] = np.nan
            continue
        patch = np.sort(vals[:n])
        center = depth[v, u]
        ref = center if center > 0.0 else patch[0]
        tau = gap_base + gap_rel * ref
        # End of the nearest cluster (first run of gap <= tau).
        first_end = 1
        while first_end < n and patch[first_end] - patch[first_end - 1] <= tau:
            first_end += 1
        if center <= 0.0:
            out[i] = patch[:first_end].mean()
            continue
        if center <= patch[first_end - 1]:
            # Centre belongs to the nearest cluster: keep its own depth.
            out[i] = center
        else:
            out[i] = patch[:first_end].mean()


def foreground_depth(
    depth: DepthImage,
    p,
    gap_base: float = DEPTH_GAP_BASE,
    gap_rel: float = DEPTH_GAP_REL,
) -> float | None:
    """Foreground-corrected depth at one pixel, or None when unmeasured."""
    u, v = int(p[0]), int(p[1])
    if not (0 <= u < depth.width and 0 <= v < depth.height):
        raise ValueError("pixel outside the depth image")
    out = np.empty(1)
    _foreground_kernel(
        depth.data,
        np.array([u], dtype=np.int64),
        np.array([v], dtype=np.int64),
        gap_base,
        gap_rel,
        out,
    )
    return None if np.isnan(out[0]) else float(out[0])


def foreground_depths(
    depth: DepthImage,
    pixels: np.ndarray,
    gap_base: float = DEPTH_GAP_BASE,
    gap_rel: float = DEPTH_GAP_REL,
) -> np.ndarray:
    """Vectorized foreground depths for (N, 2) pixels; NaN where unmeasured."""
    pixels = np.asarray(pixels)
    out = np.empty(pixels.shape[0])
    _foreground_kernel(
        depth.data,
        pixels[:, 0].astype(np.int64),
        pixels[:, 1].astype(np.int64),
        gap_base,
        gap_rel,
        out,
    )
    return out


def build_keyframe_map(
    region: SemiDenseRegion,
    depth: DepthImage,
    intr: CameraIntrinsics,
    pose: Pose,
    frame_id: int,
    n_min: int = N_MIN_POINTS,
    gap_base: float = DEPTH_GAP_BASE,
    gap_rel: float = DEPTH_GAP_REL,
) -> KeyframeMap:
    """Lift the semi-dense region to 3D; drops pixels without usable depth."""
    if region.width != depth.width or region.height != depth.height:
        raise ValueError("region and depth image dimensions differ")
    z = foreground_depths(depth, region.pixels, gap_base, gap_rel)
    keep = np.isfinite(z) & (z > 0)
    if int(keep.sum()) < n_min:
        raise ValueError(
            f"keyframe map has only {int(keep.sum())} points (need {n_min})"
        )
    pixels = region.pixels[keep]
    bearings = backproject_pixels(intr, pixels.astype(np.float64))
    d = z[keep] / bearings[:, 2]
    points = bearings * d[:, None]
    return KeyframeMap(
        points=points,
        bearings=bearings,
        ray_depths=d,
        pixels=pixels.copy(),
        grad_dirs=region.grad_dirs[keep].copy(),
        pose=pose,
        frame_id=frame_id,
    )


def write_point_cloud(kf_map: KeyframeMap, path, gray: int = 200) -> None:
    """Dump the map as an ASCII ``x y z r g b`` point cloud (world frame)."""
    pts = kf_map.world_points()
    with open(path, "w") as fh:
        for x, y, z in pts:
            fh.write(f"{x:.6f} {y:.6f} {z:.6f} {gray} {gray} {gray}\n")
