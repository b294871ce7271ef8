"""Pinhole camera model, rigid poses and Cayley-parametrized pose updates.

Conventions used throughout the package:

* Pixel coordinates are ``(u, v)`` = (column, row); image arrays are
  indexed ``[v, u]``.
* A ``Pose`` stores the camera orientation ``R`` (camera axes expressed in
  the world frame) and the camera position ``t`` in the world frame.  A
  world point ``s`` maps into the camera as ``R.T @ (s - t)``.
* Local pose updates are 6-vectors ``[c1, c2, c3, tx, ty, tz]`` where the
  first three entries are Cayley rotation parameters and the last three a
  world-frame translation increment.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

# Compositions between consecutive re-orthonormalizations of the rotation.
REORTHONORMALIZE_EVERY = 100

_ORTHO_TOL = 1e-6


@dataclass(frozen=True)
class CameraIntrinsics:
    """Pinhole intrinsics with the image size they refer to."""

    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError("focal lengths must be positive")
        if not (0 < self.cx < self.width) or not (0 < self.cy < self.height):
            raise ValueError("principal point must lie inside the image")

    def scaled(self, factor: float) -> "CameraIntrinsics":
        """Intrinsics for an image resized by ``factor`` (e.g. 0.5)."""
        return CameraIntrinsics(
            fx=self.fx * factor,
            fy=self.fy * factor,
            cx=self.cx * factor,
            cy=self.cy * factor,
            width=max(1, int(round(self.width * factor))),
            height=max(1, int(round(self.height * factor))),
        )


@dataclass(frozen=True, eq=False)
class Pose:
    """Rigid transform: orientation ``R`` and camera position ``t`` in world.

    ``updates`` counts how many local updates produced this pose; it drives
    the periodic re-orthonormalization in :func:`compose`.
    """

    R: np.ndarray
    t: np.ndarray
    updates: int = field(default=0, compare=False)

    def __post_init__(self):
        R = np.asarray(self.R, dtype=np.float64)
        t = np.asarray(self.t, dtype=np.float64)
        if R.shape != (3, 3) or t.shape != (3,):
            raise ValueError("pose needs a 3x3 rotation and a 3-vector translation")
        err = np.linalg.norm(R.T @ R - np.eye(3))
        if err > _ORTHO_TOL or abs(np.linalg.det(R) - 1.0) > _ORTHO_TOL:
            raise ValueError("rotation is not orthonormal with determinant 1")
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "t", t)

    @staticmethod
    def identity() -> "Pose":
        return Pose(np.eye(3), np.zeros(3))

    def matrix(self) -> np.ndarray:
        """Homogeneous 4x4 camera-to-world matrix."""
        T = np.eye(4)
        T[:3, :3] = self.R
        T[:3, 3] = self.t
        return T


@dataclass(frozen=True)
class PoseDelta:
    """Local pose update: 3 Cayley parameters followed by translation."""

    theta: np.ndarray

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=np.float64)
        if theta.shape != (6,):
            raise ValueError("pose delta must be a 6-vector")
        if not np.all(np.isfinite(theta)):
            raise ValueError("pose delta must be finite")
        object.__setattr__(self, "theta", theta)

    @staticmethod
    def zero() -> "PoseDelta":
        return PoseDelta(np.zeros(6))

    def scaled(self, factor: float) -> "PoseDelta":
        return PoseDelta(self.theta * factor)


def skew(v: np.ndarray) -> np.ndarray:
    """Cross-product matrix: skew(a) @ b == cross(a, b)."""
    return np.array(
        [
            [0.0, -v[2], v[1]],
            [v[2], 0.0, -v[0]],
            [-v[1], v[0], 0.0],
        ]
    )


def cayley_to_rotation(c: np.ndarray) -> np.ndarray:
    """Rotation from Cayley parameters: (I + [c]x)(I - [c]x)^-1.

    Closed form; well defined for every real c (180 degree rotations are
    unreachable, which is fine for small frame-to-frame updates).
    """
    c = np.asarray(c, dtype=np.float64)
    n2 = float(c @ c)
    return ((1.0 - n2) * np.eye(3) + 2.0 * np.outer(c, c) + 2.0 * skew(c)) / (1.0 + n2)


def rotation_to_cayley(R: np.ndarray) -> np.ndarray:
    """Inverse of :func:`cayley_to_rotation` (valid away from 180 degrees)."""
    K = np.linalg.solve((R + np.eye(3)).T, (R - np.eye(3)).T).T
    # K is skew-symmetric up to rounding; average the two triangles.
    return 0.5 * np.array(
        [K[2, 1] - K[1, 2], K[0, 2] - K[2, 0], K[1, 0] - K[0, 1]]
    )


def nearest_rotation(R: np.ndarray) -> np.ndarray:
    """Orthogonal polar factor of R (the closest true rotation)."""
    U, _, Vt = np.linalg.svd(R)
    D = np.eye(3)
    D[2, 2] = np.sign(np.linalg.det(U @ Vt))
    return U @ D @ Vt


def compose(base: Pose, delta: PoseDelta) -> Pose:
    """Apply a local update: R <- R_base @ cayley(c), t <- t_base + dt.

    Every REORTHONORMALIZE_EVERY updates the rotation is snapped back onto
    the rotation manifold to keep drift bounded over long trajectories.
    """
    c = delta.theta[:3]
    R = base.R @ cayley_to_rotation(c)
    updates = base.updates + 1
    if updates % REORTHONORMALIZE_EVERY == 0:
        R = nearest_rotation(R)
    return Pose(R, base.t + delta.theta[3:], updates=updates)


def pose_inverse(p: Pose) -> Pose:
    """Pose whose transform matrix is the inverse of p's."""
    return Pose(p.R.T, -(p.R.T @ p.t))


def pose_multiply(a: Pose, b: Pose) -> Pose:
    """Matrix composition a.matrix() @ b.matrix() as a Pose."""
    return Pose(a.R @ b.R, a.R @ b.t + a.t)


def pose_between(a: Pose, b: Pose) -> Pose:
    """Relative pose E with a.matrix() @ E.matrix() == b.matrix()."""
    return pose_multiply(pose_inverse(a), b)


def rotation_angle_deg(R: np.ndarray) -> float:
    """Geodesic rotation angle of R in degrees."""
    cos = np.clip((np.trace(R) - 1.0) * 0.5, -1.0, 1.0)
    return float(np.degrees(np.arccos(cos)))


def project(intr: CameraIntrinsics, point_cam: np.ndarray) -> np.ndarray:
    """Project a camera-frame point to pixel coordinates.

    Raises ValueError for points at or behind the camera plane.  The result
    may lie outside the image bounds; callers filter.
    """
    point_cam = np.asarray(point_cam, dtype=np.float64)
    z = point_cam[2]
    if z <= 0:
        raise ValueError("cannot project a point with non-positive depth")
    return np.array(
        [
            intr.fx * point_cam[0] / z + intr.cx,
            intr.fy * point_cam[1] / z + intr.cy,
        ]
    )


def project_points(
    intr: CameraIntrinsics, points_cam: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized projection of (N, 3) camera-frame points.

    Returns (N, 2) pixel coordinates and an (N,) mask that is False for
    points with non-positive depth (their pixel values are unusable).
    """
    points_cam = np.asarray(points_cam, dtype=np.float64)
    z = points_cam[:, 2]
    in_front = z > 0
    safe_z = np.where(in_front, z, 1.0)
    uv = np.empty((points_cam.shape[0], 2))
    uv[:, 0] = intr.fx * points_cam[:, 0] / safe_z + intr.cx
    uv[:, 1] = intr.fy * points_cam[:, 1] / safe_z + intr.cy
    return uv, in_front


def backproject(intr: CameraIntrinsics, pixel: np.ndarray) -> np.ndarray:
    """Unit bearing vector of the ray through a pixel."""
    pixel = np.asarray(pixel, dtype=np.float64)
    ray = np.array(
        [(pixel[0] - intr.cx) / intr.fx, (pixel[1] - intr.cy) / intr.fy, 1.0]
    )
    return ray / np.linalg.norm(ray)


def backproject_pixels(intr: CameraIntrinsics, pixels: np.ndarray) -> np.ndarray:
    """Vectorized unit bearings for (N, 2) pixel coordinates."""
    pixels = np.asarray(pixels, dtype=np.float64)
    rays = np.empty((pixels.shape[0], 3))
    rays[:, 0] = (pixels[:, 0] - intr.cx) / intr.fx
    rays[:, 1] = (pixels[:, 1] - intr.cy) / intr.fy
    rays[:, 2] = 1.0
    return rays / np.linalg.norm(rays, axis=1, keepdims=True)


def transform_to_camera(pose: Pose, points_world: np.ndarray) -> np.ndarray:
    """World points into the camera frame of ``pose``: R.T @ (s - t)."""
    return (np.asarray(points_world) - pose.t) @ pose.R


def load_intrinsics(path) -> CameraIntrinsics:
    """Read a whitespace-separated ``fx fy cx cy width height`` file."""
    with open(path) as fh:
        values = fh.read().split()
    if len(values) != 6:
        raise ValueError(f"expected 6 values in intrinsics file, got {len(values)}")
    fx, fy, cx, cy = (float(v) for v in values[:4])
    width, height = int(values[4]), int(values[5])
    return CameraIntrinsics(fx, fy, cx, cy, width, height)


# Calibrations published with the TUM RGB-D sequences (not tuned here).
TUM_INTRINSICS = {
    "fr1": CameraIntrinsics(517.3, 516.5, 318.6, 255.3, 640, 480),
    "fr2": CameraIntrinsics(520.9, 521.0, 325.1, 249.7, 640, 480),
    "fr3": CameraIntrinsics(535.4, 539.2, 320.1, 247.6, 640, 480),
}
