"""Synthetic scenes with ground-truth trajectories.

Scenes combine filled convex planar patches (flat-shaded surfaces whose
silhouettes become clean step edges) with optional thin stroke curves.
Rendering supersamples patch coverage 4x for anti-aliasing and evaluates
depth analytically from each patch plane, so rendered depth is exact and
every frame carries an exact ground-truth pose.  Image-space noise with
configurable statistics can be injected for sensor-model experiments.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull
from scipy.spatial.transform import Rotation

from .geometry import CameraIntrinsics, Pose, cayley_to_rotation, project_points, transform_to_camera
from .image import DepthImage, GrayImage

BACKGROUND_ALBEDO = 0.03
MIN_PATCH_DEPTH = 0.2


@dataclass(frozen=True)
class Patch:
    """A filled convex planar polygon with a flat albedo."""

    vertices: np.ndarray
    albedo: float


@dataclass(eq=False)
class SyntheticScene:
    """Patches and/or curve strokes, a camera trajectory and noise knobs.

    ``pixel_noise`` displaces each patch rigidly in image space (and
    jitters stroke curves smoothly) with the given sigma per frame;
    ``noise_kind`` selects gaussian or heavy-tailed (student_t) draws.
    """

    patches: list[Patch]
    trajectory: list[Pose]
    intr: CameraIntrinsics
    curves: list[np.ndarray] = field(default_factory=list)
    timestamps: np.ndarray = field(default=None)  # type: ignore[assignment]
    stroke: float = 1.0
    pixel_noise: float = 0.0
    noise_kind: str = "gaussian"
    noise_nu: float = 3.0
    depth_noise: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.timestamps is None:
            self.timestamps = np.arange(len(self.trajectory)) / 30.0
        if self.noise_kind not in ("gaussian", "student_t"):
            raise ValueError("noise_kind must be gaussian or student_t")


def _noise_2d(rng, sigma: float, kind: str, nu: float, n: int) -> np.ndarray:
    if kind == "student_t":
        return rng.standard_t(nu, size=(n, 2)) * sigma
    return rng.normal(0.0, sigma, size=(n, 2))


def _convex_mask(poly: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Inside test for a convex polygon over a coordinate grid."""
    inside = np.ones(xs.shape, dtype=bool)
    k = poly.shape[0]
    # Use a consistent winding: signed area decides the inequality sign.
    area = 0.0
    for i in range(k):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % k]
        area += x0 * y1 - x1 * y0
    sign = 1.0 if area >= 0 else -1.0
    for i in range(k):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % k]
        cross = (x1 - x0) * (ys - y0) - (y1 - y0) * (xs - x0)
        inside &= sign * cross >= 0.0
    return inside


def _resample_curve(curve: np.ndarray, step: float) -> np.ndarray:
    pts = [curve[0]]
    for a, b in zip(curve[:-1], curve[1:]):
        seg = b - a
        length = float(np.linalg.norm(seg))
        n = max(1, int(np.ceil(length / step)))
        for k in range(1, n + 1):
            pts.append(a + seg * (k / n))
    return np.asarray(pts)


def _smooth_noise(n: int, sigma: float, kind: str, nu: float, rng, knot: int = 20) -> np.ndarray:
    """Smooth 2D jitter along a curve: draws at knots, linear in between."""
    m = max(2, n // knot + 2)
    knots = _noise_2d(rng, sigma, kind, nu, m)
    x = np.linspace(0.0, m - 1.0, n)
    out = np.empty((n, 2))
    for c in range(2):
        out[:, c] = np.interp(x, np.arange(m), knots[:, c])
    return out


def _render_patches(scene, pose, rng, img, dep):
    """Rasterize patches at 4x supersampling; returns True if any drew."""
    intr = scene.intr
    w, h = intr.width, intr.height
    ss = 4
    w4, h4 = w * ss, h * ss
    zbuf4 = np.full((h4, w4), np.inf)
    alb4 = np.full((h4, w4), BACKGROUND_ALBEDO)
    idbuf4 = np.full((h4, w4), -1, dtype=np.int32)

    planes = []
    drew = False
    for pid, patch in enumerate(scene.patches):
        cam = transform_to_camera(pose, patch.vertices)
        if cam[:, 2].min() <= MIN_PATCH_DEPTH:
            planes.append(None)
            continue
        uv, _ = project_points(intr, cam)
        if scene.pixel_noise > 0:
            uv = uv + _noise_2d(rng, scene.pixel_noise, scene.noise_kind, scene.noise_nu, 1)
        n_vec = np.cross(cam[1] - cam[0], cam[2] - cam[0])
        d_plane = float(n_vec @ cam[0])
        planes.append((n_vec, d_plane))

        # Supersampled bbox; 4x pixel (i4, j4) sits at native (i4 - 1.5)/4.
        u4 = uv[:, 0] * ss + (ss - 1) / 2.0
        v4 = uv[:, 1] * ss + (ss - 1) / 2.0
        x0 = max(int(np.floor(u4.min())), 0)
        x1 = min(int(np.ceil(u4.max())) + 1, w4)
        y0 = max(int(np.floor(v4.min())), 0)
        y1 = min(int(np.ceil(v4.max())) + 1, h4)
        if x0 >= x1 or y0 >= y1:
            continue
        gx, gy = np.meshgrid(np.arange(x0, x1, dtype=np.float64), np.arange(y0, y1, dtype=np.float64))
        mask = _convex_mask(np.stack([u4, v4], axis=1), gx, gy)
        if not mask.any():
            continue
        drew = True
        # Analytic plane depth along each covered ray.
        un = (gx - (ss - 1) / 2.0) / ss
        vn = (gy - (ss - 1) / 2.0) / ss
        denom = (
            n_vec[0] * (un - intr.cx) / intr.fx
            + n_vec[1] * (vn - intr.cy) / intr.fy
            + n_vec[2]
        )
        with np.errstate(divide="ignore", invalid="ignore"):
            z = d_plane / denom
        win = mask & (z > MIN_PATCH_DEPTH) & (z < zbuf4[y0:y1, x0:x1])
        zb = zbuf4[y0:y1, x0:x1]
        ab = alb4[y0:y1, x0:x1]
        ib = idbuf4[y0:y1, x0:x1]
        zb[win] = z[win]
        ab[win] = patch.albedo
        ib[win] = pid

    if not drew:
        return False

    img += alb4.reshape(h, ss, w, ss).mean(axis=(1, 3))
    # Depth at the native pixel centre, recomputed from the winning plane.
    ids = idbuf4[(ss // 2)::ss, (ss // 2)::ss]
    un, vn = np.meshgrid(np.arange(w, dtype=np.float64), np.arange(h, dtype=np.float64))
    for pid in np.unique(ids):
        if pid < 0 or planes[pid] is None:
            continue
        n_vec, d_plane = planes[pid]
        sel = ids == pid
        denom = (
            n_vec[0] * (un[sel] - intr.cx) / intr.fx
            + n_vec[1] * (vn[sel] - intr.cy) / intr.fy
            + n_vec[2]
        )
        dep[sel] = d_plane / denom
    return True


def _render_curves(scene, pose, rng, img, dep):
    """Splat stroke curves over the patch render; returns True if any drew."""
    intr = scene.intr
    w, h = intr.width, intr.height
    radius = scene.stroke + 0.5
    win = int(np.ceil(radius))
    offs = np.arange(-win, win + 1)
    off_u, off_v = np.meshgrid(offs, offs)
    off_u = off_u.ravel()
    off_v = off_v.ravel()

    drew = False
    for curve in scene.curves:
        cam = transform_to_camera(pose, curve)
        z_near = max(float(cam[:, 2].min()), MIN_PATCH_DEPTH)
        step = 0.35 * z_near / max(intr.fx, intr.fy)
        samples = _resample_curve(curve, step)
        cam = transform_to_camera(pose, samples)
        in_front = cam[:, 2] > MIN_PATCH_DEPTH
        if not np.any(in_front):
            continue
        cam = cam[in_front]
        uv, _ = project_points(intr, cam)
        z = cam[:, 2]
        if scene.pixel_noise > 0:
            uv = uv + _smooth_noise(
                uv.shape[0], scene.pixel_noise, scene.noise_kind, scene.noise_nu, rng
            )
        keep = (
            (uv[:, 0] > -radius)
            & (uv[:, 0] < w - 1 + radius)
            & (uv[:, 1] > -radius)
            & (uv[:, 1] < h - 1 + radius)
        )
        if not np.any(keep):
            continue
        drew = True
        uv = uv[keep]
        z = z[keep]
        pu = np.rint(uv[:, 0]).astype(np.int64)[:, None] + off_u[None, :]
        pv = np.rint(uv[:, 1]).astype(np.int64)[:, None] + off_v[None, :]
        du = pu - uv[:, 0][:, None]
        dv = pv - uv[:, 1][:, None]
        cov = np.clip(radius - np.hypot(du, dv), 0.0, 1.0)
        ok = (pu >= 0) & (pu < w) & (pv >= 0) & (pv < h) & (cov > 0)
        pu_f = pu[ok]
        pv_f = pv[ok]
        cov_f = cov[ok]
        z_f = np.broadcast_to(z[:, None], cov.shape)[ok]
        np.maximum.at(img, (pv_f, pu_f), cov_f)
        solid = cov_f >= 0.5
        occluded = dep[pv_f[solid], pu_f[solid]]
        nearer = (occluded == 0.0) | (z_f[solid] < occluded)
        dep[pv_f[solid][nearer], pu_f[solid][nearer]] = z_f[solid][nearer]
    return drew


def render_frame(
    scene: SyntheticScene, pose: Pose, rng: np.random.Generator | None = None
) -> tuple[GrayImage, DepthImage]:
    """Rasterize the scene as seen from ``pose``.

    Raises ValueError when nothing projects into the view.
    """
    intr = scene.intr
    img = np.zeros((intr.height, intr.width))
    dep = np.zeros((intr.height, intr.width))
    noisy = scene.pixel_noise > 0 or scene.depth_noise > 0
    if noisy and rng is None:
        rng = np.random.default_rng(scene.seed)

    drew = False
    if scene.patches:
        drew |= _render_patches(scene, pose, rng, img, dep)
    if scene.curves:
        drew |= _render_curves(scene, pose, rng, img, dep)
    if not drew:
        raise ValueError("no scene point projects into the frame")

    if scene.depth_noise > 0:
        valid = dep > 0
        dep[valid] = np.maximum(
            dep[valid] + rng.normal(0.0, scene.depth_noise, int(valid.sum())),
            MIN_PATCH_DEPTH,
        )
    return GrayImage.from_array(np.clip(img, 0.0, 1.0)), DepthImage.from_array(dep)


def render_sequence(scene: SyntheticScene) -> list[tuple[GrayImage, DepthImage, Pose]]:
    """Render every trajectory pose; one shared rng keeps frames independent."""
    rng = np.random.default_rng(scene.seed)
    out = []
    for pose in scene.trajectory:
        gray, depth = render_frame(scene, pose, rng)
        out.append((gray, depth, pose))
    return out


def _rect(center, e1, e2, half1: float, half2: float) -> np.ndarray:
    center = np.asarray(center, dtype=np.float64)
    e1 = np.asarray(e1, dtype=np.float64)
    e2 = np.asarray(e2, dtype=np.float64)
    return np.array(
        [
            center - half1 * e1 - half2 * e2,
            center + half1 * e1 - half2 * e2,
            center + half1 * e1 + half2 * e2,
            center - half1 * e1 + half2 * e2,
        ]
    )


def _disk(center, normal, radius: float, n: int = 24) -> np.ndarray:
    normal = np.asarray(normal, dtype=np.float64)
    normal = normal / np.linalg.norm(normal)
    a = np.array([1.0, 0.0, 0.0])
    if abs(normal @ a) > 0.9:
        a = np.array([0.0, 1.0, 0.0])
    e1 = np.cross(normal, a)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(normal, e1)
    ang = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    return np.asarray(center) + radius * (np.outer(np.cos(ang), e1) + np.outer(np.sin(ang), e2))


X = np.array([1.0, 0.0, 0.0])
Y = np.array([0.0, 1.0, 0.0])


def _pebble(center, normal, radius: float, rng, n_verts: int = 12, wobble: float = 0.3) -> np.ndarray:
    """A random convex polygon ("pebble") in the plane with the given normal.

    Pebble silhouettes carry edge normals in every image direction, which
    is what pins down the uniform-image-shift mode of pixel-set
    registration.
    """
    normal = np.asarray(normal, dtype=np.float64)
    normal = normal / np.linalg.norm(normal)
    a = np.array([1.0, 0.0, 0.0]) if abs(normal[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(normal, a)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(normal, e1)
    ang = np.sort(rng.uniform(0.0, 2.0 * np.pi, n_verts))
    rad = radius * (1.0 + wobble * (rng.random(n_verts) - 0.5))
    pts2 = np.stack([rad * np.cos(ang), rad * np.sin(ang)], axis=1)
    hull = ConvexHull(pts2)
    pts2 = pts2[hull.vertices]
    return np.asarray(center) + pts2[:, 0:1] * e1 + pts2[:, 1:2] * e2


def make_pebbles_patches(seed: int = 5) -> list[Patch]:
    """Registration-study fixture: convex pebbles at mixed depths.

    Compared to the blocks scene, silhouette orientations here are close
    to uniform, which sharpens the registration optimum onto the exact
    pose; used by the pose-recovery and convergence oracles.
    """
    rng = np.random.default_rng(seed)
    albedos = [0.85, 0.6, 0.95, 0.05, 0.7, 0.92, 0.15, 0.75, 0.55, 0.9, 0.1, 0.65]
    patches = [Patch(_rect([0.0, 0.0, 3.0], X, Y, 3.6, 2.7), 0.30)]
    wall_pos = [(-1.25, -0.8), (1.25, -0.75), (-1.3, 0.85), (1.3, 0.9), (0.0, -0.9), (0.0, 0.95)]
    for i, (x, y) in enumerate(wall_pos):
        patches.append(Patch(_pebble([x, y, 2.98], [0.0, 0.0, 1.0], 0.45, rng), albedos[i]))
    near = [
        ((-0.55, 0.48, 1.65), (0.3, 0.1, 1.0), 0.33),
        ((0.55, 0.5, 1.8), (-0.2, 0.3, 1.0), 0.3),
        ((0.0, -0.45, 1.9), (0.25, -0.2, 1.0), 0.32),
        ((0.78, -0.35, 2.2), (0.1, 0.2, 1.0), 0.28),
        ((-0.85, -0.25, 2.1), (-0.1, 0.15, 1.0), 0.27),
        ((0.05, 0.1, 2.4), (0.2, 0.25, 1.0), 0.3),
    ]
    for j, (c, nrm, rad) in enumerate(near):
        patches.append(Patch(_pebble(list(c), list(nrm), rad, rng), albedos[6 + j]))
    return patches


def make_pebbles_scene(
    n_frames: int = 2,
    width: int = 640,
    height: int = 480,
    pixel_noise: float = 0.0,
    noise_kind: str = "gaussian",
    noise_nu: float = 3.0,
    depth_noise: float = 0.0,
    translation_amplitude: float = 0.06,
    rotation_amplitude_deg: float = 1.5,
    seed: int = 5,
) -> SyntheticScene:
    """Registration fixture: pebbles + a narrow-FOV camera."""
    f = 1.1 * width
    intr = CameraIntrinsics(f, f, width / 2.0 - 0.5, height / 2.0 - 0.5, width, height)
    return SyntheticScene(
        patches=make_pebbles_patches(seed),
        trajectory=make_smooth_trajectory(
            n_frames, translation_amplitude, rotation_amplitude_deg
        ),
        intr=intr,
        pixel_noise=pixel_noise,
        noise_kind=noise_kind,
        noise_nu=noise_nu,
        depth_noise=depth_noise,
        seed=seed,
    )


def make_blocks_patches() -> list[Patch]:
    """The standard fixture: desk scene with near and far structure.

    A tilted table with plaques fills the lower half at close range while
    a decorated wall closes the view: silhouette edges run in many image
    directions across depths 1.1-3 m, so parallax constrains translation
    as strongly as the edges constrain rotation.
    """
    diag1 = np.array([0.8, 0.6, 0.0])
    diag1 /= np.linalg.norm(diag1)
    diag2 = np.array([-0.6, 0.8, 0.0])
    diag2 /= np.linalg.norm(diag2)
    # Horizontal table plane below the camera, running into the wall.
    te1 = X
    te2 = np.array([0.0, 0.0, 1.0])

    def on_table(a: float, b: float) -> np.ndarray:
        """Point on the table plane; a along width, b along depth."""
        origin = np.array([0.0, 0.62, 1.35])
        return origin + a * te1 + b * te2

    patches = [
        # Back wall fills the view and provides depth everywhere.
        Patch(_rect([0.0, 0.0, 3.0], X, Y, 3.5, 2.6), 0.25),
        # Wall plaques, axis-aligned and rotated.
        Patch(_rect([-1.0, -0.55, 2.98], X, Y, 0.45, 0.3), 0.75),
        Patch(_rect([0.95, -0.55, 2.98], diag1, diag2, 0.42, 0.28), 0.9),
        Patch(_disk([0.0, -0.72, 2.98], [0.0, 0.0, 1.0], 0.3), 0.55),
        # Table surface (near, strongly tilted in depth).
        Patch(
            np.array([on_table(-1.6, -0.3), on_table(1.6, -0.3), on_table(1.9, 2.2), on_table(-1.9, 2.2)]),
            0.5,
        ),
        # Plaques lying on the table at close range (2 mm proud of it).
        Patch(np.array([on_table(-0.5, 0.0), on_table(-0.12, 0.02), on_table(-0.1, 0.3), on_table(-0.52, 0.28)]) - [0, 0.002, 0], 0.92),
        Patch(np.array([on_table(0.2, 0.1), on_table(0.55, 0.0), on_table(0.62, 0.26), on_table(0.25, 0.33)]) - [0, 0.002, 0], 0.15),
        Patch(np.array([on_table(-0.15, 0.45), on_table(0.22, 0.5), on_table(0.1, 0.8), on_table(-0.25, 0.75)]) - [0, 0.002, 0], 0.78),
        Patch(_disk(on_table(0.55, 0.62) - np.array([0.0, 0.002, 0.0]), Y, 0.14), 0.05),
        # A box standing on the table.
        Patch(_rect([-0.5, 0.28, 1.78], X, Y, 0.17, 0.14), 0.85),
        Patch(
            np.array(
                [
                    [-0.67, 0.14, 1.78],
                    [-0.33, 0.14, 1.78],
                    [-0.33, 0.2, 2.0],
                    [-0.67, 0.2, 2.0],
                ]
            ),
            0.62,
        ),
        # Floating tilted plaques at mid depth (tilted in depth too).
        Patch(
            _rect(
                [0.5, -0.1, 1.9],
                diag1,
                (diag2 + np.array([0.0, 0.0, 0.45]))
                / np.linalg.norm(diag2 + np.array([0.0, 0.0, 0.45])),
                0.24,
                0.17,
            ),
            0.95,
        ),
        Patch(
            _rect(
                [-0.55, -0.15, 2.2],
                (X + np.array([0.0, 0.0, 0.36]))
                / np.linalg.norm(X + np.array([0.0, 0.0, 0.36])),
                Y,
                0.28,
                0.2,
            ),
            0.45,
        ),
        # A disk in front of the wall.
        Patch(_disk([0.05, 0.05, 2.5], [0.2, 0.1, 1.0], 0.26), 0.8),
    ]
    return patches


def make_planar_patches(z: float = 2.5) -> list[Patch]:
    """Plaques on a single plane (degenerate for depth-only trackers)."""
    diag = np.array([0.8, 0.6, 0.0])
    diag /= np.linalg.norm(diag)
    diag2 = np.array([-0.6, 0.8, 0.0])
    diag2 /= np.linalg.norm(diag2)
    eps = 1e-4  # plaques a hair in front of the wall, geometrically coplanar
    return [
        Patch(_rect([0.0, 0.0, z + eps], X, Y, 3.0, 2.2), 0.25),
        Patch(_rect([-0.8, -0.45, z], X, Y, 0.4, 0.26), 0.8),
        Patch(_rect([0.85, -0.4, z], diag, diag2, 0.38, 0.24), 0.6),
        Patch(_rect([-0.75, 0.5, z], diag2, diag, 0.3, 0.2), 0.9),
        Patch(_disk([0.8, 0.5, z], [0.0, 0.0, 1.0], 0.3), 0.7),
        Patch(_rect([0.0, 0.05, z], diag, diag2, 0.3, 0.12), 0.45),
    ]


def make_smooth_trajectory(
    n_frames: int,
    translation_amplitude: float = 0.10,
    rotation_amplitude_deg: float = 3.0,
) -> list[Pose]:
    """Smooth sinusoidal camera motion around the origin, looking at +z."""
    poses = []
    rot_amp = np.tan(np.radians(rotation_amplitude_deg) / 2.0)
    for k in range(n_frames):
        s = k / max(n_frames, 1)
        t = translation_amplitude * np.array(
            [
                np.sin(2.0 * np.pi * s),
                np.sin(4.0 * np.pi * s + 1.0),
                0.5 * np.sin(2.0 * np.pi * s + 2.0),
            ]
        )
        c = rot_amp * np.array(
            [
                0.4 * np.sin(2.0 * np.pi * s + 0.5),
                0.6 * np.sin(2.0 * np.pi * s),
                0.5 * np.sin(4.0 * np.pi * s),
            ]
        )
        poses.append(Pose(cayley_to_rotation(c), t))
    return poses


def default_intrinsics(width: int = 320, height: int = 240) -> CameraIntrinsics:
    """A desk-scale pinhole model at the requested resolution."""
    f = 0.8125 * width
    return CameraIntrinsics(f, f, width / 2.0 - 0.5, height / 2.0 - 0.5, width, height)


def make_blocks_scene(
    n_frames: int = 30,
    width: int = 320,
    height: int = 240,
    pixel_noise: float = 0.0,
    noise_kind: str = "gaussian",
    noise_nu: float = 3.0,
    depth_noise: float = 0.0,
    translation_amplitude: float = 0.10,
    rotation_amplitude_deg: float = 3.0,
    seed: int = 0,
) -> SyntheticScene:
    """The standard test fixture: blocks scene + smooth trajectory."""
    return SyntheticScene(
        patches=make_blocks_patches(),
        trajectory=make_smooth_trajectory(
            n_frames, translation_amplitude, rotation_amplitude_deg
        ),
        intr=default_intrinsics(width, height),
        pixel_noise=pixel_noise,
        noise_kind=noise_kind,
        noise_nu=noise_nu,
        depth_noise=depth_noise,
        seed=seed,
    )


def make_planar_scene(
    n_frames: int = 10, width: int = 320, height: int = 240, seed: int = 0
) -> SyntheticScene:
    return SyntheticScene(
        patches=make_planar_patches(),
        trajectory=make_smooth_trajectory(n_frames, 0.06, 1.5),
        intr=default_intrinsics(width, height),
        seed=seed,
    )


def write_tum_dataset(scene: SyntheticScene, out_dir, depth_scale: float = 5000.0) -> None:
    """Render the scene into a TUM-layout dataset directory."""
    from .dataset import save_depth_png, save_gray_png

    os.makedirs(os.path.join(out_dir, "rgb"), exist_ok=True)
    os.makedirs(os.path.join(out_dir, "depth"), exist_ok=True)
    rgb_lines = []
    depth_lines = []
    gt_lines = []
    for (gray, depth, pose), t in zip(render_sequence(scene), scene.timestamps):
        name = f"{t:.6f}.png"
        save_gray_png(gray, os.path.join(out_dir, "rgb", name))
        save_depth_png(depth, os.path.join(out_dir, "depth", name), depth_scale)
        rgb_lines.append(f"{t:.6f} rgb/{name}\n")
        depth_lines.append(f"{t:.6f} depth/{name}\n")
        q = Rotation.from_matrix(pose.R).as_quat()
        gt_lines.append(
            f"{t:.6f} {pose.t[0]:.9f} {pose.t[1]:.9f} {pose.t[2]:.9f} "
            f"{q[0]:.9f} {q[1]:.9f} {q[2]:.9f} {q[3]:.9f}\n"
        )
    for name, lines in (
        ("rgb.txt", rgb_lines),
        ("depth.txt", depth_lines),
        ("groundtruth.txt", gt_lines),
    ):
        with open(os.path.join(out_dir, name), "w") as fh:
            fh.write("# synthetic blocks sequence\n# timestamp data\n")
            fh.writelines(lines)
