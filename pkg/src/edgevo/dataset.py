"""Dataset I/O: TUM-format directories, PNG rasters and trajectory files.

A TUM dataset directory holds ``rgb.txt``, ``depth.txt`` and optionally
``groundtruth.txt`` (timestamped file lists / poses) plus the ``rgb/`` and
``depth/`` image folders.  Depth PNGs are 16-bit with 5000 units per meter
unless configured otherwise; zero stays "no measurement".
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from PIL import Image
from scipy.spatial.transform import Rotation, Slerp

from .geometry import Pose
from .image import DepthImage, GrayImage, rgb_to_gray

TUM_DEPTH_SCALE = 5000.0
DEFAULT_MAX_DT = 0.02


@dataclass(frozen=True)
class TrajectoryEntry:
    """A timestamped camera pose."""

    timestamp: float
    pose: Pose


@dataclass(frozen=True)
class AssociatedFrame:
    """An rgb/depth pair matched by timestamp, with optional ground truth."""

    timestamp: float
    rgb_path: str
    depth_path: str
    gt_pose: Pose | None = None


def load_gray_png(path) -> GrayImage:
    """8-bit grayscale or 24-bit RGB PNG scaled to [0, 1] intensities."""
    img = Image.open(path)
    arr = np.asarray(img)
    if arr.ndim == 3:
        arr = rgb_to_gray(arr[:, :, :3].astype(np.float64) / 255.0)
    else:
        arr = arr.astype(np.float64) / 255.0
    return GrayImage.from_array(np.clip(arr, 0.0, 1.0))


def save_gray_png(img: GrayImage, path) -> None:
    arr = np.clip(np.rint(img.data * 255.0), 0, 255).astype(np.uint8)
    Image.fromarray(arr, mode="L").save(path)


def load_depth_png(path, scale: float = TUM_DEPTH_SCALE) -> DepthImage:
    """16-bit depth PNG divided by ``scale``; raw zero stays invalid."""
    arr = np.asarray(Image.open(path)).astype(np.float64)
    return DepthImage.from_array(arr / scale)


def save_depth_png(depth: DepthImage, path, scale: float = TUM_DEPTH_SCALE) -> None:
    arr = np.clip(np.rint(depth.data * scale), 0, 65535).astype(np.uint16)
    Image.fromarray(arr).save(path)


def save_u16_png(arr: np.ndarray, path) -> None:
    """Write a raw uint16 array (e.g. a distance-field debug dump)."""
    Image.fromarray(arr.astype(np.uint16)).save(path)


def read_list_file(path) -> list[tuple[float, list[str]]]:
    """Parse a TUM list file: `timestamp field...` lines, '#' comments."""
    entries = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            entries.append((float(parts[0]), parts[1:]))
    entries.sort(key=lambda e: e[0])
    return entries


def associate(
    rgb_list: list[float],
    depth_list: list[float],
    max_dt: float = DEFAULT_MAX_DT,
) -> list[tuple[int, int]]:
    """Greedy nearest-timestamp matching of two sorted timestamp lists.

    Candidate pairs within ``max_dt`` are taken best-first (smallest |dt|,
    then earliest timestamps); each entry is used at most once.  Returns
    (rgb_index, depth_index) pairs sorted by rgb timestamp.
    """
    rgb = np.asarray(rgb_list, dtype=np.float64)
    dep = np.asarray(depth_list, dtype=np.float64)
    candidates = []
    j0 = 0
    for i, t in enumerate(rgb):
        while j0 < len(dep) and dep[j0] < t - max_dt:
            j0 += 1
        j = j0
        while j < len(dep) and dep[j] <= t + max_dt:
            candidates.append((abs(t - dep[j]), t, dep[j], i, j))
            j += 1
    candidates.sort()
    used_rgb: set[int] = set()
    used_dep: set[int] = set()
    matches = []
    for _, _, _, i, j in candidates:
        if i in used_rgb or j in used_dep:
            continue
        used_rgb.add(i)
        used_dep.add(j)
        matches.append((i, j))
    matches.sort(key=lambda m: rgb[m[0]])
    return matches


def interpolate_gt_pose(
    gt_times: np.ndarray, gt_poses: list[Pose], t: float
) -> Pose | None:
    """Pose at time t: translation lerp + rotation slerp between brackets."""
    if len(gt_poses) == 0 or t < gt_times[0] or t > gt_times[-1]:
        return None
    hi = int(np.searchsorted(gt_times, t))
    if hi == 0:
        return gt_poses[0]
    lo = hi - 1
    if hi >= len(gt_times):
        return gt_poses[-1]
    t0, t1 = gt_times[lo], gt_times[hi]
    if t1 == t0:
        return gt_poses[lo]
    alpha = (t - t0) / (t1 - t0)
    rots = Rotation.from_matrix([gt_poses[lo].R, gt_poses[hi].R])
    slerp = Slerp([0.0, 1.0], rots)
    R = slerp([alpha]).as_matrix()[0]
    trans = (1.0 - alpha) * gt_poses[lo].t + alpha * gt_poses[hi].t
    return Pose(R, trans)


class TumDataset:
    """A TUM-layout dataset with timestamp-associated frames."""

    def __init__(
        self,
        frames: list[AssociatedFrame],
        depth_scale: float = TUM_DEPTH_SCALE,
        dropped: int = 0,
    ):
        self.frames = frames
        self.depth_scale = depth_scale
        self.dropped = dropped

    def __len__(self) -> int:
        return len(self.frames)

    def load_frame(self, index: int) -> tuple[GrayImage, DepthImage]:
        fr = self.frames[index]
        return load_gray_png(fr.rgb_path), load_depth_png(fr.depth_path, self.depth_scale)

    @staticmethod
    def open(
        directory,
        depth_scale: float = TUM_DEPTH_SCALE,
        max_dt: float = DEFAULT_MAX_DT,
    ) -> "TumDataset":
        rgb_entries = read_list_file(os.path.join(directory, "rgb.txt"))
        depth_entries = read_list_file(os.path.join(directory, "depth.txt"))
        gt_path = os.path.join(directory, "groundtruth.txt")
        gt_times = np.empty(0)
        gt_poses: list[Pose] = []
        if os.path.exists(gt_path):
            for t, fields in read_list_file(gt_path):
                tx, ty, tz, qx, qy, qz, qw = (float(f) for f in fields[:7])
                R = Rotation.from_quat([qx, qy, qz, qw]).as_matrix()
                gt_poses.append(Pose(R, np.array([tx, ty, tz])))
            gt_times = np.array([t for t, _ in read_list_file(gt_path)])

        matches = associate(
            [t for t, _ in rgb_entries], [t for t, _ in depth_entries], max_dt
        )
        frames = []
        for i, j in matches:
            t = rgb_entries[i][0]
            frames.append(
                AssociatedFrame(
                    timestamp=t,
                    rgb_path=os.path.join(directory, rgb_entries[i][1][0]),
                    depth_path=os.path.join(directory, depth_entries[j][1][0]),
                    gt_pose=interpolate_gt_pose(gt_times, gt_poses, t),
                )
            )
        dropped = len(rgb_entries) + len(depth_entries) - 2 * len(matches)
        return TumDataset(frames, depth_scale=depth_scale, dropped=dropped)


def write_trajectory(entries: list[TrajectoryEntry], path) -> None:
    """TUM trajectory format: `timestamp tx ty tz qx qy qz qw` per line."""
    with open(path, "w") as fh:
        for e in entries:
            q = Rotation.from_matrix(e.pose.R).as_quat()
            t = e.pose.t
            fh.write(
                f"{e.timestamp:.6f} "
                f"{t[0]:.9f} {t[1]:.9f} {t[2]:.9f} "
                f"{q[0]:.9f} {q[1]:.9f} {q[2]:.9f} {q[3]:.9f}\n"
            )


def read_trajectory(path) -> list[TrajectoryEntry]:
    entries = []
    for t, fields in read_list_file(path):
        tx, ty, tz, qx, qy, qz, qw = (float(f) for f in fields[:7])
        quat = np.array([qx, qy, qz, qw])
        quat = quat / np.linalg.norm(quat)
        R = Rotation.from_quat(quat).as_matrix()
        entries.append(TrajectoryEntry(t, Pose(R, np.array([tx, ty, tz]))))
    return entries
