"""Relative pose error over fixed time intervals.

For every estimate pair one interval apart, the relative motion is
compared against the ground-truth relative motion; rotational drift is
reported in deg/s and translational drift in m/s, as RMSE and median.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import TrajectoryEntry
from .geometry import pose_between, pose_multiply, pose_inverse, rotation_angle_deg


@dataclass(frozen=True)
class RpeReport:
    rmse_rot: float
    median_rot: float
    rmse_trans: float
    median_trans: float
    pair_count: int

    def __post_init__(self):
        if self.pair_count < 1:
            raise ValueError("a report needs at least one pair")


def _nearest_within(times: np.ndarray, t: float, tolerance: float) -> int | None:
    idx = int(np.searchsorted(times, t))
    best = None
    for j in (idx - 1, idx):
        if 0 <= j < len(times) and abs(times[j] - t) <= tolerance:
            if best is None or abs(times[j] - t) < abs(times[best] - t):
                best = j
    return best


def rpe_samples(
    estimated: list[TrajectoryEntry],
    groundtruth: list[TrajectoryEntry],
    delta: float = 1.0,
    tolerance: float = 0.02,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-pair (rot deg/s, trans m/s) drift samples at interval ``delta``."""
    est_t = np.array([e.timestamp for e in estimated])
    gt_t = np.array([e.timestamp for e in groundtruth])
    rot = []
    trans = []
    for i, e0 in enumerate(estimated):
        j = _nearest_within(est_t, e0.timestamp + delta, tolerance)
        if j is None or j <= i:
            continue
        e1 = estimated[j]
        g0 = _nearest_within(gt_t, e0.timestamp, tolerance)
        g1 = _nearest_within(gt_t, e1.timestamp, tolerance)
        if g0 is None or g1 is None or g0 == g1:
            continue
        dt = e1.timestamp - e0.timestamp
        est_rel = pose_between(e0.pose, e1.pose)
        gt_rel = pose_between(groundtruth[g0].pose, groundtruth[g1].pose)
        err = pose_multiply(pose_inverse(gt_rel), est_rel)
        rot.append(rotation_angle_deg(err.R) / dt)
        trans.append(float(np.linalg.norm(err.t)) / dt)
    return np.asarray(rot), np.asarray(trans)


def compute_rpe(
    estimated: list[TrajectoryEntry],
    groundtruth: list[TrajectoryEntry],
    delta: float = 1.0,
    tolerance: float = 0.02,
) -> RpeReport:
    """RMSE and median relative pose error at the given interval."""
    rot, trans = rpe_samples(estimated, groundtruth, delta, tolerance)
    if rot.size < 1:
        raise ValueError("not enough overlapping timestamps to form RPE pairs")
    return RpeReport(
        rmse_rot=float(np.sqrt(np.mean(rot**2))),
        median_rot=float(np.median(rot)),
        rmse_trans=float(np.sqrt(np.mean(trans**2))),
        median_trans=float(np.median(trans)),
        pair_count=int(rot.size),
    )


def format_report(report: RpeReport, label: str = "") -> str:
    head = f"{label}: " if label else ""
    return (
        f"{head}RMSE(R) {report.rmse_rot:.3f} deg/s | "
        f"Median(R) {report.median_rot:.3f} deg/s | "
        f"RMSE(t) {report.rmse_trans:.4f} m/s | "
        f"Median(t) {report.median_trans:.4f} m/s | "
        f"pairs {report.pair_count}"
    )
