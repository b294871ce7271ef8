"""Unit tests for relative pose error computation."""

import numpy as np
import pytest

from edgevo.dataset import TrajectoryEntry
from edgevo.evaluate import compute_rpe, format_report, rpe_samples
from edgevo.geometry import Pose, cayley_to_rotation, pose_multiply


def make_trajectory(rng, n=40, dt=0.1):
    entries = []
    pose = Pose.identity()
    for k in range(n):
        entries.append(TrajectoryEntry(100.0 + k * dt, pose))
        step = np.concatenate(
            [rng.normal(scale=0.01, size=3), rng.normal(scale=0.02, size=3)]
        )
        from edgevo.geometry import PoseDelta, compose

        pose = compose(pose, PoseDelta(step))
    return entries


class TestComputeRpe:
    def test_identical_trajectories_zero_error(self):
        # the rotation angle of a round-off identity amplifies eps by a
        # square root, hence the 1e-6 deg/s tolerance
        rng = np.random.default_rng(0)
        traj = make_trajectory(rng)
        report = compute_rpe(traj, traj, delta=1.0)
        assert report.rmse_rot == pytest.approx(0.0, abs=1e-6)
        assert report.rmse_trans == pytest.approx(0.0, abs=1e-12)
        assert report.pair_count > 20

    def test_gauge_invariance_exact(self):
        rng = np.random.default_rng(1)
        gt = make_trajectory(rng)
        G = Pose(cayley_to_rotation([0.2, -0.1, 0.3]), np.array([5.0, -2.0, 1.0]))
        est = [TrajectoryEntry(e.timestamp, pose_multiply(G, e.pose)) for e in gt]
        report = compute_rpe(est, gt, delta=1.0)
        assert report.rmse_rot == pytest.approx(0.0, abs=1e-6)
        assert report.rmse_trans == pytest.approx(0.0, abs=1e-10)

    def test_constant_drift(self):
        # estimated trajectory drifts exactly 0.01 m per 1 s interval
        gt = [TrajectoryEntry(100.0 + k, Pose.identity()) for k in range(11)]
        est = [
            TrajectoryEntry(100.0 + k, Pose(np.eye(3), np.array([0.01 * k, 0.0, 0.0])))
            for k in range(11)
        ]
        report = compute_rpe(est, gt, delta=1.0)
        assert report.rmse_trans == pytest.approx(0.01, abs=1e-9)
        assert report.median_trans == pytest.approx(0.01, abs=1e-9)
        assert report.rmse_rot == pytest.approx(0.0, abs=1e-9)

    def test_rmse_is_mean_of_squares(self):
        rng = np.random.default_rng(2)
        gt = make_trajectory(rng)
        est = make_trajectory(np.random.default_rng(3))
        rot, trans = rpe_samples(est, gt, delta=1.0)
        report = compute_rpe(est, gt, delta=1.0)
        assert report.rmse_rot**2 == pytest.approx(np.mean(rot**2), rel=1e-12)
        assert report.rmse_trans**2 == pytest.approx(np.mean(trans**2), rel=1e-12)
        assert report.median_rot == pytest.approx(np.median(rot), rel=1e-12)

    def test_insufficient_overlap_raises(self):
        a = [TrajectoryEntry(0.0, Pose.identity())]
        b = [TrajectoryEntry(0.0, Pose.identity())]
        with pytest.raises(ValueError):
            compute_rpe(a, b, delta=1.0)

    def test_mismatched_timestamps_skipped(self):
        gt = [TrajectoryEntry(100.0 + k, Pose.identity()) for k in range(5)]
        est = [TrajectoryEntry(500.0 + k, Pose.identity()) for k in range(5)]
        with pytest.raises(ValueError):
            compute_rpe(est, gt, delta=1.0)

    def test_format_report(self):
        gt = [TrajectoryEntry(100.0 + k, Pose.identity()) for k in range(3)]
        report = compute_rpe(gt, gt, delta=1.0)
        text = format_report(report, label="unit")
        assert "RMSE(R)" in text and "pairs" in text
