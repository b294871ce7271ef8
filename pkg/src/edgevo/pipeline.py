"""The full visual odometry loop.

Tracking registers every incoming frame against the current keyframe map
using only its intensity image; depth is touched exclusively when a new
keyframe is prepared.  A decaying velocity model seeds the solver, and a
new keyframe is requested once the median disparity between the keyframe
pixels and their registered projections crosses the configured threshold.
Keyframe preparation can run on a worker thread; a deterministic
single-threaded mode produces identical results.
"""

from __future__ import annotations

import time
from concurrent.futures import Future, ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .annf import build_annf
from .config import VoConfig
from .dataset import TrajectoryEntry, TumDataset
from .geometry import (
    CameraIntrinsics,
    Pose,
    PoseDelta,
    compose,
    pose_between,
    rotation_to_cayley,
)
from .image import DepthImage, GrayImage, extractor_pipeline
from .mapping import KeyframeMap, build_keyframe_map
from .registration import (
    DegenerateGeometryError,
    DivergenceError,
    RegistrationProblem,
    RegistrationResult,
    gauss_newton_solve,
)
from .robust import WeightFunction

MAX_CONSECUTIVE_FAILURES = 3


@dataclass(eq=False)
class VelocityState:
    """Last inter-frame motion as a local update vector."""

    delta: np.ndarray = field(default_factory=lambda: np.zeros(6))
    valid: bool = False


@dataclass(eq=False)
class FrameResult:
    entry: TrajectoryEntry
    status: str  # "init", "ok", "lost" or "discarded"
    keyframe_created: bool = False
    cardinality_jump: bool = False
    registration: RegistrationResult | None = None


@dataclass(eq=False)
class RunStats:
    frames: int = 0
    keyframes: int = 0
    lost_frames: int = 0
    discarded_frames: int = 0
    total_iterations: int = 0
    tracked_frames: int = 0
    elapsed_seconds: float = 0.0

    @property
    def mean_iterations(self) -> float:
        return self.total_iterations / max(self.tracked_frames, 1)

    @property
    def fps(self) -> float:
        return self.frames / self.elapsed_seconds if self.elapsed_seconds > 0 else 0.0


def predict_pose(prev_pose: Pose, vel: VelocityState, alpha: float) -> Pose:
    """Decaying velocity prediction: prev composed with alpha * last delta."""
    if not vel.valid or alpha == 0.0:
        return prev_pose
    return compose(prev_pose, PoseDelta(vel.delta * alpha))


def relative_delta(prev_pose: Pose, pose: Pose) -> np.ndarray:
    """The update vector that compose() would need to map prev onto pose."""
    c = rotation_to_cayley(prev_pose.R.T @ pose.R)
    return np.concatenate([c, pose.t - prev_pose.t])


def downsample_gray(img: GrayImage) -> GrayImage:
    """2x2 mean downsampling for the optional coarse solver level."""
    h2, w2 = img.height // 2, img.width // 2
    d = img.data[: h2 * 2, : w2 * 2].reshape(h2, 2, w2, 2).mean(axis=(1, 3))
    return GrayImage.from_array(d)


class VisualOdometry:
    """Frame-by-frame tracker holding the current keyframe map."""

    def __init__(self, intr: CameraIntrinsics, config: VoConfig | None = None):
        self.intr = intr
        self.config = config or VoConfig()
        self.keyframe: KeyframeMap | None = None
        self.velocity = VelocityState()
        self.last_pose = Pose.identity()
        self.last_region_size = 0
        self.consecutive_failures = 0
        self.frame_index = 0
        self.keyframe_count = 0
        self.tracking_depth_reads = 0  # instrumented: must stay 0
        self._executor: ThreadPoolExecutor | None = None
        self._pending_keyframe: Future | None = None
        if not self.config.deterministic:
            self._executor = ThreadPoolExecutor(max_workers=1)

    def close(self) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None

    def __enter__(self) -> "VisualOdometry":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _weightfn(self) -> WeightFunction:
        cfg = self.config
        return WeightFunction(
            kind=cfg.weight_kind,
            huber_k=cfg.huber_k,
            tukey_c=cfg.tukey_c,
            cauchy_c=cfg.cauchy_c,
            l1_eps=cfg.l1_epsilon,
            nu=cfg.tdist_nu,
            sigma=cfg.tdist_sigma0,
        )

    def _extract(self, gray: GrayImage):
        cfg = self.config
        return extractor_pipeline(
            gray, cfg.extractor, cfg.gradient_threshold, cfg.gaussian_sigma
        )

    def _build_keyframe(self, region, depth: DepthImage, pose: Pose, frame_id: int) -> KeyframeMap:
        cfg = self.config
        return build_keyframe_map(
            region,
            depth,
            self.intr,
            pose,
            frame_id,
            n_min=cfg.n_min_points,
            gap_base=cfg.depth_gap_base,
            gap_rel=cfg.depth_gap_rel,
        )

    def _adopt_pending_keyframe(self) -> None:
        if self._pending_keyframe is not None and self._pending_keyframe.done():
            result = self._pending_keyframe
            self._pending_keyframe = None
            try:
                new_map = result.result()
            except ValueError:
                return  # preparation failed (too few points); keep tracking the old map
            if self.keyframe is None or new_map.frame_id > self.keyframe.frame_id:
                self.keyframe = new_map
                self.keyframe_count += 1

    def _request_keyframe(self, region, depth: DepthImage, pose: Pose, frame_id: int) -> None:
        if self._executor is None:
            try:
                self.keyframe = self._build_keyframe(region, depth, pose, frame_id)
                self.keyframe_count += 1
            except ValueError:
                pass
        elif self._pending_keyframe is None:
            self._pending_keyframe = self._executor.submit(
                self._build_keyframe, region, depth, pose, frame_id
            )

    def _solve(self, region, initial: Pose, gray: GrayImage) -> RegistrationResult:
        cfg = self.config
        wf = self._weightfn()
        if cfg.coarse_to_fine:
            half = downsample_gray(gray)
            half_region = self._extract(half)
            if len(half_region) > 0:
                half_field = build_annf(half_region, half.width, half.height)
                problem = RegistrationProblem(
                    self.keyframe, half_region, half_field, self.intr.scaled(0.5), wf, initial
                )
                coarse = gauss_newton_solve(
                    problem, max_iters=max(cfg.max_iterations // 2, 5), step_tol=cfg.step_tolerance
                )
                initial = coarse.pose
        field = build_annf(region, self.intr.width, self.intr.height)
        problem = RegistrationProblem(self.keyframe, region, field, self.intr, wf, initial)
        return gauss_newton_solve(
            problem, max_iters=cfg.max_iterations, step_tol=cfg.step_tolerance
        )

    def process_frame(
        self, gray: GrayImage, depth: DepthImage, timestamp: float
    ) -> FrameResult:
        """Track one frame; depth is only read when a keyframe is built."""
        cfg = self.config
        frame_id = self.frame_index
        self.frame_index += 1
        self._adopt_pending_keyframe()

        region = self._extract(gray)

        if self.keyframe is None:
            self.keyframe = self._build_keyframe(region, depth, Pose.identity(), frame_id)
            self.keyframe_count += 1
            self.last_pose = Pose.identity()
            self.last_region_size = len(region)
            return FrameResult(
                entry=TrajectoryEntry(timestamp, self.last_pose),
                status="init",
                keyframe_created=True,
            )

        jump = (
            self.last_region_size > 0
            and abs(len(region) - self.last_region_size)
            > cfg.cardinality_jump * self.last_region_size
        )
        self.last_region_size = len(region)
        if jump and cfg.discard_blur_frames:
            return FrameResult(
                entry=TrajectoryEntry(timestamp, self.last_pose),
                status="discarded",
                cardinality_jump=True,
            )

        result = None
        if len(region) > 0:
            initial = (
                predict_pose(self.last_pose, self.velocity, cfg.velocity_decay)
                if cfg.motion_model
                else self.last_pose
            )
            try:
                result = self._solve(region, initial, gray)
            except (DivergenceError, DegenerateGeometryError):
                # Retry once from the unpredicted pose.
                if cfg.motion_model and self.velocity.valid:
                    try:
                        result = self._solve(region, self.last_pose, gray)
                    except (DivergenceError, DegenerateGeometryError):
                        result = None

        if result is None:
            self.consecutive_failures += 1
            self.velocity.delta *= cfg.velocity_decay
            if self.consecutive_failures >= MAX_CONSECUTIVE_FAILURES:
                self.velocity.valid = False
            return FrameResult(
                entry=TrajectoryEntry(timestamp, self.last_pose),
                status="lost",
                cardinality_jump=jump,
            )

        self.consecutive_failures = 0
        pose = result.pose
        self.velocity = VelocityState(relative_delta(self.last_pose, pose), valid=True)
        self.last_pose = pose

        keyframe_created = False
        if result.median_disparity > cfg.disparity_threshold:
            self._request_keyframe(region, depth, pose, frame_id)
            keyframe_created = self._executor is None
        return FrameResult(
            entry=TrajectoryEntry(timestamp, pose),
            status="ok",
            keyframe_created=keyframe_created,
            cardinality_jump=jump,
            registration=result,
        )


def run_sequence(
    dataset: TumDataset, intr: CameraIntrinsics, config: VoConfig | None = None
) -> tuple[list[TrajectoryEntry], RunStats]:
    """Track a whole dataset; returns the trajectory and run statistics."""
    stats = RunStats()
    trajectory: list[TrajectoryEntry] = []
    start = time.perf_counter()
    with VisualOdometry(intr, config) as vo:
        for i, frame in enumerate(dataset.frames):
            gray, depth = dataset.load_frame(i)
            fr = vo.process_frame(gray, depth, frame.timestamp)
            trajectory.append(fr.entry)
            stats.frames += 1
            if fr.status == "lost":
                stats.lost_frames += 1
            elif fr.status == "discarded":
                stats.discarded_frames += 1
            if fr.keyframe_created:
                stats.keyframes += 1
            if fr.registration is not None:
                stats.total_iterations += fr.registration.iterations
                stats.tracked_frames += 1
        stats.keyframes = vo.keyframe_count
    stats.elapsed_seconds = time.perf_counter() - start
    return trajectory, stats


def collect_gt_residuals(
    dataset: TumDataset, intr: CameraIntrinsics, config: VoConfig | None = None
) -> np.ndarray:
    """Projected residuals evaluated at ground-truth poses.

    Replays the keyframe logic (median disparity rule) with ground-truth
    poses and collects the per-point projected residuals of every tracked
    frame; the result feeds the sensor-model fit.
    """
    from .registration import compute_residuals, project_map

    cfg = config or VoConfig()
    if not any(f.gt_pose is not None for f in dataset.frames):
        raise ValueError("dataset has no ground-truth poses")

    residuals: list[np.ndarray] = []
    keyframe: KeyframeMap | None = None
    for i, frame in enumerate(dataset.frames):
        if frame.gt_pose is None:
            continue
        gray, depth = dataset.load_frame(i)
        region = extractor_pipeline(
            gray, cfg.extractor, cfg.gradient_threshold, cfg.gaussian_sigma
        )
        if len(region) == 0:
            continue
        if keyframe is None:
            keyframe = build_keyframe_map(
                region, depth, intr, frame.gt_pose, i,
                n_min=cfg.n_min_points, gap_base=cfg.depth_gap_base, gap_rel=cfg.depth_gap_rel,
            )
            continue
        field = build_annf(region, intr.width, intr.height)
        ws = project_map(keyframe, frame.gt_pose, intr)
        compute_residuals(ws, field, keyframe)
        r = ws.r[ws.visible]
        residuals.append(r)
        disparity = np.median(
            np.linalg.norm(
                ws.projections[ws.visible]
                - keyframe.pixels[ws.visible].astype(np.float64),
                axis=1,
            )
        )
        if disparity > cfg.disparity_threshold:
            try:
                keyframe = build_keyframe_map(
                    region, depth, intr, frame.gt_pose, i,
                    n_min=cfg.n_min_points, gap_base=cfg.depth_gap_base, gap_rel=cfg.depth_gap_rel,
                )
            except ValueError:
                pass
    if not residuals:
        raise ValueError("no residuals collected; dataset too short")
    return np.concatenate(residuals)
