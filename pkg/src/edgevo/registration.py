"""2D-3D curve registration: reweighted Gauss-Newton over a nearest-
neighbour field, plus the distance-field gradient-descent baseline.

Every iteration projects the keyframe map into the current frame, fetches
nearest-neighbour identities from the field in one batched lookup, and
projects the 2D residual vectors onto the keyframe gradient directions.
Neighbour identities and gradient directions stay fixed while the normal
equations are assembled, which is what keeps the Jacobian well behaved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import robust
from .annf import (
    DistanceField,
    NearestNeighbourField,
    lookup_nn_batch,
    sample_bilinear_batch,
    sample_gradient_batch,
)
from .geometry import CameraIntrinsics, Pose, PoseDelta, compose
from .image import SemiDenseRegion
from .mapping import KeyframeMap
from .robust import WeightFunction, update_sigma_tdist, weight

DEFAULT_MAX_ITERS = 30
DEFAULT_STEP_TOL = 1e-6
CONDITION_LIMIT = 1e12
DIVERGENCE_PATIENCE = 5


class DivergenceError(RuntimeError):
    """The solver lost the registration (cost runaway or nothing visible)."""


class DegenerateGeometryError(RuntimeError):
    """The normal matrix is numerically singular."""


@dataclass(eq=False)
class RegistrationProblem:
    """Everything one registration needs; ``initial`` seeds the solver."""

    kf_map: KeyframeMap
    region: SemiDenseRegion
    field: NearestNeighbourField
    intr: CameraIntrinsics
    weightfn: WeightFunction
    initial: Pose


@dataclass(eq=False)
class RegistrationResult:
    pose: Pose
    iterations: int
    final_cost: float
    inlier_count: int
    residual_rms: float
    converged: bool
    median_disparity: float


@dataclass(eq=False)
class ResidualWorkspace:
    """Per-point state of one iteration.

    ``projections`` and ``points_cam`` are valid where ``visible``; the
    residual arrays are zero elsewhere so invisible points carry no weight.
    """

    projections: np.ndarray
    points_cam: np.ndarray
    visible: np.ndarray
    nn_pixels: np.ndarray
    v: np.ndarray
    r: np.ndarray
    weights: np.ndarray

    @staticmethod
    def allocate(n: int) -> "ResidualWorkspace":
        return ResidualWorkspace(
            projections=np.zeros((n, 2)),
            points_cam=np.zeros((n, 3)),
            visible=np.zeros(n, dtype=bool),
            nn_pixels=np.zeros((n, 2), dtype=np.int32),
            v=np.zeros((n, 2)),
            r=np.zeros(n),
            weights=np.zeros(n),
        )


def project_map(
    kf_map: KeyframeMap, pose: Pose, intr: CameraIntrinsics
) -> ResidualWorkspace:
    """Project all map points into the camera at ``pose``.

    Visibility means positive depth and a projection inside the image.
    Raises DivergenceError when no point at all is visible.
    """
    ws = ResidualWorkspace.allocate(len(kf_map))
    world = kf_map.world_points()
    ws.points_cam = (world - pose.t) @ pose.R
    uv = np.empty((len(kf_map), 2))
    in_front = ws.points_cam[:, 2] > 0
    safe_z = np.where(in_front, ws.points_cam[:, 2], 1.0)
    uv[:, 0] = intr.fx * ws.points_cam[:, 0] / safe_z + intr.cx
    uv[:, 1] = intr.fy * ws.points_cam[:, 1] / safe_z + intr.cy
    ws.projections = uv
    # A hair of slack keeps border pixels visible despite projection
    # round-off; lookups clip back into the valid grid.
    eps = 1e-6
    ws.visible = (
        in_front
        & (uv[:, 0] >= -eps)
        & (uv[:, 0] <= intr.width - 1.0 + eps)
        & (uv[:, 1] >= -eps)
        & (uv[:, 1] <= intr.height - 1.0 + eps)
    )
    if not np.any(ws.visible):
        raise DivergenceError("no map point projects into the current frame")
    return ws


def compute_residuals(
    ws: ResidualWorkspace, field: NearestNeighbourField, kf_map: KeyframeMap
) -> ResidualWorkspace:
    """Nearest-neighbour residuals projected onto the keyframe gradients.

    One batched field lookup per call; gradient directions come from the
    keyframe map and are never recomputed in the current frame.
    """
    vis = ws.visible
    nn = lookup_nn_batch(field, _clipped_projections(ws, field.width, field.height))
    ws.nn_pixels[vis] = nn
    ws.v[vis] = ws.projections[vis] - nn
    ws.r[vis] = np.einsum("ij,ij->i", ws.v[vis], kf_map.grad_dirs[vis])
    return ws


def _projection_jacobian(
    q: np.ndarray, intr: CameraIntrinsics, pose: Pose
) -> np.ndarray:
    """d o_i / d theta (N, 2, 6) at the Cayley-update identity.

    Chain rule through the projection: the rotation block uses
    d(cam point)/dc = 2 [cam point]_x, the translation block -R^T
    (world-frame increments).
    """
    z = q[:, 2]
    n = q.shape[0]

    dpdq = np.zeros((n, 2, 3))
    dpdq[:, 0, 0] = intr.fx / z
    dpdq[:, 0, 2] = -intr.fx * q[:, 0] / (z * z)
    dpdq[:, 1, 1] = intr.fy / z
    dpdq[:, 1, 2] = -intr.fy * q[:, 1] / (z * z)

    dqdtheta = np.zeros((n, 3, 6))
    dqdtheta[:, 0, 1] = -2.0 * q[:, 2]
    dqdtheta[:, 0, 2] = 2.0 * q[:, 1]
    dqdtheta[:, 1, 0] = 2.0 * q[:, 2]
    dqdtheta[:, 1, 2] = -2.0 * q[:, 0]
    dqdtheta[:, 2, 0] = -2.0 * q[:, 1]
    dqdtheta[:, 2, 1] = 2.0 * q[:, 0]
    dqdtheta[:, :, 3:] = -pose.R.T[None, :, :]

    return np.einsum("nij,njk->nik", dpdq, dqdtheta)


def _pose_jacobian(
    ws: ResidualWorkspace, kf_map: KeyframeMap, intr: CameraIntrinsics, pose: Pose
) -> np.ndarray:
    """Rows d(g . o_i)/d theta for visible points, neighbours held fixed."""
    vis = ws.visible
    do = _projection_jacobian(ws.points_cam[vis], intr, pose)
    return np.einsum("ni,nik->nk", kf_map.grad_dirs[vis], do)


def assemble_normal_equations(
    ws: ResidualWorkspace, kf_map: KeyframeMap, intr: CameraIntrinsics, pose: Pose
) -> tuple[np.ndarray, np.ndarray]:
    """Weighted normal equations (J^T W J, J^T W r) over visible points."""
    J = _pose_jacobian(ws, kf_map, intr, pose)
    vis = ws.visible
    w = ws.weights[vis]
    r = ws.r[vis]
    Jw = J * w[:, None]
    A = Jw.T @ J
    b = Jw.T @ r
    if np.linalg.cond(A) > CONDITION_LIMIT:
        raise DegenerateGeometryError("normal matrix is numerically singular")
    return A, b


def _iteration_weights(
    wf: WeightFunction, r_visible: np.ndarray, sigma: float
) -> tuple[np.ndarray, float]:
    """Per-iteration weights plus the (possibly updated) t-model sigma."""
    if wf.kind == "t_distribution":
        if r_visible.size >= 10:
            sigma = update_sigma_tdist(r_visible, wf.nu, sigma)
        return weight(wf.with_sigma(sigma), r_visible), sigma
    scaled = robust.scale_to_residuals(wf, r_visible)
    return weight(scaled, r_visible), sigma


def _summarize(
    ws: ResidualWorkspace,
    kf_map: KeyframeMap,
    pose: Pose,
    iterations: int,
    converged: bool,
) -> RegistrationResult:
    vis = ws.visible
    r = ws.r[vis]
    w = ws.weights[vis]
    cost = float(np.sum(w * r * r))
    rms = float(np.sqrt(np.mean(r * r))) if r.size else 0.0
    scale = max(robust.mad_scale(r), robust.SIGMA_MIN) if r.size else robust.SIGMA_MIN
    inliers = int(np.sum(np.abs(r) <= 3.0 * scale))
    disp = np.linalg.norm(
        ws.projections[vis] - kf_map.pixels[vis].astype(np.float64), axis=1
    )
    return RegistrationResult(
        pose=pose,
        iterations=iterations,
        final_cost=cost,
        inlier_count=inliers,
        residual_rms=rms,
        converged=converged,
        median_disparity=float(np.median(disp)) if disp.size else float("inf"),
    )


def gauss_newton_solve(
    problem: RegistrationProblem,
    max_iters: int = DEFAULT_MAX_ITERS,
    step_tol: float = DEFAULT_STEP_TOL,
    trace: list | None = None,
) -> RegistrationResult:
    """Iteratively reweighted Gauss-Newton over the nearest-neighbour field.

    Raises DivergenceError when the weighted cost increases for
    DIVERGENCE_PATIENCE consecutive iterations or nothing is visible.
    """
    pose = problem.initial
    wf = problem.weightfn
    sigma = wf.sigma
    prev_energy = np.inf
    bad_streak = 0
    converged = False
    iterations = 0

    for it in range(max_iters):
        ws = project_map(problem.kf_map, pose, problem.intr)
        compute_residuals(ws, problem.field, problem.kf_map)
        vis = ws.visible
        r_vis = ws.r[vis]
        w_vis, sigma = _iteration_weights(wf, r_vis, sigma)
        ws.weights[vis] = w_vis

        cost = float(np.sum(w_vis * r_vis * r_vis))
        # The divergence guard tracks the mean squared projected residual:
        # the IRLS cost is not comparable across iterations because the
        # weights (and the t-model sigma) change every round.  The 1%
        # slack ignores the sub-percent creep of IRLS settling; genuine
        # runaway grows by orders of magnitude.
        energy = float(np.mean(r_vis * r_vis))
        if energy > prev_energy * 1.01:
            bad_streak += 1
            if bad_streak >= DIVERGENCE_PATIENCE:
                raise DivergenceError("residuals grew for too many iterations")
        else:
            bad_streak = 0
        prev_energy = energy

        A, b = assemble_normal_equations(ws, problem.kf_map, problem.intr, pose)
        delta = -np.linalg.solve(A, b)
        pose = compose(pose, PoseDelta(delta))
        iterations = it + 1

        if trace is not None:
            energy = float(np.sum(np.sum(ws.v[vis] ** 2, axis=1)))
            trace.append(
                {
                    "iteration": iterations,
                    "cost": cost,
                    "energy": energy,
                    "step_norm": float(np.abs(delta).max()),
                    "inliers": int(vis.sum()),
                    "sigma": sigma,
                }
            )

        if np.abs(delta).max() < step_tol:
            converged = True
            break

    ws = project_map(problem.kf_map, pose, problem.intr)
    compute_residuals(ws, problem.field, problem.kf_map)
    vis = ws.visible
    w_vis, sigma = _iteration_weights(wf, ws.r[vis], sigma)
    ws.weights[vis] = w_vis
    return _summarize(ws, problem.kf_map, pose, iterations, converged)


def _clipped_projections(ws: ResidualWorkspace, width: int, height: int) -> np.ndarray:
    pts = ws.projections[ws.visible]
    clipped = np.empty_like(pts)
    np.clip(pts[:, 0], 0.0, width - 1.0, out=clipped[:, 0])
    np.clip(pts[:, 1], 0.0, height - 1.0, out=clipped[:, 1])
    return clipped


def _distance_energy(
    kf_map: KeyframeMap, pose: Pose, intr: CameraIntrinsics, dist_field: DistanceField
) -> tuple[float, ResidualWorkspace, np.ndarray]:
    ws = project_map(kf_map, pose, intr)
    d = sample_bilinear_batch(dist_field, _clipped_projections(ws, dist_field.width, dist_field.height))
    return float(np.sum(d * d)), ws, d


def gradient_descent_solve(
    problem: RegistrationProblem,
    dist_field: DistanceField,
    max_iters: int = 100,
    step_tol: float = DEFAULT_STEP_TOL,
    trace: list | None = None,
) -> RegistrationResult:
    """Baseline: minimize the summed squared sampled distances.

    Plain gradient descent with a backtracking (bisection) line search on
    the bilinearly interpolated distance field; same result interface as
    the Gauss-Newton solver.
    """
    pose = problem.initial
    alpha = None
    converged = False
    iterations = 0

    energy, ws, d = _distance_energy(problem.kf_map, pose, problem.intr, dist_field)
    for it in range(max_iters):
        vis = ws.visible
        grad_field = sample_gradient_batch(
            dist_field, _clipped_projections(ws, dist_field.width, dist_field.height)
        )
        # dE/dtheta = sum 2 d_i * (grad d)^T do_i/dtheta.
        do = _projection_jacobian(ws.points_cam[vis], problem.intr, pose)
        rows = np.einsum("ni,nik->nk", grad_field, do)
        grad = 2.0 * (d[:, None] * rows).sum(axis=0)

        gnorm = float(np.abs(grad).max())
        if gnorm == 0.0:
            converged = True
            break
        if alpha is None:
            alpha = 1e-3 / gnorm
        else:
            alpha *= 2.0

        # Backtracking: halve until the energy decreases.
        accepted = False
        for _ in range(40):
            delta = -alpha * grad
            cand = compose(pose, PoseDelta(delta))
            try:
                cand_energy, cand_ws, cand_d = _distance_energy(
                    problem.kf_map, cand, problem.intr, dist_field
                )
            except DivergenceError:
                alpha *= 0.5
                continue
            if cand_energy < energy:
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            converged = True
            break

        pose, energy, ws, d = cand, cand_energy, cand_ws, cand_d
        iterations = it + 1
        if trace is not None:
            trace.append(
                {
                    "iteration": iterations,
                    "cost": energy,
                    "energy": energy,
                    "step_norm": float(np.abs(delta).max()),
                    "inliers": int(ws.visible.sum()),
                    "sigma": 0.0,
                }
            )
        if float(np.abs(delta).max()) < step_tol:
            converged = True
            break

    vis = ws.visible
    compute_residuals(ws, problem.field, problem.kf_map)
    ws.weights[vis] = 1.0
    return _summarize(ws, problem.kf_map, pose, iterations, converged)
