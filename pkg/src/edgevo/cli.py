"""Command-line interface: odometry runs, evaluation and the studies.

Every command exits 0 on success and 1 on error; ``--json`` switches the
summary output to machine-readable form where available.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace

import numpy as np

from .annf import build_annf, build_distance_field, distance_field_to_u16
from .config import VoConfig, load_config
from .dataset import (
    TumDataset,
    read_trajectory,
    save_u16_png,
    write_trajectory,
)
from .evaluate import compute_rpe, format_report
from .geometry import TUM_INTRINSICS, CameraIntrinsics, Pose, load_intrinsics
from .image import EXTRACTOR_VARIANTS, extractor_pipeline
from .mapping import build_keyframe_map
from .pipeline import collect_gt_residuals, run_sequence
from .registration import (
    RegistrationProblem,
    gauss_newton_solve,
    gradient_descent_solve,
)
from .robust import (
    WEIGHT_KINDS,
    WeightFunction,
    compare_model_likelihoods,
    fit_sensor_model,
)


def resolve_intrinsics(config: VoConfig) -> CameraIntrinsics:
    if config.camera in TUM_INTRINSICS:
        return TUM_INTRINSICS[config.camera]
    return load_intrinsics(config.camera)


def _load_config(args) -> VoConfig:
    cfg = load_config(args.config) if args.config else VoConfig()
    if getattr(args, "deterministic", False):
        cfg.deterministic = True
    if getattr(args, "discard_blur_frames", False):
        cfg.discard_blur_frames = True
    return cfg


def _gt_trajectory(dataset: TumDataset):
    from .dataset import TrajectoryEntry

    return [
        TrajectoryEntry(f.timestamp, f.gt_pose)
        for f in dataset.frames
        if f.gt_pose is not None
    ]


def cmd_run(args) -> int:
    cfg = _load_config(args)
    intr = resolve_intrinsics(cfg)
    dataset = TumDataset.open(args.dataset, depth_scale=cfg.depth_scale, max_dt=cfg.max_dt)
    if args.dump_distance_field and len(dataset) > 0:
        gray, _ = dataset.load_frame(0)
        region = extractor_pipeline(gray, cfg.extractor, cfg.gradient_threshold, cfg.gaussian_sigma)
        field = build_distance_field(region, intr.width, intr.height)
        save_u16_png(distance_field_to_u16(field), args.dump_distance_field)
    trajectory, stats = run_sequence(dataset, intr, cfg)
    write_trajectory(trajectory, args.out)
    summary = {
        "frames": stats.frames,
        "keyframes": stats.keyframes,
        "lost_frames": stats.lost_frames,
        "discarded_frames": stats.discarded_frames,
        "mean_gn_iterations": round(stats.mean_iterations, 2),
        "fps": round(stats.fps, 2),
        "trajectory": str(args.out),
    }
    if args.json:
        print(json.dumps(summary))
    else:
        for key, value in summary.items():
            print(f"{key}: {value}")
    return 0


def cmd_eval(args) -> int:
    est = read_trajectory(args.est)
    gt = read_trajectory(args.gt)
    cfg = _load_config(args)
    report = compute_rpe(est, gt, delta=args.delta, tolerance=cfg.rpe_tolerance)
    if args.json:
        print(
            json.dumps(
                {
                    "rmse_rot": report.rmse_rot,
                    "median_rot": report.median_rot,
                    "rmse_trans": report.rmse_trans,
                    "median_trans": report.median_trans,
                    "pairs": report.pair_count,
                }
            )
        )
    else:
        print(format_report(report))
    return 0


def cmd_synth(args) -> int:
    from . import synthetic

    if args.scene == "blocks":
        scene = synthetic.make_blocks_scene(
            n_frames=args.frames,
            pixel_noise=args.pixel_noise,
            noise_kind=args.noise_kind,
            noise_nu=args.noise_nu,
            depth_noise=args.depth_noise,
            seed=args.seed,
        )
    elif args.scene == "pebbles":
        scene = synthetic.make_pebbles_scene(
            n_frames=args.frames,
            pixel_noise=args.pixel_noise,
            noise_kind=args.noise_kind,
            noise_nu=args.noise_nu,
            depth_noise=args.depth_noise,
            seed=args.seed,
        )
    elif args.scene == "planar":
        scene = synthetic.make_planar_scene(n_frames=args.frames, seed=args.seed)
    else:
        raise ValueError(f"unknown scene {args.scene!r}")
    synthetic.write_tum_dataset(scene, args.out)
    print(f"wrote {args.frames} frames to {args.out}")
    return 0


def cmd_fit_sensor(args) -> int:
    if not args.residuals and not args.dataset:
        print("need --dataset or --residuals", file=sys.stderr)
        return 1
    if args.residuals:
        residuals = np.loadtxt(args.residuals)
    else:
        cfg = _load_config(args)
        intr = resolve_intrinsics(cfg)
        dataset = TumDataset.open(args.dataset, depth_scale=cfg.depth_scale, max_dt=cfg.max_dt)
        residuals = collect_gt_residuals(dataset, intr, cfg)
        if args.dump:
            np.savetxt(args.dump, residuals, fmt="%.6f")
    fit = fit_sensor_model(residuals)
    ranking = compare_model_likelihoods(residuals)
    if args.json:
        print(
            json.dumps(
                {
                    "nu0": fit.nu0,
                    "sigma0": fit.sigma0,
                    "samples": fit.sample_count,
                    "ranking": ranking,
                }
            )
        )
    else:
        print(f"t-distribution fit: nu0 {fit.nu0:.2f}, sigma0 {fit.sigma0:.4f} px "
              f"({fit.sample_count} residuals)")
        print("held-out log-likelihood ranking:")
        for name, score in ranking:
            print(f"  {name:10s} {score:.1f}")
    return 0


def _ablate(args, axis: str) -> int:
    cfg = _load_config(args)
    intr = resolve_intrinsics(cfg)
    dataset = TumDataset.open(args.dataset, depth_scale=cfg.depth_scale, max_dt=cfg.max_dt)
    gt = _gt_trajectory(dataset)
    if not gt:
        print("dataset has no ground truth; cannot ablate", file=sys.stderr)
        return 1
    variants = EXTRACTOR_VARIANTS if axis == "extractor" else WEIGHT_KINDS
    rows = []
    for variant in variants:
        run_cfg = replace(cfg, **{axis: variant})
        trajectory, stats = run_sequence(dataset, intr, run_cfg)
        report = compute_rpe(trajectory, gt, delta=args.delta, tolerance=cfg.rpe_tolerance)
        rows.append(
            {
                "variant": variant,
                "rmse_rot": report.rmse_rot,
                "rmse_trans": report.rmse_trans,
                "median_rot": report.median_rot,
                "median_trans": report.median_trans,
                "fps": stats.fps,
            }
        )
    if args.json:
        print(json.dumps(rows))
    else:
        print(f"{'variant':22s} {'RMSE(R)':>9s} {'RMSE(t)':>9s} {'Med(R)':>8s} {'Med(t)':>8s} {'fps':>7s}")
        for row in rows:
            print(
                f"{row['variant']:22s} {row['rmse_rot']:9.3f} {row['rmse_trans']:9.4f} "
                f"{row['median_rot']:8.3f} {row['median_trans']:8.4f} {row['fps']:7.1f}"
            )
    return 0


def cmd_ablate_extractor(args) -> int:
    return _ablate(args, "extractor")


def cmd_ablate_weights(args) -> int:
    return _ablate(args, "weight_kind")


def cmd_convergence(args) -> int:
    """Solver comparison traces on one dataset frame pair."""
    cfg = _load_config(args)
    intr = resolve_intrinsics(cfg)
    dataset = TumDataset.open(args.dataset, depth_scale=cfg.depth_scale, max_dt=cfg.max_dt)
    if len(dataset) < 2:
        print("need at least two frames", file=sys.stderr)
        return 1
    i0 = args.frame
    i1 = min(i0 + args.skip, len(dataset) - 1)
    gray0, depth0 = dataset.load_frame(i0)
    gray1, _ = dataset.load_frame(i1)
    region0 = extractor_pipeline(gray0, cfg.extractor, cfg.gradient_threshold, cfg.gaussian_sigma)
    region1 = extractor_pipeline(gray1, cfg.extractor, cfg.gradient_threshold, cfg.gaussian_sigma)
    pose0 = dataset.frames[i0].gt_pose or Pose.identity()
    kf = build_keyframe_map(
        region0, depth0, intr, pose0, i0,
        n_min=cfg.n_min_points, gap_base=cfg.depth_gap_base, gap_rel=cfg.depth_gap_rel,
    )
    field = build_annf(region1, intr.width, intr.height)
    dist_field = build_distance_field(region1, intr.width, intr.height)
    wf = WeightFunction(
        kind=cfg.weight_kind, huber_k=cfg.huber_k, tukey_c=cfg.tukey_c,
        cauchy_c=cfg.cauchy_c, l1_eps=cfg.l1_epsilon, nu=cfg.tdist_nu, sigma=cfg.tdist_sigma0,
    )
    problem = RegistrationProblem(kf, region1, field, intr, wf, pose0)
    gn_trace: list = []
    gd_trace: list = []
    gauss_newton_solve(problem, max_iters=cfg.max_iterations, step_tol=cfg.step_tolerance, trace=gn_trace)
    gradient_descent_solve(problem, dist_field, max_iters=args.gd_iters, step_tol=cfg.step_tolerance, trace=gd_trace)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["solver", "iteration", "energy", "cost", "step_norm", "inliers", "sigma"])
        for name, trace in (("gauss_newton", gn_trace), ("gradient_descent", gd_trace)):
            for row in trace:
                writer.writerow(
                    [name, row["iteration"], row["energy"], row["cost"],
                     row["step_norm"], row["inliers"], row["sigma"]]
                )
    print(f"wrote traces to {args.out} (GN {len(gn_trace)} iters, GD {len(gd_trace)} iters)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edgevo", description="Semi-dense RGB-D visual odometry"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run odometry over a TUM-layout dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.add_argument("--deterministic", action="store_true")
    p.add_argument("--discard-blur-frames", action="store_true")
    p.add_argument("--dump-distance-field", metavar="PNG")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("eval", help="relative pose error of a trajectory")
    p.add_argument("--est", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--config")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", help="render a synthetic TUM-layout dataset")
    p.add_argument("--scene", default="blocks", choices=["blocks", "pebbles", "planar"])
    p.add_argument("--out", required=True)
    p.add_argument("--frames", type=int, default=30)
    p.add_argument("--pixel-noise", type=float, default=0.0)
    p.add_argument("--noise-kind", default="gaussian", choices=["gaussian", "student_t"])
    p.add_argument("--noise-nu", type=float, default=3.0)
    p.add_argument("--depth-noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("fit-sensor", help="fit the sensor model on gt residuals")
    p.add_argument("--dataset")
    p.add_argument("--residuals", help="read residuals from a dump instead")
    p.add_argument("--dump", help="write collected residuals to this file")
    p.add_argument("--config")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_fit_sensor)

    p = sub.add_parser("ablate-extractor", help="extractor study on a dataset with gt")
    p.add_argument("--dataset", required=True)
    p.add_argument("--config")
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_ablate_extractor)

    p = sub.add_parser("ablate-weights", help="weight-function study on a dataset with gt")
    p.add_argument("--dataset", required=True)
    p.add_argument("--config")
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_ablate_weights)

    p = sub.add_parser("convergence", help="GN vs gradient-descent energy traces")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--frame", type=int, default=0)
    p.add_argument("--skip", type=int, default=1)
    p.add_argument("--gd-iters", type=int, default=150)
    p.add_argument("--config")
    p.set_defaults(func=cmd_convergence)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # CLI boundary: report and signal failure
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
