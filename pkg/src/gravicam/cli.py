"""Command-line frontend; every subcommand is a thin shell over one module
operation. Exit codes: 0 success, 1 usage error, 2 data/format error."""

from __future__ import annotations

import argparse
import csv
import os
import sys
from pathlib import Path

import numpy as np

from . import bench, geom, metrics, pano, pipeline, plucker, pose, traj

OUT_ROOT_ENV = "GRAVICAM_OUT"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _out_root(value: str | None) -> Path:
    return Path(value or os.environ.get(OUT_ROOT_ENV, "out"))


def _add_jobs(p: argparse.ArgumentParser):
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="worker fan-out")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gravicam", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample-traj", help="sample a rotation+FoV trajectory to a pose manifest")
    p.add_argument("--frames", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", help="manifest path (default <outroot>/traj_<seed>.poses.json)")
    p.add_argument("--angles-csv", help="also emit per-frame yaw/pitch/roll/fov CSV")

    p = sub.add_parser("render", help="render perspective frames from an equirect clip")
    p.add_argument("--pano", required=True, help="panorama image or frame directory")
    p.add_argument("--poses", required=True, help="pose manifest (.poses.json)")
    p.add_argument("--width", type=int, default=480)
    p.add_argument("--height", type=int, default=480)
    p.add_argument("--out", help="output frame directory")
    _add_jobs(p)

    p = sub.add_parser("cubefaces", help="extract the six cube faces of a panorama")
    p.add_argument("--pano", required=True)
    p.add_argument("--size", type=int, default=512)
    p.add_argument("--out", help="output directory")

    p = sub.add_parser("plucker", help="build a Plücker ray tensor from a pose manifest")
    p.add_argument("--poses", required=True)
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--out", help="output .plk path")

    p = sub.add_parser("mask", help="equirectangular FoV mask for one manifest frame")
    p.add_argument("--poses", required=True)
    p.add_argument("--frame", type=int, default=0)
    p.add_argument("--height", type=int, default=256, help="mask height (width is 2x)")
    p.add_argument("--aspect", type=float, default=1.0, help="crop aspect ratio w/h")
    p.add_argument("--out", help="output PNG path")

    p = sub.add_parser("bundle", help="generate a full training sample bundle")
    p.add_argument("--pano", required=True)
    p.add_argument("--sfm", required=True, help="SfM pose manifest")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--clip-id", default="clip")
    p.add_argument("--out", help="output root (default $GRAVICAM_OUT or ./out)")
    p.add_argument("--config", help="pipeline config JSON")
    p.add_argument("--render-width", type=int)
    p.add_argument("--render-height", type=int)
    p.add_argument("--plucker-width", type=int)
    p.add_argument("--plucker-height", type=int)
    p.add_argument("--null-pitch-rate", type=float)
    _add_jobs(p)

    p = sub.add_parser("metrics", help="pose-error report for a reference/estimate pair")
    p.add_argument("--ref", required=True)
    p.add_argument("--est", required=True)
    p.add_argument("--clip-id", default="clip")
    p.add_argument("--out", help="CSV path (default stdout)")

    p = sub.add_parser("stats", help="angular-distance and Euler histograms for a manifest")
    p.add_argument("--poses", required=True)
    p.add_argument("--bin-width", type=float, default=10.0)
    p.add_argument("--out", help="CSV path (default stdout)")

    p = sub.add_parser("bench-bin", help="assign clips to 10-degree pitch bins")
    p.add_argument("--clips", required=True, help="CSV with clip_id,mean_pitch,path")
    p.add_argument("--exclude", help="one clip_id per line to drop")
    p.add_argument("--out", required=True)

    p = sub.add_parser("bench-select", help="pick a pitch-uniform benchmark subset")
    p.add_argument("--clips", required=True)
    p.add_argument("--exclude")
    p.add_argument("--target", type=int, default=140)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--report", help="shortfall report path (default stderr)")

    p = sub.add_parser("bench-roll", help="plan and apply roll augmentation")
    p.add_argument("--selection", required=True, help="selection CSV from bench-select")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--frames", type=int, required=True)
    p.add_argument("--limit", type=float, default=40.0)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--manifest-root", help="directory of <clip_id>.poses.json to update")
    p.add_argument("--frames-root", help="directory of <clip_id>/ frame dirs to warp")
    return parser


def _load_clip_for_manifest(pano_path: str, n_poses: int) -> list[pano.EquirectFrame]:
    frames = pano.load_equirect_clip(pano_path)
    if len(frames) == 1 and n_poses > 1:
        frames = frames * n_poses  # a still panorama serves every frame
    if len(frames) != n_poses:
        raise ValueError(
            f"{pano_path}: {len(frames)} panorama frames but manifest has {n_poses} poses"
        )
    return frames


def _write_angles_csv(path: str, sample: traj.TrajectorySample) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["frame", "yaw_deg", "pitch_deg", "roll_deg", "fov_deg"])
        for i in range(sample.frame_count):
            yaw, pitch, roll = geom.rotation_to_euler_yxz(sample.rotations[i])
            writer.writerow([i, yaw, pitch, roll, float(sample.fovs[i])])


def _cmd_sample_traj(args) -> int:
    sample = pipeline.sample_trajectory(args.frames, args.seed, pipeline.PipelineConfig())
    poses = [
        pose.CameraPose(sample.rotations[i], np.zeros(3), float(sample.fovs[i]))
        for i in range(sample.frame_count)
    ]
    out = Path(args.out) if args.out else _out_root(None) / f"traj_{args.seed}.poses.json"
    pose.write_manifest(poses, out)
    if args.angles_csv:
        _write_angles_csv(args.angles_csv, sample)
    print(out)
    return 0


def _cmd_render(args) -> int:
    poses = pose.read_manifest(args.poses)
    frames = _load_clip_for_manifest(args.pano, len(poses))
    out = Path(args.out) if args.out else _out_root(None) / "render"
    from concurrent.futures import ThreadPoolExecutor

    def render_one(i: int):
        frame = pano.render_perspective(
            frames[i], poses[i].rotation, poses[i].fov_h, args.width, args.height
        )
        pano.save_image(out / (pano.FRAME_PATTERN % i), frame.data)

    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        list(pool.map(render_one, range(len(poses))))
    print(out)
    return 0


def _cmd_cubefaces(args) -> int:
    src = pano.load_equirect_clip(args.pano)[0]
    out = Path(args.out) if args.out else _out_root(None) / "cubefaces"
    for name, face in zip(pano.CUBE_FACE_NAMES, pano.extract_cube_faces(src, args.size)):
        pano.save_image(out / f"{name}.png", face.data)
    print(out)
    return 0


def _cmd_plucker(args) -> int:
    poses = pose.read_manifest(args.poses)
    pmap = plucker.plucker_map(poses, args.width, args.height)
    out = Path(args.out) if args.out else _out_root(None) / "rays.plk"
    plucker.write_plucker(pmap, out)
    print(out)
    return 0


def _cmd_mask(args) -> int:
    poses = pose.read_manifest(args.poses)
    if not 0 <= args.frame < len(poses):
        raise ValueError(f"frame {args.frame} out of range (manifest has {len(poses)})")
    p = poses[args.frame]
    mask = pano.fov_mask(p.rotation, p.fov_h, args.aspect, 2 * args.height, args.height)
    out = Path(args.out) if args.out else _out_root(None) / "mask.png"
    pano.save_mask(out, mask)
    print(out)
    return 0


def _cmd_bundle(args) -> int:
    config = pipeline.PipelineConfig.load(args.config) if args.config else pipeline.PipelineConfig()
    overrides = {
        "render_width": args.render_width,
        "render_height": args.render_height,
        "plucker_width": args.plucker_width,
        "plucker_height": args.plucker_height,
        "null_pitch_rate": args.null_pitch_rate,
        "jobs": args.jobs,
    }
    from dataclasses import replace

    config = replace(config, **{k: v for k, v in overrides.items() if v is not None})
    sfm = pose.read_manifest(args.sfm)
    frames = _load_clip_for_manifest(args.pano, len(sfm))
    bundle = pipeline.generate_sample(frames, sfm, args.seed, config, clip_id=args.clip_id)
    out = pipeline.write_bundle(bundle, _out_root(args.out), config)
    print(out)
    return 0


def _cmd_metrics(args) -> int:
    ref = pose.read_manifest(args.ref)
    est = pose.read_manifest(args.est)
    row = {"clip_id": args.clip_id, **metrics.evaluate_pair(ref, est)}
    if args.out:
        metrics.write_report([row], args.out)
        print(args.out)
    else:
        print(",".join(metrics.REPORT_COLUMNS))
        print(",".join(str(row[k]) for k in metrics.REPORT_COLUMNS))
    return 0


def _cmd_stats(args) -> int:
    poses = pose.read_manifest(args.poses)
    stats = metrics.trajectory_stats(poses, args.bin_width)
    rows = [["total_angular_distance_deg", "", str(stats.total_angular_distance)]]
    for series, lo, hist in (
        ("pitch", -90.0, stats.pitch_hist),
        ("roll", -180.0, stats.roll_hist),
        ("yaw", 0.0, stats.yaw_hist),
    ):
        for i, count in enumerate(hist):
            rows.append([series, str(lo + i * stats.bin_width), str(int(count))])
    lines = ["series,bin_start_deg,count"] + [",".join(r) for r in rows]
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text)
        print(args.out)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_bench_bin(args) -> int:
    clips = bench.read_clips_csv(args.clips, args.exclude)
    bench.assign_bins(clips)
    bench.write_selection_csv(clips, args.out)
    print(args.out)
    return 0


def _cmd_bench_select(args) -> int:
    clips = bench.read_clips_csv(args.clips, args.exclude)
    bench.assign_bins(clips)
    result = bench.select_uniform(clips, args.target, args.seed)
    bench.write_selection_csv(clips, args.out)
    report = result.shortfall_report()
    if args.report:
        Path(args.report).parent.mkdir(parents=True, exist_ok=True)
        Path(args.report).write_text(report)
    else:
        sys.stderr.write(report)
    print(args.out)
    return 0


def _cmd_bench_roll(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    clips = []
    with open(args.selection, newline="") as f:
        for row in csv.DictReader(f):
            if int(row.get("selected", "1") or 0):
                clips.append(bench.ClipRecord(clip_id=row["clip_id"], mean_pitch=float(row["mean_pitch"]), source_path=row.get("path", "")))
    if not clips:
        raise ValueError(f"{args.selection}: no selected clips")
    plan = bench.augment_roll(clips, args.seed, args.frames, args.limit)
    with open(out / "roll_plan.csv", "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["clip_id", "frame", "roll_deg"])
        for clip_id in sorted(plan.rolls):
            for i, r in enumerate(plan.rolls[clip_id]):
                writer.writerow([clip_id, i, float(r)])
    for clip_id, rolls in sorted(plan.rolls.items()):
        if args.manifest_root:
            src = Path(args.manifest_root) / f"{clip_id}{pose.MANIFEST_EXTENSION}"
            composed = bench.compose_roll(pose.read_manifest(src), rolls)
            pose.write_manifest(composed, out / f"{clip_id}{pose.MANIFEST_EXTENSION}")
        if args.frames_root:
            frame_dir = Path(args.frames_root) / clip_id
            paths = pano.list_frames(frame_dir)
            if len(paths) != len(rolls):
                raise ValueError(f"{frame_dir}: {len(paths)} frames but plan has {len(rolls)}")
            for i, (path, roll) in enumerate(zip(paths, rolls)):
                data, _ = pano.load_image(path)
                h, w = data.shape[:2]
                frame = pano.PerspectiveFrame(
                    data, pose.intrinsics_from_fov(90.0, w, h), np.eye(3)
                )
                warped = pano.roll_warp(frame, float(roll))
                pano.save_image(out / clip_id / (pano.FRAME_PATTERN % i), warped.data)
    print(out)
    return 0


_COMMANDS = {
    "sample-traj": _cmd_sample_traj,
    "render": _cmd_render,
    "cubefaces": _cmd_cubefaces,
    "plucker": _cmd_plucker,
    "mask": _cmd_mask,
    "bundle": _cmd_bundle,
    "metrics": _cmd_metrics,
    "stats": _cmd_stats,
    "bench-bin": _cmd_bench_bin,
    "bench-select": _cmd_bench_select,
    "bench-roll": _cmd_bench_roll,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"gravicam {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
