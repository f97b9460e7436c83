"""Pose-error metrics and trajectory distribution statistics.

All metrics operate on pose annotations (never pixels) and are symmetric in
(reference, estimate).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import geom
from .pose import CameraPose


def _check_pair(reference: list[CameraPose], estimate: list[CameraPose]) -> None:
    if len(reference) != len(estimate):
        raise ValueError(f"trajectory length mismatch: {len(reference)} vs {len(estimate)}")
    if not reference:
        raise ValueError("trajectories must be non-empty")


def pitch_error(reference: list[CameraPose], estimate: list[CameraPose]) -> float:
    """Mean absolute per-frame pitch difference, degrees."""
    _check_pair(reference, estimate)
    total = 0.0
    for r, e in zip(reference, estimate):
        _, p_ref, _ = geom.rotation_to_euler_yxz(r.rotation)
        _, p_est, _ = geom.rotation_to_euler_yxz(e.rotation)
        total += abs(p_ref - p_est)
    return total / len(reference)


def gravity_error(reference: list[CameraPose], estimate: list[CameraPose]) -> float:
    """Mean angle between camera-frame up vectors, degrees."""
    _check_pair(reference, estimate)
    total = 0.0
    for r, e in zip(reference, estimate):
        dot = float(np.dot(geom.camera_up(r.rotation), geom.camera_up(e.rotation)))
        total += math.degrees(math.acos(np.clip(dot, -1.0, 1.0)))
    return total / len(reference)


def relative_rotation_error(reference: list[CameraPose], estimate: list[CameraPose]) -> float:
    """Mean geodesic distance between first-frame-relative rotations, degrees."""
    _check_pair(reference, estimate)
    r0 = reference[0].rotation
    e0 = estimate[0].rotation
    total = 0.0
    for r, e in zip(reference, estimate):
        total += geom.geodesic_angle(r0.T @ r.rotation, e0.T @ e.rotation)
    return total / len(reference)


def _normalized_positions(poses: list[CameraPose]) -> np.ndarray:
    t = np.stack([p.translation for p in poses])
    t = t - t[0]
    scale = float(np.max(np.linalg.norm(t, axis=1)))
    if scale < 1e-12:  # static trajectory: keep scale 1
        scale = 1.0
    return t / scale


def translation_error(reference: list[CameraPose], estimate: list[CameraPose]) -> float:
    """Mean distance between start-anchored, max-displacement-normalized positions."""
    _check_pair(reference, estimate)
    ref = _normalized_positions(reference)
    est = _normalized_positions(estimate)
    return float(np.mean(np.linalg.norm(ref - est, axis=1)))


@dataclass
class TrajectoryStats:
    total_angular_distance: float  # degrees
    bin_width: float
    pitch_hist: np.ndarray  # counts over [-90, 90]
    roll_hist: np.ndarray  # counts over (-180, 180]
    yaw_hist: np.ndarray  # counts over [0, 360)


def trajectory_stats(poses: list[CameraPose], bin_width_deg: float = 10.0) -> TrajectoryStats:
    """Total angular distance plus fixed-range Euler-angle histograms."""
    if not poses:
        raise ValueError("trajectory must be non-empty")
    if bin_width_deg <= 0:
        raise ValueError(f"bin_width must be positive, got {bin_width_deg}")
    total = 0.0
    for a, b in zip(poses, poses[1:]):
        total += geom.geodesic_angle(a.rotation, b.rotation)
    eulers = np.array([geom.rotation_to_euler_yxz(p.rotation) for p in poses])
    yaw, pitch, roll = eulers[:, 0], eulers[:, 1], eulers[:, 2]

    def hist(values, lo, hi):
        n_bins = max(1, int(math.ceil((hi - lo) / bin_width_deg)))
        edges = lo + bin_width_deg * np.arange(n_bins + 1)
        counts, _ = np.histogram(np.clip(values, lo, np.nextafter(hi, lo)), bins=edges)
        return counts

    return TrajectoryStats(
        total_angular_distance=total,
        bin_width=bin_width_deg,
        pitch_hist=hist(pitch, -90.0, 90.0),
        roll_hist=hist(roll, -180.0, 180.0),
        yaw_hist=hist(yaw, 0.0, 360.0),
    )


def evaluate_pair(reference: list[CameraPose], estimate: list[CameraPose]) -> dict[str, float]:
    return {
        "pitch_err": pitch_error(reference, estimate),
        "gravity_err": gravity_error(reference, estimate),
        "rot_err": relative_rotation_error(reference, estimate),
        "trans_err": translation_error(reference, estimate),
    }


REPORT_COLUMNS = ("clip_id", "pitch_err", "gravity_err", "rot_err", "trans_err")


def write_report(rows: list[dict], path: str | Path) -> None:
    """CSV report: one row per clip plus an aggregate mean row."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=REPORT_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row[k] for k in REPORT_COLUMNS})
        if rows:
            writer.writerow(
                {
                    "clip_id": "mean",
                    **{
                        k: sum(float(r[k]) for r in rows) / len(rows)
                        for k in REPORT_COLUMNS[1:]
                    },
                }
            )
