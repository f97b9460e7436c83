"""Benchmark rebalancing: pitch binning, uniform subset selection, and roll
augmentation planning.

Mean-pitch values come from a CSV sidecar (clip_id, mean_pitch, path);
estimating them from pixels is out of scope. Human quality filtering is
replaced by an exclude-list hook.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import geom, traj
from .pose import CameraPose

PITCH_BIN_WIDTH = 10.0
PITCH_SPAN = (-85.0, 85.0)
NUM_BINS = int((PITCH_SPAN[1] - PITCH_SPAN[0]) / PITCH_BIN_WIDTH)  # 17


@dataclass
class ClipRecord:
    clip_id: str
    mean_pitch: float
    source_path: str = ""
    selected: bool = False
    assigned_bin: int | None = None
    out_of_range: bool = False


def assign_bins(clips: list[ClipRecord]) -> list[ClipRecord]:
    """Assign each clip to a 10-degree pitch bin over [-85, 85].

    Pitches outside the span clamp to the boundary bin and are flagged.
    """
    for clip in clips:
        if not math.isfinite(clip.mean_pitch):
            raise ValueError(f"clip {clip.clip_id}: non-finite mean_pitch")
        idx = int(math.floor((clip.mean_pitch - PITCH_SPAN[0]) / PITCH_BIN_WIDTH))
        clip.assigned_bin = int(np.clip(idx, 0, NUM_BINS - 1))
        clip.out_of_range = not PITCH_SPAN[0] <= clip.mean_pitch <= PITCH_SPAN[1]
    return clips


@dataclass
class SelectionResult:
    selected: list[ClipRecord]
    quotas: dict[int, int]
    shortfalls: dict[int, int] = field(default_factory=dict)  # bin -> missing count

    def shortfall_report(self) -> str:
        if not self.shortfalls:
            return "no shortfalls: every bin met its quota\n"
        lines = ["bins below quota (resolve by adding candidates or excluding fewer clips):"]
        for b in sorted(self.shortfalls):
            lo = PITCH_SPAN[0] + b * PITCH_BIN_WIDTH
            lines.append(
                f"  bin {b} [{lo:+.0f}, {lo + PITCH_BIN_WIDTH:+.0f}) deg: "
                f"quota {self.quotas[b]}, missing {self.shortfalls[b]}"
            )
        return "\n".join(lines) + "\n"


def select_uniform(clips: list[ClipRecord], target_total: int, seed: int) -> SelectionResult:
    """Pick a pitch-uniform subset: floor(target/17) per bin, remainder going
    to the lowest-candidate-count bins first, seeded-random within a bin."""
    if target_total < NUM_BINS:
        raise ValueError(f"target_total must be >= {NUM_BINS}, got {target_total}")
    by_bin: dict[int, list[ClipRecord]] = {b: [] for b in range(NUM_BINS)}
    for clip in clips:
        if clip.assigned_bin is None:
            raise ValueError(f"clip {clip.clip_id}: run assign_bins first")
        by_bin[clip.assigned_bin].append(clip)

    base = target_total // NUM_BINS
    remainder = target_total - base * NUM_BINS
    quotas = {b: base for b in range(NUM_BINS)}
    for b in sorted(range(NUM_BINS), key=lambda b: (len(by_bin[b]), b))[:remainder]:
        quotas[b] += 1

    rng = traj.make_rng(seed)
    selected: list[ClipRecord] = []
    shortfalls: dict[int, int] = {}
    for b in range(NUM_BINS):
        candidates = sorted(by_bin[b], key=lambda c: c.clip_id)
        take = min(quotas[b], len(candidates))
        if take < quotas[b]:
            shortfalls[b] = quotas[b] - take
        picks = rng.choice(len(candidates), size=take, replace=False) if take else []
        for i in sorted(int(i) for i in np.atleast_1d(picks)):
            candidates[i].selected = True
            selected.append(candidates[i])
    return SelectionResult(selected=selected, quotas=quotas, shortfalls=shortfalls)


@dataclass
class RollPlan:
    seed: int
    limit_deg: float
    frame_count: int
    rolls: dict[str, np.ndarray]  # clip_id -> per-frame roll degrees


def augment_roll(
    selected: list[ClipRecord], seed: int, frame_count: int, limit_deg: float = 40.0
) -> RollPlan:
    """Deterministic per-clip roll trajectories in [-limit, limit]."""
    if not selected:
        raise ValueError("selection is empty")
    rolls = {}
    for i, clip in enumerate(sorted(selected, key=lambda c: c.clip_id)):
        clip_seed = int(np.random.SeedSequence(entropy=seed, spawn_key=(i,)).generate_state(1)[0])
        rolls[clip.clip_id] = traj.sample_roll_curve(frame_count, clip_seed, limit_deg)
    return RollPlan(seed=seed, limit_deg=limit_deg, frame_count=frame_count, rolls=rolls)


def compose_roll(poses: list[CameraPose], rolls: np.ndarray) -> list[CameraPose]:
    """Fold a roll curve into a pose sequence (matches pano.roll_warp's update)."""
    if len(poses) != len(rolls):
        raise ValueError(f"length mismatch: {len(poses)} poses vs {len(rolls)} roll values")
    return [
        CameraPose(p.rotation @ geom.roll_matrix(float(r)), p.translation, p.fov_h)
        for p, r in zip(poses, rolls)
    ]


# ---------------------------------------------------------------------------
# CSV ingest / emit

def read_clips_csv(path: str | Path, exclude_path: str | Path | None = None) -> list[ClipRecord]:
    """Load the (clip_id, mean_pitch, path) sidecar, honoring an exclude list."""
    excluded: set[str] = set()
    if exclude_path is not None:
        excluded = {
            line.strip()
            for line in Path(exclude_path).read_text().splitlines()
            if line.strip() and not line.startswith("#")
        }
    clips = []
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            if row["clip_id"] in excluded:
                continue
            clips.append(
                ClipRecord(
                    clip_id=row["clip_id"],
                    mean_pitch=float(row["mean_pitch"]),
                    source_path=row.get("path", ""),
                )
            )
    return clips


def write_selection_csv(clips: list[ClipRecord], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["clip_id", "mean_pitch", "path", "bin", "out_of_range", "selected"])
        for c in clips:
            writer.writerow(
                [c.clip_id, c.mean_pitch, c.source_path, c.assigned_bin, int(c.out_of_range), int(c.selected)]
            )
