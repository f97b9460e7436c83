"""End-to-end sample generation: panorama clip + SfM poses -> training bundle.

A bundle holds the rotated perspective clip, its null-pitch companion (fixed
90-deg FoV), gravity-aligned pose manifests for both, the Plücker tensor, and
first-frame FoV masks. Generation is a pure function of (inputs, seed,
config); worker fan-out never changes the output.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from . import pano, plucker, pose, traj
from .pano import EquirectFrame, PerspectiveFrame
from .pose import CameraPose


@dataclass(frozen=True)
class PipelineConfig:
    render_width: int = 480
    render_height: int = 480
    plucker_width: int = 96
    plucker_height: int = 96
    mask_height: int = 256  # mask width is always 2x
    null_pitch_fov: float = 90.0
    null_pitch_rate: float = 0.5
    per_frame_masks: bool = False
    # Trajectory-sampler constants, surfaced for ablations.
    fov_min: float = traj.FOV_MIN_DEG
    fov_max: float = traj.FOV_MAX_DEG
    beta_a: float = traj.BETA_A
    beta_b: float = traj.BETA_B
    max_rot_rate: float = traj.MAX_ROT_RATE_DEG
    jobs: int = 1

    @classmethod
    def load(cls, path: str | Path) -> "PipelineConfig":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        unknown = set(raw) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**raw)


@dataclass
class SampleBundle:
    clip_id: str
    seed: int
    frames: list[PerspectiveFrame]
    null_pitch_frames: list[PerspectiveFrame]
    poses: list[CameraPose]
    null_pitch_poses: list[CameraPose]
    plucker: plucker.PluckerMap
    masks: list[pano.EquirectMask]
    null_masks: list[pano.EquirectMask]
    caption_source: str  # "rotated" or "null_pitch"
    sample: traj.TrajectorySample

    @property
    def frame_count(self) -> int:
        return len(self.frames)


def _child_seed(seed: int, key: int) -> int:
    return int(np.random.SeedSequence(entropy=seed, spawn_key=(key,)).generate_state(1)[0])


def draw_caption_source(seed: int, rate: float) -> str:
    """Per-sample coin deciding which crop set feeds the captioner."""
    rng = traj.make_rng(_child_seed(seed, 2))
    return "null_pitch" if rng.random() < rate else "rotated"


def sample_trajectory(frame_count: int, seed: int, config: PipelineConfig) -> traj.TrajectorySample:
    """Rotation path + FoV curve + null-pitch companion from one seed."""
    sample = traj.sample_rotation_trajectory(
        frame_count,
        _child_seed(seed, 0),
        beta_a=config.beta_a,
        beta_b=config.beta_b,
        max_rot_rate=config.max_rot_rate,
    )
    sample.fovs = traj.sample_fov_trajectory(
        frame_count, _child_seed(seed, 1), fov_min=config.fov_min, fov_max=config.fov_max
    )
    sample.null_pitch_rotations = traj.null_pitch_companion(sample.rotations)
    sample.null_pitch_fov = config.null_pitch_fov
    sample.seed = seed
    return sample


def generate_sample(
    clip_frames: list[EquirectFrame],
    sfm_poses: list[CameraPose],
    seed: int,
    config: PipelineConfig = PipelineConfig(),
    clip_id: str = "clip",
    trajectory: traj.TrajectorySample | None = None,
) -> SampleBundle:
    """Run the full on-the-fly pipeline for one clip and one seed.

    `trajectory` may be injected to bypass sampling (used by tests); by
    default it is drawn deterministically from the seed.
    """
    if len(clip_frames) != len(sfm_poses):
        raise ValueError(
            f"clip {clip_id}: {len(clip_frames)} frames but {len(sfm_poses)} SfM poses"
        )
    frame_count = len(clip_frames)
    sample = trajectory or sample_trajectory(frame_count, seed, config)
    if sample.rotations.shape[0] != frame_count:
        raise ValueError(f"clip {clip_id}: trajectory length {sample.rotations.shape[0]} != {frame_count}")

    rel = pose.relative_from_sfm(sfm_poses)
    abs_poses = pose.absolute_poses(sample.rotations, rel)
    abs_poses = [replace_fov(p, float(f)) for p, f in zip(abs_poses, sample.fovs)]
    null_abs = pose.absolute_poses(sample.null_pitch_rotations, rel)
    null_abs = [replace_fov(p, config.null_pitch_fov) for p in null_abs]

    def render_rotated(f: int) -> PerspectiveFrame:
        return pano.render_perspective(
            clip_frames[f], sample.rotations[f], float(sample.fovs[f]),
            config.render_width, config.render_height,
        )

    def render_null(f: int) -> PerspectiveFrame:
        return pano.render_perspective(
            clip_frames[f], sample.null_pitch_rotations[f], config.null_pitch_fov,
            config.render_width, config.render_height,
        )

    indices = range(frame_count)
    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            frames = list(pool.map(render_rotated, indices))
            null_frames = list(pool.map(render_null, indices))
    else:
        frames = [render_rotated(f) for f in indices]
        null_frames = [render_null(f) for f in indices]

    pmap = plucker.plucker_map(abs_poses, config.plucker_width, config.plucker_height)

    aspect = config.render_width / config.render_height
    mask_frames = indices if config.per_frame_masks else [0]
    masks = [
        pano.fov_mask(sample.rotations[f], float(sample.fovs[f]), aspect,
                      2 * config.mask_height, config.mask_height)
        for f in mask_frames
    ]
    null_masks = [
        pano.fov_mask(sample.null_pitch_rotations[f], config.null_pitch_fov, aspect,
                      2 * config.mask_height, config.mask_height)
        for f in mask_frames
    ]

    return SampleBundle(
        clip_id=clip_id,
        seed=seed,
        frames=frames,
        null_pitch_frames=null_frames,
        poses=abs_poses,
        null_pitch_poses=null_abs,
        plucker=pmap,
        masks=masks,
        null_masks=null_masks,
        caption_source=draw_caption_source(seed, config.null_pitch_rate),
        sample=sample,
    )


def replace_fov(p: CameraPose, fov_h: float) -> CameraPose:
    return CameraPose(p.rotation, p.translation, fov_h)


def write_bundle(bundle: SampleBundle, out_root: str | Path, config: PipelineConfig) -> Path:
    """Materialize a bundle as out/<clip_id>/<seed>/{frames/, null_pitch/, ...}."""
    out = Path(out_root) / bundle.clip_id / str(bundle.seed)
    out.mkdir(parents=True, exist_ok=True)
    for f, frame in enumerate(bundle.frames):
        pano.save_image(out / "frames" / (pano.FRAME_PATTERN % f), frame.data)
    for f, frame in enumerate(bundle.null_pitch_frames):
        pano.save_image(out / "null_pitch" / (pano.FRAME_PATTERN % f), frame.data)
    pose.write_manifest(bundle.poses, out / "poses.json")
    pose.write_manifest(bundle.null_pitch_poses, out / "null_pitch.poses.json")
    plucker.write_plucker(bundle.plucker, out / "rays.plk")
    if len(bundle.masks) == 1:
        pano.save_mask(out / "mask.png", bundle.masks[0])
        pano.save_mask(out / "null_mask.png", bundle.null_masks[0])
    else:
        for f, (m, nm) in enumerate(zip(bundle.masks, bundle.null_masks)):
            pano.save_mask(out / "masks" / (pano.FRAME_PATTERN % f), m)
            pano.save_mask(out / "null_masks" / (pano.FRAME_PATTERN % f), nm)
    config_dump = asdict(config)
    config_dump.pop("jobs")  # worker count must never change bundle bytes
    meta = {
        "clip_id": bundle.clip_id,
        "seed": bundle.seed,
        "frame_count": bundle.frame_count,
        "caption_source": bundle.caption_source,
        "null_pitch_fov": config.null_pitch_fov,
        "config": config_dump,
        "init_euler": list(bundle.sample.init_euler) if bundle.sample.init_euler else None,
    }
    (out / "meta.json").write_text(json.dumps(meta, indent=1) + "\n", encoding="utf-8")
    return out
