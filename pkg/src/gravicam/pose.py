"""Camera pose composition, pinhole intrinsics, and pose-manifest I/O.

Poses are camera-to-world rigid transforms: `rotation` maps camera-frame
vectors to world-frame vectors and `translation` is the camera center in
world coordinates.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import geom

MANIFEST_VERSION = 1
MANIFEST_EXTENSION = ".poses.json"
CONVENTION = {"world_up": "+y", "handedness": "right", "forward": "+z"}

# Rotations with more orthonormality drift than this are rejected on read;
# below it they are silently re-orthonormalized.
ROTATION_DRIFT_TOL = 1e-6


class ManifestError(ValueError):
    """Raised for malformed pose-manifest files; carries the frame index."""

    def __init__(self, message: str, frame: int | None = None):
        super().__init__(message if frame is None else f"frame {frame}: {message}")
        self.frame = frame


@dataclass
class CameraPose:
    rotation: np.ndarray  # (3, 3), camera-to-world
    translation: np.ndarray  # (3,), camera center in world coordinates
    fov_h: float = 90.0  # horizontal field of view, degrees

    def __post_init__(self):
        self.rotation = np.asarray(self.rotation, dtype=float)
        self.translation = np.asarray(self.translation, dtype=float)
        if self.rotation.shape != (3, 3) or self.translation.shape != (3,):
            raise ValueError("pose needs a 3x3 rotation and a 3-vector translation")
        if not np.all(np.isfinite(self.translation)):
            raise ValueError("translation contains non-finite entries")
        if not 0.0 < self.fov_h < 180.0:
            raise ValueError(f"fov_h must be in (0, 180), got {self.fov_h}")

    def matrix(self) -> np.ndarray:
        """4x4 homogeneous camera-to-world transform."""
        m = np.eye(4)
        m[:3, :3] = self.rotation
        m[:3, 3] = self.translation
        return m

    @classmethod
    def identity(cls, fov_h: float = 90.0) -> "CameraPose":
        return cls(np.eye(3), np.zeros(3), fov_h)


@dataclass(frozen=True)
class Intrinsics:
    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def matrix(self) -> np.ndarray:
        return np.array([[self.fx, 0.0, self.cx], [0.0, self.fy, self.cy], [0.0, 0.0, 1.0]])


def intrinsics_from_fov(fov_h_deg: float, width: int, height: int) -> Intrinsics:
    """Square-pixel pinhole intrinsics with the principal point at the center."""
    if not 0.0 < fov_h_deg < 180.0:
        raise ValueError(f"fov_h must be in (0, 180), got {fov_h_deg}")
    if width < 1 or height < 1:
        raise ValueError(f"image dimensions must be >= 1, got {width}x{height}")
    fx = (width / 2.0) / math.tan(math.radians(fov_h_deg) / 2.0)
    return Intrinsics(fx=fx, fy=fx, cx=width / 2.0, cy=height / 2.0, width=width, height=height)


def relative_from_sfm(sfm_poses: list[CameraPose]) -> list[CameraPose]:
    """First-frame-relative motion: E_rel,f = E_0^-1 E_f; frame 0 is identity."""
    if not sfm_poses:
        raise ValueError("need at least one pose")
    e0_inv = np.linalg.inv(sfm_poses[0].matrix())
    out = []
    for p in sfm_poses:
        m = e0_inv @ p.matrix()
        out.append(CameraPose(geom.orthonormalize(m[:3, :3]), m[:3, 3], p.fov_h))
    return out


def absolute_poses(pano_rotations: np.ndarray, rel_poses: list[CameraPose]) -> list[CameraPose]:
    """Gravity-aligned absolute poses from sampled panorama rotations.

    Each relative pose is premultiplied by G @ R_pano,f, where the constant
    G = remove_yaw(R_pano,0) @ R_pano,0^T cancels the initial yaw: with
    identity relative motion, frame 0 keeps only the sampled pitch and roll.
    """
    pano_rotations = np.asarray(pano_rotations, dtype=float)
    if len(pano_rotations) != len(rel_poses):
        raise ValueError(
            f"length mismatch: {len(pano_rotations)} rotations vs {len(rel_poses)} relative poses"
        )
    if len(rel_poses) == 0:
        raise ValueError("need at least one pose")
    r0 = pano_rotations[0]
    gravity_fix = geom.remove_yaw(r0) @ r0.T
    out = []
    for r_pano, rel in zip(pano_rotations, rel_poses):
        prefix = gravity_fix @ r_pano
        out.append(CameraPose(prefix @ rel.rotation, prefix @ rel.translation, rel.fov_h))
    return out


def manifest_from_poses(poses: list[CameraPose]) -> dict:
    return {
        "version": MANIFEST_VERSION,
        "convention": dict(CONVENTION),
        "frames": [
            {
                "index": i,
                "rotation": [float(x) for x in p.rotation.reshape(-1)],
                "translation": [float(x) for x in p.translation],
                "fov_deg": float(p.fov_h),
            }
            for i, p in enumerate(poses)
        ],
    }


def poses_from_manifest(manifest: dict) -> list[CameraPose]:
    frames = manifest.get("frames")
    if not isinstance(frames, list) or not frames:
        raise ManifestError("manifest has no frames")
    poses = []
    for i, fr in enumerate(frames):
        if fr.get("index") != i:
            raise ManifestError(f"non-contiguous index {fr.get('index')!r}", frame=i)
        try:
            r = np.array(fr["rotation"], dtype=float).reshape(3, 3)
            t = np.array(fr["translation"], dtype=float)
            fov = float(fr["fov_deg"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ManifestError(f"malformed frame record ({exc})", frame=i) from exc
        drift = float(np.max(np.abs(r.T @ r - np.eye(3))))
        if drift > ROTATION_DRIFT_TOL:
            raise ManifestError(f"rotation drift {drift:.3g} exceeds {ROTATION_DRIFT_TOL}", frame=i)
        if np.linalg.det(r) < 0:
            raise ManifestError("rotation has negative determinant", frame=i)
        if drift > 1e-12:  # below this, keep the stored bits untouched
            r = geom.orthonormalize(r)
        poses.append(CameraPose(r, t, fov))
    return poses


def write_manifest(poses: list[CameraPose], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(manifest_from_poses(poses), indent=1) + "\n", encoding="utf-8")


def read_manifest(path: str | Path) -> list[CameraPose]:
    try:
        manifest = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}: not valid JSON ({exc})") from exc
    if manifest.get("version") != MANIFEST_VERSION:
        raise ManifestError(f"{path}: unsupported manifest version {manifest.get('version')!r}")
    return poses_from_manifest(manifest)
