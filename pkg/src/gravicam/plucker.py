"""Per-pixel Plücker-ray conditioning buffers and their tensor file codec.

Each pixel stores (m, d): the unit ray direction d in world coordinates and
the moment m = t x d, with t the camera center. The direction is the pure
rotated pinhole ray (no camera-position term), which is what keeps m . d = 0
and makes the 6-vector a line coordinate.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .pano import camera_rays
from .pose import CameraPose, intrinsics_from_fov

MAGIC = b"PLKRTEN1"
CHANNEL_ORDER = ["mx", "my", "mz", "dx", "dy", "dz"]


class PluckerFormatError(ValueError):
    pass


@dataclass
class PluckerMap:
    """F x H x W x 6 float32 tensor of per-pixel rays, channels (m, d)."""

    data: np.ndarray

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.float32)
        if self.data.ndim != 4 or self.data.shape[3] != 6:
            raise ValueError(f"expected (F, H, W, 6) tensor, got shape {self.data.shape}")

    @property
    def dims(self) -> tuple[int, int, int, int]:
        return self.data.shape

    def moments(self) -> np.ndarray:
        return self.data[..., :3]

    def directions(self) -> np.ndarray:
        return self.data[..., 3:]


def plucker_map(poses: list[CameraPose], width: int, height: int) -> PluckerMap:
    """Build the conditioning buffer for a pose sequence.

    Rays go through pixel centers (half-integer coordinates); directions and
    moments are expressed in the frame the poses live in, so feeding
    gravity-aligned absolute poses yields a gravity-aligned buffer.
    """
    if not poses:
        raise ValueError("need at least one pose")
    if width < 1 or height < 1:
        raise ValueError(f"dimensions must be >= 1, got {width}x{height}")
    out = np.empty((len(poses), height, width, 6), dtype=np.float32)
    for f, p in enumerate(poses):
        rays = camera_rays(intrinsics_from_fov(p.fov_h, width, height))
        d = rays @ p.rotation.T
        norms = np.linalg.norm(d, axis=-1, keepdims=True)
        if np.any(norms < 1e-12):
            raise RuntimeError(f"frame {f}: degenerate zero-norm ray direction")
        d /= norms
        m = np.cross(np.broadcast_to(p.translation, d.shape), d)
        out[f, ..., :3] = m
        out[f, ..., 3:] = d
    return PluckerMap(out)


def write_plucker(pmap: PluckerMap, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = json.dumps(
        {"dims": list(pmap.dims), "dtype": "f32", "channel_order": CHANNEL_ORDER}
    ).encode("utf-8")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<I", len(header)))
        f.write(header)
        f.write(np.ascontiguousarray(pmap.data, dtype="<f4").tobytes())


def read_plucker(path: str | Path) -> PluckerMap:
    raw = Path(path).read_bytes()
    if raw[:8] != MAGIC:
        raise PluckerFormatError(f"{path}: bad magic {raw[:8]!r}")
    if len(raw) < 12:
        raise PluckerFormatError(f"{path}: truncated header")
    (header_len,) = struct.unpack("<I", raw[8:12])
    try:
        header = json.loads(raw[12 : 12 + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise PluckerFormatError(f"{path}: unreadable header ({exc})") from exc
    if header.get("dtype") != "f32":
        raise PluckerFormatError(f"{path}: unsupported dtype {header.get('dtype')!r}")
    dims = header.get("dims")
    if not isinstance(dims, list) or len(dims) != 4:
        raise PluckerFormatError(f"{path}: bad dims {dims!r}")
    expected = int(np.prod(dims)) * 4
    payload = raw[12 + header_len :]
    if len(payload) != expected:
        raise PluckerFormatError(
            f"{path}: payload size mismatch, expected {expected} bytes, got {len(payload)}"
        )
    data = np.frombuffer(payload, dtype="<f4").reshape(dims)
    return PluckerMap(data.copy())
