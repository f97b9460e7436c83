"""Equirectangular resampling: perspective crops, cube faces, FoV masks,
and in-plane roll warping.

All resampling is bilinear; longitudes wrap, latitudes clamp, and the exact
pole directions use the average of the pole row to avoid asin degeneracy.
8-bit sources are converted to float32 in [0, 1] at load time.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from . import geom
from .pose import Intrinsics, intrinsics_from_fov

CUBE_FACE_NAMES = ("front", "back", "left", "right", "top", "bottom")
# (yaw, pitch) degrees per face, matching the order above.
CUBE_FACE_ANGLES = ((0.0, 0.0), (180.0, 0.0), (-90.0, 0.0), (90.0, 0.0), (0.0, 90.0), (0.0, -90.0))

_POLE_EPS = 1e-9


@dataclass
class EquirectFrame:
    """2:1 equirectangular image; data is float32 (H, W, C)."""

    data: np.ndarray

    def __post_init__(self):
        self.data = np.atleast_3d(np.asarray(self.data, dtype=np.float32))
        h, w = self.data.shape[:2]
        if w != 2 * h:
            raise ValueError(f"equirectangular frames must be 2:1, got {w}x{h}")

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def channels(self) -> int:
        return self.data.shape[2]

    def wrap_padded(self) -> np.ndarray:
        """Panorama with one wrap column appended; cached for resampling."""
        cached = getattr(self, "_wrap_padded", None)
        if cached is None:
            cached = np.concatenate([self.data, self.data[:, :1]], axis=1)
            self._wrap_padded = cached
        return cached


@dataclass
class PerspectiveFrame:
    data: np.ndarray  # float32 (H, W, C)
    intrinsics: Intrinsics
    pose_rotation: np.ndarray  # camera-to-world

    def __post_init__(self):
        self.data = np.atleast_3d(np.asarray(self.data, dtype=np.float32))
        h, w = self.data.shape[:2]
        if (w, h) != (self.intrinsics.width, self.intrinsics.height):
            raise ValueError("intrinsics inconsistent with image dimensions")


@dataclass
class EquirectMask:
    data: np.ndarray  # bool (H, W)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=bool)
        h, w = self.data.shape
        if w != 2 * h:
            raise ValueError(f"masks must be 2:1, got {w}x{h}")


def camera_rays(intr: Intrinsics) -> np.ndarray:
    """Unnormalized camera-frame ray per pixel center, shape (H, W, 3).

    Pixel centers sit at half-integer coordinates; image rows grow downward
    so the vertical ray component is negated (camera up = +Y).
    """
    u = (np.arange(intr.width) + 0.5 - intr.cx) / intr.fx
    v = -(np.arange(intr.height) + 0.5 - intr.cy) / intr.fy
    x, y = np.meshgrid(u, v)
    return np.stack([x, y, np.ones_like(x)], axis=-1)


def dirs_to_lonlat(dirs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """World directions to (longitude, latitude) in degrees."""
    x, y, z = dirs[..., 0], dirs[..., 1], dirs[..., 2]
    lon = np.degrees(np.arctan2(x, z))
    lat = np.degrees(np.arctan2(y, np.hypot(x, z)))
    return lon, lat


def lonlat_to_dirs(lon_deg: np.ndarray, lat_deg: np.ndarray) -> np.ndarray:
    lon = np.radians(lon_deg)
    lat = np.radians(lat_deg)
    cl = np.cos(lat)
    return np.stack([cl * np.sin(lon), np.sin(lat), cl * np.cos(lon)], axis=-1)


try:  # optional SIMD resampling; the numpy path below is the reference
    import cv2
except ImportError:  # pragma: no cover
    cv2 = None


def _gather_bilinear_wrap(data: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    h, w = data.shape[:2]
    x0 = np.floor(x).astype(np.int64)
    fx = (x - x0)[..., None]
    x1 = (x0 + 1) % w
    x0 %= w
    y0 = np.floor(y).astype(np.int64)
    fy = (y - y0)[..., None]
    y1 = np.clip(y0 + 1, 0, h - 1)
    y0 = np.clip(y0, 0, h - 1)
    top = data[y0, x0] * (1.0 - fx) + data[y0, x1] * fx
    bot = data[y1, x0] * (1.0 - fx) + data[y1, x1] * fx
    return top * (1.0 - fy) + bot * fy


def sample_equirect(
    data: np.ndarray,
    lon_deg: np.ndarray,
    lat_deg: np.ndarray,
    wrap_padded: np.ndarray | None = None,
) -> np.ndarray:
    """Bilinear panorama lookup with longitude wrap and latitude clamp."""
    h, w = data.shape[:2]
    x = np.mod((lon_deg / 360.0 + 0.5) * w - 0.5, w)
    y = np.clip((0.5 - lat_deg / 180.0) * h - 0.5, 0.0, h - 1.0)
    if cv2 is not None and data.shape[2] <= 4:
        # One wrap column appended so x in [w-1, w) interpolates across the seam.
        padded = wrap_padded if wrap_padded is not None else np.concatenate([data, data[:, :1]], axis=1)
        out = cv2.remap(
            padded,
            x.astype(np.float32),
            y.astype(np.float32),
            interpolation=cv2.INTER_LINEAR,
            borderMode=cv2.BORDER_REPLICATE,
        )
        out = np.atleast_3d(out)
    else:
        out = _gather_bilinear_wrap(data, x, y)

    at_north = lat_deg >= 90.0 - _POLE_EPS
    at_south = lat_deg <= -90.0 + _POLE_EPS
    if np.any(at_north):
        out[at_north] = data[0].mean(axis=0)
    if np.any(at_south):
        out[at_south] = data[-1].mean(axis=0)
    return out.astype(np.float32)


def render_with_intrinsics(src: EquirectFrame, rotation: np.ndarray, intr: Intrinsics) -> PerspectiveFrame:
    rays = camera_rays(intr).astype(np.float32)
    world = rays @ np.asarray(rotation, dtype=np.float32).T
    lon, lat = dirs_to_lonlat(world)
    data = sample_equirect(src.data, lon, lat, wrap_padded=src.wrap_padded())
    return PerspectiveFrame(data=data, intrinsics=intr, pose_rotation=np.asarray(rotation, dtype=float))


def render_perspective(
    src: EquirectFrame, rotation: np.ndarray, fov_h_deg: float, out_w: int, out_h: int
) -> PerspectiveFrame:
    """Render a pinhole crop of the panorama at the given orientation."""
    intr = intrinsics_from_fov(fov_h_deg, out_w, out_h)
    return render_with_intrinsics(src, rotation, intr)


def extract_cube_faces(src: EquirectFrame, face_size: int) -> list[PerspectiveFrame]:
    """Six 90-deg faces in the order front, back, left, right, top, bottom."""
    if face_size < 1:
        raise ValueError(f"face_size must be >= 1, got {face_size}")
    faces = []
    for yaw, pitch in CUBE_FACE_ANGLES:
        r = geom.euler_yxz_to_rotation(yaw, pitch, 0.0)
        faces.append(render_perspective(src, r, 90.0, face_size, face_size))
    return faces


def fov_mask(
    rotation: np.ndarray, fov_h_deg: float, crop_aspect: float, out_w: int, out_h: int
) -> EquirectMask:
    """Equirectangular mask of the solid angle covered by a pinhole crop."""
    if not 0.0 < fov_h_deg < 180.0:
        raise ValueError(f"fov_h must be in (0, 180), got {fov_h_deg}")
    if out_w != 2 * out_h:
        raise ValueError(f"mask output must be 2:1, got {out_w}x{out_h}")
    if crop_aspect <= 0:
        raise ValueError(f"crop_aspect must be positive, got {crop_aspect}")
    lon = ((np.arange(out_w) + 0.5) / out_w - 0.5) * 360.0
    lat = (0.5 - (np.arange(out_h) + 0.5) / out_h) * 180.0
    lon_g, lat_g = np.meshgrid(lon, lat)
    dirs = lonlat_to_dirs(lon_g, lat_g)
    cam = dirs @ np.asarray(rotation, dtype=float)  # R^T applied to rows
    x, y, z = cam[..., 0], cam[..., 1], cam[..., 2]
    tan_h = math.tan(math.radians(fov_h_deg) / 2.0)
    tan_v = tan_h / crop_aspect
    with np.errstate(divide="ignore", invalid="ignore"):
        inside = (z > 0) & (np.abs(x / z) <= tan_h) & (np.abs(y / z) <= tan_v)
    return EquirectMask(inside)


def mask_solid_angle(mask: EquirectMask) -> float:
    """Solid angle (steradians) covered by a mask, cos(latitude)-weighted."""
    h, w = mask.data.shape
    lat = np.radians((0.5 - (np.arange(h) + 0.5) / h) * 180.0)
    weights = np.cos(lat) * (2.0 * math.pi / w) * (math.pi / h)
    return float((mask.data * weights[:, None]).sum())


def bilinear_sample(data: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Plain bilinear lookup with clamp-to-edge; (x, y) in pixel-center coords."""
    h, w = data.shape[:2]
    xi = x - 0.5
    yi = y - 0.5
    x0 = np.floor(xi).astype(np.int64)
    y0 = np.floor(yi).astype(np.int64)
    fx = (xi - x0)[..., None]
    fy = (yi - y0)[..., None]
    x1 = np.clip(x0 + 1, 0, w - 1)
    y1 = np.clip(y0 + 1, 0, h - 1)
    x0 = np.clip(x0, 0, w - 1)
    y0 = np.clip(y0, 0, h - 1)
    top = data[y0, x0] * (1.0 - fx) + data[y0, x1] * fx
    bot = data[y1, x0] * (1.0 - fx) + data[y1, x1] * fx
    return (top * (1.0 - fy) + bot * fy).astype(np.float32)


def roll_crop_scale(width: int, height: int, roll_deg: float) -> float:
    """Zoom factor of the largest same-aspect inscribed rectangle after an
    in-plane rotation by roll_deg."""
    a = math.radians(abs(roll_deg))
    ca, sa = math.cos(a), math.sin(a)
    r = width / height
    half_h = min((width / 2.0) / (r * ca + sa), (height / 2.0) / (r * sa + ca))
    return (height / 2.0) / half_h


def roll_warp(frame: PerspectiveFrame, roll_deg: float) -> PerspectiveFrame:
    """Rotate the image in-plane about the principal point, then center-crop
    the largest valid same-aspect rectangle and rescale to the input size.

    The pose rotation is composed with the roll and the focal length picks up
    the crop zoom, so the output frame stays geometrically consistent.
    """
    if abs(roll_deg) >= 90.0:
        raise ValueError(f"|roll| must be < 90 deg, got {roll_deg}")
    intr = frame.intrinsics
    w, h = intr.width, intr.height
    zoom = roll_crop_scale(w, h, roll_deg)
    c, s = math.cos(math.radians(roll_deg)), math.sin(math.radians(roll_deg))
    u = np.arange(w) + 0.5
    v = np.arange(h) + 0.5
    ug, vg = np.meshgrid(u, v)
    # Shrink into the crop window, then rotate by -roll about the center.
    du = (ug - intr.cx) / zoom
    dv = (vg - intr.cy) / zoom
    x_in = c * du + s * dv + intr.cx
    y_in = -s * du + c * dv + intr.cy
    data = bilinear_sample(frame.data, x_in, y_in)
    new_intr = Intrinsics(
        fx=intr.fx * zoom, fy=intr.fy * zoom, cx=intr.cx, cy=intr.cy, width=w, height=h
    )
    new_rot = frame.pose_rotation @ geom.roll_matrix(roll_deg)
    return PerspectiveFrame(data=data, intrinsics=new_intr, pose_rotation=new_rot)


# ---------------------------------------------------------------------------
# image and frame-directory I/O

FRAME_PATTERN = "frame_%05d.png"
_FRAME_RE = re.compile(r"frame_(\d{5})\.(png|pfm)$")


def load_image(path: str | Path) -> tuple[np.ndarray, str]:
    """Read a PNG or PFM image; returns (float32 (H, W, C) data, depth tag)."""
    path = Path(path)
    if path.suffix.lower() == ".pfm":
        return read_pfm(path), "f32"
    with Image.open(path) as img:
        arr = np.asarray(img)
    if arr.dtype == np.uint8:
        return np.atleast_3d(arr).astype(np.float32) / 255.0, "u8"
    if arr.dtype == np.uint16:
        return np.atleast_3d(arr).astype(np.float32) / 65535.0, "u8"
    return np.atleast_3d(arr).astype(np.float32), "u8"


def save_image(path: str | Path, data: np.ndarray, depth: str = "u8") -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = np.atleast_3d(np.asarray(data))
    if path.suffix.lower() == ".pfm" or depth == "f32":
        write_pfm(path, data.astype(np.float32))
        return
    u8 = np.clip(np.rint(data.astype(np.float64) * 255.0), 0, 255).astype(np.uint8)
    if u8.shape[2] == 1:
        u8 = u8[:, :, 0]
    Image.fromarray(u8).save(path, format="PNG")


def save_mask(path: str | Path, mask: EquirectMask) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(mask.data.astype(np.uint8) * 255).save(path, format="PNG")


def read_pfm(path: str | Path) -> np.ndarray:
    with open(path, "rb") as f:
        header = f.readline().strip()
        if header not in (b"PF", b"Pf"):
            raise ValueError(f"{path}: not a PFM file")
        dims = f.readline().split()
        w, h = int(dims[0]), int(dims[1])
        scale = float(f.readline().strip())
        count = w * h * (3 if header == b"PF" else 1)
        data = np.frombuffer(f.read(count * 4), dtype="<f4" if scale < 0 else ">f4")
    data = data.reshape(h, w, -1)
    return np.atleast_3d(data[::-1]).astype(np.float32)  # PFM rows are bottom-up


def write_pfm(path: str | Path, data: np.ndarray) -> None:
    data = np.atleast_3d(np.asarray(data, dtype=np.float32))
    h, w, ch = data.shape
    if ch not in (1, 3):
        raise ValueError(f"PFM supports 1 or 3 channels, got {ch}")
    with open(path, "wb") as f:
        f.write(b"PF\n" if ch == 3 else b"Pf\n")
        f.write(f"{w} {h}\n".encode())
        f.write(b"-1.0\n")
        f.write(np.ascontiguousarray(data[::-1], dtype="<f4").tobytes())


def list_frames(directory: str | Path) -> list[Path]:
    frames = sorted(p for p in Path(directory).iterdir() if _FRAME_RE.match(p.name))
    if not frames:
        raise FileNotFoundError(f"no frame_XXXXX images found in {directory}")
    return frames


def load_equirect_clip(path: str | Path) -> list[EquirectFrame]:
    """Load a panorama clip: a single image file or a numbered frame directory."""
    path = Path(path)
    if path.is_dir():
        return [EquirectFrame(load_image(p)[0]) for p in list_frames(path)]
    return [EquirectFrame(load_image(path)[0])]
