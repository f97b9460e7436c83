"""Rotation algebra in the world-up/+Y convention used throughout the toolkit.

Conventions (fixed, documented once here):

* Right-handed coordinates, world up = +Y.
* Camera-to-world rotations; camera forward = +Z, right = +X. Image rows
  grow downward, so the image "up" direction is -Y of pixel coordinates.
* Euler angles follow the intrinsic Y-X-Z order: yaw about world up,
  then pitch about camera right, then roll about camera forward.
  pitch = +90 deg points the optical axis at the zenith.
* All public APIs take and return degrees; radians stay internal.
"""

from __future__ import annotations

import math

import numpy as np

WORLD_UP = np.array([0.0, 1.0, 0.0])

# |pitch| above this is treated as gimbal lock when decomposing.
GIMBAL_LOCK_PITCH_DEG = 89.9


def check_rotation(m: np.ndarray, tol: float = 1e-6) -> np.ndarray:
    """Validate a 3x3 rotation matrix (orthonormal, det +1) and return it."""
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 3):
        raise ValueError(f"rotation must be 3x3, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("rotation contains non-finite entries")
    drift = np.max(np.abs(m.T @ m - np.eye(3)))
    if drift > tol:
        raise ValueError(f"matrix is not orthonormal (drift {drift:.3g} > {tol:.3g})")
    if np.linalg.det(m) < 0:
        raise ValueError("matrix has negative determinant (reflection, not rotation)")
    return m


def yaw_matrix(yaw_deg: float) -> np.ndarray:
    """Rotation about world up (+Y)."""
    c, s = _cos_sin(yaw_deg)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def pitch_matrix(pitch_deg: float) -> np.ndarray:
    """Rotation about camera right (+X); positive pitch tilts the view up."""
    c, s = _cos_sin(pitch_deg)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, s], [0.0, -s, c]])


def roll_matrix(roll_deg: float) -> np.ndarray:
    """Rotation about camera forward (+Z)."""
    c, s = _cos_sin(roll_deg)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _cos_sin(deg: float):
    rad = math.radians(deg)
    return math.cos(rad), math.sin(rad)


def euler_yxz_to_rotation(yaw_deg: float, pitch_deg: float, roll_deg: float) -> np.ndarray:
    """Compose intrinsic yaw -> pitch -> roll into a rotation matrix."""
    for name, a in (("yaw", yaw_deg), ("pitch", pitch_deg), ("roll", roll_deg)):
        if not math.isfinite(a):
            raise ValueError(f"{name} angle must be finite, got {a!r}")
    return yaw_matrix(yaw_deg) @ pitch_matrix(pitch_deg) @ roll_matrix(roll_deg)


def rotation_to_euler_yxz(r: np.ndarray) -> tuple[float, float, float]:
    """Decompose a rotation into (yaw, pitch, roll) degrees.

    Ranges: yaw in [0, 360), pitch in [-90, 90], roll in (-180, 180].
    At gimbal lock (|pitch| >= 89.9 deg) roll is reported as 0 and the
    residual in-plane spin is folded into yaw; this tie-break keeps the
    decomposition round-trip exact.
    """
    r = np.asarray(r, dtype=float)
    sp = float(np.clip(r[1, 2], -1.0, 1.0))
    pitch = math.degrees(math.asin(sp))
    if abs(pitch) >= GIMBAL_LOCK_PITCH_DEG:
        # r[0,0] = cos(yaw +/- roll), r[0,1] = -/+ sin(yaw +/- roll)
        if sp > 0:
            yaw = math.degrees(math.atan2(-r[0, 1], r[0, 0]))
        else:
            yaw = math.degrees(math.atan2(r[0, 1], r[0, 0]))
        roll = 0.0
    else:
        yaw = math.degrees(math.atan2(r[0, 2], r[2, 2]))
        roll = math.degrees(math.atan2(r[1, 0], r[1, 1]))
    yaw %= 360.0
    if roll <= -180.0:
        roll += 360.0
    return yaw, pitch, roll


def random_unit_vector(rng: np.random.Generator) -> np.ndarray:
    """Uniform direction on the unit sphere."""
    while True:
        v = rng.normal(size=3)
        n = np.linalg.norm(v)
        if n > 1e-12:
            return v / n


def axis_angle_exp(axis: np.ndarray, theta_deg: float) -> np.ndarray:
    """Rodrigues rotation of theta degrees about a unit axis."""
    axis = np.asarray(axis, dtype=float)
    n = np.linalg.norm(axis)
    if abs(n - 1.0) > 1e-6:
        raise ValueError(f"axis must be unit-norm, got |a| = {n:.8f}")
    theta = math.radians(theta_deg)
    kx, ky, kz = axis
    k_cross = np.array([[0.0, -kz, ky], [kz, 0.0, -kx], [-ky, kx, 0.0]])
    return np.eye(3) + math.sin(theta) * k_cross + (1.0 - math.cos(theta)) * (k_cross @ k_cross)


def axis_angle_exp_batch(axis: np.ndarray, thetas_deg: np.ndarray) -> np.ndarray:
    """Rodrigues rotations for many angles about one axis; returns (N, 3, 3)."""
    axis = np.asarray(axis, dtype=float)
    n = np.linalg.norm(axis)
    if abs(n - 1.0) > 1e-6:
        raise ValueError(f"axis must be unit-norm, got |a| = {n:.8f}")
    thetas = np.radians(np.asarray(thetas_deg, dtype=float))
    kx, ky, kz = axis
    k_cross = np.array([[0.0, -kz, ky], [kz, 0.0, -kx], [-ky, kx, 0.0]])
    k2 = k_cross @ k_cross
    s = np.sin(thetas)[:, None, None]
    c1 = (1.0 - np.cos(thetas))[:, None, None]
    return np.eye(3)[None] + s * k_cross[None] + c1 * k2[None]


def geodesic_angle(r1: np.ndarray, r2: np.ndarray) -> float:
    """Shortest rotation angle in degrees between two orientations."""
    tr = float(np.trace(np.asarray(r1).T @ np.asarray(r2)))
    cos_t = np.clip((tr - 1.0) / 2.0, -1.0, 1.0)
    return math.degrees(math.acos(cos_t))


def remove_yaw(r: np.ndarray) -> np.ndarray:
    """Drop the yaw component, keeping pitch and roll.

    The up direction expressed in the camera frame (r^T @ world_up) is
    unchanged by this operation, which is the property that makes it a
    gravity-preserving map.
    """
    _, pitch, roll = rotation_to_euler_yxz(r)
    return euler_yxz_to_rotation(0.0, pitch, roll)


def camera_up(r: np.ndarray) -> np.ndarray:
    """World up expressed in the camera frame."""
    return np.asarray(r, dtype=float).T @ WORLD_UP


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Uniform random rotation via a normalized random quaternion."""
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def orthonormalize(m: np.ndarray) -> np.ndarray:
    """Gram-Schmidt on columns; fixes small drift in stored rotations."""
    m = np.asarray(m, dtype=float)
    c0 = m[:, 0] / np.linalg.norm(m[:, 0])
    c1 = m[:, 1] - np.dot(c0, m[:, 1]) * c0
    c1 /= np.linalg.norm(c1)
    c2 = np.cross(c0, c1)
    return np.stack([c0, c1, c2], axis=1)
