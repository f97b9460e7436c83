"""Stochastic camera rotation paths, FoV curves, and companion trajectories.

Every sampler is a pure function of (parameters, seed); the RNG is the
counter-based Philox generator so distinct seeds can be drawn concurrently
with reproducible results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from . import geom

FOV_MIN_DEG = 35.0
FOV_MAX_DEG = 100.0
MAX_ROT_RATE_DEG = 720.0
BETA_A = 1.0
BETA_B = 5.0
SEGMENT_COUNT_CHOICES = (1, 2, 3, 4)
FOV_KEYFRAME_CHOICES = (1, 2, 3)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


@dataclass(frozen=True)
class RotationSegment:
    """One incremental rotation: axis, total sweep, timing and easing."""

    axis: np.ndarray
    theta_max_deg: float
    t_start: float
    t_end: float
    d_start: float  # easing derivative at t_start, in 1/normalized-time
    d_end: float

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start

    def easing(self, t: float | np.ndarray) -> np.ndarray:
        """Cubic Hermite ramp 0 -> 1 on [t_start, t_end], held outside."""
        t = np.asarray(t, dtype=float)
        u = np.clip((t - self.t_start) / self.duration, 0.0, 1.0)
        h01 = -2.0 * u**3 + 3.0 * u**2
        h10 = u**3 - 2.0 * u**2 + u
        h11 = u**3 - u**2
        return h01 + self.duration * (self.d_start * h10 + self.d_end * h11)

    def angles(self, times: np.ndarray) -> np.ndarray:
        """Per-frame sweep angle in degrees, clamped to [0, theta_max]."""
        return np.clip(self.easing(times), 0.0, 1.0) * self.theta_max_deg


@dataclass
class TrajectorySample:
    """A sampled clip trajectory plus the provenance needed to replay it."""

    frame_count: int
    rotations: np.ndarray  # (F, 3, 3)
    seed: int
    segments: list[RotationSegment] = field(default_factory=list)
    init_euler: tuple[float, float, float] | None = None  # (yaw, pitch, roll)
    fovs: np.ndarray | None = None  # (F,) horizontal FoV degrees
    null_pitch_rotations: np.ndarray | None = None  # (F, 3, 3)
    null_pitch_fov: float = 90.0


def _sample_segment(
    rng: np.random.Generator,
    beta_a: float = BETA_A,
    beta_b: float = BETA_B,
    max_rot_rate: float = MAX_ROT_RATE_DEG,
) -> RotationSegment:
    d_t = rng.uniform(0.0, 1.0)
    t_s = rng.uniform(0.0, 1.0 - d_t)
    axis = geom.random_unit_vector(rng)
    theta_max = rng.beta(beta_a, beta_b) * max_rot_rate * d_t
    # Boundary derivatives in [0, 2x] the mean slope of the 0->1 ramp give
    # the ease-in/ease-out family; the per-frame clamp guards overshoot.
    d0 = rng.uniform(0.0, 2.0 / d_t)
    d1 = rng.uniform(0.0, 2.0 / d_t)
    return RotationSegment(axis=axis, theta_max_deg=theta_max, t_start=t_s, t_end=t_s + d_t, d_start=d0, d_end=d1)


def rotations_from_segments(
    init_rotation: np.ndarray, segments: list[RotationSegment], frame_count: int
) -> np.ndarray:
    """Compose per-frame rotations R_f = R_init * prod_i exp(theta_i(f) a_i).

    Segments are applied in list order, each in the camera's current frame.
    """
    times = np.arange(frame_count, dtype=float) / frame_count
    rotations = np.broadcast_to(init_rotation, (frame_count, 3, 3)).copy()
    for seg in segments:
        incr = geom.axis_angle_exp_batch(seg.axis, seg.angles(times))
        rotations = rotations @ incr
    return rotations


def sample_rotation_trajectory(
    frame_count: int,
    seed: int,
    *,
    beta_a: float = BETA_A,
    beta_b: float = BETA_B,
    max_rot_rate: float = MAX_ROT_RATE_DEG,
    segment_choices: tuple[int, ...] = SEGMENT_COUNT_CHOICES,
) -> TrajectorySample:
    """Draw a random rotation path over the sphere.

    The initial orientation is uniform in pitch/roll on (-90, 90) and yaw
    on [0, 360); 1-4 incremental rotations with random axes, timings and
    Beta(1, 5)-distributed sweeps (bounded by 720 deg/unit-time) are then
    eased in sequentially.
    """
    if frame_count < 1:
        raise ValueError(f"frame_count must be >= 1, got {frame_count}")
    rng = make_rng(seed)
    pitch0 = rng.uniform(-90.0, 90.0)
    roll0 = rng.uniform(-90.0, 90.0)
    yaw0 = rng.uniform(0.0, 360.0)
    init = geom.euler_yxz_to_rotation(yaw0, pitch0, roll0)
    n_segments = int(rng.choice(segment_choices))
    segments = [_sample_segment(rng, beta_a, beta_b, max_rot_rate) for _ in range(n_segments)]
    rotations = rotations_from_segments(init, segments, frame_count)
    return TrajectorySample(
        frame_count=frame_count,
        rotations=rotations,
        seed=seed,
        segments=segments,
        init_euler=(yaw0, pitch0, roll0),
    )


def _keyframe_curve(
    rng: np.random.Generator,
    frame_count: int,
    n_keys: int,
    low: float,
    high: float,
    *,
    values: np.ndarray | None = None,
    clamp: bool = True,
) -> np.ndarray:
    """Cubic-spline curve through n_keys random keyframes, evaluated at f/F."""
    while True:
        times = np.sort(rng.uniform(0.0, 1.0, size=n_keys))
        if n_keys == 1 or np.all(np.diff(times) > 1e-9):
            break
    if values is None:
        values = rng.uniform(low, high, size=n_keys)
    d0, d1 = rng.uniform(-(high - low), high - low, size=2)
    frame_times = np.arange(frame_count, dtype=float) / frame_count
    if n_keys == 1:
        curve = np.full(frame_count, values[0])
    else:
        spline = CubicSpline(times, values, bc_type=((1, d0), (1, d1)), extrapolate=True)
        curve = spline(frame_times)
    if clamp:
        curve = np.clip(curve, low, high)
    return curve


def sample_fov_trajectory(
    frame_count: int,
    seed: int,
    *,
    fov_min: float = FOV_MIN_DEG,
    fov_max: float = FOV_MAX_DEG,
    key_choices: tuple[int, ...] = FOV_KEYFRAME_CHOICES,
) -> np.ndarray:
    """Per-frame horizontal FoV in degrees from 1-3 spline keyframes in [35, 100]."""
    if frame_count < 1:
        raise ValueError(f"frame_count must be >= 1, got {frame_count}")
    rng = make_rng(seed)
    n_keys = int(rng.choice(key_choices))
    return _keyframe_curve(rng, frame_count, n_keys, fov_min, fov_max)


def null_pitch_companion(rotations: np.ndarray) -> np.ndarray:
    """Companion trajectory with pitch and roll zeroed, yaw kept.

    Near gimbal lock (|pitch| > 89.9 deg) yaw is ill-defined, so the
    previous frame's yaw is held; a locked frame 0 uses yaw = 0.
    """
    rotations = np.asarray(rotations, dtype=float)
    out = np.empty_like(rotations)
    prev_yaw = 0.0
    for f in range(rotations.shape[0]):
        yaw, pitch, _ = geom.rotation_to_euler_yxz(rotations[f])
        if abs(pitch) > geom.GIMBAL_LOCK_PITCH_DEG:
            yaw = prev_yaw
        out[f] = geom.yaw_matrix(yaw)
        prev_yaw = yaw
    return out


def sample_eval_rotation_trajectory(frame_count: int, seed: int, roll_limit_deg: float) -> np.ndarray:
    """Random rotation path for benchmark evaluation.

    Pitch, roll and yaw are sampled as independent 2-3 keyframe spline
    curves: pitch in [-85, 85], roll in [-roll_limit, roll_limit], yaw in
    [0, 360) interpolated along the shortest arc.
    """
    if frame_count < 1:
        raise ValueError(f"frame_count must be >= 1, got {frame_count}")
    if not 0.0 <= roll_limit_deg <= 90.0:
        raise ValueError(f"roll_limit must be in [0, 90], got {roll_limit_deg}")
    rng = make_rng(seed)
    n_pitch = int(rng.choice((2, 3)))
    pitch = _keyframe_curve(rng, frame_count, n_pitch, -85.0, 85.0)
    n_roll = int(rng.choice((2, 3)))
    roll = _keyframe_curve(rng, frame_count, n_roll, -roll_limit_deg, roll_limit_deg)
    n_yaw = int(rng.choice((2, 3)))
    yaw_keys = rng.uniform(0.0, 360.0, size=n_yaw)
    # Unwrap so consecutive keyframes differ by at most 180 deg.
    for i in range(1, n_yaw):
        delta = (yaw_keys[i] - yaw_keys[i - 1] + 180.0) % 360.0 - 180.0
        yaw_keys[i] = yaw_keys[i - 1] + delta
    yaw = _keyframe_curve(rng, frame_count, n_yaw, 0.0, 360.0, values=yaw_keys, clamp=False) % 360.0

    out = np.empty((frame_count, 3, 3))
    for f in range(frame_count):
        out[f] = geom.euler_yxz_to_rotation(yaw[f], pitch[f], roll[f])
    return out


def sample_roll_curve(frame_count: int, seed: int, limit_deg: float = 40.0) -> np.ndarray:
    """1-D roll trajectory in [-limit, limit] for benchmark roll augmentation."""
    if frame_count < 1:
        raise ValueError(f"frame_count must be >= 1, got {frame_count}")
    rng = make_rng(seed)
    n_keys = int(rng.choice((2, 3)))
    return _keyframe_curve(rng, frame_count, n_keys, -limit_deg, limit_deg)
