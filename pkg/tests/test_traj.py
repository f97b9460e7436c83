import numpy as np
import pytest
from scipy import stats

from gravicam import geom, traj


class TestSegmentEasing:
    def test_linear_when_derivatives_match_mean_slope(self):
        seg = traj.RotationSegment(
            axis=np.array([0.0, 1.0, 0.0]),
            theta_max_deg=100.0,
            t_start=0.2,
            t_end=0.7,
            d_start=2.0,  # 1 / duration
            d_end=2.0,
        )
        t = np.linspace(0.2, 0.7, 11)
        expected = (t - 0.2) / 0.5 * 100.0
        assert np.allclose(seg.angles(t), expected, atol=1e-12)

    def test_held_outside_active_window(self):
        seg = traj.RotationSegment(
            axis=np.array([0.0, 1.0, 0.0]),
            theta_max_deg=55.0,
            t_start=0.3,
            t_end=0.6,
            d_start=0.5,
            d_end=1.7,
        )
        assert seg.angles(np.array([0.0, 0.29])) == pytest.approx([0.0, 0.0])
        assert seg.angles(np.array([0.61, 1.0])) == pytest.approx([55.0, 55.0])

    def test_endpoint_values(self):
        seg = traj.RotationSegment(
            axis=np.array([1.0, 0.0, 0.0]),
            theta_max_deg=80.0,
            t_start=0.1,
            t_end=0.9,
            d_start=0.3,
            d_end=2.1,
        )
        assert seg.easing(0.1) == pytest.approx(0.0, abs=1e-12)
        assert seg.easing(0.9) == pytest.approx(1.0, abs=1e-12)

    def test_angles_never_overshoot(self):
        seg = traj.RotationSegment(
            axis=np.array([1.0, 0.0, 0.0]),
            theta_max_deg=90.0,
            t_start=0.0,
            t_end=1.0,
            d_start=10.0,  # would overshoot 1.0 mid-window without the clamp
            d_end=10.0,
        )
        a = seg.angles(np.linspace(0, 1, 101))
        assert np.all(a >= 0.0)
        assert np.all(a <= 90.0 + 1e-12)


class TestRotationSampling:
    def test_deterministic(self):
        a = traj.sample_rotation_trajectory(49, seed=7)
        b = traj.sample_rotation_trajectory(49, seed=7)
        assert a.rotations.tobytes() == b.rotations.tobytes()
        assert a.init_euler == b.init_euler

    def test_distinct_seeds_differ(self):
        a = traj.sample_rotation_trajectory(16, seed=1)
        b = traj.sample_rotation_trajectory(16, seed=2)
        assert not np.allclose(a.rotations, b.rotations)

    def test_all_frames_are_rotations(self):
        sample = traj.sample_rotation_trajectory(30, seed=3)
        for r in sample.rotations:
            geom.check_rotation(r)

    def test_frame_zero_is_initial_orientation(self):
        sample = traj.sample_rotation_trajectory(10, seed=11)
        yaw0, pitch0, roll0 = sample.init_euler
        init = geom.euler_yxz_to_rotation(yaw0, pitch0, roll0)
        # every segment starts at or after t=0 with easing 0 at its start,
        # except segments with t_start == 0; those still ease from 0
        assert geom.geodesic_angle(sample.rotations[0], init) < 1e-6

    def test_segment_structure(self):
        for seed in range(40):
            sample = traj.sample_rotation_trajectory(8, seed=seed)
            assert 1 <= len(sample.segments) <= 4
            for seg in sample.segments:
                assert 0.0 <= seg.t_start <= seg.t_end <= 1.0
                assert np.linalg.norm(seg.axis) == pytest.approx(1.0, abs=1e-9)
                assert 0.0 <= seg.theta_max_deg <= 720.0 * seg.duration + 1e-9
                assert seg.d_start >= 0.0 and seg.d_end >= 0.0

    def test_initial_orientation_distribution(self):
        pitches = np.empty(3000)
        rolls = np.empty(3000)
        yaws = np.empty(3000)
        for seed in range(3000):
            sample = traj.sample_rotation_trajectory(1, seed=seed)
            yaws[seed], pitches[seed], rolls[seed] = sample.init_euler
        # pitch is uniform in angle ...
        assert stats.kstest(pitches, stats.uniform(-90, 180).cdf).pvalue > 0.01
        assert stats.kstest(rolls, stats.uniform(-90, 180).cdf).pvalue > 0.01
        assert stats.kstest(yaws, stats.uniform(0, 360).cdf).pvalue > 0.01
        # ... and decisively not area-uniform on the sphere
        area_cdf = lambda p: (1.0 + np.sin(np.radians(p))) / 2.0  # noqa: E731
        assert stats.kstest(pitches, area_cdf).pvalue < 1e-6

    def test_sweep_magnitude_distribution(self):
        # theta_max / (720 * duration) should look Beta(1, 5)
        ratios = []
        for seed in range(1500):
            for seg in traj.sample_rotation_trajectory(1, seed=seed).segments:
                if seg.duration > 1e-9:
                    ratios.append(seg.theta_max_deg / (720.0 * seg.duration))
        assert stats.kstest(np.array(ratios), stats.beta(1, 5).cdf).pvalue > 0.01

    def test_composition_matches_manual_product(self):
        sample = traj.sample_rotation_trajectory(12, seed=5)
        init = geom.euler_yxz_to_rotation(*sample.init_euler)
        times = np.arange(12, dtype=float) / 12
        for f in (0, 3, 11):
            expected = init.copy()
            for seg in sample.segments:
                expected = expected @ geom.axis_angle_exp(seg.axis, float(seg.angles(times[f : f + 1])[0]))
            assert geom.geodesic_angle(expected, sample.rotations[f]) < 1e-9

    def test_rejects_bad_frame_count(self):
        with pytest.raises(ValueError):
            traj.sample_rotation_trajectory(0, seed=1)


class TestFovSampling:
    def test_deterministic_and_bounded(self):
        for seed in range(50):
            fovs = traj.sample_fov_trajectory(25, seed=seed)
            assert fovs.shape == (25,)
            assert np.all(fovs >= traj.FOV_MIN_DEG - 1e-9)
            assert np.all(fovs <= traj.FOV_MAX_DEG + 1e-9)
        a = traj.sample_fov_trajectory(25, seed=9)
        b = traj.sample_fov_trajectory(25, seed=9)
        assert a.tobytes() == b.tobytes()

    def test_single_keyframe_is_constant(self):
        # forcing one keyframe must yield a constant curve
        fovs = traj.sample_fov_trajectory(20, seed=4, key_choices=(1,))
        assert np.ptp(fovs) == 0.0
        assert traj.FOV_MIN_DEG <= fovs[0] <= traj.FOV_MAX_DEG

    def test_is_smooth(self):
        # spline curves have no frame-to-frame jumps beyond the spline's
        # derivative bound; just sanity-check continuity
        fovs = traj.sample_fov_trajectory(200, seed=13, key_choices=(3,))
        assert np.max(np.abs(np.diff(fovs))) < 10.0


class TestKeyframeCurve:
    def test_hermite_midpoint(self):
        class StubRng:
            def __init__(self):
                self.uniform_calls = 0

            def uniform(self, low, high, size=None):
                self.uniform_calls += 1
                if self.uniform_calls == 1:
                    return np.array([0.0, 1.0])  # keyframe times
                return np.array([0.0, 0.0])  # boundary derivatives

        curve = traj._keyframe_curve(StubRng(), 2, 2, 0.0, 100.0, values=np.array([40.0, 80.0]))
        # with zero end derivatives the cubic through (0,40),(1,80) passes 60 at t=0.5
        assert curve[1] == pytest.approx(60.0, abs=1e-9)


class TestNullPitchCompanion:
    def test_keeps_yaw_drops_pitch_and_roll(self):
        rots = np.stack(
            [
                geom.euler_yxz_to_rotation(30, 20, 10),
                geom.euler_yxz_to_rotation(300, -75, 120),
            ]
        )
        out = traj.null_pitch_companion(rots)
        assert geom.rotation_to_euler_yxz(out[0]) == pytest.approx((30.0, 0.0, 0.0), abs=1e-9)
        assert geom.rotation_to_euler_yxz(out[1]) == pytest.approx((300.0, 0.0, 0.0), abs=1e-9)

    def test_gimbal_lock_holds_previous_yaw(self):
        rots = np.stack(
            [
                geom.euler_yxz_to_rotation(50, 10, 0),
                geom.euler_yxz_to_rotation(120, 90, 0),
            ]
        )
        out = traj.null_pitch_companion(rots)
        assert geom.rotation_to_euler_yxz(out[1])[0] == pytest.approx(50.0, abs=1e-9)

    def test_locked_first_frame_uses_zero_yaw(self):
        rots = geom.euler_yxz_to_rotation(77, 90, 0)[None]
        out = traj.null_pitch_companion(rots)
        assert np.allclose(out[0], np.eye(3), atol=1e-12)

    def test_output_is_pure_yaw(self):
        sample = traj.sample_rotation_trajectory(20, seed=21)
        out = traj.null_pitch_companion(sample.rotations)
        for r in out:
            _, pitch, roll = geom.rotation_to_euler_yxz(r)
            assert abs(pitch) < 1e-9 and abs(roll) < 1e-9
            assert np.allclose(geom.camera_up(r), [0, 1, 0], atol=1e-12)


class TestEvalSampling:
    def test_bounds_and_determinism(self):
        a = traj.sample_eval_rotation_trajectory(40, seed=2, roll_limit_deg=40)
        b = traj.sample_eval_rotation_trajectory(40, seed=2, roll_limit_deg=40)
        assert a.tobytes() == b.tobytes()
        for r in a:
            _, pitch, roll = geom.rotation_to_euler_yxz(r)
            assert -85.0 - 1e-9 <= pitch <= 85.0 + 1e-9
            assert abs(roll) <= 40.0 + 1e-9

    def test_zero_roll_limit_gives_exactly_zero_roll(self):
        rots = traj.sample_eval_rotation_trajectory(30, seed=8, roll_limit_deg=0)
        for r in rots:
            assert abs(geom.rotation_to_euler_yxz(r)[2]) < 1e-12

    def test_rejects_bad_limit(self):
        with pytest.raises(ValueError):
            traj.sample_eval_rotation_trajectory(10, seed=1, roll_limit_deg=91)


class TestRollCurve:
    def test_bounds_and_determinism(self):
        a = traj.sample_roll_curve(49, seed=31)
        assert a.shape == (49,)
        assert np.all(np.abs(a) <= 40.0 + 1e-9)
        assert a.tobytes() == traj.sample_roll_curve(49, seed=31).tobytes()

    def test_custom_limit(self):
        a = traj.sample_roll_curve(49, seed=31, limit_deg=5.0)
        assert np.all(np.abs(a) <= 5.0 + 1e-9)
