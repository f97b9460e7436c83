import csv

import numpy as np
import pytest

from gravicam import geom, metrics, pose


def _pose(yaw=0, pitch=0, roll=0, t=(0, 0, 0), fov=90.0):
    return pose.CameraPose(geom.euler_yxz_to_rotation(yaw, pitch, roll), np.asarray(t, dtype=float), fov)


def _random_traj(rng, n=6, move=True):
    return [
        pose.CameraPose(geom.random_rotation(rng), rng.normal(size=3) if move else np.zeros(3))
        for _ in range(n)
    ]


class TestPitchError:
    def test_zero_on_identical(self, rng):
        traj = _random_traj(rng)
        assert metrics.pitch_error(traj, traj) == pytest.approx(0.0, abs=1e-9)

    def test_known_offset(self):
        ref = [_pose(pitch=10), _pose(pitch=-20)]
        est = [_pose(pitch=25), _pose(pitch=-15)]
        assert metrics.pitch_error(ref, est) == pytest.approx((15 + 5) / 2, abs=1e-9)

    def test_ignores_yaw_and_roll(self, rng):
        ref = [_pose(yaw=10, pitch=30, roll=5)]
        est = [_pose(yaw=200, pitch=30, roll=-40)]
        assert metrics.pitch_error(ref, est) == pytest.approx(0.0, abs=1e-9)

    def test_symmetric(self, rng):
        a, b = _random_traj(rng), _random_traj(rng)
        assert metrics.pitch_error(a, b) == pytest.approx(metrics.pitch_error(b, a), abs=1e-12)

    def test_matches_inline_loop(self, rng):
        a, b = _random_traj(rng, 10), _random_traj(rng, 10)
        expected = np.mean(
            [
                abs(geom.rotation_to_euler_yxz(x.rotation)[1] - geom.rotation_to_euler_yxz(y.rotation)[1])
                for x, y in zip(a, b)
            ]
        )
        assert metrics.pitch_error(a, b) == pytest.approx(expected, abs=1e-12)


class TestGravityError:
    def test_zero_on_identical(self, rng):
        traj = _random_traj(rng)
        assert metrics.gravity_error(traj, traj) == pytest.approx(0.0, abs=1e-6)

    def test_invariant_to_yaw(self):
        ref = [_pose(yaw=0, pitch=20, roll=10)]
        est = [_pose(yaw=137, pitch=20, roll=10)]
        assert metrics.gravity_error(ref, est) == pytest.approx(0.0, abs=1e-9)

    def test_pure_pitch_offset(self):
        ref = [_pose(pitch=0)]
        est = [_pose(pitch=30)]
        assert metrics.gravity_error(ref, est) == pytest.approx(30.0, abs=1e-9)

    def test_pure_roll_offset(self):
        ref = [_pose(roll=0)]
        est = [_pose(roll=-25)]
        assert metrics.gravity_error(ref, est) == pytest.approx(25.0, abs=1e-9)

    def test_symmetric(self, rng):
        a, b = _random_traj(rng), _random_traj(rng)
        assert metrics.gravity_error(a, b) == pytest.approx(metrics.gravity_error(b, a), abs=1e-12)


class TestRelativeRotationError:
    def test_zero_on_identical(self, rng):
        traj = _random_traj(rng)
        assert metrics.relative_rotation_error(traj, traj) == pytest.approx(0.0, abs=1e-6)

    def test_invariant_to_global_rotation(self, rng):
        ref = _random_traj(rng, 5)
        q = geom.random_rotation(rng)
        est = [pose.CameraPose(q @ p.rotation, p.translation) for p in ref]
        # acos near 1 amplifies float eps to ~1e-6 degrees
        assert metrics.relative_rotation_error(ref, est) == pytest.approx(0.0, abs=1e-5)

    def test_known_value(self, rng):
        a = geom.random_unit_vector(rng)
        ref = [_pose(), _pose()]
        est = [
            pose.CameraPose(np.eye(3), np.zeros(3)),
            pose.CameraPose(geom.axis_angle_exp(a, 12.0), np.zeros(3)),
        ]
        # frame 0 relative rotations agree; frame 1 differs by 12 degrees
        assert metrics.relative_rotation_error(ref, est) == pytest.approx(6.0, abs=1e-6)

    def test_symmetric(self, rng):
        a, b = _random_traj(rng), _random_traj(rng)
        assert metrics.relative_rotation_error(a, b) == pytest.approx(
            metrics.relative_rotation_error(b, a), abs=1e-9
        )


class TestTranslationError:
    def test_zero_on_identical(self, rng):
        traj = _random_traj(rng)
        assert metrics.translation_error(traj, traj) == pytest.approx(0.0, abs=1e-12)

    def test_invariant_to_offset_and_scale(self, rng):
        ref = _random_traj(rng, 5)
        offset = rng.normal(size=3)
        est = [pose.CameraPose(p.rotation, 3.7 * p.translation + offset) for p in ref]
        assert metrics.translation_error(ref, est) == pytest.approx(0.0, abs=1e-9)

    def test_static_pair_is_zero(self):
        ref = [_pose(t=(1, 2, 3))] * 4
        est = [_pose(t=(-5, 0, 9))] * 4
        assert metrics.translation_error(ref, est) == pytest.approx(0.0, abs=1e-12)

    def test_static_vs_moving(self):
        ref = [_pose(t=(0, 0, 0)), _pose(t=(2, 0, 0))]
        est = [_pose(t=(7, 7, 7))] * 2
        # normalized ref positions are (0,0,0), (1,0,0); est stays at origin
        assert metrics.translation_error(ref, est) == pytest.approx(0.5, abs=1e-12)

    def test_symmetric(self, rng):
        a, b = _random_traj(rng), _random_traj(rng)
        assert metrics.translation_error(a, b) == pytest.approx(metrics.translation_error(b, a), abs=1e-12)


class TestAxioms:
    def test_length_mismatch(self, rng):
        with pytest.raises(ValueError):
            metrics.evaluate_pair(_random_traj(rng, 3), _random_traj(rng, 4))

    def test_empty(self):
        with pytest.raises(ValueError):
            metrics.evaluate_pair([], [])

    def test_all_metrics_nonnegative_and_self_zero(self, rng):
        for _ in range(25):
            a, b = _random_traj(rng, 4), _random_traj(rng, 4)
            vals = metrics.evaluate_pair(a, b)
            assert all(v >= 0.0 for v in vals.values())
            self_vals = metrics.evaluate_pair(a, a)
            assert all(v < 1e-5 for v in self_vals.values())


class TestTrajectoryStats:
    def test_total_angular_distance(self, rng):
        a = geom.random_unit_vector(rng)
        poses = [pose.CameraPose(geom.axis_angle_exp(a, ang), np.zeros(3)) for ang in (0, 10, 25, 25)]
        stats = metrics.trajectory_stats(poses)
        assert stats.total_angular_distance == pytest.approx(25.0, abs=1e-6)

    def test_histogram_shapes_and_counts(self, rng):
        poses = _random_traj(rng, 30)
        stats = metrics.trajectory_stats(poses, bin_width_deg=10.0)
        assert stats.pitch_hist.shape == (18,)
        assert stats.roll_hist.shape == (36,)
        assert stats.yaw_hist.shape == (36,)
        assert stats.pitch_hist.sum() == 30
        assert stats.roll_hist.sum() == 30
        assert stats.yaw_hist.sum() == 30

    def test_known_bins(self):
        poses = [_pose(yaw=5, pitch=-88, roll=179)]
        stats = metrics.trajectory_stats(poses, bin_width_deg=10.0)
        assert stats.pitch_hist[0] == 1  # [-90, -80)
        assert stats.yaw_hist[0] == 1  # [0, 10)
        assert stats.roll_hist[-1] == 1  # [170, 180]

    def test_validation(self):
        with pytest.raises(ValueError):
            metrics.trajectory_stats([])
        with pytest.raises(ValueError):
            metrics.trajectory_stats([_pose()], bin_width_deg=0)


class TestReport:
    def test_rows_and_mean(self, rng, tmp_path):
        rows = []
        for clip in ("a", "b"):
            vals = metrics.evaluate_pair(_random_traj(rng, 4), _random_traj(rng, 4))
            rows.append({"clip_id": clip, **vals})
        path = tmp_path / "report.csv"
        metrics.write_report(rows, path)
        with open(path) as f:
            read = list(csv.DictReader(f))
        assert [r["clip_id"] for r in read] == ["a", "b", "mean"]
        for col in metrics.REPORT_COLUMNS[1:]:
            expected = (float(rows[0][col]) + float(rows[1][col])) / 2
            assert float(read[2][col]) == pytest.approx(expected, rel=1e-9)
