"""Waypoint-to-profile kinematics: closed forms, symmetries, resampling, CSV."""

import csv

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ridecomfort.errors import (
    DegenerateSegmentError,
    DimensionError,
    DomainError,
    ResolutionError,
    ValidationError,
)
from ridecomfort.kinematics import (
    MotionProfile,
    profile_from_csv,
    profile_from_waypoints,
    profile_to_csv,
    resample_uniform,
    segment_kinematics,
)


def straight_profile(length=100.0, n=11, speed=10.0):
    points = np.column_stack([np.linspace(0.0, length, n), np.zeros(n)])
    return profile_from_waypoints(points, np.full(n, speed))


@st.composite
def random_polyline(draw, n_min=3, n_max=12):
    """Forward-marching waypoints with bounded lateral wiggle and speeds."""
    n = draw(st.integers(n_min, n_max))
    seed = draw(st.integers(0, 2 ** 31 - 1))
    rng = np.random.default_rng(seed)
    dx = rng.uniform(2.0, 12.0, n - 1)
    y = rng.uniform(-3.0, 3.0, n)
    points = np.column_stack([np.concatenate([[0.0], np.cumsum(dx)]), y])
    speeds = rng.uniform(2.0, 15.0, n)
    return points, speeds


def test_uniform_straight_motion():
    profile = straight_profile()
    assert profile.total_time == pytest.approx(10.0, abs=1e-12)
    np.testing.assert_allclose(profile.ax, 0.0, atol=1e-14)
    np.testing.assert_allclose(profile.ay, 0.0, atol=1e-14)


def test_single_segment_closed_form():
    # 20 m with a 10 -> 14 m/s ramp: dt = 40/24 s, ax = (196-100)/40
    points = np.array([[0.0, 0.0], [20.0, 0.0]])
    profile = profile_from_waypoints(points, np.array([10.0, 14.0]))
    assert profile.segment_time_steps[0] == pytest.approx(40.0 / 24.0, rel=1e-12)
    assert profile.ax[0] == pytest.approx(2.4, rel=1e-12)
    assert profile.ay[0] == 0.0


def arc_lateral_error(n_stations):
    radius, speed = 15.0, 7.0
    theta = np.linspace(0.0, np.pi, n_stations)
    points = radius * np.column_stack([np.cos(theta), np.sin(theta)])
    profile = profile_from_waypoints(points, np.full(n_stations, speed))
    interior = np.abs(profile.ay[:-1])
    return float(np.max(np.abs(interior - speed ** 2 / radius))) / (speed ** 2 / radius)


def test_arc_lateral_accel_converges_quadratically():
    errs = [arc_lateral_error(n) for n in (25, 50, 100)]
    assert errs[-1] < 1e-3
    # halving spacing should cut the error by about four
    assert errs[1] < errs[0] / 3.0
    assert errs[2] < errs[1] / 3.0


@settings(max_examples=60, deadline=None)
@given(random_polyline())
def test_velocity_and_distance_consistency(data):
    points, speeds = data
    seg = segment_kinematics(points, speeds)
    dv = float(np.sum(seg.ax * seg.dt))
    assert dv == pytest.approx(speeds[-1] - speeds[0], rel=1e-9, abs=1e-9)
    arc = float(np.sum(seg.mean_v * seg.dt))
    assert arc == pytest.approx(float(np.sum(seg.d)), rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(random_polyline())
def test_mirror_symmetry(data):
    points, speeds = data
    seg = segment_kinematics(points, speeds)
    mirrored = points * np.array([1.0, -1.0])
    seg_m = segment_kinematics(mirrored, speeds)
    np.testing.assert_array_equal(seg_m.ay, -seg.ay)
    np.testing.assert_array_equal(seg_m.ax, seg.ax)
    np.testing.assert_array_equal(seg_m.dt, seg.dt)


@settings(max_examples=60, deadline=None)
@given(random_polyline())
def test_reversal_preserves_longitudinal_magnitudes(data):
    points, speeds = data
    fwd = segment_kinematics(points, speeds)
    rev = segment_kinematics(points[::-1], speeds[::-1])
    np.testing.assert_allclose(np.sort(np.abs(rev.ax)),
                               np.sort(np.abs(fwd.ax)), rtol=1e-9)
    np.testing.assert_allclose(np.sort(rev.dt), np.sort(fwd.dt), rtol=1e-12)


def test_rejects_nonpositive_speed():
    points = np.array([[0.0, 0.0], [10.0, 0.0], [20.0, 0.0]])
    with pytest.raises(DomainError, match="waypoint 1"):
        segment_kinematics(points, np.array([5.0, 0.0, 5.0]))


def test_rejects_coincident_waypoints():
    points = np.array([[0.0, 0.0], [10.0, 0.0], [10.0, 0.0]])
    with pytest.raises(DegenerateSegmentError, match="1 and 2"):
        segment_kinematics(points, np.full(3, 5.0))


def test_rejects_length_mismatch():
    points = np.array([[0.0, 0.0], [10.0, 0.0]])
    with pytest.raises(DimensionError):
        segment_kinematics(points, np.full(3, 5.0))


def test_profile_checks_total_time():
    with pytest.raises(ValidationError, match="total_time"):
        MotionProfile(
            points=np.array([[0.0, 0.0], [10.0, 0.0]]),
            speeds=np.array([5.0, 5.0]),
            segment_time_steps=np.array([2.0]),
            ax=np.zeros(1), ay=np.zeros(1), total_time=3.0,
        )


def test_constant_acceleration_resamples_constant():
    # v^2 linear in distance gives the same ax on every segment
    a = 0.8
    s = np.linspace(0.0, 120.0, 13)
    v = np.sqrt(6.0 ** 2 + 2.0 * a * s)
    profile = profile_from_waypoints(np.column_stack([s, np.zeros_like(s)]), v)
    np.testing.assert_allclose(profile.ax, a, rtol=1e-12)
    res = resample_uniform(profile, 20.0)
    np.testing.assert_allclose(res.ax, a, rtol=1e-12)
    np.testing.assert_allclose(res.ay, 0.0, atol=1e-14)


def test_resample_grid_arithmetic():
    profile = straight_profile()            # exactly 10 s
    res = resample_uniform(profile, 10.0)
    assert res.t.shape[0] == 101
    assert res.t[0] == 0.0
    assert res.t[-1] == pytest.approx(10.0)


def test_resampled_ramp_integrates_to_speed_change():
    # triangular ax profile: speed up then settle back
    s = np.linspace(0.0, 200.0, 41)
    v = 8.0 + 3.0 * np.sin(np.pi * s / 200.0)
    profile = profile_from_waypoints(np.column_stack([s, np.zeros_like(s)]), v)
    res = resample_uniform(profile, 50.0)
    dv = float(np.trapezoid(res.ax, res.t))
    assert dv == pytest.approx(v[-1] - v[0], abs=0.01 * np.max(np.abs(v)))


def test_resample_too_coarse():
    profile = straight_profile()
    with pytest.raises(ResolutionError):
        resample_uniform(profile, 0.5)


def test_csv_round_trip(tmp_path, rng):
    n = 9
    points = np.column_stack([np.cumsum(rng.uniform(3.0, 9.0, n)),
                              rng.uniform(-2.0, 2.0, n)])
    profile = profile_from_waypoints(points, rng.uniform(3.0, 12.0, n))
    path = tmp_path / "profile.csv"
    profile_to_csv(profile, path)
    again = profile_from_csv(path)
    np.testing.assert_allclose(again.points, profile.points, rtol=1e-8)
    np.testing.assert_allclose(again.speeds, profile.speeds, rtol=1e-8)
    np.testing.assert_allclose(again.ax, profile.ax, rtol=1e-7, atol=1e-8)
    np.testing.assert_allclose(again.ay, profile.ay, rtol=1e-7, atol=1e-8)
    assert again.total_time == pytest.approx(profile.total_time, rel=1e-8)


def test_csv_final_row_zero_padded(tmp_path):
    profile = straight_profile(n=4)
    path = tmp_path / "profile.csv"
    profile_to_csv(profile, path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "x", "y", "v", "ax", "ay"]
    assert len(rows) == 5
    assert rows[-1][4] == "0" and rows[-1][5] == "0"


def test_csv_time_offset_normalized(tmp_path):
    profile = straight_profile(n=5)
    path = tmp_path / "profile.csv"
    profile_to_csv(profile, path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    for row in rows[1:]:
        row[0] = format(float(row[0]) + 500.0, ".9g")
    shifted = tmp_path / "shifted.csv"
    with open(shifted, "w", newline="") as fh:
        csv.writer(fh).writerows(rows)
    a, b = profile_from_csv(path), profile_from_csv(shifted)
    np.testing.assert_allclose(b.waypoint_times, a.waypoint_times, atol=1e-6)
    np.testing.assert_array_equal(b.points, a.points)


def test_csv_rejects_decreasing_time(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("t,x,y,v,ax,ay\n0,0,0,5,0,0\n2,10,0,5,0,0\n1,20,0,5,0,0\n")
    with pytest.raises(ValidationError, match="increasing"):
        profile_from_csv(path)
