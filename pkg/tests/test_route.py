"""Corridor model: JSON loading, validation, and plan-to-waypoint mapping."""

import json
import math

import numpy as np
import pytest

from ridecomfort.errors import DimensionError, RouteFormatError, ValidationError
from ridecomfort.route import (
    MotionPlan,
    RouteCorridor,
    Station,
    check_plan_bounds,
    clamp_plan,
    lateral_axes_from_centers,
    load_route,
    route_from_dict,
    route_to_dict,
    save_route,
    waypoints_to_cartesian,
)
from ridecomfort.synthetic import arc_route


def straight_station(x, angle=0.5 * math.pi, y_half=1.5, v_lo=1.0, v_hi=16.7):
    return {"x": x, "y": 0.0, "lateral_axis_angle": angle,
            "y_min": -y_half, "y_max": y_half, "v_min": v_lo, "v_max": v_hi}


def straight_dict(n=3, spacing=10.0):
    return {"name": "straight",
            "stations": [straight_station(k * spacing) for k in range(n)]}


def test_minimal_straight_route_loads(tmp_path):
    path = tmp_path / "route.json"
    path.write_text(json.dumps(straight_dict(3)))
    corridor = load_route(path)
    assert len(corridor) == 3
    assert corridor.name == "straight"
    np.testing.assert_allclose(corridor.centers[:, 0], [0.0, 10.0, 20.0])


def test_bad_lateral_bounds_cite_station_index():
    raw = straight_dict(7)
    raw["stations"][5]["y_min"] = 0.5
    raw["stations"][5]["y_max"] = -0.5
    with pytest.raises(ValidationError, match="station 5"):
        route_from_dict(raw)


def test_bad_speed_bounds_cite_station_index():
    raw = straight_dict(4)
    raw["stations"][2]["v_min"] = 9.0
    raw["stations"][2]["v_max"] = 3.0
    with pytest.raises(ValidationError, match="station 2"):
        route_from_dict(raw)


def test_missing_station_field_named():
    raw = straight_dict(3)
    del raw["stations"][1]["v_max"]
    with pytest.raises(RouteFormatError, match="v_max"):
        route_from_dict(raw)


def test_missing_stations_key():
    with pytest.raises(RouteFormatError, match="stations"):
        route_from_dict({"name": "empty"})


def test_non_numeric_field_rejected():
    raw = straight_dict(3)
    raw["stations"][0]["y_min"] = "wide"
    with pytest.raises(RouteFormatError, match="y_min"):
        route_from_dict(raw)


def test_invalid_json_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(RouteFormatError, match="JSON"):
        load_route(path)


def test_too_few_stations():
    with pytest.raises(ValidationError, match="at least 3"):
        route_from_dict(straight_dict(2))


def test_coincident_stations_rejected():
    raw = straight_dict(4)
    raw["stations"][2]["x"] = raw["stations"][1]["x"]
    with pytest.raises(ValidationError, match="stations 1 and 2"):
        route_from_dict(raw)


def test_backwards_ordering_rejected():
    raw = straight_dict(4)
    raw["stations"][2]["x"] = -5.0
    with pytest.raises(ValidationError, match="reverses direction"):
        route_from_dict(raw)


def test_arc_station_spacing_matches_circumference():
    # 40 stations around a 15 m circle: arc length 2 pi 15 / 40 = 2.36 m
    corridor = arc_route(radius=15.0, n_stations=40)
    spacing = np.hypot(*np.diff(corridor.centers, axis=0).T)
    np.testing.assert_allclose(spacing, 2.36, atol=0.02)


def test_zero_offsets_map_to_centers(corner):
    plan = MotionPlan(np.zeros(len(corner)), np.full(len(corner), 5.0))
    np.testing.assert_array_equal(waypoints_to_cartesian(corner, plan),
                                  corner.centers)


def test_axis_aligned_offset_displacement():
    corridor = route_from_dict(straight_dict(5))
    offsets = np.zeros(5)
    offsets[2] = 1.0
    plan = MotionPlan(offsets, np.full(5, 5.0))
    points = waypoints_to_cartesian(corridor, plan)
    np.testing.assert_allclose(points[2] - corridor.centers[2], [0.0, 1.0],
                               atol=1e-15)


def test_diagonal_offset_displacement():
    raw = straight_dict(3)
    raw["stations"][1]["lateral_axis_angle"] = math.pi / 4
    corridor = route_from_dict(raw)
    plan = MotionPlan(np.array([0.0, 0.5, 0.0]), np.full(3, 5.0))
    points = waypoints_to_cartesian(corridor, plan)
    expect = 0.5 * math.sqrt(0.5)
    np.testing.assert_allclose(points[1] - corridor.centers[1],
                               [expect, expect], atol=1e-12)


def test_offset_linearity(corner, rng):
    base = rng.uniform(-1.0, 1.0, len(corner))
    v = np.full(len(corner), 5.0)
    one = waypoints_to_cartesian(corner, MotionPlan(base, v))
    two = waypoints_to_cartesian(corner, MotionPlan(2.0 * base, v))
    np.testing.assert_allclose(two - corner.centers,
                               2.0 * (one - corner.centers), atol=1e-12)


def test_clamped_plan_is_in_bounds(corner, rng):
    wild = MotionPlan(rng.uniform(-9.0, 9.0, len(corner)),
                      rng.uniform(0.5, 30.0, len(corner)))
    clamped = clamp_plan(corner, wild)
    check_plan_bounds(corner, clamped)
    y_lo, y_hi = corner.y_bounds
    assert np.all(clamped.lateral_offsets >= y_lo)
    assert np.all(clamped.lateral_offsets <= y_hi)


def test_out_of_bounds_plan_names_station(corner):
    offsets = np.zeros(len(corner))
    offsets[3] = 4.0
    plan = MotionPlan(offsets, np.full(len(corner), 5.0))
    with pytest.raises(ValidationError, match="station 3"):
        check_plan_bounds(corner, plan)


def test_plan_length_mismatch(corner):
    plan = MotionPlan(np.zeros(2), np.full(2, 5.0))
    with pytest.raises(DimensionError):
        waypoints_to_cartesian(corner, plan)


def test_route_round_trip(tmp_path, corner):
    path = tmp_path / "corner.json"
    save_route(corner, path)
    again = load_route(path)
    assert again == corner
    assert route_to_dict(again) == route_to_dict(corner)


def test_missing_axis_angle_derived_from_neighbors():
    raw = straight_dict(5)
    for st in raw["stations"]:
        del st["lateral_axis_angle"]
    corridor = route_from_dict(raw)
    expect = lateral_axes_from_centers(corridor.centers)
    got = np.array([s.lateral_axis_angle for s in corridor.stations])
    np.testing.assert_allclose(got, expect, atol=1e-12)
    # eastbound road: left normal points north
    np.testing.assert_allclose(corridor.lateral_axes,
                               np.tile([0.0, 1.0], (5, 1)), atol=1e-12)


def test_station_validate_rejects_bounds_excluding_center():
    st = Station(0.0, 0.0, 0.0, y_min=0.2, y_max=1.0, v_min=1.0, v_max=5.0)
    with pytest.raises(ValidationError, match="straddle"):
        st.validate(0)


def test_corridor_cached_arrays_match_stations(corner):
    ang = np.array([s.lateral_axis_angle for s in corner.stations])
    np.testing.assert_allclose(
        corner.lateral_axes,
        np.column_stack([np.cos(ang), np.sin(ang)]), atol=1e-15)
    assert np.allclose(np.hypot(*corner.lateral_axes.T), 1.0)
