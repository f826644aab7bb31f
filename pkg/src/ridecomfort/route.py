"""Lane corridor model: stations, bounds, and the waypoint decision space.

A corridor is an ordered polyline of stations along the lane center.  Each
station carries a local lateral axis (perpendicular to the driving
direction), lateral offset bounds and speed bounds.  A motion plan assigns
one lateral offset and one speed per station; mapping a plan onto the
corridor yields Cartesian waypoints.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimensionError, RouteFormatError, ValidationError

MIN_STATION_SPACING = 0.1  # meters


@dataclass(frozen=True)
class Station:
    """One lane-center sample with local bounds.

    lateral_axis_angle is the direction (radians, world frame) of the local
    lateral axis across the driving direction; positive offsets displace the
    waypoint along this axis.
    """

    center_x: float
    center_y: float
    lateral_axis_angle: float
    y_min: float
    y_max: float
    v_min: float
    v_max: float

    def validate(self, index: int) -> None:
        if not (self.y_min <= 0.0 <= self.y_max):
            raise ValidationError(
                f"station {index}: lateral bounds must straddle the lane center, "
                f"got y_min={self.y_min}, y_max={self.y_max}"
            )
        if not (0.0 <= self.v_min < self.v_max):
            raise ValidationError(
                f"station {index}: speed bounds must satisfy 0 <= v_min < v_max, "
                f"got v_min={self.v_min}, v_max={self.v_max}"
            )


@dataclass(frozen=True)
class RouteCorridor:
    """Ordered stations defining the permissible motion corridor.

    Immutable after construction; safe to share between workers.
    """

    stations: tuple[Station, ...]
    name: str = ""

    def __post_init__(self):
        n = len(self.stations)
        if n < 3:
            raise ValidationError(f"corridor needs at least 3 stations, got {n}")
        for i, st in enumerate(self.stations):
            st.validate(i)
        centers = np.array([(s.center_x, s.center_y) for s in self.stations])
        deltas = np.diff(centers, axis=0)
        spacing = np.hypot(deltas[:, 0], deltas[:, 1])
        too_close = np.nonzero(spacing <= MIN_STATION_SPACING)[0]
        if too_close.size:
            i = int(too_close[0])
            raise ValidationError(
                f"stations {i} and {i + 1} are {spacing[i]:.3f} m apart "
                f"(minimum spacing {MIN_STATION_SPACING} m)"
            )
        # Ordering must follow the driving direction: each center-to-center
        # vector projects positively on the previous one.
        proj = np.sum(deltas[1:] * deltas[:-1], axis=1)
        backwards = np.nonzero(proj <= 0.0)[0]
        if backwards.size:
            i = int(backwards[0]) + 1
            raise ValidationError(
                f"station ordering reverses direction at station {i + 1}"
            )

    def __len__(self) -> int:
        return len(self.stations)

    @cached_property
    def centers(self) -> np.ndarray:
        """(N, 2) array of station centers."""
        return np.array([(s.center_x, s.center_y) for s in self.stations])

    @cached_property
    def lateral_axes(self) -> np.ndarray:
        """(N, 2) array of unit vectors along each station's lateral axis."""
        ang = np.array([s.lateral_axis_angle for s in self.stations])
        return np.column_stack([np.cos(ang), np.sin(ang)])

    @cached_property
    def y_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        lo = np.array([s.y_min for s in self.stations])
        hi = np.array([s.y_max for s in self.stations])
        return lo, hi

    @cached_property
    def v_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        lo = np.array([s.v_min for s in self.stations])
        hi = np.array([s.v_max for s in self.stations])
        return lo, hi


@dataclass(frozen=True)
class MotionPlan:
    """Planner decision vector: one lateral offset and one speed per station.

    Arrays are treated as immutable once the plan is built.
    """

    lateral_offsets: np.ndarray
    speeds: np.ndarray

    def __post_init__(self):
        offsets = np.asarray(self.lateral_offsets, dtype=float)
        speeds = np.asarray(self.speeds, dtype=float)
        object.__setattr__(self, "lateral_offsets", offsets)
        object.__setattr__(self, "speeds", speeds)
        if offsets.ndim != 1 or speeds.ndim != 1:
            raise DimensionError("plan arrays must be one-dimensional")
        if offsets.shape != speeds.shape:
            raise DimensionError(
                f"offset and speed lengths differ: {offsets.shape[0]} vs {speeds.shape[0]}"
            )

    def __len__(self) -> int:
        return self.lateral_offsets.shape[0]


def check_plan_bounds(corridor: RouteCorridor, plan: MotionPlan, atol: float = 1e-9) -> None:
    """Raise ValidationError if the plan violates the corridor's box bounds."""
    _require_same_length(corridor, plan)
    y_lo, y_hi = corridor.y_bounds
    v_lo, v_hi = corridor.v_bounds
    y = plan.lateral_offsets
    v = plan.speeds
    bad = np.nonzero((y < y_lo - atol) | (y > y_hi + atol))[0]
    if bad.size:
        i = int(bad[0])
        raise ValidationError(
            f"lateral offset {y[i]:.3f} at station {i} outside [{y_lo[i]}, {y_hi[i]}]"
        )
    bad = np.nonzero((v < v_lo - atol) | (v > v_hi + atol))[0]
    if bad.size:
        i = int(bad[0])
        raise ValidationError(
            f"speed {v[i]:.3f} at station {i} outside [{v_lo[i]}, {v_hi[i]}]"
        )


def clamp_plan(corridor: RouteCorridor, plan: MotionPlan) -> MotionPlan:
    """Project a plan onto the corridor's box bounds."""
    _require_same_length(corridor, plan)
    y_lo, y_hi = corridor.y_bounds
    v_lo, v_hi = corridor.v_bounds
    return MotionPlan(
        lateral_offsets=np.clip(plan.lateral_offsets, y_lo, y_hi),
        speeds=np.clip(plan.speeds, v_lo, v_hi),
    )


def waypoints_to_cartesian(corridor: RouteCorridor, plan: MotionPlan) -> np.ndarray:
    """Map a plan onto Cartesian waypoints, shape (N, 2).

    Waypoint k is the station center displaced by lateral_offsets[k] along
    the station's lateral axis.
    """
    _require_same_length(corridor, plan)
    offsets = np.asarray(plan.lateral_offsets, dtype=float)
    return corridor.centers + offsets[:, None] * corridor.lateral_axes


def lateral_axes_from_centers(centers: np.ndarray) -> np.ndarray:
    """Lateral axis angles for a center polyline, shape (N,).

    The tangent at interior stations is the centered finite difference of
    the neighbors; endpoints use one-sided differences.  The lateral axis is
    the left normal of the tangent (tangent angle + pi/2).
    """
    centers = np.asarray(centers, dtype=float)
    n = centers.shape[0]
    if n < 2:
        raise DimensionError("need at least 2 centers to orient lateral axes")
    tangents = np.empty_like(centers)
    tangents[1:-1] = centers[2:] - centers[:-2]
    tangents[0] = centers[1] - centers[0]
    tangents[-1] = centers[-1] - centers[-2]
    return np.arctan2(tangents[:, 1], tangents[:, 0]) + 0.5 * math.pi


def _require_same_length(corridor: RouteCorridor, plan: MotionPlan) -> None:
    if len(plan) != len(corridor):
        raise DimensionError(
            f"plan length {len(plan)} does not match corridor length {len(corridor)}"
        )


_REQUIRED_STATION_FIELDS = ("x", "y", "y_min", "y_max", "v_min", "v_max")


def load_route(path) -> RouteCorridor:
    """Load a corridor from the route JSON format.

    Top-level object: {"name": str, "stations": [...]} with per-station
    fields x, y, y_min, y_max, v_min, v_max and an optional
    lateral_axis_angle.  Stations missing the angle get it from the
    centered-finite-difference normal of the center polyline.
    """
    with open(path, encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise RouteFormatError(f"route file {path} is not valid JSON: {exc}") from exc
    return route_from_dict(raw, source=str(path))


def route_from_dict(raw: dict, source: str = "<dict>") -> RouteCorridor:
    if not isinstance(raw, dict) or "stations" not in raw:
        raise RouteFormatError(f"{source}: missing field 'stations'")
    raw_stations = raw["stations"]
    if not isinstance(raw_stations, list) or not raw_stations:
        raise RouteFormatError(f"{source}: field 'stations' must be a non-empty list")
    parsed = []
    for i, item in enumerate(raw_stations):
        if not isinstance(item, dict):
            raise RouteFormatError(f"{source}: station {i} is not an object")
        for field in _REQUIRED_STATION_FIELDS:
            if field not in item:
                raise RouteFormatError(f"{source}: station {i} missing field '{field}'")
            if not isinstance(item[field], (int, float)) or isinstance(item[field], bool):
                raise RouteFormatError(
                    f"{source}: station {i} field '{field}' must be a number"
                )
        parsed.append(item)

    centers = np.array([(s["x"], s["y"]) for s in parsed], dtype=float)
    need_angle = [i for i, s in enumerate(parsed) if "lateral_axis_angle" not in s]
    if need_angle:
        derived = lateral_axes_from_centers(centers)
    stations = []
    for i, s in enumerate(parsed):
        angle = s.get("lateral_axis_angle")
        if angle is None:
            angle = float(derived[i])
        elif not isinstance(angle, (int, float)) or isinstance(angle, bool):
            raise RouteFormatError(
                f"{source}: station {i} field 'lateral_axis_angle' must be a number"
            )
        stations.append(
            Station(
                center_x=float(s["x"]),
                center_y=float(s["y"]),
                lateral_axis_angle=float(angle),
                y_min=float(s["y_min"]),
                y_max=float(s["y_max"]),
                v_min=float(s["v_min"]),
                v_max=float(s["v_max"]),
            )
        )
    return RouteCorridor(stations=tuple(stations), name=str(raw.get("name", "")))


def route_to_dict(corridor: RouteCorridor) -> dict:
    return {
        "name": corridor.name,
        "stations": [
            {
                "x": s.center_x,
                "y": s.center_y,
                "lateral_axis_angle": s.lateral_axis_angle,
                "y_min": s.y_min,
                "y_max": s.y_max,
                "v_min": s.v_min,
                "v_max": s.v_max,
            }
            for s in corridor.stations
        ],
    }


def save_route(corridor: RouteCorridor, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(route_to_dict(corridor), fh, indent=2, sort_keys=True)
        fh.write("\n")
