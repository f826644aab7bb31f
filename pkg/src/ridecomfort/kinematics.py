"""Waypoint polylines with speeds -> time-stamped motion profiles.

Per segment k between waypoints k and k+1:

    d_k   Euclidean distance
    dt_k  = 2 d_k / (v_k + v_{k+1})            (mean-speed traversal)
    ax_k  = (v_{k+1}^2 - v_k^2) / (2 d_k)      (constant accel per segment)
    dpsi_k signed angle between segment directions k and k+1
    kappa_k = dpsi_k / d_k
    ay_k  = ((v_k + v_{k+1}) / 2)^2 * kappa_k

The heading change uses the signed atan2 form so lateral acceleration
carries a sign.  The last segment has no following direction vector; its
ay entry is zero by convention (the CSV format documents this).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    DegenerateSegmentError,
    DimensionError,
    DomainError,
    ResolutionError,
    ValidationError,
)
from .route import MotionPlan, RouteCorridor, waypoints_to_cartesian


@dataclass(frozen=True)
class MotionProfile:
    """Time-stamped Cartesian trajectory with per-segment accelerations.

    The common currency between planner, reconstruction and metrics.  The
    acceleration arrays have one entry per segment (length N-1).
    """

    points: np.ndarray
    speeds: np.ndarray
    segment_time_steps: np.ndarray
    ax: np.ndarray
    ay: np.ndarray
    total_time: float

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float)
        n = points.shape[0]
        arrays = {
            "speeds": (np.asarray(self.speeds, dtype=float), n),
            "segment_time_steps": (np.asarray(self.segment_time_steps, dtype=float), n - 1),
            "ax": (np.asarray(self.ax, dtype=float), n - 1),
            "ay": (np.asarray(self.ay, dtype=float), n - 1),
        }
        object.__setattr__(self, "points", points)
        for name, (arr, expect) in arrays.items():
            if arr.shape[0] != expect:
                raise DimensionError(
                    f"{name} has length {arr.shape[0]}, expected {expect} for {n} points"
                )
            object.__setattr__(self, name, arr)
        dt = arrays["segment_time_steps"][0]
        if np.any(dt <= 0.0):
            raise ValidationError("all segment time steps must be positive")
        if abs(float(np.sum(dt)) - self.total_time) > 1e-6 * max(1.0, self.total_time):
            raise ValidationError("total_time must equal the sum of segment time steps")

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def waypoint_times(self) -> np.ndarray:
        """Cumulative time at each waypoint, starting at 0."""
        t = np.empty(len(self))
        t[0] = 0.0
        np.cumsum(self.segment_time_steps, out=t[1:])
        return t

    @property
    def initial_speed(self) -> float:
        return float(self.speeds[0])


class SegmentKinematics(NamedTuple):
    """Forward kinematics with the intermediates the gradient chain reuses."""

    h: np.ndarray        # (M, 2) segment direction vectors
    d: np.ndarray        # (M,) segment lengths
    dt: np.ndarray       # (M,) segment time steps
    ax: np.ndarray       # (M,)
    ay: np.ndarray       # (M,) last entry zero
    cross: np.ndarray    # (M-1,) cross products h_k x h_{k+1}
    dot: np.ndarray      # (M-1,) dot products h_k . h_{k+1}
    dpsi: np.ndarray     # (M-1,) signed heading changes
    mean_v: np.ndarray   # (M,) segment mean speeds


def segment_kinematics(points: np.ndarray, speeds: np.ndarray) -> SegmentKinematics:
    """Compute all per-segment quantities for a waypoint polyline."""
    points = np.asarray(points, dtype=float)
    speeds = np.asarray(speeds, dtype=float)
    if points.shape[0] != speeds.shape[0]:
        raise DimensionError(
            f"{points.shape[0]} points but {speeds.shape[0]} speeds"
        )
    if points.shape[0] < 2:
        raise DimensionError("need at least 2 waypoints")
    if np.any(speeds <= 0.0):
        i = int(np.nonzero(speeds <= 0.0)[0][0])
        raise DomainError(f"speed {speeds[i]} at waypoint {i} is not positive")

    h = points[1:] - points[:-1]
    d = np.hypot(h[:, 0], h[:, 1])
    if np.any(d == 0.0):
        i = int(np.nonzero(d == 0.0)[0][0])
        raise DegenerateSegmentError(f"waypoints {i} and {i + 1} coincide")

    vsum = speeds[:-1] + speeds[1:]
    dt = 2.0 * d / vsum
    ax = (speeds[1:] ** 2 - speeds[:-1] ** 2) / (2.0 * d)
    mean_v = 0.5 * vsum

    cross = h[:-1, 0] * h[1:, 1] - h[:-1, 1] * h[1:, 0]
    dot = np.sum(h[:-1] * h[1:], axis=1)
    dpsi = np.arctan2(cross, dot)

    ay = np.zeros_like(d)
    if d.shape[0] > 1:
        ay[:-1] = mean_v[:-1] ** 2 * dpsi / d[:-1]
    return SegmentKinematics(h, d, dt, ax, ay, cross, dot, dpsi, mean_v)


def profile_from_waypoints(points: np.ndarray, speeds: np.ndarray) -> MotionProfile:
    seg = segment_kinematics(points, speeds)
    return MotionProfile(
        points=np.asarray(points, dtype=float),
        speeds=np.asarray(speeds, dtype=float),
        segment_time_steps=seg.dt,
        ax=seg.ax,
        ay=seg.ay,
        total_time=float(np.sum(seg.dt)),
    )


def evaluate_motion(corridor: RouteCorridor, plan: MotionPlan) -> MotionProfile:
    """Turn a (corridor, plan) pair into a MotionProfile."""
    points = waypoints_to_cartesian(corridor, plan)
    return profile_from_waypoints(points, plan.speeds)


@dataclass(frozen=True)
class ResampledAccel:
    """Accelerations interpolated onto a uniform time grid."""

    t: np.ndarray
    ax: np.ndarray
    ay: np.ndarray
    rate: float


def resample_uniform(profile: MotionProfile, rate: float) -> ResampledAccel:
    """Piecewise-linear resampling of ax, ay onto a uniform grid.

    Segment accelerations are constant over their segment, so each segment
    contributes a node at its midpoint time; values are held constant
    beyond the first and last midpoints.
    """
    if rate <= 0.0:
        raise DomainError(f"rate must be positive, got {rate}")
    n_samples = int(np.floor(profile.total_time * rate + 1e-9)) + 1
    if n_samples < 8:
        raise ResolutionError(
            f"rate {rate} Hz over {profile.total_time:.3f} s gives only "
            f"{n_samples} samples (need at least 8)"
        )
    grid = np.arange(n_samples) / rate
    t_way = profile.waypoint_times
    t_mid = 0.5 * (t_way[:-1] + t_way[1:])
    ax = np.interp(grid, t_mid, profile.ax)
    ay = np.interp(grid, t_mid, profile.ay)
    return ResampledAccel(t=grid, ax=ax, ay=ay, rate=float(rate))


def profile_to_csv(profile: MotionProfile, path) -> None:
    """Write the shared profile CSV: t,x,y,v,ax,ay with 9 significant digits.

    Acceleration columns hold the segment value at the segment's starting
    waypoint; the final row carries zeros.
    """
    t = profile.waypoint_times
    n = len(profile)
    ax = np.append(profile.ax, 0.0)
    ay = np.append(profile.ay, 0.0)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "x", "y", "v", "ax", "ay"])
        for k in range(n):
            writer.writerow(
                [
                    format(val, ".9g")
                    for val in (
                        t[k],
                        profile.points[k, 0],
                        profile.points[k, 1],
                        profile.speeds[k],
                        ax[k],
                        ay[k],
                    )
                ]
            )


def profile_from_csv(path) -> MotionProfile:
    """Read a profile CSV written by profile_to_csv.

    The time column is normalized to start at zero, so a constant time
    offset in the file does not change any derived quantity.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip() for c in header[:6]] != ["t", "x", "y", "v", "ax", "ay"]:
            raise ValidationError(f"{path}: expected header t,x,y,v,ax,ay")
        rows = [[float(cell) for cell in row[:6]] for row in reader if row]
    if len(rows) < 2:
        raise ValidationError(f"{path}: need at least 2 rows")
    data = np.array(rows)
    t = data[:, 0] - data[0, 0]
    dt = np.diff(t)
    if np.any(dt <= 0.0):
        raise ValidationError(f"{path}: time column must be strictly increasing")
    return MotionProfile(
        points=data[:, 1:3],
        speeds=data[:, 3],
        segment_time_steps=dt,
        ax=data[:-1, 4],
        ay=data[:-1, 5],
        total_time=float(t[-1]),
    )
