"""Synthetic routes, runs, and sensor logs for tests and demos.

Everything here is generated from closed-form geometry so tests have
exact ground truth: corridor builders for straight, arc, and roundabout
layouts, a scripted "human-like" drive through the roundabout, and a
sensor simulator that samples that drive into noisy GPS and IMU streams
with a known clock lag and outage window.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kinematics import MotionProfile, profile_from_waypoints
from .reconstruction import SensorLog
from .route import RouteCorridor, Station, lateral_axes_from_centers


def _corridor(centers: np.ndarray, name: str, y_half: float,
              v_min: float, v_max: float) -> RouteCorridor:
    angles = lateral_axes_from_centers(centers)
    stations = tuple(
        Station(float(c[0]), float(c[1]), float(a),
                -y_half, y_half, v_min, v_max)
        for c, a in zip(centers, angles)
    )
    return RouteCorridor(stations=stations, name=name)


def straight_route(length: float = 400.0, spacing: float = 10.0,
                   y_half: float = 2.0, v_min: float = 2.0,
                   v_max: float = 16.7) -> RouteCorridor:
    n = max(3, int(round(length / spacing)) + 1)
    centers = np.column_stack([np.linspace(0.0, length, n), np.zeros(n)])
    return _corridor(centers, "straight", y_half, v_min, v_max)


def arc_route(radius: float = 15.0, n_stations: int = 40,
              sweep: float = 2.0 * np.pi, y_half: float = 1.5,
              v_min: float = 2.0, v_max: float = 16.7) -> RouteCorridor:
    theta = np.linspace(0.0, sweep, n_stations, endpoint=False)
    centers = radius * np.column_stack([np.cos(theta), np.sin(theta)])
    return _corridor(centers, "arc", y_half, v_min, v_max)


ROUNDABOUT_RADIUS = 15.0
ROUNDABOUT_SWEEP = 1.5 * np.pi      # 270 degrees, third exit
APPROACH_LENGTH = 200.0
EXIT_LENGTH = 200.0
CURVATURE_BLEND = 10.0              # m, cosine blend at curvature steps


def _roundabout_heading_of_s(s: np.ndarray) -> np.ndarray:
    """Heading angle as a function of arc length, C1 via curvature blending."""
    r = ROUNDABOUT_RADIUS
    s1 = APPROACH_LENGTH
    s2 = s1 + r * ROUNDABOUT_SWEEP
    half = 0.5 * CURVATURE_BLEND

    def ramp(u):
        # integral of a sine-blended 0 -> 1 step over [-half, half]:
        # 0 below the window, u above it, smooth in between
        inner = 0.5 * (u + half) - (half / np.pi) * np.cos(
            np.pi * u / (2.0 * half))
        return np.where(u <= -half, 0.0, np.where(u >= half, u, inner))

    # curvature: 0 -> 1/r at s1, 1/r -> 0 at s2, each blended over the window
    psi = (ramp(s - s1) - ramp(s - s2)) / r
    return psi


def roundabout_centerline(s: np.ndarray):
    """Positions and headings along the roundabout path at arc lengths s."""
    s = np.asarray(s, dtype=float)
    fine = np.linspace(0.0, float(s.max()), max(2001, 4 * s.size))
    psi_f = _roundabout_heading_of_s(fine)
    x_f = np.concatenate([[0.0], np.cumsum(
        0.5 * (np.cos(psi_f[1:]) + np.cos(psi_f[:-1])) * np.diff(fine))])
    y_f = np.concatenate([[0.0], np.cumsum(
        0.5 * (np.sin(psi_f[1:]) + np.sin(psi_f[:-1])) * np.diff(fine))])
    x = np.interp(s, fine, x_f)
    y = np.interp(s, fine, y_f)
    psi = _roundabout_heading_of_s(s)
    return np.column_stack([x, y]), psi


def roundabout_total_length() -> float:
    return APPROACH_LENGTH + ROUNDABOUT_RADIUS * ROUNDABOUT_SWEEP + EXIT_LENGTH


def roundabout_route(spacing_straight: float = 8.0,
                     spacing_arc: float = 3.0, y_half: float = 2.0,
                     v_min: float = 2.0, v_max: float = 16.7) -> RouteCorridor:
    """Straight approach, 270 degree circulation, straight exit."""
    s1 = APPROACH_LENGTH
    s2 = s1 + ROUNDABOUT_RADIUS * ROUNDABOUT_SWEEP
    total = roundabout_total_length()
    s = np.concatenate([
        np.arange(0.0, s1, spacing_straight),
        np.arange(s1, s2, spacing_arc),
        np.arange(s2, total, spacing_straight),
        [total],
    ])
    centers, _ = roundabout_centerline(s)
    return _corridor(centers, "roundabout", y_half, v_min, v_max)


@dataclass(frozen=True)
class GroundTruth:
    """Continuous-time reference sampled on a fine grid."""

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    psi: np.ndarray
    v: np.ndarray
    ax: np.ndarray
    ay: np.ndarray

    def accel_at(self, times: np.ndarray):
        return (np.interp(times, self.t, self.ax),
                np.interp(times, self.t, self.ay))


HUMAN_TARGET_TIME = 76.5   # s, duration the scripted run is scaled to


def _human_speed_of_s(s: np.ndarray, scale: float) -> np.ndarray:
    """Distance-indexed speed script: cruise, early coast, late braking
    into the roundabout, held apex speed, moderate exit acceleration."""
    s1 = APPROACH_LENGTH
    s2 = s1 + ROUNDABOUT_RADIUS * ROUNDABOUT_SWEEP
    # kept close together so the 5 m/s validity floor survives the
    # global rescale onto the target duration
    cruise, coast, apex, exit_v = 8.0, 7.5, 7.2, 8.1

    def blend(u, lo, hi, a, b):
        w = np.clip((u - lo) / (hi - lo), 0.0, 1.0)
        w = 0.5 - 0.5 * np.cos(np.pi * w)
        return a + (b - a) * w

    v = np.full_like(s, cruise)
    v = np.where(s >= 110.0, blend(s, 110.0, 160.0, cruise, coast), v)
    v = np.where(s >= 160.0, blend(s, 178.0, s1 + 2.0, coast, apex), v)
    v = np.where(s >= s1 + 2.0, apex, v)
    v = np.where(s >= s2 - 4.0, blend(s, s2 - 4.0, s2 + 70.0, apex, exit_v), v)
    return scale * v


OSCILLATION_FREQ = 0.1      # Hz, rider-notable speed modulation
OSCILLATION_FRACTION = 0.035
# quicker pedal texture: irrelevant to comfort scoring but plenty of
# timing signal for sensor registration
PEDAL_TEXTURE = ((0.1, 0.035), (0.27, 0.03))


def _oscillation_terms(oscillation):
    if oscillation is True:
        return ((OSCILLATION_FREQ, OSCILLATION_FRACTION),)
    if oscillation is False or oscillation is None:
        return ()
    return tuple(oscillation)


def _integrate_run(scale: float, dt: float, oscillation) -> GroundTruth:
    total = roundabout_total_length()
    terms = _oscillation_terms(oscillation)
    # integrate ds/dt = v(s, t) until the path is consumed
    ts = [0.0]
    ss = [0.0]
    t, s = 0.0, 0.0
    while s < total:
        v = float(_human_speed_of_s(np.array([s]), scale)[0])
        for freq, fraction in terms:
            v *= 1.0 + fraction * np.sin(2.0 * np.pi * freq * t)
        if s + v * dt >= total:
            # exact fractional final step, no clipped-tail speed artifact
            ts.append(t + (total - s) / v)
            ss.append(total)
            break
        s += v * dt
        t += dt
        ts.append(t)
        ss.append(s)
    ts = np.array(ts)
    ss = np.array(ss)
    pos, psi_path = roundabout_centerline(ss)
    v_inst = np.gradient(ss, ts)
    ax = np.gradient(v_inst, ts)
    psi_dot = np.gradient(psi_path, ts)
    ay = v_inst * psi_dot
    return GroundTruth(t=ts, x=pos[:, 0], y=pos[:, 1], psi=psi_path,
                       v=v_inst, ax=ax, ay=ay)


def human_like_truth(dt: float = 0.01, oscillation=True,
                     target_time: float = HUMAN_TARGET_TIME) -> GroundTruth:
    """Scripted roundabout drive, speed-scaled to the target duration.

    `oscillation` is True for the default 0.1 Hz speed modulation, False
    for none, or a sequence of (frequency_hz, fraction) terms.
    """
    lo, hi = 0.4, 1.6
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        truth = _integrate_run(mid, dt, oscillation)
        if truth.t[-1] > target_time:
            lo = mid
        else:
            hi = mid
        if abs(truth.t[-1] - target_time) < 0.05:
            break
    return truth


def sample_profile_at_stations(truth: GroundTruth,
                               corridor: RouteCorridor) -> MotionProfile:
    """Project the continuous run onto the corridor stations."""
    px = truth.x
    py = truth.y
    points = []
    speeds = []
    for c in corridor.centers:
        i = int(np.argmin((px - c[0]) ** 2 + (py - c[1]) ** 2))
        points.append([px[i], py[i]])
        speeds.append(truth.v[i])
    return profile_from_waypoints(np.array(points), np.array(speeds))


# 15 s loss while still on the approach straight; satellites return a
# couple of seconds before the entry blend so both yaw ramps stay
# position-anchored and the IMU clock offset remains identifiable
DEFAULT_OUTAGE = (13.0, 28.0)
DISTURBANCE_FREQ = 0.015            # Hz, slow mounting/gravity leakage
DISTURBANCE_AMPLITUDE = 0.06        # m/s^2
VIBRATION_RMS = 0.22                # m/s^2 per axis, road + engine texture
VIBRATION_BAND = (15.0, 45.0)       # Hz


def _band_noise(rng, n: int, dt: float, band, rms: float) -> np.ndarray:
    """Gaussian noise confined to a frequency band, scaled to a target RMS."""
    spec = np.fft.rfft(rng.standard_normal(n))
    f = np.fft.rfftfreq(n, dt)
    spec[(f < band[0]) | (f > band[1])] = 0.0
    out = np.fft.irfft(spec, n)
    scale = float(np.std(out))
    return out * (rms / scale) if scale > 0.0 else out


def _outage_taper(t: np.ndarray, window, margin: float = 3.0) -> np.ndarray:
    """1 outside the window, 0 inside, cosine shoulders; keeps the
    disturbance out of the dead-reckoning stretch."""
    a, b = window
    w = np.ones_like(t)
    w = np.where((t >= a) & (t <= b), 0.0, w)
    rise = (a - t) / margin
    fall = (t - b) / margin
    edge = np.minimum(np.clip(rise, 0.0, 1.0), np.clip(fall, 0.0, 1.0))
    shoulder = ((t > a - margin) & (t < a)) | ((t > b) & (t < b + margin))
    w = np.where(shoulder, 0.5 - 0.5 * np.cos(np.pi * edge), w)
    return w


def simulate_sensor_log(truth: GroundTruth, seed: int = 0,
                        gps_rate: float = 10.0, imu_rate: float = 100.0,
                        gps_sigma: float = 0.3, imu_sigma: float = 0.05,
                        imu_lag: float = 0.13,
                        outage=DEFAULT_OUTAGE,
                        disturbance: float = 0.0,
                        vibration: float = VIBRATION_RMS) -> SensorLog:
    """Sample the continuous run into noisy sensor streams.

    The IMU stream is stamped late by `imu_lag` (its clock runs behind
    the GPS clock).  GPS fixes inside the outage window are marked
    invalid and frozen at the last good position.  Besides white noise
    the IMU carries band-limited vibration, the high-frequency texture a
    body-mounted accelerometer picks up that no planar motion model can
    reproduce.

    `disturbance` adds a slow coherent tone on top, emulating gravity
    leakage from unmodelled roll and pitch.  It stresses the residual
    absorption of the reconstruction, but being coherent it also tilts
    any clock-offset registration, so it stays off by default.
    """
    rng = np.random.default_rng(seed)
    t_end = truth.t[-1]
    gps_t = np.arange(0.0, t_end, 1.0 / gps_rate)
    gx = np.interp(gps_t, truth.t, truth.x) + rng.normal(0.0, gps_sigma, gps_t.size)
    gy = np.interp(gps_t, truth.t, truth.y) + rng.normal(0.0, gps_sigma, gps_t.size)
    valid = np.ones(gps_t.size, dtype=bool)
    windows = ()
    if outage is not None:
        windows = (tuple(outage),)
        inside = (gps_t >= outage[0]) & (gps_t <= outage[1])
        valid[inside] = False
        if inside.any():
            last_good = int(np.nonzero(inside)[0][0]) - 1
            if last_good >= 0:
                gx[inside] = gx[last_good]
                gy[inside] = gy[last_good]

    imu_true_t = np.arange(0.0, t_end, 1.0 / imu_rate)
    iax = np.interp(imu_true_t, truth.t, truth.ax)
    iay = np.interp(imu_true_t, truth.t, truth.ay)
    if disturbance > 0.0:
        taper = (_outage_taper(imu_true_t, outage) if outage is not None
                 else np.ones_like(imu_true_t))
        drift = 2.0 * np.pi * DISTURBANCE_FREQ * imu_true_t
        iax = iax + disturbance * 0.5 * np.sin(drift + 1.1) * taper
        iay = iay + disturbance * np.sin(drift) * taper
    if vibration > 0.0:
        dt = 1.0 / imu_rate
        iax = iax + _band_noise(rng, imu_true_t.size, dt, VIBRATION_BAND, vibration)
        iay = iay + _band_noise(rng, imu_true_t.size, dt, VIBRATION_BAND, vibration)
    iax = iax + rng.normal(0.0, imu_sigma, imu_true_t.size)
    iay = iay + rng.normal(0.0, imu_sigma, imu_true_t.size)

    return SensorLog(
        gps_t=gps_t, gps_x=gx, gps_y=gy, gps_valid=valid,
        imu_t=imu_true_t + imu_lag, imu_ax=iax, imu_ay=iay,
        sample_time=1.0 / gps_rate,
        outage_windows=windows,
    )
