"""Motion reconstruction from GPS and IMU logs.

Decision variables are the initial position plus per-sample headings and
speeds on a uniform grid at the GPS period.  A forward-Euler rollout
predicts positions and body accelerations; the weighted squared error
against both sensor streams is minimized with an analytic gradient.
During declared outages the position term is dropped and the
acceleration term is boosted, so the trajectory coasts on dead
reckoning without fighting bogus fixes.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize

from .errors import ValidationError
from .kinematics import MotionProfile

GRAVITY_FREE_EPS = 1e-12


def _as_float_array(values, name):
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be one-dimensional")
    return arr


@dataclass(frozen=True)
class SensorLog:
    gps_t: np.ndarray
    gps_x: np.ndarray
    gps_y: np.ndarray
    gps_valid: np.ndarray          # bool per GPS sample
    imu_t: np.ndarray
    imu_ax: np.ndarray
    imu_ay: np.ndarray
    sample_time: float             # reconstruction grid period Ts, seconds
    outage_windows: tuple = ()
    imu_shift: float = 0.0         # applied by align_imu, seconds
    shift_warning: bool = False

    def __post_init__(self):
        for name in ("gps_t", "gps_x", "gps_y", "imu_t", "imu_ax", "imu_ay"):
            object.__setattr__(self, name, _as_float_array(getattr(self, name), name))
        object.__setattr__(self, "gps_valid",
                           np.asarray(self.gps_valid, dtype=bool))
        if not (self.gps_t.shape == self.gps_x.shape == self.gps_y.shape
                == self.gps_valid.shape):
            raise ValidationError("GPS stream arrays must share one length")
        if not (self.imu_t.shape == self.imu_ax.shape == self.imu_ay.shape):
            raise ValidationError("IMU stream arrays must share one length")
        for name, t in (("gps", self.gps_t), ("imu", self.imu_t)):
            if t.size < 2:
                raise ValidationError(f"{name} stream needs at least 2 samples")
            if np.any(np.diff(t) <= 0.0):
                raise ValidationError(f"{name} timestamps must strictly increase")
        if not self.sample_time > 0.0:
            raise ValidationError(f"sample time must be positive, got {self.sample_time}")
        windows = tuple((float(a), float(b)) for a, b in self.outage_windows)
        span = (self.gps_t[0], self.gps_t[-1])
        for a, b in windows:
            if not a < b:
                raise ValidationError(f"outage window ({a}, {b}) is empty")
            if a < span[0] - 1e-9 or b > span[1] + 1e-9:
                raise ValidationError(
                    f"outage window ({a}, {b}) outside log span {span}"
                )
        object.__setattr__(self, "outage_windows", windows)


@dataclass(frozen=True)
class WeightSchedule:
    w1_normal: float = 1.0     # position
    w2_normal: float = 5.0     # acceleration
    w1_outage: float = 0.0
    w2_outage: float = 10.0

    def __post_init__(self):
        for name in ("w1_normal", "w2_normal", "w1_outage", "w2_outage"):
            if getattr(self, name) < 0.0:
                raise ValidationError(f"{name} must be non-negative")


@dataclass(frozen=True)
class ReconstructionVariables:
    x0: float
    y0: float
    headings: np.ndarray
    speeds: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "headings", _as_float_array(self.headings, "headings"))
        object.__setattr__(self, "speeds", _as_float_array(self.speeds, "speeds"))
        if self.headings.shape != self.speeds.shape:
            raise ValidationError("headings and speeds must share one length")
        if self.headings.size < 2:
            raise ValidationError("need at least 2 samples")


@dataclass(frozen=True)
class ReconstructionSettings:
    max_iterations: int = 6000
    tolerance: float = 1e-10
    memory: int = 30                   # quasi-Newton history length
    heading_smoothness: float = 1e-6   # kept far below the data terms


@dataclass(frozen=True)
class ReconstructionResult:
    profile: MotionProfile
    variables: ReconstructionVariables
    cost: float
    j_gps: float
    j_imu: float
    j_smooth: float
    converged: bool
    iterations: int
    imu_shift: float
    shift_warning: bool
    energy_reduction_percent: float
    grid_time: np.ndarray = field(repr=False, default=None)


def in_outage(times: np.ndarray, windows) -> np.ndarray:
    mask = np.zeros(times.shape, dtype=bool)
    for a, b in windows:
        mask |= (times >= a) & (times <= b)
    return mask


@dataclass(frozen=True)
class _Grid:
    t: np.ndarray
    gx: np.ndarray
    gy: np.ndarray
    iax: np.ndarray     # per-step IMU means, length N-1 (see _resample)
    iay: np.ndarray
    w1: np.ndarray      # per-sample position weights, length N
    w2: np.ndarray      # per-segment acceleration weights, length N-1
    ts: float


def _window_mean(src_t: np.ndarray, src_v: np.ndarray, t: np.ndarray,
                 half: float) -> np.ndarray:
    """Average source samples inside [t-half, t+half] around each grid time.

    Plain anti-aliasing decimation for a stream sampled faster than the
    grid; grid times with no source sample in the window fall back to
    linear interpolation.
    """
    lo = np.searchsorted(src_t, t - half, side="left")
    hi = np.searchsorted(src_t, t + half, side="right")
    csum = np.concatenate([[0.0], np.cumsum(src_v)])
    count = hi - lo
    out = (csum[hi] - csum[lo]) / np.maximum(count, 1)
    empty = count == 0
    if np.any(empty):
        out[empty] = np.interp(t[empty], src_t, src_v)
    return out


def _resample(log: SensorLog, schedule: WeightSchedule) -> _Grid:
    ts = log.sample_time
    t0 = max(log.gps_t[0], log.imu_t[0])
    t1 = min(log.gps_t[-1], log.imu_t[-1])
    if t1 - t0 <= 0.0:
        raise ValidationError("GPS and IMU streams do not overlap in time")
    n = int(np.floor((t1 - t0) / ts + 1e-9)) + 1
    t = t0 + ts * np.arange(n)

    gx = np.interp(t, log.gps_t, log.gps_x)
    gy = np.interp(t, log.gps_t, log.gps_y)
    # Timing convention.  The rectangle-rule position update is midpoint
    # accurate when state k is read as living at t_k + Ts/2, which keeps
    # the GPS targets at the plain grid times.  The speed difference
    # (v_{k+1} - v_k)/Ts is then the acceleration at t_{k+1}, so the IMU
    # target for step k is the stream averaged around t_{k+1}.  Sampling
    # it at t_k instead skews every timing estimate, the IMU clock
    # offset included, by up to a full step.
    tm = t[1:]
    iax = _window_mean(log.imu_t, log.imu_ax, tm, 0.5 * ts)
    iay = _window_mean(log.imu_t, log.imu_ay, tm, 0.5 * ts)

    # A grid sample inherits invalidity from any invalid neighbour so
    # interpolated positions never mix in bad fixes.
    valid = np.interp(t, log.gps_t, log.gps_valid.astype(float)) > 1.0 - 1e-9
    outage = in_outage(t, log.outage_windows)
    w1 = np.where(outage, schedule.w1_outage, schedule.w1_normal)
    w1 = np.where(valid, w1, 0.0)
    w2 = np.where(outage[:-1], schedule.w2_outage, schedule.w2_normal)
    return _Grid(t=t, gx=gx, gy=gy, iax=iax, iay=iay, w1=w1, w2=w2, ts=ts)


def _gaussian_smooth(x: np.ndarray, sigma_samples: float) -> np.ndarray:
    if sigma_samples <= 0.0 or x.size < 3:
        return x
    half = int(np.ceil(4.0 * sigma_samples))
    k = np.exp(-0.5 * (np.arange(-half, half + 1) / sigma_samples) ** 2)
    k /= k.sum()
    pad = np.concatenate([np.full(half, x[0]), x, np.full(half, x[-1])])
    return np.convolve(pad, k, mode="valid")


def align_imu(log: SensorLog, max_shift: float = 0.2,
              schedule: "WeightSchedule | None" = None) -> SensorLog:
    """Estimate and remove the IMU clock lag against the GPS stream.

    Registers the streams by the fit itself: the weighted reconstruction
    cost, minimized over candidate shifts, bottoms out where the
    acceleration history and the position history tell the same story.
    A mistimed yaw event displaces the whole post-turn trajectory, so
    the cost curve is sharp in the shift even when metre-level GPS noise
    drowns any direct acceleration-versus-acceleration correlation.

    Each solve can land in a slightly different local basin, which makes
    the per-shift costs wiggle by more than the curvature that separates
    neighbouring shifts.  A coarse scan localizes the minimum and a
    least-squares parabola over a fine scan reads off its vertex; both
    scans start every solve from one shared initialization so no
    candidate inherits a more refined iterate than the others.  A
    minimum at the bracket edge, or a flat or non-convex cost curve,
    sets a warning flag and the best scanned shift is applied anyway.
    """
    if schedule is None:
        schedule = WeightSchedule()
    settings = ReconstructionSettings(max_iterations=2000, tolerance=1e-8)

    # one sample grid for every candidate shift, so the per-shift costs
    # sum over identical samples and stay directly comparable
    ts = log.sample_time
    t0 = max(log.gps_t[0], log.imu_t[0] + max_shift)
    t1 = min(log.gps_t[-1], log.imu_t[-1] - max_shift)
    if t1 - t0 < 5.0:
        raise ValidationError("streams too short to estimate the IMU lag")
    n = int(np.floor((t1 - t0) / ts + 1e-9)) + 1
    t = t0 + ts * np.arange(n)
    gx = np.interp(t, log.gps_t, log.gps_x)
    gy = np.interp(t, log.gps_t, log.gps_y)
    valid = np.interp(t, log.gps_t, log.gps_valid.astype(float)) > 1.0 - 1e-9

    # Registration ranks shifts by cost differences three orders below
    # the noise floor, and metre-level position noise tilts them.  The
    # targets are pre-smoothed for this phase only; whatever trajectory
    # bias that adds is the same for every candidate shift and cancels.
    # Invalid stretches are bridged first so frozen fixes cannot bleed
    # into valid neighbours.
    good = valid
    if 2 <= np.count_nonzero(good) < n:
        gx = np.interp(t, t[good], gx[good])
        gy = np.interp(t, t[good], gy[good])
    gx = _gaussian_smooth(gx, 0.25 / ts)
    gy = _gaussian_smooth(gy, 0.25 / ts)

    outage = in_outage(t, log.outage_windows)
    w1 = np.where(outage, schedule.w1_outage, schedule.w1_normal)
    w1 = np.where(valid, w1, 0.0)
    w2 = np.where(outage[:-1], schedule.w2_outage, schedule.w2_normal)
    tm = t[1:]                       # step targets live at t_{k+1}

    def cost_at(shift: float, theta0: np.ndarray) -> float:
        # same idea on the acceleration side: damp the vibration leak
        # that aliases through decimation, keep the sub-hertz ramps that
        # actually carry the timing
        grid = _Grid(
            t=t, gx=gx, gy=gy,
            iax=_gaussian_smooth(
                _window_mean(log.imu_t - shift, log.imu_ax, tm, 0.5 * ts),
                0.15 / ts),
            iay=_gaussian_smooth(
                _window_mean(log.imu_t - shift, log.imu_ay, tm, 0.5 * ts),
                0.15 / ts),
            w1=w1, w2=w2, ts=ts,
        )
        res = minimize(
            _cost_and_grad, theta0, args=(grid, settings.heading_smoothness),
            jac=True, method="L-BFGS-B", bounds=_variable_bounds(n),
            options={"maxiter": settings.max_iterations,
                     "maxcor": settings.memory,
                     "gtol": settings.tolerance, "ftol": 1e-14},
        )
        return float(res.fun)

    init_grid = _Grid(
        t=t, gx=gx, gy=gy,
        iax=_window_mean(log.imu_t, log.imu_ax, tm, 0.5 * ts),
        iay=_window_mean(log.imu_t, log.imu_ay, tm, 0.5 * ts),
        w1=w1, w2=w2, ts=ts,
    )
    theta_common = _pack(initialize_from_gps(init_grid))
    coarse = np.linspace(-max_shift, max_shift, 5)
    costs = np.array([cost_at(s, theta_common) for s in coarse])
    k = int(np.argmin(costs))
    spread = float(np.max(costs) - np.min(costs))
    degenerate = not np.isfinite(spread) or \
        spread <= 1e-6 * max(1.0, abs(float(np.min(costs))))
    edge = k == 0 or k == len(coarse) - 1

    if degenerate:
        shift, warning = 0.0, True
    elif edge:
        shift, warning = float(coarse[k]), True
    else:
        fine = float(coarse[k]) + np.linspace(-0.06, 0.06, 11)
        fine = fine[(fine >= -max_shift) & (fine <= max_shift)]
        fine_costs = np.array([cost_at(s, theta_common) for s in fine])
        quad = np.polyfit(fine, fine_costs, 2)
        if quad[0] > 0.0:
            vertex = -0.5 * quad[1] / quad[0]
            shift = float(np.clip(vertex, fine[0], fine[-1]))
            warning = False
        else:
            shift = float(fine[int(np.argmin(fine_costs))])
            warning = True
    return replace(
        log,
        imu_t=log.imu_t - shift,
        imu_shift=log.imu_shift + shift,
        shift_warning=bool(warning),
    )


def predict_motion(variables: ReconstructionVariables, ts: float):
    """Forward-Euler rollout: positions (N, 2) and body accels (N-1 each)."""
    psi, v = variables.headings, variables.speeds
    fs = 1.0 / ts
    x = variables.x0 + ts * np.concatenate([[0.0], np.cumsum(v[:-1] * np.cos(psi[:-1]))])
    y = variables.y0 + ts * np.concatenate([[0.0], np.cumsum(v[:-1] * np.sin(psi[:-1]))])
    ax = np.diff(v) * fs
    ay = v[:-1] * np.diff(psi) * fs
    return np.column_stack([x, y]), ax, ay


def _cost_terms(variables: ReconstructionVariables, grid: _Grid,
                smoothness: float):
    pos, ax, ay = predict_motion(variables, grid.ts)
    rx = pos[:, 0] - grid.gx
    ry = pos[:, 1] - grid.gy
    rax = ax - grid.iax
    ray = ay - grid.iay
    j_gps = float(np.sum(grid.w1 * (rx ** 2 + ry ** 2)))
    j_imu = float(np.sum(grid.w2 * (rax ** 2 + ray ** 2)))
    dpsi = np.diff(variables.headings)
    j_smooth = float(smoothness * np.sum(dpsi ** 2))
    return j_gps, j_imu, j_smooth


def reconstruction_cost(variables: ReconstructionVariables, log: SensorLog,
                        schedule: WeightSchedule | None = None,
                        smoothness: float = 0.0) -> float:
    """Weighted position + acceleration error; weights already folded in."""
    if schedule is None:
        schedule = WeightSchedule()
    grid = _resample(log, schedule)
    if variables.headings.size != grid.t.size:
        raise ValidationError(
            f"variable grid length {variables.headings.size} does not match "
            f"resampled log length {grid.t.size}"
        )
    return float(sum(_cost_terms(variables, grid, smoothness)))


def _pack(variables: ReconstructionVariables) -> np.ndarray:
    return np.concatenate([[variables.x0, variables.y0],
                           variables.headings, variables.speeds])


def _variable_bounds(n: int) -> list:
    # forward travel only; a negative speed flips the heading meaning and
    # opens mirror-image basins the optimizer can fall into
    return [(None, None)] * (2 + n) + [(0.0, None)] * n


def _unpack(theta: np.ndarray, n: int) -> ReconstructionVariables:
    return ReconstructionVariables(
        x0=float(theta[0]), y0=float(theta[1]),
        headings=theta[2:2 + n], speeds=theta[2 + n:],
    )


def _cost_and_grad(theta: np.ndarray, grid: _Grid, smoothness: float):
    n = grid.t.size
    ts = grid.ts
    fs = 1.0 / ts
    psi = theta[2:2 + n]
    v = theta[2 + n:]
    cpsi = np.cos(psi[:-1])
    spsi = np.sin(psi[:-1])
    x = theta[0] + ts * np.concatenate([[0.0], np.cumsum(v[:-1] * cpsi)])
    y = theta[1] + ts * np.concatenate([[0.0], np.cumsum(v[:-1] * spsi)])
    dv = np.diff(v)
    dpsi = np.diff(psi)
    ax = dv * fs
    ay = v[:-1] * dpsi * fs

    rx = x - grid.gx
    ry = y - grid.gy
    rax = ax - grid.iax
    ray = ay - grid.iay
    cost = (np.sum(grid.w1 * (rx ** 2 + ry ** 2))
            + np.sum(grid.w2 * (rax ** 2 + ray ** 2))
            + smoothness * np.sum(dpsi ** 2))

    gx_r = 2.0 * grid.w1 * rx
    gy_r = 2.0 * grid.w1 * ry
    # position k depends on v_j, psi_j for all j < k: reverse cumulative sums
    cx = np.cumsum(gx_r[::-1])[::-1]
    cy = np.cumsum(gy_r[::-1])[::-1]
    tail_x = np.concatenate([cx[1:], [0.0]])[:-1]   # sum over k > j, j = 0..n-2
    tail_y = np.concatenate([cy[1:], [0.0]])[:-1]

    g_psi = np.zeros(n)
    g_v = np.zeros(n)
    g_psi[:-1] += ts * (-v[:-1] * spsi * tail_x + v[:-1] * cpsi * tail_y)
    g_v[:-1] += ts * (cpsi * tail_x + spsi * tail_y)

    gax = 2.0 * grid.w2 * rax
    gay = 2.0 * grid.w2 * ray
    g_v[1:] += gax * fs
    g_v[:-1] += -gax * fs
    g_v[:-1] += gay * dpsi * fs
    g_psi[1:] += gay * v[:-1] * fs
    g_psi[:-1] += -gay * v[:-1] * fs

    g_psi[1:] += 2.0 * smoothness * dpsi
    g_psi[:-1] += -2.0 * smoothness * dpsi

    grad = np.concatenate([[float(np.sum(gx_r)), float(np.sum(gy_r))],
                           g_psi, g_v])
    return float(cost), grad


def initialize_from_gps(grid: _Grid) -> ReconstructionVariables:
    # bridge zero-weight stretches (outages, dropped fixes) so the
    # initial speeds stay finite there; a near-zero initial speed kills
    # the heading gradient and strands the optimizer
    good = grid.w1 > 0.0
    if np.count_nonzero(good) >= 2:
        gx = np.interp(grid.t, grid.t[good], grid.gx[good])
        gy = np.interp(grid.t, grid.t[good], grid.gy[good])
    else:
        gx, gy = grid.gx, grid.gy
    # differencing raw metre-level fixes gives near-random headings, a
    # hopeless starting basin; smooth over ~0.7 s first
    smooth = 0.7 / grid.ts
    gx = _gaussian_smooth(gx, smooth)
    gy = _gaussian_smooth(gy, smooth)
    dx = np.diff(gx)
    dy = np.diff(gy)
    psi = np.unwrap(np.arctan2(dy, dx))
    psi = np.concatenate([psi, psi[-1:]])
    v = np.hypot(dx, dy) / grid.ts
    v = np.concatenate([v, v[-1:]])

    # dead-reckon through each zero-weight gap on the IMU stream; the
    # straight GPS bridge puts the optimizer in the wrong basin when the
    # road bends inside an outage
    bad = ~good
    n = grid.t.size
    i = 0
    while i < n:
        if not bad[i] or i == 0:
            i += 1
            continue
        j = i
        while j < n and bad[j]:
            j += 1
        psi_dr = psi[i - 1]
        v_dr = v[i - 1]
        track_psi = np.empty(j - i)
        track_v = np.empty(j - i)
        for k in range(i, j):
            psi_dr += grid.iay[k - 1] / max(v_dr, 1.0) * grid.ts
            v_dr += grid.iax[k - 1] * grid.ts
            track_psi[k - i] = psi_dr
            track_v[k - i] = v_dr
        if j < n:
            # spread the terminal mismatch against the post-gap GPS
            # linearly so both seams stay continuous
            dpsi = psi[j] - psi_dr
            dpsi = (dpsi + np.pi) % (2.0 * np.pi) - np.pi
            dv = v[j] - v_dr
            frac = np.arange(1, j - i + 1) / (j - i + 1)
            track_psi = track_psi + frac * dpsi
            track_v = track_v + frac * dv
            # keep the post-gap chord headings on the same branch
            psi[j:] += (psi_dr + dpsi) - psi[j]
        psi[i:j] = track_psi
        v[i:j] = np.maximum(track_v, 0.1)
        i = j
    return ReconstructionVariables(
        x0=float(gx[0]), y0=float(gy[0]), headings=psi, speeds=v
    )


def reconstruct(log: SensorLog, schedule: WeightSchedule | None = None,
                settings: ReconstructionSettings | None = None) -> ReconstructionResult:
    """Fit headings and speeds to the sensor streams.

    Starts from GPS finite differences and minimizes the weighted error
    with L-BFGS.  The energy-reduction diagnostic compares the squared
    reconstructed accelerations against the raw IMU stream at its native
    rate, so noise and vibration beyond the grid band count against the
    raw signal.
    """
    if schedule is None:
        schedule = WeightSchedule()
    if settings is None:
        settings = ReconstructionSettings()
    grid = _resample(log, schedule)
    if grid.t[-1] - grid.t[0] < 5.0:
        raise ValidationError(
            f"need at least 5 s of overlapping data, got {grid.t[-1] - grid.t[0]:.2f} s"
        )
    init = initialize_from_gps(grid)
    theta0 = _pack(init)
    n = grid.t.size

    last = {"f": np.inf}
    history = []

    def wrapped(theta):
        f, g = _cost_and_grad(theta, grid, settings.heading_smoothness)
        last["f"] = f
        return f, g

    res = minimize(
        wrapped, theta0,
        jac=True, method="L-BFGS-B", bounds=_variable_bounds(n),
        callback=lambda xk: history.append(last["f"]),
        options={"maxiter": settings.max_iterations,
                 "maxfun": 10 * settings.max_iterations,
                 "maxcor": settings.memory,
                 "gtol": settings.tolerance, "ftol": 1e-16},
    )
    # a line search that dies at the float64 floor still counts as done
    # when the cost has stopped moving
    flat = len(history) >= 6 and (
        abs(history[-6] - history[-1]) <= 1e-10 * max(1.0, abs(history[-1]))
    )
    variables = _unpack(res.x, n)
    j_gps, j_imu, j_smooth = _cost_terms(variables, grid, settings.heading_smoothness)
    pos, ax, ay = predict_motion(variables, grid.ts)
    profile = MotionProfile(
        points=pos,
        speeds=variables.speeds,
        segment_time_steps=np.full(n - 1, grid.ts),
        ax=ax,
        ay=ay,
        total_time=(n - 1) * grid.ts,
    )
    # raw energy at the native IMU rate over the fitted span, so noise and
    # vibration above the grid band count against the raw stream
    energy_recon = float(np.sum((ax ** 2 + ay ** 2) * grid.ts))
    span = (log.imu_t >= grid.t[0]) & (log.imu_t <= grid.t[-1])
    dt_imu = float(np.median(np.diff(log.imu_t)))
    energy_raw = float(
        np.sum(log.imu_ax[span] ** 2 + log.imu_ay[span] ** 2) * dt_imu
    )
    reduction = (100.0 * (energy_raw - energy_recon) / energy_raw
                 if energy_raw > 0.0 else 0.0)
    return ReconstructionResult(
        profile=profile,
        variables=variables,
        cost=j_gps + j_imu + j_smooth,
        j_gps=j_gps,
        j_imu=j_imu,
        j_smooth=j_smooth,
        converged=bool(res.success or flat),
        iterations=int(res.nit),
        imu_shift=log.imu_shift,
        shift_warning=log.shift_warning,
        energy_reduction_percent=reduction,
        grid_time=grid.t,
    )


def validate_run(profile: MotionProfile, min_speed: float = 5.0):
    """Flag runs whose speed never clears the threshold (strictly over)."""
    reasons = []
    slowest = float(np.min(profile.speeds))
    if not slowest > min_speed:
        reasons.append(
            f"min speed {slowest:.2f} m/s not over threshold {min_speed:.2f} m/s"
        )
    return len(reasons) == 0, reasons


GPS_HEADER = ["t", "x", "y", "valid"]
IMU_HEADER = ["t", "ax", "ay"]


def save_sensor_log(log: SensorLog, gps_path, imu_path, outage_path=None):
    with open(gps_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(GPS_HEADER)
        for t, x, y, ok in zip(log.gps_t, log.gps_x, log.gps_y, log.gps_valid):
            w.writerow([f"{t:.9g}", f"{x:.9g}", f"{y:.9g}", int(ok)])
    with open(imu_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(IMU_HEADER)
        for t, ax, ay in zip(log.imu_t, log.imu_ax, log.imu_ay):
            w.writerow([f"{t:.9g}", f"{ax:.9g}", f"{ay:.9g}"])
    if outage_path is not None:
        payload = {
            "outage_windows": [list(w) for w in log.outage_windows],
            "sample_time_s": log.sample_time,
        }
        with open(outage_path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _read_csv(path, header):
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from exc
    if not rows or rows[0] != header:
        raise ValidationError(
            f"{path}: expected header {','.join(header)}"
        )
    try:
        return np.array([[float(v) for v in row] for row in rows[1:]])
    except ValueError as exc:
        raise ValidationError(f"{path}: non-numeric cell ({exc})") from exc


def load_sensor_log(gps_path, imu_path, outage_path=None) -> SensorLog:
    gps = _read_csv(gps_path, GPS_HEADER)
    imu = _read_csv(imu_path, IMU_HEADER)
    if gps.size == 0 or imu.size == 0:
        raise ValidationError("sensor CSV files must contain data rows")
    windows = ()
    sample_time = None
    if outage_path is not None:
        try:
            with open(outage_path) as fh:
                side = json.load(fh)
        except OSError as exc:
            raise ValidationError(f"cannot read {outage_path}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{outage_path}: invalid JSON ({exc})") from exc
        windows = tuple(tuple(w) for w in side.get("outage_windows", []))
        sample_time = side.get("sample_time_s")
    if sample_time is None:
        sample_time = float(np.median(np.diff(gps[:, 0])))
    return SensorLog(
        gps_t=gps[:, 0], gps_x=gps[:, 1], gps_y=gps[:, 2],
        gps_valid=gps[:, 3] > 0.5,
        imu_t=imu[:, 0], imu_ax=imu[:, 1], imu_ay=imu[:, 2],
        sample_time=float(sample_time),
        outage_windows=windows,
    )
