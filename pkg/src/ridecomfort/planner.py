"""Box-constrained planner over lateral offsets and speeds.

The decision vector stacks one lateral offset and one speed per station;
the only constraints are the per-station boxes, with the initial speed
pinned by collapsing its bounds.  Solved with L-BFGS-B from a lane-center
initial guess plus a few perturbed restarts.  Gradients are analytic:
the kinematic chain (offsets/speeds -> segment distances, time steps,
accelerations) is differentiated in closed form, and the MS variant
backpropagates through the filter recursion including the step-time
dependence of the discretization matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import minimize

from .errors import BracketError, ValidationError
from .kinematics import (
    MotionProfile,
    SegmentKinematics,
    profile_from_waypoints,
    segment_kinematics,
)
from .objectives import ObjectiveConfig, comfort_term
from .route import MotionPlan, RouteCorridor, check_plan_bounds
from .sickness import SicknessFilter, weighted_energy_with_grad

CURVATURE_FLOOR = 1e-6       # 1/m, avoids division by zero on straights
LATERAL_ACCEL_REF = 2.0      # m/s^2, comfortable lateral accel for the guess


@dataclass(frozen=True)
class SolverSettings:
    tolerance: float = 1e-8          # projected-gradient infinity norm
    max_iterations: int = 3000
    restarts: int = 3
    perturbation: float = 0.2        # restart jitter, fraction of box width
    seed: int = 0


@dataclass(frozen=True)
class PlanProblem:
    corridor: RouteCorridor
    objective: ObjectiveConfig
    initial_speed: float
    settings: SolverSettings = SolverSettings()

    def __post_init__(self):
        v_lo, v_hi = self.corridor.v_bounds
        if not (v_lo[0] <= self.initial_speed <= v_hi[0]):
            raise ValidationError(
                f"initial speed {self.initial_speed} outside station-0 bounds "
                f"[{v_lo[0]}, {v_hi[0]}]"
            )


@dataclass(frozen=True)
class PlanResult:
    plan: MotionPlan
    profile: MotionProfile
    cost: float
    comfort: float
    travel_time: float
    converged: bool
    iterations: int


@dataclass(frozen=True)
class MatchResult:
    """Outcome of the travel-time weight bisection."""

    result: PlanResult
    time_weight: float
    matched: bool
    iterations: int
    target_time: float


def station_curvature(corridor: RouteCorridor) -> np.ndarray:
    """Center-polyline curvature per station, endpoints copied inward."""
    centers = corridor.centers
    h = np.diff(centers, axis=0)
    d = np.hypot(h[:, 0], h[:, 1])
    cross = h[:-1, 0] * h[1:, 1] - h[:-1, 1] * h[1:, 0]
    dot = np.sum(h[:-1] * h[1:], axis=1)
    dpsi = np.arctan2(cross, dot)
    kappa = np.zeros(len(corridor))
    kappa[1:-1] = dpsi / (0.5 * (d[:-1] + d[1:]))
    kappa[0] = kappa[1]
    kappa[-1] = kappa[-2]
    return kappa


def initialize_guess(problem: PlanProblem) -> MotionPlan:
    """Lane-center offsets with curvature-limited speeds.

    Speeds target LATERAL_ACCEL_REF of lateral acceleration on the center
    line, clipped into the speed box; the initial speed is pinned.
    """
    corridor = problem.corridor
    kappa = np.abs(station_curvature(corridor))
    v = np.sqrt(LATERAL_ACCEL_REF / np.maximum(kappa, CURVATURE_FLOOR))
    v_lo, v_hi = corridor.v_bounds
    v = np.clip(v, v_lo, v_hi)
    v[0] = problem.initial_speed
    return MotionPlan(lateral_offsets=np.zeros(len(corridor)), speeds=v)


def _kinematics_vjp(seg: SegmentKinematics, v: np.ndarray, normals: np.ndarray,
                    g_ax: np.ndarray, g_ay: np.ndarray, g_dt: np.ndarray):
    """Pull gradients w.r.t. (ax, ay, dt) back to (offsets, speeds)."""
    m = seg.d.shape[0]
    g_v = np.zeros(v.shape[0])
    g_d = np.zeros(m)
    g_h = np.zeros((m, 2))

    if m > 1:
        # ay_k = mean_v_k^2 * dpsi_k / d_k for k < m-1 (last entry is zero)
        mv = seg.mean_v[:-1]
        gay = g_ay[:-1]
        gm = gay * 2.0 * mv * seg.dpsi / seg.d[:-1]
        g_v[: m - 1] += 0.5 * gm
        g_v[1:m] += 0.5 * gm
        g_dpsi = gay * mv ** 2 / seg.d[:-1]
        g_d[:-1] += -gay * seg.ay[:-1] / seg.d[:-1]

        denom = seg.cross ** 2 + seg.dot ** 2
        g_cross = g_dpsi * seg.dot / denom
        g_dot = -g_dpsi * seg.cross / denom
        hx, hy = seg.h[:, 0], seg.h[:, 1]
        g_h[:-1, 0] += g_cross * hy[1:] + g_dot * hx[1:]
        g_h[:-1, 1] += -g_cross * hx[1:] + g_dot * hy[1:]
        g_h[1:, 0] += -g_cross * hy[:-1] + g_dot * hx[:-1]
        g_h[1:, 1] += g_cross * hx[:-1] + g_dot * hy[:-1]

    # ax_k = (v_{k+1}^2 - v_k^2) / (2 d_k)
    g_v[1:] += g_ax * v[1:] / seg.d
    g_v[:-1] += -g_ax * v[:-1] / seg.d
    g_d += -g_ax * seg.ax / seg.d

    # dt_k = 2 d_k / (v_k + v_{k+1})
    vsum = 2.0 * seg.mean_v
    g_d += g_dt * 2.0 / vsum
    g_sv = -g_dt * seg.dt / vsum
    g_v[:-1] += g_sv
    g_v[1:] += g_sv

    g_h += (g_d / seg.d)[:, None] * seg.h
    g_p = np.zeros((v.shape[0], 2))
    g_p[1:] += g_h
    g_p[:-1] -= g_h
    g_y = np.sum(g_p * normals, axis=1)
    return g_y, g_v


def plan_cost_and_grad(corridor: RouteCorridor, objective: ObjectiveConfig,
                       x: np.ndarray, filt: SicknessFilter | None = None):
    """Planner cost and its gradient w.r.t. the stacked (offsets, speeds)."""
    n = len(corridor)
    y, v = x[:n], x[n:]
    points = corridor.centers + y[:, None] * corridor.lateral_axes
    seg = segment_kinematics(points, v)
    w = objective.time_weight

    if objective.variant == "ma":
        cost = float(np.sum((seg.ax ** 2 + seg.ay ** 2 + w) * seg.dt))
        g_ax = 2.0 * seg.ax * seg.dt
        g_ay = 2.0 * seg.ay * seg.dt
        g_dt = seg.ax ** 2 + seg.ay ** 2 + w
    else:
        if filt is None:
            filt = SicknessFilter(objective.filter_spec)
        energy, g_ax, g_ay, g_dt = weighted_energy_with_grad(
            filt, seg.ax, seg.ay, seg.dt, objective.cooldown
        )
        cost = energy + w * float(np.sum(seg.dt))
        g_dt = g_dt + w

    g_y, g_v = _kinematics_vjp(seg, v, corridor.lateral_axes, g_ax, g_ay, g_dt)
    return cost, np.concatenate([g_y, g_v])


def _bounds_arrays(problem: PlanProblem):
    y_lo, y_hi = problem.corridor.y_bounds
    v_lo, v_hi = problem.corridor.v_bounds
    v_lo = v_lo.copy()
    v_hi = v_hi.copy()
    v_lo[0] = v_hi[0] = problem.initial_speed  # equality pin by bound collapse
    lo = np.concatenate([y_lo, v_lo])
    hi = np.concatenate([y_hi, v_hi])
    return lo, hi


def _projected_gradient_inf(x, g, lo, hi, atol=1e-12):
    pg = g.copy()
    pg[(x <= lo + atol) & (g > 0.0)] = 0.0
    pg[(x >= hi - atol) & (g < 0.0)] = 0.0
    return float(np.max(np.abs(pg)))


def solve_plan(problem: PlanProblem, initial_plan: MotionPlan | None = None) -> PlanResult:
    """Minimize the planner cost over the box, never returning a point
    worse than the initial guess.

    Runs one descent from the guess plus `settings.restarts` perturbed
    restarts and keeps the best.  Deterministic for fixed settings.
    """
    corridor = problem.corridor
    objective = problem.objective
    settings = problem.settings
    filt = SicknessFilter(objective.filter_spec) if objective.variant == "ms" else None
    lo, hi = _bounds_arrays(problem)
    bounds = list(zip(lo, hi))

    guess = initial_plan if initial_plan is not None else initialize_guess(problem)
    x_guess = np.clip(
        np.concatenate([guess.lateral_offsets, guess.speeds]), lo, hi
    )

    fun = lambda x: plan_cost_and_grad(corridor, objective, x, filt)
    cost_guess = fun(x_guess)[0]

    rng = np.random.default_rng(settings.seed)
    starts = [x_guess]
    width = hi - lo
    for _ in range(settings.restarts):
        jitter = rng.uniform(-1.0, 1.0, x_guess.shape) * settings.perturbation * width
        starts.append(np.clip(x_guess + jitter, lo, hi))

    best_x, best_cost, best_converged, best_iters = x_guess, cost_guess, False, 0
    for x0 in starts:
        history = []
        res = minimize(
            fun, x0, jac=True, method="L-BFGS-B", bounds=bounds,
            callback=lambda xk: history.append(fun(xk)[0]),
            options={
                "maxiter": settings.max_iterations,
                "gtol": settings.tolerance,
                "ftol": 1e-14,
            },
        )
        cost_k, grad_k = fun(res.x)
        pg = _projected_gradient_inf(res.x, grad_k, lo, hi)
        flat = len(history) >= 6 and (
            history[-6] - history[-1] <= 1e-10 * max(1.0, abs(history[-1]))
        )
        converged_k = pg < settings.tolerance or flat or bool(res.success)
        if cost_k < best_cost or (cost_k == best_cost and converged_k and not best_converged):
            best_x, best_cost = res.x, cost_k
            best_converged, best_iters = converged_k, int(res.nit)

    x_final = np.clip(best_x, lo, hi)
    n = len(corridor)
    plan = MotionPlan(lateral_offsets=x_final[:n], speeds=x_final[n:])
    check_plan_bounds(corridor, plan)
    points = corridor.centers + plan.lateral_offsets[:, None] * corridor.lateral_axes
    profile = profile_from_waypoints(points, plan.speeds)
    comfort = comfort_term(profile, objective)
    travel_time = profile.total_time
    return PlanResult(
        plan=plan,
        profile=profile,
        cost=comfort + objective.time_weight * travel_time,
        comfort=comfort,
        travel_time=travel_time,
        converged=best_converged,
        iterations=best_iters,
    )


LOG_W_BRACKET = (-3.0, 3.0)
MAX_BISECTIONS = 40


def match_travel_time(corridor: RouteCorridor, objective: ObjectiveConfig,
                      initial_speed: float, target_time: float,
                      time_tolerance: float = 0.5,
                      settings: SolverSettings | None = None) -> MatchResult:
    """Bisect on log10 of the time weight until travel time hits the target.

    Travel time decreases as the weight grows; targets outside the bracket
    endpoints raise BracketError carrying the achievable range.  Interior
    solves warm-start from the previous solution, so a single restart
    suffices per solve.
    """
    if settings is None:
        settings = SolverSettings(restarts=1)

    def solve_at(log_w, warm):
        problem = PlanProblem(
            corridor, objective.with_time_weight(10.0 ** log_w),
            initial_speed, settings,
        )
        return solve_plan(problem, initial_plan=warm)

    lo_log, hi_log = LOG_W_BRACKET
    slow = solve_at(lo_log, None)       # comfort-dominated, longest time
    fast = solve_at(hi_log, slow.plan)  # time-dominated, shortest time
    t_slow, t_fast = slow.travel_time, fast.travel_time
    if target_time > t_slow + time_tolerance or target_time < t_fast - time_tolerance:
        raise BracketError(
            f"target {target_time:.2f} s outside achievable "
            f"[{t_fast:.2f}, {t_slow:.2f}] s for weights "
            f"10^[{lo_log}, {hi_log}]",
            achievable_range=(t_fast, t_slow),
        )
    for candidate, log_w in ((slow, lo_log), (fast, hi_log)):
        if abs(candidate.travel_time - target_time) <= time_tolerance:
            return MatchResult(candidate, 10.0 ** log_w, True, 0, target_time)

    best = min((slow, lo_log), (fast, hi_log),
               key=lambda item: abs(item[0].travel_time - target_time))
    warm = best[0].plan
    iterations = 0
    while iterations < MAX_BISECTIONS:
        iterations += 1
        mid_log = 0.5 * (lo_log + hi_log)
        mid = solve_at(mid_log, warm)
        warm = mid.plan
        if abs(mid.travel_time - target_time) < abs(best[0].travel_time - target_time):
            best = (mid, mid_log)
        if abs(mid.travel_time - target_time) <= time_tolerance:
            return MatchResult(mid, 10.0 ** mid_log, True, iterations, target_time)
        if mid.travel_time > target_time:
            lo_log = mid_log   # too slow: raise the weight
        else:
            hi_log = mid_log
    # Bracket exhausted (e.g. locally non-monotone response): report the
    # closest match found rather than failing silently.
    return MatchResult(best[0], 10.0 ** best[1], False, iterations, target_time)


def pareto_sweep(corridor: RouteCorridor, objective: ObjectiveConfig,
                 w_grid, initial_speed: float,
                 settings: SolverSettings | None = None) -> list[dict]:
    """Solve one plan per time weight; rows for the Pareto CSV."""
    if settings is None:
        settings = SolverSettings()
    rows = []
    warm = None
    for w in w_grid:
        problem = PlanProblem(corridor, objective.with_time_weight(float(w)),
                              initial_speed, settings)
        result = solve_plan(problem, initial_plan=warm)
        warm = result.plan
        rows.append(
            {
                "time_weight": float(w),
                "travel_time": result.travel_time,
                "comfort": result.comfort,
                "converged": result.converged,
            }
        )
    return rows


def solve_plan_for_settings(problem: PlanProblem, **overrides) -> PlanResult:
    """Convenience wrapper used by sweep workers (picklable entry point)."""
    if overrides:
        problem = replace(problem, settings=replace(problem.settings, **overrides))
    return solve_plan(problem)
