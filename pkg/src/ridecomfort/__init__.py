"""Comfort-oriented vehicle motion: planning, reconstruction, comparison.

The package plans speed and path through a lane corridor under two
comfort objectives (raw acceleration energy, or the same energy weighted
by a motion-sickness band-pass filter), reconstructs motion states from
noisy GPS and IMU logs, and scores recorded runs against time-matched
optimal plans.
"""

from .errors import (
    BracketError,
    ComparabilityError,
    DegenerateSegmentError,
    DimensionError,
    DomainError,
    ResolutionError,
    RideComfortError,
    RouteFormatError,
    ValidationError,
)
from .kinematics import (
    MotionProfile,
    evaluate_motion,
    profile_from_csv,
    profile_from_waypoints,
    profile_to_csv,
    resample_uniform,
)
from .metrics import (
    ComparisonReport,
    band_energy,
    build_report,
    deficiency,
    iso_discomfort_contours,
    psd,
)
from .objectives import ObjectiveConfig, comfort_ma, comfort_ms, planner_cost
from .planner import (
    MatchResult,
    PlanProblem,
    PlanResult,
    SolverSettings,
    match_travel_time,
    pareto_sweep,
    solve_plan,
)
from .reconstruction import (
    ReconstructionResult,
    ReconstructionSettings,
    SensorLog,
    WeightSchedule,
    align_imu,
    load_sensor_log,
    reconstruct,
    reconstruction_cost,
    save_sensor_log,
    validate_run,
)
from .route import MotionPlan, RouteCorridor, load_route, save_route
from .sickness import FilterSpec, SicknessFilter, filter_sequence, transfer_function

__version__ = "0.1.0"

__all__ = [
    "BracketError",
    "ComparabilityError",
    "ComparisonReport",
    "DegenerateSegmentError",
    "DimensionError",
    "DomainError",
    "FilterSpec",
    "MatchResult",
    "MotionPlan",
    "MotionProfile",
    "ObjectiveConfig",
    "PlanProblem",
    "PlanResult",
    "ReconstructionResult",
    "ReconstructionSettings",
    "ResolutionError",
    "RideComfortError",
    "RouteCorridor",
    "RouteFormatError",
    "SensorLog",
    "SicknessFilter",
    "SolverSettings",
    "ValidationError",
    "WeightSchedule",
    "align_imu",
    "band_energy",
    "build_report",
    "comfort_ma",
    "comfort_ms",
    "deficiency",
    "evaluate_motion",
    "filter_sequence",
    "iso_discomfort_contours",
    "load_route",
    "load_sensor_log",
    "match_travel_time",
    "pareto_sweep",
    "planner_cost",
    "profile_from_csv",
    "profile_from_waypoints",
    "profile_to_csv",
    "psd",
    "reconstruct",
    "reconstruction_cost",
    "resample_uniform",
    "save_route",
    "save_sensor_log",
    "solve_plan",
    "transfer_function",
    "validate_run",
]
