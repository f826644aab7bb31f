"""Scalar planner objectives: comfort terms and the time trade-off.

Two comfort variants share the structure energy = sum (ax^2 + ay^2) dt:
the minimal-acceleration (MA) variant penalizes accelerations as-is, the
motion-sickness (MS) variant penalizes the band-pass weighted
accelerations including the post-maneuver cooldown tail.  The planner
cost adds W times the travel time; W is expressed in m^2/s^3 per second
so both addends share units.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .kinematics import MotionProfile
from .sickness import (
    DEFAULT_COOLDOWN,
    FilterSpec,
    SicknessFilter,
    weighted_energy,
)

VARIANTS = ("ma", "ms")


@dataclass(frozen=True)
class ObjectiveConfig:
    variant: str = "ma"
    time_weight: float = 1.0
    filter_spec: FilterSpec = field(default_factory=FilterSpec)
    cooldown: float = DEFAULT_COOLDOWN

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValidationError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.time_weight < 0.0:
            raise ValidationError(f"time weight must be non-negative, got {self.time_weight}")

    def with_time_weight(self, w: float) -> "ObjectiveConfig":
        return ObjectiveConfig(self.variant, w, self.filter_spec, self.cooldown)


def comfort_ma(profile: MotionProfile) -> float:
    """Acceleration energy: sum (ax^2 + ay^2) dt over all segments, m^2/s^3."""
    return float(np.sum((profile.ax ** 2 + profile.ay ** 2) * profile.segment_time_steps))


def comfort_ms(profile: MotionProfile, filter_spec: FilterSpec | SicknessFilter | None = None,
               cooldown: float = DEFAULT_COOLDOWN) -> float:
    """Frequency-weighted acceleration energy including the cooldown tail.

    ax and ay pass independently through the weighting filter with the
    profile's own per-segment time steps; the two filtered energies add.
    """
    filt = filter_spec if isinstance(filter_spec, SicknessFilter) else SicknessFilter(filter_spec)
    return weighted_energy(filt, profile.ax, profile.ay, profile.segment_time_steps, cooldown)


def comfort_term(profile: MotionProfile, config: ObjectiveConfig) -> float:
    if config.variant == "ma":
        return comfort_ma(profile)
    return comfort_ms(profile, config.filter_spec, config.cooldown)


def planner_cost(profile: MotionProfile, config: ObjectiveConfig) -> float:
    """Comfort term per variant plus the weighted travel time."""
    return comfort_term(profile, config) + config.time_weight * profile.total_time


def objective_config_from_dict(raw: dict) -> ObjectiveConfig:
    """Build a config from the JSON layout {variant, time_weight, filter}."""
    kwargs = {}
    if "variant" in raw:
        kwargs["variant"] = str(raw["variant"]).lower()
    if "time_weight" in raw:
        kwargs["time_weight"] = float(raw["time_weight"])
    filt = raw.get("filter", {})
    if filt:
        kwargs["filter_spec"] = FilterSpec(
            tau1=float(filt.get("tau1_s", FilterSpec().tau1)),
            tau2=float(filt.get("tau2_s", FilterSpec().tau2)),
        )
        if "cooldown_s" in filt:
            kwargs["cooldown"] = float(filt["cooldown_s"])
    return ObjectiveConfig(**kwargs)


def objective_config_to_dict(config: ObjectiveConfig) -> dict:
    return {
        "variant": config.variant,
        "time_weight": config.time_weight,
        "filter": {
            "tau1_s": config.filter_spec.tau1,
            "tau2_s": config.filter_spec.tau2,
            "cooldown_s": config.cooldown,
        },
    }
