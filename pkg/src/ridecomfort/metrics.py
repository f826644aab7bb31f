"""Comparison statistics between recorded runs and time-matched plans.

A recorded run and an optimal plan are comparable when their travel times
agree to within TIME_MATCH_TOLERANCE; the deficiency is then the
percentage excess of the run's comfort term over the planner's.  Spectral
helpers (Welch densities and band energies) show where on the frequency
axis that excess lives, and iso-discomfort contours scale a planner
frontier by fixed factors for plotting recorded runs against it.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy import signal

from .errors import ComparabilityError, DomainError, ResolutionError, ValidationError
from .kinematics import MotionProfile, resample_uniform
from .objectives import VARIANTS, comfort_ma, comfort_ms
from .sickness import DEFAULT_COOLDOWN, FilterSpec

# runs whose travel times differ by more than this are not comparable
TIME_MATCH_TOLERANCE = 1.0

PSD_RATE = 10.0
PSD_SEGMENT_CAP = 512
PSD_MIN_DURATION = 30.0

CONTOUR_FACTORS = (1.1, 1.2, 1.5, 2.0)

AXES = ("longitudinal", "lateral")


@dataclass(frozen=True)
class ComparisonReport:
    """Energies and deficiencies for one human-vs-planner pairing.

    The weighted fields are None unless the comparison included the
    frequency-weighted objective.  Each deficiency is recomputable from
    the stored energies as (human - planner) / planner * 100.
    """

    travel_time_human: float
    travel_time_planner: float
    energy_human: float
    energy_planner: float
    deficiency_ma: float
    weighted_energy_human: Optional[float] = None
    weighted_energy_planner: Optional[float] = None
    deficiency_ms: Optional[float] = None

    def to_dict(self) -> dict:
        """Plain dict for JSON output; weighted fields only when present."""
        out = {
            "travel_time_human": self.travel_time_human,
            "travel_time_planner": self.travel_time_planner,
            "energy_human": self.energy_human,
            "energy_planner": self.energy_planner,
            "deficiency_ma": self.deficiency_ma,
        }
        if self.deficiency_ms is not None:
            out["weighted_energy_human"] = self.weighted_energy_human
            out["weighted_energy_planner"] = self.weighted_energy_planner
            out["deficiency_ms"] = self.deficiency_ms
        return out


def _require_comparable(human: MotionProfile, planner: MotionProfile) -> None:
    gap = abs(human.total_time - planner.total_time)
    if gap > TIME_MATCH_TOLERANCE:
        raise ComparabilityError(
            f"travel times differ by {gap:.3f} s "
            f"(human {human.total_time:.3f}, planner {planner.total_time:.3f}); "
            f"deficiency needs time-matched inputs within {TIME_MATCH_TOLERANCE} s"
        )


def _excess_percent(human_term: float, planner_term: float) -> float:
    if planner_term <= 0.0:
        raise DomainError(
            f"planner comfort term is {planner_term}; percentage excess undefined"
        )
    return (human_term - planner_term) / planner_term * 100.0


def deficiency(
    human: MotionProfile,
    planner: MotionProfile,
    variant: str = "ma",
    filter_spec: FilterSpec | None = None,
    cooldown: float = DEFAULT_COOLDOWN,
) -> float:
    """Percentage excess of the human comfort term over the planner's.

    variant "ma" compares raw acceleration energies, "ms" the
    frequency-weighted energies.  Raises ComparabilityError when the
    travel times differ by more than TIME_MATCH_TOLERANCE.
    """
    if variant not in VARIANTS:
        raise ValidationError(f"variant must be one of {VARIANTS}, got {variant!r}")
    _require_comparable(human, planner)
    if variant == "ma":
        return _excess_percent(comfort_ma(human), comfort_ma(planner))
    return _excess_percent(
        comfort_ms(human, filter_spec, cooldown),
        comfort_ms(planner, filter_spec, cooldown),
    )


def build_report(
    human: MotionProfile,
    planner: MotionProfile,
    planner_ms: MotionProfile | None = None,
    filter_spec: FilterSpec | None = None,
    cooldown: float = DEFAULT_COOLDOWN,
) -> ComparisonReport:
    """Assemble a ComparisonReport from a human run and its matched plans.

    planner carries the acceleration-energy matching; pass planner_ms to
    add the weighted comparison (it may be the same profile when one plan
    serves both).  Energies are stored from the same profiles the
    deficiencies are computed on, so the report is self-consistent.
    """
    _require_comparable(human, planner)
    energy_human = comfort_ma(human)
    energy_planner = comfort_ma(planner)
    weighted_human = weighted_planner = deficiency_ms = None
    if planner_ms is not None:
        _require_comparable(human, planner_ms)
        weighted_human = comfort_ms(human, filter_spec, cooldown)
        weighted_planner = comfort_ms(planner_ms, filter_spec, cooldown)
        deficiency_ms = _excess_percent(weighted_human, weighted_planner)
    return ComparisonReport(
        travel_time_human=float(human.total_time),
        travel_time_planner=float(planner.total_time),
        energy_human=energy_human,
        energy_planner=energy_planner,
        deficiency_ma=_excess_percent(energy_human, energy_planner),
        weighted_energy_human=weighted_human,
        weighted_energy_planner=weighted_planner,
        deficiency_ms=deficiency_ms,
    )


class PsdEstimate(NamedTuple):
    """One-sided Welch density over a uniform frequency grid."""

    frequencies: np.ndarray
    density: np.ndarray


def psd(
    profile: MotionProfile,
    axis: str = "longitudinal",
    rate: float = PSD_RATE,
    segment_cap: int = PSD_SEGMENT_CAP,
) -> PsdEstimate:
    """Welch power spectral density of one acceleration axis, (m/s^2)^2/Hz.

    The profile is resampled onto a uniform grid at `rate`, then estimated
    with Hann-windowed segments of min(N, segment_cap) samples at 50%
    overlap, no detrending.  The full-band trapezoidal integral of the
    density recovers the mean square of the resampled signal (Parseval),
    which the validate command checks on synthetic tones.
    """
    if axis not in AXES:
        raise ValidationError(f"axis must be one of {AXES}, got {axis!r}")
    if profile.total_time < PSD_MIN_DURATION:
        raise ResolutionError(
            f"profile spans {profile.total_time:.3f} s; need at least "
            f"{PSD_MIN_DURATION:.0f} s for usable low-frequency resolution"
        )
    resampled = resample_uniform(profile, rate)
    series = resampled.ax if axis == "longitudinal" else resampled.ay
    nperseg = min(len(series), int(segment_cap))
    freqs, density = signal.welch(
        series,
        fs=rate,
        window="hann",
        nperseg=nperseg,
        noverlap=nperseg // 2,
        detrend=False,
    )
    return PsdEstimate(frequencies=freqs, density=density)


def band_energy(estimate: PsdEstimate, f_lo: float, f_hi: float) -> float:
    """Trapezoidal integral of the density over [f_lo, f_hi], (m/s^2)^2.

    Band edges may fall between grid points; the density is interpolated
    there.  Edges outside the frequency grid raise DomainError.
    """
    freqs, density = estimate
    if f_lo >= f_hi:
        raise DomainError(f"need f_lo < f_hi, got [{f_lo}, {f_hi}]")
    if f_lo < freqs[0] - 1e-12 or f_hi > freqs[-1] + 1e-12:
        raise DomainError(
            f"band [{f_lo}, {f_hi}] Hz outside the estimated grid "
            f"[{freqs[0]:.4g}, {freqs[-1]:.4g}] Hz"
        )
    lo = float(np.clip(f_lo, freqs[0], freqs[-1]))
    hi = float(np.clip(f_hi, freqs[0], freqs[-1]))
    inside = (freqs > lo) & (freqs < hi)
    f_band = np.concatenate(([lo], freqs[inside], [hi]))
    d_band = np.concatenate(
        ([np.interp(lo, freqs, density)], density[inside], [np.interp(hi, freqs, density)])
    )
    return float(np.trapezoid(d_band, f_band))


class ContourLine(NamedTuple):
    """A planner frontier scaled to one amplified-discomfort level."""

    factor: float
    time: np.ndarray
    comfort: np.ndarray


def iso_discomfort_contours(
    times: np.ndarray,
    energies: np.ndarray,
    factors: Sequence[float] = CONTOUR_FACTORS,
) -> tuple[ContourLine, ...]:
    """Scale a (time, comfort) frontier by each factor.

    The frontier comes from a time-weight sweep; the contour at factor c
    shows where a run sits that spends the same time but c times the
    comfort cost.  Factors must be positive; 1.0 reproduces the frontier.
    """
    t = np.asarray(times, dtype=float)
    e = np.asarray(energies, dtype=float)
    if t.shape != e.shape or t.ndim != 1 or t.size == 0:
        raise ValidationError("times and energies must be matching non-empty 1-d arrays")
    if any(f <= 0.0 for f in factors):
        raise ValidationError(f"contour factors must be positive, got {tuple(factors)}")
    return tuple(ContourLine(float(f), t.copy(), f * e) for f in factors)


def psd_to_csv(estimate: PsdEstimate, path) -> None:
    """Write frequency,density rows with 9 significant digits."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["frequency", "density"])
        for f, d in zip(estimate.frequencies, estimate.density):
            writer.writerow([format(f, ".9g"), format(d, ".9g")])


def contours_to_csv(lines: Sequence[ContourLine], path) -> None:
    """Write factor,time,comfort rows, one block per contour line."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["factor", "time", "comfort"])
        for line in lines:
            for t, c in zip(line.time, line.comfort):
                writer.writerow([format(line.factor, ".9g"), format(t, ".9g"), format(c, ".9g")])
