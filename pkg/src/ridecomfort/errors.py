"""Exception types shared across the toolkit."""


class RideComfortError(Exception):
    """Base class for all toolkit errors."""


class RouteFormatError(RideComfortError):
    """Route file does not parse; message names the offending field."""


class ValidationError(RideComfortError):
    """An invariant of a domain object is violated."""


class DimensionError(RideComfortError):
    """Array lengths of related inputs do not agree."""


class DomainError(RideComfortError):
    """A numeric argument is outside its mathematical domain."""


class DegenerateSegmentError(RideComfortError):
    """Two consecutive waypoints coincide; segment quantities undefined."""


class ResolutionError(RideComfortError):
    """Signal too short or rate too low for the requested analysis."""


class BracketError(RideComfortError):
    """A target value lies outside the achievable bracket."""

    def __init__(self, message, achievable_range=None):
        super().__init__(message)
        self.achievable_range = achievable_range


class ComparabilityError(RideComfortError):
    """Two profiles are not comparable (e.g. travel times differ too much)."""
