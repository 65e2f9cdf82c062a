"""Exception types shared across the package."""


class FrontGameError(Exception):
    """Base class for all frontgame errors."""


class NonPositiveMobility(FrontGameError):
    """Mobility coefficient b must be strictly positive on the unit sphere."""


class NegativeForcing(FrontGameError):
    """Forcing coefficient c must be nonnegative on the unit sphere."""


class UnsupportedDimension(FrontGameError):
    """Spatial dimension must be at least 2."""


class ZeroGradient(FrontGameError):
    """Direction-dependent quantity requested at a (near) zero vector."""


class AsymmetricMatrix(FrontGameError):
    """Second-order argument must be symmetric."""


class DegenerateForcing(FrontGameError):
    """Operation requires min c > 0."""


class TooManySigns(FrontGameError):
    """Adversary sign set 2^m capped at m <= 12."""


class OutOfRange(FrontGameError):
    """Transformed value above 1 has no preimage."""


class TargetOutsideBox(FrontGameError):
    """Target closure must lie strictly inside the grid box."""


class EmptyTarget(FrontGameError):
    """Rasterized target must flag at least one node."""


class StartInsideTarget(FrontGameError):
    """Rollout start point must be outside the target closure."""


class StartOutsideBox(FrontGameError):
    """Rollout start point must lie inside the grid box."""


class RadiusTooSmall(FrontGameError):
    """Capture strategy needs target_radius >= 2*C0^2/c0 + 1."""


class StalledFront(FrontGameError):
    """Radial oracle requires an expanding front at the initial radius."""


class BadT0(FrontGameError):
    """Target is not contained in t0 times the Wulff set."""


class ConfigError(FrontGameError):
    """Configuration file could not be parsed."""


class InvariantViolation(FrontGameError):
    """A problem-configuration invariant does not hold."""
