"""Exception types shared across the library."""


class QILabError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(QILabError):
    """A point, map or plan has an incompatible ambient dimension."""


class UnsupportedDimension(QILabError):
    """A constructor is only defined in a specific dimension (polar map: n=2)."""


class NotExactlyInvertible(QILabError):
    """Structural inversion is only available for the affine family."""


class EmptyPlan(QILabError):
    """The sampling plan has no usable annuli for the requested operation."""


class EmptyProfile(QILabError):
    """A ratio profile with no entries was passed to an estimator."""


class AlphaOutOfRange(QILabError):
    """An exponent outside (0, 1) was supplied."""


class AlphaMismatch(QILabError):
    """Certificate algebra requires both inputs to share the same exponent."""


class NotOutsideH(QILabError):
    """Witness extraction needs a map whose sublinear-displacement test refuted."""


class InsufficientAnnuli(QILabError):
    """Not enough usable annuli/witness points within the plan range."""


class WitnessTooSparse(QILabError):
    """No admissible family of disjoint balls exists within the plan range."""


class NotInH(QILabError):
    """The density construction needs a map confirmed to have sublinear displacement."""


class NoSuitableR0(QILabError):
    """No plan radius has tail displacement ratio below the requested level."""


class NotInIntersection(QILabError):
    """The refinement center is not confirmed in both neighborhoods."""


class ParseError(QILabError):
    """Malformed map/plan/neighborhood document."""

    def __init__(self, message, position=None):
        super().__init__(message if position is None
                         else f"{message} (at {position})")
        self.position = position


class ConfigError(QILabError):
    """Invalid session configuration (flags, env vars or config file)."""
