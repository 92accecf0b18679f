"""Exception types raised across the package."""


class DualCurvError(Exception):
    """Base class for all package errors."""


class NonFinite(DualCurvError):
    """An integrand produced NaN or infinity on a sample."""


class NoConvergence(DualCurvError):
    """A deterministic quadrature rule failed to reach its tolerance."""


class RankDeficient(DualCurvError):
    """Vectors handed to a subspace constructor are linearly dependent."""


class DimensionTooLarge(DualCurvError):
    """An exact routine was called beyond its supported dimension."""


class DegenerateDenominator(DualCurvError):
    """A ratio was requested whose total mass estimate is not positive."""


class NonIntegrable(DualCurvError):
    """A power function is not locally integrable at the origin."""


class ParseError(DualCurvError):
    """A body specification file is malformed."""


class ValidationError(DualCurvError):
    """Command-line arguments are outside their admissible range."""


class DegenerateFacetWarning(UserWarning):
    """A declared halfspace of a polytope does not support a facet."""
