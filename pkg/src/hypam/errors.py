"""Exception hierarchy for hypam.

Every error carries the process exit code the CLI reports for it: input
problems exit with 3, exhausted numerical budgets with 4. A refuted property
is a verdict, not an exception, and maps to exit code 2 in the runner.
"""

EXIT_OK = 0
EXIT_VERDICT_FAILED = 2
EXIT_INPUT_ERROR = 3
EXIT_BUDGET_EXHAUSTED = 4


class HypamError(Exception):
    """Base exception for all errors raised by hypam."""
    exit_code = EXIT_INPUT_ERROR


# Input errors
class InputError(HypamError):
    """Raised when an argument violates an operation's precondition."""
    pass

class ConfigError(InputError):
    """Raised for unknown or malformed configuration values."""
    pass

class JobError(InputError):
    """Raised when a job file cannot be parsed or names an unknown command."""
    pass

class ZeroVector(InputError):
    """Raised when homogeneous coordinates are all zero."""
    pass

class DegenerateSpan(InputError):
    """Raised when two points do not span a line."""
    pass

class OnQuadric(InputError):
    """Raised when a point of Q is passed where an invertible matrix is required."""
    pass

class NotOnQuadric(InputError):
    """Raised when a rank-2 matrix is passed where a point of Q is required."""
    pass

class OnRealLocus(InputError):
    """Raised when pi_P is evaluated at a point fixed by the P-real involution."""
    pass

class AtOrigin(InputError):
    """Raised when a direction from the origin is requested at the origin."""
    pass

class BadScale(InputError):
    """Raised when a tropical scale t is not greater than 1."""
    pass

class CoincidingEndpoints(InputError):
    """Raised when a geodesic is requested between equal boundary points."""
    pass

class EmptyAmoeba(InputError):
    """Raised when sampling the amoeba of a line contained in Q."""
    pass

class SingularParameter(InputError):
    """Raised when a curve's derivative is proportional to its position."""
    pass

class InvalidCurve(InputError):
    """Raised when curve components share a root or the curve lies in Q."""
    pass

class InvalidSurface(InputError):
    """Raised when a polynomial does not define an admissible surface."""
    pass

class NotOnSurface(InputError):
    """Raised when a point does not satisfy the surface equation."""
    pass

class SingularPoint(InputError):
    """Raised when the surface gradient vanishes at a point."""
    pass

class ZeroCoordinate(InputError):
    """Raised when log_t meets a zero coordinate."""
    pass

class DimensionMismatch(InputError):
    """Raised when phase data does not match the tropical curve."""
    pass

class EmptyCloud(InputError):
    """Raised when a Hausdorff distance is requested for an empty cloud."""
    pass

class InvalidDiagram(InputError):
    """Raised when a floor diagram fails validation where validity is required."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


# Numerical errors
class NumericalError(HypamError):
    """Raised when a numerical procedure cannot produce a trustworthy result."""
    exit_code = EXIT_BUDGET_EXHAUSTED

class ArgumentBelowOne(NumericalError):
    """Raised when an arccosh argument falls below one beyond tolerance."""
    pass

class IllConditioned(NumericalError):
    """Raised when a fit or a linear solve has no reliable solution."""
    pass

class UnderdeterminedFit(IllConditioned):
    """Raised when too few samples are supplied for a fit."""
    pass

class NoComplementFound(NumericalError):
    """Raised when rejection sampling finds no point outside an amoeba."""
    pass

class InternalConsistencyError(NumericalError):
    """Raised when two computations of the same quantity disagree."""
    pass
