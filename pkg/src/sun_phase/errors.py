"""Exception types raised by the toolkit."""


class SunPhaseError(Exception):
    """Base class for all toolkit errors."""


class DimensionError(SunPhaseError, ValueError):
    """Group dimension out of range (n < 2) or inconsistent."""


class ShapeError(SunPhaseError, ValueError):
    """Operands have incompatible shapes."""


class DomainError(SunPhaseError, ValueError):
    """Input outside the domain of an operation or chart."""


class ChartDegenerateError(SunPhaseError, ArithmeticError):
    """Left-invariant frame is singular at the requested point."""


class DegenerateMetricError(SunPhaseError, ArithmeticError):
    """Metric tensor is not invertible at the requested point."""


class NearZeroAmplitudeError(SunPhaseError, ArithmeticError):
    """Amplitude too small for gradient formulas (division by the amplitude)."""


class SingularLoopError(SunPhaseError, ArithmeticError):
    """Winding loop passes too close to an amplitude zero."""


class ResolutionError(SunPhaseError, ArithmeticError):
    """Loop sampling too coarse for unambiguous phase unwrapping."""


class UndefinedDirectionError(SunPhaseError, ArithmeticError):
    """Phase-gradient direction undefined (orthogonal state pair)."""


class InternalConsistencyError(SunPhaseError, RuntimeError):
    """A mathematically guaranteed identity failed numerically."""
