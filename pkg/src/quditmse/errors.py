"""Exception types shared across the package.

Everything derives from EstimationError so callers can catch one base class.
Most of these also subclass ValueError because they signal bad inputs.
"""


class EstimationError(Exception):
    """Base class for all errors raised by this package."""


class DegenerateVector(EstimationError, ValueError):
    """A vector with (numerically) zero norm where a direction is required."""


class DimensionError(EstimationError, ValueError):
    """Operands have incompatible shapes or dimensions."""


class InvalidDimension(EstimationError, ValueError):
    """A dimension argument outside the supported range."""


class RankDeficient(EstimationError, ValueError):
    """Matrix columns are not linearly independent."""


class SingularMatrix(EstimationError, ValueError):
    """Matrix has a singular value too close to zero."""


class ContractViolation(EstimationError, RuntimeError):
    """An internal invariant or caller precondition failed at runtime."""


class EmptyEnsemble(EstimationError, ValueError):
    """A measurement was requested with zero shots."""


class InvalidGain(EstimationError, ValueError):
    """Gain parameters outside their allowed range."""


class DegenerateIterate(EstimationError, ValueError):
    """An optimizer update produced a zero-norm iterate."""


class EmptyData(EstimationError, ValueError):
    """An operation that needs data received none."""


class InvalidStart(EstimationError, ValueError):
    """Objective is not finite at the requested start point."""


class InvalidData(EstimationError, ValueError):
    """Numeric data outside the domain of the requested operation."""


class RangeError(EstimationError, ValueError):
    """A window or index range does not fit the available data."""


class ConfigError(EstimationError, ValueError):
    """Bad or inconsistent configuration."""
