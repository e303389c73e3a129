"""Exception types raised across the package."""


class UltraAcvError(Exception):
    """Base class for all package errors."""


class ConfigurationError(UltraAcvError, ValueError):
    """Invalid distribution or run parameters."""


class DegenerateTruncationError(ConfigurationError):
    """Truncation threshold leaves a (numerically) zero-variance law."""


class DomainError(UltraAcvError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class ResourceError(UltraAcvError):
    """Requested allocation or enumeration exceeds the configured budget."""


class ContractError(UltraAcvError, ValueError):
    """Input violates an operation's precondition (e.g. asymmetric matrix)."""


class NonConvergenceError(UltraAcvError, ArithmeticError):
    """Iterative eigensolver failed to deflate within its sweep cap."""


class NumericalDegeneracyError(UltraAcvError, ArithmeticError):
    """A matrix declared PSD produced a clearly negative eigenvalue."""


class ConsistencyError(UltraAcvError, AssertionError):
    """An internal exactness guarantee failed (should be unreachable)."""
