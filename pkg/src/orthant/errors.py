"""Exception types shared across the package."""


class OrthantError(Exception):
    """Base class for all package-specific errors."""


class DomainError(OrthantError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class InfeasibleError(OrthantError, ValueError):
    """No admissible control exists at the queried point."""


class ConstraintError(OrthantError, ValueError):
    """A named design inequality is violated; the message says which one."""


class BracketError(OrthantError, ArithmeticError):
    """A sign-change bracket could not be established."""


class QuadratureError(OrthantError, ArithmeticError):
    """Adaptive quadrature failed to meet tolerance; the message reports the interval."""


class ContractViolationError(OrthantError, RuntimeError):
    """A callback broke its contract, e.g. a feedback returned a non-positive control."""


class DivergenceError(OrthantError, RuntimeError):
    """A trajectory left the domain or produced non-finite state."""


class ConfigError(OrthantError, ValueError):
    """A scenario configuration is malformed or inconsistent."""
