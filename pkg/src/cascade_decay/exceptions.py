"""Exception hierarchy shared by the solvers and the command line."""


class ConfigError(ValueError):
    """Invalid user configuration; ``field`` names the offending entry."""

    def __init__(self, message, field=None):
        self.field = field
        self.detail = message
        if field:
            message = f"{field}: {message}"
        super().__init__(message)


class ConstraintError(ConfigError):
    """Model parameters violate a physical constraint (e.g. PBG conditions)."""


class SolverError(RuntimeError):
    """Base class for numerical failures."""


class DomainError(SolverError, ArithmeticError):
    """A kernel denominator fell below the magnitude floor."""


class SingularSystemError(SolverError):
    """The discretised integral-equation system could not be factorised."""


class StepSizeError(SolverError):
    """The ODE integrator could not take a step; ``t`` is where it stopped."""

    def __init__(self, message, t=None):
        self.t = t
        super().__init__(message)


class BudgetExceeded(SolverError):
    """Wall-clock budget for a contour solve ran out."""
