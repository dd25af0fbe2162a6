"""Exception hierarchy shared by every module of the package."""


class GRNError(Exception):
    """Base class for all package errors."""


class DomainError(GRNError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class OrientationError(DomainError):
    """The operation is only defined for one sigmoid orientation."""


class UnsupportedCoefficientError(DomainError):
    """A closed form exists only for specific Hill coefficients."""


class HillSingularityError(GRNError, ArithmeticError):
    """Hill derivative evaluated at x = 0 with a non-integer coefficient.

    The derivative behaves like ``x**exponent`` near the origin, with
    ``exponent = n - 1``; it has no finite one-sided value for ``n < 1`` and
    is not smooth for non-integer ``n > 1``.
    """

    def __init__(self, coefficient: float):
        self.exponent = coefficient - 1.0
        super().__init__(
            f"Hill derivative is singular at x = 0 for non-integer n = {coefficient!r} "
            f"(behaves like x**{self.exponent:g})"
        )


class UnsupportedEdgeError(GRNError, TypeError):
    """The operation needs every edge to be a logistic response."""


class DelayedNetworkError(GRNError):
    """A delay-free operation was called on a network with delayed edges."""


class HistoryError(DomainError):
    """DDE history does not cover the required lookback window."""


class DegenerateDelayError(DomainError):
    """A positive delay too small to resolve; model it as delay 0 instead."""


class IntegrationError(GRNError, ArithmeticError):
    """Time integration failed (step-size underflow or non-finite state)."""


class ConvergenceError(GRNError, ArithmeticError):
    """An iterative solver failed to converge."""


class SingularJacobianError(ConvergenceError):
    """Newton iteration hit a numerically singular Jacobian."""


class NoBistableBandError(GRNError):
    """The logistic saddle-node equation has no real root pair."""


class FitDivergenceError(GRNError, ArithmeticError):
    """Least-squares fitting could not decrease the objective."""


class ModelFileError(GRNError, ValueError):
    """Malformed or invalid model / fit-problem file."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
