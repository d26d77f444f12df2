"""Exception types shared across the package."""


class UndefinedCorrelationError(ValueError):
    """g2(0) requested for a mode whose occupation vanishes (0/0)."""


class NoUniqueSteadyStateError(RuntimeError):
    """The trace-constrained Liouvillian system is singular or ill-conditioned."""


class SingularConditionError(ValueError):
    """A closed-form amplitude denominator vanished.

    The ``factor`` attribute names which one ("Y", "Z+g^2*X", "delta_p+chi",
    "4*delta_p+12*chi", or "delta_m").
    """

    def __init__(self, factor: str, message: str | None = None):
        self.factor = factor
        super().__init__(message or f"singular condition: {factor} = 0")


class AnalyticPoleError(ArithmeticError):
    """The closed-form correlation diverges (pole of the analytic expression)."""


class SweepPointError(RuntimeError):
    """A solver failure at a specific grid point; carries the point context."""

    def __init__(self, indices, values, cause):
        self.indices = tuple(indices)
        self.values = tuple(values)
        self.__cause__ = cause
        super().__init__(
            f"sweep aborted at grid point {self.indices} (axis values {self.values}): {cause}"
        )
