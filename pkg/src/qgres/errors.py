"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class QGraphError(Exception):
    """Base class for every error raised by this package."""


class GraphFormatError(QGraphError):
    """Graph or plan input could not be parsed."""


class InvalidGraph(QGraphError):
    """Graph failed validation; ``violations`` lists every problem found."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("invalid graph: " + "; ".join(self.violations))


class PreconditionError(QGraphError):
    """An operation was called on an input outside its domain."""


class NotEquilateral(PreconditionError):
    pass


class KDependentCoupling(PreconditionError):
    pass


class PreconditionViolated(PreconditionError):
    pass


class PlanConflict(PreconditionError):
    pass


class CapExceeded(PreconditionError):
    def __init__(self, what: str, cap: int):
        self.cap = cap
        super().__init__(f"{what} exceeds cap {cap}")


class SingularPivot(QGraphError, ArithmeticError):
    """Matrix to be inverted is singular within tolerance (forbidden k)."""


class NoConvergence(QGraphError, ArithmeticError):
    pass


class ConsistencyError(QGraphError, AssertionError):
    """A proven identity failed on computed data; indicates a bug."""
