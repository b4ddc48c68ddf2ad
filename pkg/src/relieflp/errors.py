"""Exception hierarchy shared by every solver path."""


class ReliefLPError(Exception):
    """Base class for all errors raised by this package."""


class MalformedProblemError(ReliefLPError, ValueError):
    """Problem data violates a structural invariant (shapes, bounds, entries)."""


class InfeasibleInstanceError(ReliefLPError, ValueError):
    """Instance is infeasible by construction, detected before any solve."""


class ResourceLimitError(ReliefLPError, RuntimeError):
    """An iteration, node or enumeration budget was exhausted.

    ``incumbent`` carries the best known solution when one exists.
    """

    def __init__(self, message, incumbent=None):
        super().__init__(message)
        self.incumbent = incumbent


class WorkLimitError(ResourceLimitError):
    """Exhaustive enumeration would exceed the configured work budget."""


class IntegralityError(ReliefLPError):
    """A point expected to be integral has fractional coordinates."""

    def __init__(self, message, report):
        super().__init__(message)
        self.report = report
