"""Integral-vertex LP models for disaster relief allocation and location."""

from .errors import (InfeasibleInstanceError, IntegralityError, MalformedProblemError,
                     ReliefLPError, ResourceLimitError, WorkLimitError)
from .lp import (IntegralityReport, LpProblem, SimplexSolution, SolverOptions, StandardForm,
                 Status, check_integrality, solve_simplex, standardize)

__all__ = [
    "InfeasibleInstanceError", "IntegralityError", "MalformedProblemError", "ReliefLPError",
    "ResourceLimitError", "WorkLimitError", "IntegralityReport", "LpProblem", "SimplexSolution",
    "SolverOptions", "StandardForm", "Status", "check_integrality", "solve_simplex", "standardize",
]
