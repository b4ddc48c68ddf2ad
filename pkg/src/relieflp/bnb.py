"""Textbook LP-based branch and bound, the integer-programming baseline.

Best-first on the parent's relaxation bound, branching on the most
fractional integer variable with floor/ceil bound splits.  No cuts, no
presolve, no primal heuristics: the tree starts without an incumbent.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import ReliefLPError, ResourceLimitError
from .lp import INT_TOL, LpProblem, SolverOptions, Status, solve_simplex

PRUNE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class MilpSolution:
    status: Status
    point: np.ndarray | None
    objective: float
    nodes_explored: int
    root_objective: float = float("nan")


@dataclass(frozen=True)
class BnbOptions:
    max_nodes: int = 100_000
    int_tol: float = INT_TOL
    lp: SolverOptions = field(default_factory=SolverOptions)


def _most_fractional(x, ivars, tol):
    frac = np.abs(x[ivars] - np.round(x[ivars]))
    k = int(np.argmax(frac))
    if frac[k] <= tol:
        return None
    return int(ivars[k])


def solve_bnb(problem: LpProblem, integer_vars=None, opts: BnbOptions | None = None) -> MilpSolution:
    """Minimise ``problem`` with ``integer_vars`` (default: all) integral.

    Raises :class:`ResourceLimitError` carrying the incumbent if more than
    ``opts.max_nodes`` relaxations would be solved.
    """
    opts = opts or BnbOptions()
    ivars = np.arange(problem.num_vars) if integer_vars is None else np.asarray(sorted(integer_vars), dtype=int)
    counter = itertools.count()
    heap = [(-np.inf, next(counter), problem.lower, problem.upper)]
    best_x, best_val = None, np.inf
    nodes = 0
    root_val = np.nan

    while heap:
        bound, _, lo, up = heapq.heappop(heap)
        if bound >= best_val - PRUNE_TOL:
            continue
        if nodes >= opts.max_nodes:
            incumbent = None if best_x is None else MilpSolution(
                Status.OPTIMAL, best_x, best_val, nodes, root_val)
            raise ResourceLimitError(f"branch and bound node cap of {opts.max_nodes} reached", incumbent)
        node = problem if nodes == 0 else problem.with_bounds(lo, up)
        sol = solve_simplex(node, opts.lp)
        nodes += 1
        if sol.status is Status.UNBOUNDED:
            raise ReliefLPError("LP relaxation is unbounded; branch and bound needs a bounded relaxation")
        if nodes == 1:
            root_val = sol.objective
        if sol.status is Status.INFEASIBLE or sol.objective >= best_val - PRUNE_TOL:
            continue
        x = np.asarray(sol.point, dtype=float)
        j = _most_fractional(x, ivars, opts.int_tol) if ivars.size else None
        if j is None:
            x = x.copy()
            x[ivars] = np.round(x[ivars])
            best_x, best_val = x, problem.value(x)
            continue
        down_up = np.array(up, copy=True)
        down_up[j] = np.floor(x[j])
        up_lo = np.array(lo, copy=True)
        up_lo[j] = np.ceil(x[j])
        heapq.heappush(heap, (sol.objective, next(counter), lo, down_up))
        heapq.heappush(heap, (sol.objective, next(counter), up_lo, up))

    if best_x is None:
        return MilpSolution(Status.INFEASIBLE, None, np.inf, nodes, root_val)
    return MilpSolution(Status.OPTIMAL, best_x, best_val, nodes, root_val)
