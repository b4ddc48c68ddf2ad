"""HiGHS dual simplex backend for models too large for a dense tableau."""

from __future__ import annotations

import highspy
import numpy as np
import scipy.sparse as sp

from .errors import ResourceLimitError
from .lp import LpProblem, SimplexSolution, SolverOptions, Status

_INF = highspy.kHighsInf


def _to_highs_lp(problem: LpProblem) -> highspy.HighsLp:
    lp = highspy.HighsLp()
    m, n = problem.A.shape
    lp.num_col_ = n
    lp.num_row_ = m
    lp.col_cost_ = problem.objective
    lp.col_lower_ = np.where(np.isfinite(problem.lower), problem.lower, -_INF)
    lp.col_upper_ = np.where(np.isfinite(problem.upper), problem.upper, _INF)
    senses = np.array(problem.senses, dtype=object)
    row_lo = np.where(senses == "<=", -_INF, problem.rhs).astype(float)
    row_up = np.where(senses == ">=", _INF, problem.rhs).astype(float)
    lp.row_lower_ = row_lo
    lp.row_upper_ = row_up
    csc = sp.csc_array(problem.A)
    csc.sort_indices()
    lp.a_matrix_.format_ = highspy.MatrixFormat.kColwise
    lp.a_matrix_.start_ = csc.indptr.astype(np.int32)
    lp.a_matrix_.index_ = csc.indices.astype(np.int32)
    lp.a_matrix_.value_ = csc.data
    lp.a_matrix_.num_col_ = n
    lp.a_matrix_.num_row_ = m
    return lp


def _run(problem, opts, presolve):
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("solver", "simplex")
    h.setOptionValue("threads", 1)
    h.setOptionValue("presolve", "on" if presolve else "off")
    h.setOptionValue("primal_feasibility_tolerance", opts.feas_tol)
    if opts.max_iterations is not None:
        h.setOptionValue("simplex_iteration_limit", int(opts.max_iterations))
    h.passModel(_to_highs_lp(problem))
    h.run()
    return h, h.getModelStatus()


def solve_highs(problem: LpProblem, opts: SolverOptions) -> SimplexSolution:
    """Solve with HiGHS, keeping the vertex guarantee of a simplex method.

    Basis indices refer to HiGHS' own layout: column ``j`` for structural
    variables and ``num_vars + i`` for the logical of row ``i``.
    """
    if problem.num_vars == 0:
        from .lp import _solve_tableau
        return _solve_tableau(problem, SolverOptions(engine="tableau"))
    M = highspy.HighsModelStatus
    h, status = _run(problem, opts, presolve=True)
    if status == M.kUnboundedOrInfeasible:
        h, status = _run(problem, opts, presolve=False)
    iters = int(h.getInfo().simplex_iteration_count)
    if status == M.kIterationLimit:
        raise ResourceLimitError(f"HiGHS simplex hit the iteration limit ({iters} iterations)")
    if status == M.kInfeasible:
        return SimplexSolution(Status.INFEASIBLE, None, float("inf"), (), iters, "highs")
    if status in (M.kUnbounded, M.kUnboundedOrInfeasible):
        return SimplexSolution(Status.UNBOUNDED, None, float("-inf"), (), iters, "highs")
    if status not in (M.kOptimal, M.kModelEmpty):
        raise RuntimeError(f"HiGHS returned model status {h.modelStatusToString(status)}")
    x = np.asarray(h.getSolution().col_value, dtype=float)
    basis = h.getBasis()
    basic = highspy.HighsBasisStatus.kBasic
    n = problem.num_vars
    idx = [j for j, s in enumerate(basis.col_status) if s == basic]
    idx += [n + i for i, s in enumerate(basis.row_status) if s == basic]
    return SimplexSolution(Status.OPTIMAL, x, problem.value(x), tuple(idx), iters, "highs")
