"""Dense linear programs and a two-phase primal simplex with Bland's rule.

Problems are always minimisations of ``objective @ x`` subject to a list of
row constraints (``<=``, ``>=`` or ``=``) and per-variable bounds.  The
solver works on the equality form produced by :func:`standardize` and only
ever moves between basic feasible solutions, so an optimal answer is a
vertex of the feasible polyhedron.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import MalformedProblemError, ResourceLimitError

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-7
INT_TOL = 1e-6

_SENSE_ALIASES = {
    "<=": "<=", "≤": "<=", "le": "<=", "L": "<=",
    ">=": ">=", "≥": ">=", "ge": ">=", "G": ">=",
    "=": "=", "==": "=", "eq": "=", "E": "=",
}


class Status(str, enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


def _frozen(arr):
    arr = np.array(arr, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class LpProblem:
    """``min objective @ x  s.t.  A x (senses) rhs,  lower <= x <= upper``.

    ``A`` may be given dense or as any scipy sparse matrix; it is stored as
    CSR so that the large location models stay cheap to build.  Missing
    bounds default to ``0 <= x < inf``; use ``-np.inf`` for a free lower
    bound.
    """

    objective: np.ndarray
    A: sp.csr_array
    senses: tuple
    rhs: np.ndarray
    lower: np.ndarray = None
    upper: np.ndarray = None

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=float).ravel()
        n = c.size
        if sp.issparse(self.A):
            A = sp.csr_array(self.A, dtype=float)
        else:
            dense = np.asarray(self.A, dtype=float)
            if dense.size == 0:
                dense = dense.reshape(0, n)
            A = sp.csr_array(dense)
        if A.ndim != 2 or A.shape[1] != n:
            raise MalformedProblemError(
                f"constraint matrix has shape {A.shape}, expected (*, {n})")
        m = A.shape[0]
        try:
            senses = tuple(_SENSE_ALIASES[s] for s in self.senses)
        except KeyError as exc:
            raise MalformedProblemError(f"unknown constraint sense {exc.args[0]!r}") from None
        rhs = np.asarray(self.rhs, dtype=float).ravel()
        if len(senses) != m or rhs.size != m:
            raise MalformedProblemError(
                f"{m} constraint rows but {len(senses)} senses and {rhs.size} rhs entries")
        lower = np.zeros(n) if self.lower is None else np.asarray(self.lower, dtype=float).ravel()
        upper = np.full(n, np.inf) if self.upper is None else np.asarray(self.upper, dtype=float).ravel()
        if lower.size != n or upper.size != n:
            raise MalformedProblemError("bound vectors must have one entry per variable")
        if np.any(np.isnan(lower)) or np.any(np.isnan(upper)) or np.any(lower == np.inf) \
                or np.any(upper == -np.inf):
            raise MalformedProblemError("bounds must be finite numbers or outward infinities")
        bad = np.flatnonzero(lower > upper)
        if bad.size:
            j = int(bad[0])
            raise MalformedProblemError(
                f"variable {j} has lower bound {lower[j]} > upper bound {upper[j]}")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(rhs)) and np.all(np.isfinite(A.data))):
            raise MalformedProblemError("objective, matrix and rhs must be finite")
        A.data.flags.writeable = False
        object.__setattr__(self, "objective", _frozen(c))
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "senses", senses)
        object.__setattr__(self, "rhs", _frozen(rhs))
        object.__setattr__(self, "lower", _frozen(lower))
        object.__setattr__(self, "upper", _frozen(upper))

    @classmethod
    def from_rows(cls, objective, constraints: Iterable = (), lower=None, upper=None):
        """Build from ``(row, sense, rhs)`` triples."""
        objective = np.asarray(objective, dtype=float).ravel()
        constraints = list(constraints)
        for row, _, _ in constraints:
            if len(row) != objective.size:
                raise MalformedProblemError(
                    f"constraint row has {len(row)} entries, expected {objective.size}")
        A = np.array([row for row, _, _ in constraints], dtype=float).reshape(len(constraints), objective.size)
        return cls(objective, A, [s for _, s, _ in constraints],
                   [b for _, _, b in constraints], lower, upper)

    @property
    def num_vars(self) -> int:
        return self.objective.size

    @property
    def num_rows(self) -> int:
        return self.A.shape[0]

    @property
    def constraints(self):
        dense = self.A.toarray()
        return [(dense[i], self.senses[i], float(self.rhs[i])) for i in range(self.num_rows)]

    def with_bounds(self, lower, upper) -> "LpProblem":
        return LpProblem(self.objective, self.A, self.senses, self.rhs, lower, upper)

    def with_objective(self, objective) -> "LpProblem":
        return LpProblem(objective, self.A, self.senses, self.rhs, self.lower, self.upper)

    def value(self, x) -> float:
        return float(self.objective @ np.asarray(x, dtype=float))

    def max_violation(self, x) -> float:
        """Largest constraint or bound violation, rows scaled by their norm."""
        x = np.asarray(x, dtype=float)
        viol = 0.0
        if self.num_rows:
            ax = self.A @ x
            norms = np.maximum(1.0, np.sqrt(np.asarray(self.A.multiply(self.A).sum(axis=1)).ravel()))
            resid = np.zeros(self.num_rows)
            senses = np.array(self.senses)
            resid[senses == "<="] = (ax - self.rhs)[senses == "<="]
            resid[senses == ">="] = (self.rhs - ax)[senses == ">="]
            eq = senses == "="
            resid[eq] = np.abs(ax - self.rhs)[eq]
            viol = max(viol, float(np.max(resid / norms, initial=0.0)))
        viol = max(viol, float(np.max(self.lower - x, initial=0.0)))
        viol = max(viol, float(np.max(x - self.upper, initial=0.0)))
        return viol


@dataclass(frozen=True)
class SolverOptions:
    """Knobs for :func:`solve_simplex`.

    ``engine="tableau"`` is the dense Bland's-rule implementation in this
    module.  ``engine="highs"`` hands the problem to the HiGHS dual simplex,
    which also stops at a basic solution; it exists for models far too large
    for a dense tableau.
    """

    max_iterations: int | None = None
    pivot_tol: float = PIVOT_TOL
    feas_tol: float = FEAS_TOL
    exact: bool = False
    engine: str = "tableau"


@dataclass(frozen=True)
class IntegralityReport:
    is_integral: bool
    max_fractional_deviation: float
    fractional_indices: tuple
    tolerance: float = INT_TOL


@dataclass(frozen=True, eq=False)
class SimplexSolution:
    status: Status
    point: np.ndarray | None
    objective: float
    basis: tuple = ()
    iterations: int = 0
    engine: str = "tableau"

    @property
    def is_optimal(self) -> bool:
        return self.status is Status.OPTIMAL

    def integrality(self, tolerance: float = INT_TOL) -> IntegralityReport:
        if self.point is None:
            raise ValueError(f"no point for a {self.status.value} solution")
        return check_integrality(self.point, tolerance)


def check_integrality(point, tolerance: float = INT_TOL) -> IntegralityReport:
    """Report how far ``point`` is from the integer lattice."""
    if not tolerance > 0:
        raise ValueError("tolerance must be positive")
    x = np.asarray(point, dtype=float).ravel()
    if x.size == 0:
        return IntegralityReport(True, 0.0, (), tolerance)
    dev = np.abs(x - np.round(x))
    worst = float(dev.max())
    frac = tuple(int(i) for i in np.flatnonzero(dev > tolerance))
    return IntegralityReport(worst <= tolerance, worst, frac, tolerance)


# ---------------------------------------------------------------------------
# equality form


@dataclass(frozen=True, eq=False)
class StandardForm:
    """``min c @ z + c0  s.t.  A z = b,  z >= 0`` with ``b >= 0``.

    Columns are ordered structural, then one slack/surplus per inequality
    row.  ``recover`` maps a structural solution back to the original
    variables: ``x = offset + recover @ z[:n_struct]``.
    """

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    c0: float
    n_struct: int
    n_slack: int
    offset: np.ndarray
    recover_matrix: np.ndarray
    row_origin: tuple = field(default=())

    @property
    def shape(self):
        return self.A.shape

    def recover(self, z):
        z = np.asarray(z)[: self.n_struct]
        return self.offset + self.recover_matrix.dot(z)


def _as_exact(values):
    out = np.empty(np.shape(values), dtype=object)
    flat = out.reshape(-1)
    for i, v in enumerate(np.asarray(values, dtype=float).reshape(-1)):
        flat[i] = Fraction(v)
    return out


def standardize(problem: LpProblem, exact: bool = False) -> StandardForm:
    """Rewrite ``problem`` as an equality system over nonnegative variables.

    Finite lower bounds are shifted out, variables with only an upper bound
    are reflected, free variables are split into a difference of two
    nonnegative parts, and a finite upper bound on a variable with a finite
    lower bound becomes an explicit ``<=`` row.
    """
    n = problem.num_vars
    lo, up = problem.lower, problem.upper
    if np.any(lo > up):
        raise MalformedProblemError("inconsistent bounds: lower > upper")
    conv = _as_exact if exact else (lambda a: np.asarray(a, dtype=float))
    zero = Fraction(0) if exact else 0.0

    cols = []  # (original index, sign) per structural column
    offset = np.zeros(n)
    bound_rows = []  # (structural column, bound)
    for j in range(n):
        if np.isfinite(lo[j]):
            offset[j] = lo[j]
            cols.append((j, 1))
            if np.isfinite(up[j]):
                bound_rows.append((len(cols) - 1, up[j] - lo[j]))
        elif np.isfinite(up[j]):
            offset[j] = up[j]
            cols.append((j, -1))
        else:
            cols.append((j, 1))
            cols.append((j, -1))
    n_struct = len(cols)

    A0 = conv(problem.A.toarray())
    off = conv(offset)
    c_orig = conv(problem.objective)
    recover = np.zeros((n, n_struct), dtype=object if exact else float)
    if exact:
        recover[:] = zero
    for k, (j, s) in enumerate(cols):
        recover[j, k] = s
    src = np.array([j for j, _ in cols], dtype=int)
    sgn = np.array([s for _, s in cols], dtype=int)

    m0 = problem.num_rows
    m = m0 + len(bound_rows)
    senses = list(problem.senses) + ["<="] * len(bound_rows)
    n_slack = sum(1 for s in senses if s != "=")
    N = n_struct + n_slack

    A = np.zeros((m, N), dtype=object if exact else float)
    b = np.zeros(m, dtype=object if exact else float)
    if exact:
        A[:] = zero
        b[:] = zero
    if m0:
        A[:m0, :n_struct] = A0[:, src] * sgn
        b[:m0] = conv(problem.rhs) - A0.dot(off)
    for r, (k, ub) in enumerate(bound_rows):
        A[m0 + r, k] = 1
        b[m0 + r] = conv([ub])[0]
    origin = [("row", i) for i in range(m0)] + [("upper", int(cols[k][0])) for k, _ in bound_rows]

    s = n_struct
    for i, sense in enumerate(senses):
        if sense == "<=":
            A[i, s] = 1
            s += 1
        elif sense == ">=":
            A[i, s] = -1
            s += 1
    neg = np.array([bool(v < 0) for v in b], dtype=bool)
    A[neg] = -A[neg]
    b[neg] = -b[neg]

    c = np.zeros(N, dtype=object if exact else float)
    if exact:
        c[:] = zero
    c[:n_struct] = c_orig[src] * sgn
    c0 = c_orig.dot(off) if n else zero
    return StandardForm(A, b, c, c0, n_struct, n_slack, off, recover, tuple(origin))


# ---------------------------------------------------------------------------
# tableau simplex


def _pivot(T, r, q):
    piv = T[r, q]
    T[r] = T[r] / piv
    col = T[:, q].copy()
    col[r] = 0
    rows = np.flatnonzero(col != 0)
    if rows.size == 0:
        return
    prow = T[r]
    pcols = np.flatnonzero(prow != 0)
    if pcols.size < 0.5 * prow.size:
        T[np.ix_(rows, pcols)] -= np.outer(col[rows], prow[pcols])
    else:
        T[rows] -= np.outer(col[rows], prow)
    T[rows, q] = 0


class _Budget:
    def __init__(self, cap):
        self.cap = cap
        self.used = 0

    def spend(self):
        if self.used >= self.cap:
            raise ResourceLimitError(f"simplex iteration cap of {self.cap} exceeded")
        self.used += 1


def _bland_loop(T, basis, ncols, budget, pivot_tol, cost_tol):
    """Iterate until optimal; return False if the LP is unbounded."""
    m = len(basis)
    basis_arr = np.asarray(basis)
    while True:
        red = T[m, :ncols]
        enter = np.flatnonzero((red < -cost_tol).astype(bool))
        if enter.size == 0:
            return True
        q = int(enter[0])
        col = T[:m, q]
        pos = np.flatnonzero((col > pivot_tol).astype(bool))
        if pos.size == 0:
            return False
        ratios = T[pos, -1] / col[pos]
        best = ratios.min()
        slack = 0 if cost_tol == 0 else 1e-12 * (1.0 + abs(float(best)))
        tied = pos[(ratios <= best + slack).astype(bool)]
        r = int(tied[np.argmin(basis_arr[tied])])
        budget.spend()
        _pivot(T, r, q)
        basis[r] = q
        basis_arr[r] = q
        if cost_tol:
            rhs = T[:m, -1]
            rhs[(rhs < 0) & (rhs > -FEAS_TOL)] = 0.0


def _solve_tableau(problem: LpProblem, opts: SolverOptions) -> SimplexSolution:
    exact = opts.exact
    sf = standardize(problem, exact=exact)
    m, N = sf.A.shape
    pivot_tol = 0 if exact else opts.pivot_tol
    cost_tol = 0 if exact else opts.pivot_tol
    zero = Fraction(0) if exact else 0.0
    cap = opts.max_iterations if opts.max_iterations is not None else 50 * (m + N)
    budget = _Budget(cap)

    basis = [-1] * m
    for k in range(sf.n_struct, N):
        rows = np.flatnonzero(np.asarray(sf.A[:, k] != 0, dtype=bool))
        (i,) = rows
        if sf.A[i, k] == 1 and basis[i] < 0:
            basis[i] = k
    art_rows = [i for i in range(m) if basis[i] < 0]
    n_art = len(art_rows)

    dtype = object if exact else float
    T = np.zeros((m + 1, N + n_art + 1), dtype=dtype)
    if exact:
        T[:] = zero
    T[:m, :N] = sf.A
    T[:m, -1] = sf.b
    for a, i in enumerate(art_rows):
        T[i, N + a] = 1
        basis[i] = N + a

    if n_art:
        T[m, N:N + n_art] = 1
        for i in art_rows:
            T[m] -= T[i]
        _bland_loop(T, basis, N + n_art, budget, pivot_tol, cost_tol)
        infeas = -T[m, -1]
        scale = 1.0 if exact else max(1.0, float(np.max(np.abs(sf.b.astype(float)), initial=0.0)))
        if infeas > (0 if exact else opts.feas_tol * scale):
            return SimplexSolution(Status.INFEASIBLE, None, float("inf"), (), budget.used)
        # drive zero-level artificials out of the basis where possible
        for i in range(m):
            if basis[i] >= N:
                cand = np.flatnonzero(np.asarray(np.abs(T[i, :N]) > pivot_tol, dtype=bool))
                if cand.size:
                    T[i, -1] = zero
                    budget.spend()
                    _pivot(T, i, int(cand[0]))
                    basis[i] = int(cand[0])

    T[m] = zero
    T[m, :N] = sf.c
    for i in range(m):
        cb = sf.c[basis[i]] if basis[i] < N else zero
        if cb != 0:
            T[m] -= cb * T[i]
    if not _bland_loop(T, basis, N, budget, pivot_tol, cost_tol):
        return SimplexSolution(Status.UNBOUNDED, None, float("-inf"), tuple(basis), budget.used)

    z = np.zeros(N + n_art, dtype=dtype)
    if exact:
        z[:] = zero
    for i, k in enumerate(basis):
        z[k] = T[i, -1]
    x = sf.recover(z)
    if exact:
        objective = sum((ci * xi for ci, xi in zip(_as_exact(problem.objective), x)), Fraction(0))
        return SimplexSolution(Status.OPTIMAL, x, objective, tuple(basis), budget.used)
    x = np.asarray(x, dtype=float)
    return SimplexSolution(Status.OPTIMAL, x, problem.value(x), tuple(basis), budget.used)


def solve_simplex(problem: LpProblem, opts: SolverOptions | None = None) -> SimplexSolution:
    """Minimise ``problem`` and return a basic optimal solution.

    Raises :class:`ResourceLimitError` when the iteration cap is hit.  The
    default cap is ``50 * (rows + cols)`` of the standardized system.
    """
    opts = opts or SolverOptions()
    if opts.engine == "tableau":
        return _solve_tableau(problem, opts)
    if opts.engine == "highs":
        from ._highs import solve_highs
        return solve_highs(problem, opts)
    raise ValueError(f"unknown engine {opts.engine!r}")


def active_rows(problem: LpProblem, x, tol: float = 1e-7) -> np.ndarray:
    """Stack of constraint and bound rows that are tight at ``x``."""
    x = np.asarray(x, dtype=float)
    rows = []
    if problem.num_rows:
        dense = problem.A.toarray()
        slack = dense @ x - problem.rhs
        scale = np.maximum(1.0, np.linalg.norm(dense, axis=1))
        rows.append(dense[np.abs(slack) <= tol * scale])
    eye = np.eye(problem.num_vars)
    tight_lo = np.isfinite(problem.lower) & (np.abs(x - problem.lower) <= tol)
    tight_up = np.isfinite(problem.upper) & (np.abs(x - problem.upper) <= tol)
    rows.append(eye[tight_lo])
    rows.append(eye[tight_up])
    return np.vstack(rows) if rows else np.zeros((0, problem.num_vars))


def is_vertex(problem: LpProblem, x, tol: float = 1e-7) -> bool:
    act = active_rows(problem, x, tol)
    if problem.num_vars == 0:
        return True
    return act.shape[0] >= problem.num_vars and np.linalg.matrix_rank(act) == problem.num_vars


def lp_from_sequences(c: Sequence[float], A_ub=None, b_ub=None, A_eq=None, b_eq=None,
                      lower=None, upper=None) -> LpProblem:
    """Convenience constructor in the familiar ``linprog`` layout."""
    c = np.asarray(c, dtype=float)
    blocks, senses, rhs = [], [], []
    for A, b, sense in ((A_ub, b_ub, "<="), (A_eq, b_eq, "=")):
        if A is None:
            continue
        A = np.atleast_2d(np.asarray(A, dtype=float))
        blocks.append(A)
        senses += [sense] * A.shape[0]
        rhs += list(np.asarray(b, dtype=float).ravel())
    A = np.vstack(blocks) if blocks else np.zeros((0, c.size))
    return LpProblem(c, A, senses, rhs, lower, upper)
