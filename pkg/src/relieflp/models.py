"""Relief allocation and location models.

Three problems are built here as :class:`~relieflp.lp.LpProblem` values:

``expendable``
    classical transportation problem: centre ``i`` ships at most ``s_i``
    units in total, incident point ``j`` receives at least ``d_j``.
``non_expendable``
    reusable resources: every single shipment ``x_ij`` is capped by the
    stock ``s_i`` of its centre, instead of the row total.
``kmedoid``
    choose ``k`` of the ``n`` incident points as relief centres and assign
    every point to one of them, minimising total distance.

Variables are ordered row-major, ``x[i, j]`` at ``i * n + j``; for k-medoid
the ``n`` selection variables ``y_i`` follow the ``n * n`` assignment
variables.  All indices are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import InfeasibleInstanceError, IntegralityError, MalformedProblemError
from .lp import INT_TOL, LpProblem, check_integrality
from .tu import SignMatrix

KINDS = ("expendable", "non_expendable", "kmedoid")


def _int_vector(values, name):
    arr = np.asarray(values)
    if arr.ndim != 1:
        raise MalformedProblemError(f"{name} must be a 1-D sequence")
    if arr.size and not np.all(np.equal(np.mod(arr, 1), 0)):
        raise MalformedProblemError(f"{name} must be integers, got {arr.tolist()}")
    arr = arr.astype(np.int64)
    if np.any(arr < 0):
        raise MalformedProblemError(f"{name} must be nonnegative, got {arr.tolist()}")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class TransportInstance:
    """Supplies ``s_i`` at ``m`` centres, demands ``d_j`` at ``n`` points, unit costs ``c_ij``."""

    supplies: np.ndarray
    demands: np.ndarray
    costs: np.ndarray

    kind = "expendable"

    def __post_init__(self):
        s = _int_vector(self.supplies, "supplies")
        d = _int_vector(self.demands, "demands")
        c = np.asarray(self.costs, dtype=float)
        if c.size == 0:
            c = c.reshape(s.size, d.size)
        if c.shape != (s.size, d.size):
            raise MalformedProblemError(f"cost grid has shape {c.shape}, expected {(s.size, d.size)}")
        if not np.all(np.isfinite(c)) or np.any(c < 0):
            raise MalformedProblemError("costs must be finite and nonnegative")
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "supplies", s)
        object.__setattr__(self, "demands", d)
        object.__setattr__(self, "costs", c)

    @property
    def m(self) -> int:
        return self.supplies.size

    @property
    def n(self) -> int:
        return self.demands.size

    def __eq__(self, other):
        return (type(self) is type(other)
                and np.array_equal(self.supplies, other.supplies)
                and np.array_equal(self.demands, other.demands)
                and np.array_equal(self.costs, other.costs))


class NonExpendableInstance(TransportInstance):
    """Same data as :class:`TransportInstance`; ``s_i`` caps each shipment from centre ``i``."""

    kind = "non_expendable"


@dataclass(frozen=True, eq=False)
class KMedoidInstance:
    """Symmetric distance matrix with zero diagonal and a medoid count ``k``."""

    distances: np.ndarray
    k: int

    kind = "kmedoid"

    def __post_init__(self):
        D = np.array(self.distances, dtype=float)
        if D.ndim != 2 or D.shape[0] != D.shape[1]:
            raise MalformedProblemError(f"distance matrix must be square, got shape {D.shape}")
        if not np.all(np.isfinite(D)) or np.any(D < 0):
            raise MalformedProblemError("distances must be finite and nonnegative")
        diag = np.flatnonzero(np.diag(D) != 0)
        if diag.size:
            i = int(diag[0])
            raise MalformedProblemError(f"distance d[{i},{i}] = {D[i, i]} must be zero")
        asym = np.argwhere(~np.isclose(D, D.T, rtol=1e-12, atol=1e-12))
        if asym.size:
            i, j = (int(v) for v in asym[0])
            raise MalformedProblemError(f"distance matrix is not symmetric at ({i}, {j}): "
                                        f"{D[i, j]} != {D[j, i]}")
        if int(self.k) != self.k:
            raise MalformedProblemError(f"k must be an integer, got {self.k!r}")
        D.flags.writeable = False
        object.__setattr__(self, "distances", D)
        object.__setattr__(self, "k", int(self.k))

    @classmethod
    def from_points(cls, points, k: int) -> "KMedoidInstance":
        P = np.asarray(points, dtype=float)
        if P.ndim != 2:
            raise MalformedProblemError("points must be an array of coordinate pairs")
        return cls(np.linalg.norm(P[:, None, :] - P[None, :, :], axis=2), k)

    @property
    def n(self) -> int:
        return self.distances.shape[0]

    def __eq__(self, other):
        return (type(self) is type(other) and self.k == other.k
                and np.array_equal(self.distances, other.distances))


@dataclass(frozen=True)
class Allocation:
    """Decoded integral solution.

    Transport models fill ``grid`` (``m x n`` integer shipments).  k-medoid
    fills ``medoids`` (sorted centre indices) and ``assignment`` where
    ``assignment[j]`` is the centre serving point ``j``.
    """

    kind: str
    grid: np.ndarray | None = None
    medoids: tuple = ()
    assignment: tuple = ()


# ---------------------------------------------------------------------------
# builders


def _check_kmedoid_k(inst: KMedoidInstance):
    if not 1 <= inst.k <= inst.n:
        raise MalformedProblemError(f"k = {inst.k} outside [1, {inst.n}]")


def build_expendable(inst: TransportInstance) -> LpProblem:
    """Transportation LP; demand rows first, then supply rows."""
    m, n = inst.m, inst.n
    if inst.supplies.sum() < inst.demands.sum():
        raise InfeasibleInstanceError(
            f"total supply {int(inst.supplies.sum())} < total demand {int(inst.demands.sum())}")
    demand = sp.kron(np.ones((1, m)), sp.eye(n))
    supply = sp.kron(sp.eye(m), np.ones((1, n)))
    A = sp.vstack([demand, supply]).tocsr()
    senses = [">="] * n + ["<="] * m
    rhs = np.concatenate([inst.demands, inst.supplies]).astype(float)
    return LpProblem(inst.costs.ravel(), A, senses, rhs)


def build_expendable_matrix(m: int, n: int) -> SignMatrix:
    """``(n + m) x mn`` system matrix: ``m`` copies of ``-I_n`` over a block row of ``e_n``'s."""
    if m < 1 or n < 1:
        raise ValueError("m and n must be at least 1")
    top = np.tile(-np.eye(n, dtype=np.int8), (1, m))
    bottom = np.kron(np.eye(m, dtype=np.int8), np.ones((1, n), dtype=np.int8))
    return SignMatrix(np.vstack([top, bottom]))


def build_nonexpendable(inst: TransportInstance) -> LpProblem:
    """Demand rows, then one capacity row ``x_ij <= s_i`` per cell."""
    m, n = inst.m, inst.n
    total = inst.supplies.sum()
    short = np.flatnonzero(inst.demands > total)
    if short.size:
        j = int(short[0])
        raise InfeasibleInstanceError(
            f"demand d[{j}] = {int(inst.demands[j])} exceeds combined capacity {int(total)}")
    demand = sp.kron(np.ones((1, m)), sp.eye(n))
    A = sp.vstack([demand, sp.eye(m * n)]).tocsr()
    senses = [">="] * n + ["<="] * (m * n)
    rhs = np.concatenate([inst.demands, np.repeat(inst.supplies, n)]).astype(float)
    return LpProblem(inst.costs.ravel(), A, senses, rhs)


def build_nonexpendable_matrix(m: int, n: int) -> SignMatrix:
    """``n(m+1) x mn`` system matrix: ``m`` copies of ``-I_n`` over ``I_mn``."""
    if m < 1 or n < 1:
        raise ValueError("m and n must be at least 1")
    top = np.tile(-np.eye(n, dtype=np.int8), (1, m))
    return SignMatrix(np.vstack([top, np.eye(m * n, dtype=np.int8)]))


def build_kmedoid(inst: KMedoidInstance) -> LpProblem:
    """LP relaxation of the k-medoid model, all variables boxed in ``[0, 1]``.

    Rows: ``n`` assignment equalities (one per point ``j``), ``n*n`` linking
    rows ``x_ij - y_i <= 0``, and the cardinality equality ``sum y = k``.
    """
    _check_kmedoid_k(inst)
    n = inst.n
    nn = n * n
    assign = sp.hstack([sp.kron(np.ones((1, n)), sp.eye(n)), sp.csr_array((n, n))])
    link = sp.hstack([sp.eye(nn), -sp.kron(sp.eye(n), np.ones((n, 1)))])
    card = sp.hstack([sp.csr_array((1, nn)), np.ones((1, n))])
    A = sp.vstack([assign, link, card]).tocsr()
    senses = ["="] * n + ["<="] * nn + ["="]
    rhs = np.concatenate([np.ones(n), np.zeros(nn), [inst.k]])
    c = np.concatenate([inst.distances.ravel(), np.zeros(n)])
    return LpProblem(c, A, senses, rhs, np.zeros(nn + n), np.ones(nn + n))


def kmedoid_block_c(n: int) -> SignMatrix:
    """``n(n-1) x (n-1)`` block: ``e_n`` across the first block row, then ``-e_n`` stepping down the diagonal."""
    if n < 2:
        raise ValueError("n must be at least 2")
    C = np.zeros((n * (n - 1), n - 1), dtype=np.int8)
    C[:n, :] = 1
    for b in range(1, n - 1):
        C[b * n:(b + 1) * n, b - 1] = -1
    return SignMatrix(C)


def build_kmedoid_reduced_matrix(n: int) -> SignMatrix:
    """``n^2 x (n^2 - 1)`` matrix left after eliminating variables with the equalities.

    Columns: ``I_{n(n-1)}`` stacked on a row of ``n - 1`` copies of ``-I_n``,
    then ``n - 1`` columns holding ``e_n`` in the first row block and ``-e_n``
    in row block ``b`` for column ``b - 1``.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    nn1 = n * (n - 1)
    left = np.vstack([np.eye(nn1, dtype=np.int8), np.tile(-np.eye(n, dtype=np.int8), (1, n - 1))])
    right = np.zeros((n * n, n - 1), dtype=np.int8)
    right[:n, :] = 1
    for b in range(1, n):
        right[b * n:(b + 1) * n, b - 1] = -1
    return SignMatrix(np.hstack([left, right]))


def kmedoid_reduced_b(n: int) -> SignMatrix:
    """``[I_{n(n-1)} C]``: the reduced matrix after folding the last row block away."""
    C = kmedoid_block_c(n).entries
    return SignMatrix(np.hstack([np.eye(n * (n - 1), dtype=np.int8), C]))


def build_model(inst) -> LpProblem:
    if isinstance(inst, KMedoidInstance):
        return build_kmedoid(inst)
    if isinstance(inst, NonExpendableInstance):
        return build_nonexpendable(inst)
    if isinstance(inst, TransportInstance):
        return build_expendable(inst)
    raise TypeError(f"unsupported instance type {type(inst).__name__}")


def integer_vars(inst) -> np.ndarray:
    """Indices that the integer program requires to be integral (all of them)."""
    n = inst.n * inst.n + inst.n if isinstance(inst, KMedoidInstance) else inst.m * inst.n
    return np.arange(n)


# ---------------------------------------------------------------------------
# decoding


def extract_allocation(solution, kind: str, dims, instance=None,
                       tolerance: float = INT_TOL) -> Allocation:
    """Round an optimal vertex to integers and map it back to the model.

    ``dims`` is ``(m, n)`` for transport models and ``n`` for k-medoid.  A
    point with a coordinate farther than ``tolerance`` from an integer raises
    :class:`IntegralityError`; nothing is silently rounded.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown model kind {kind!r}")
    point = getattr(solution, "point", solution)
    status = getattr(solution, "status", None)
    if point is None or (status is not None and getattr(status, "value", status) != "Optimal"):
        raise ValueError(f"cannot decode a solution with status {getattr(status, 'value', status)}")
    x = np.asarray(point, dtype=float)
    report = check_integrality(x, tolerance)
    if not report.is_integral:
        raise IntegralityError(
            f"point is fractional at {len(report.fractional_indices)} coordinates "
            f"(max deviation {report.max_fractional_deviation:.3g})", report)
    xi = np.rint(x).astype(np.int64)

    if kind == "kmedoid":
        n = int(dims if np.ndim(dims) == 0 else dims[0])
        if xi.size != n * n + n:
            raise MalformedProblemError(f"expected {n * n + n} coordinates, got {xi.size}")
        X = xi[:n * n].reshape(n, n)
        y = xi[n * n:]
        medoids = tuple(int(i) for i in np.flatnonzero(y == 1))
        if np.any(X.sum(axis=0) != 1):
            bad = int(np.flatnonzero(X.sum(axis=0) != 1)[0])
            raise MalformedProblemError(f"point {bad} is not assigned to exactly one centre")
        assignment = tuple(int(i) for i in X.argmax(axis=0))
        if any(y[i] != 1 for i in assignment):
            raise MalformedProblemError("a point is assigned to an unselected centre")
        if instance is not None and len(medoids) != instance.k:
            raise MalformedProblemError(f"{len(medoids)} centres selected, expected {instance.k}")
        return Allocation(kind, None, medoids, assignment)

    m, n = (int(v) for v in dims)
    if xi.size != m * n:
        raise MalformedProblemError(f"expected {m * n} coordinates, got {xi.size}")
    grid = xi.reshape(m, n)
    if instance is not None:
        if np.any(grid.sum(axis=0) < instance.demands):
            raise MalformedProblemError("allocation misses a demand")
        if kind == "expendable" and np.any(grid.sum(axis=1) > instance.supplies):
            raise MalformedProblemError("allocation exceeds a supply")
        if kind == "non_expendable" and np.any(grid > instance.supplies[:, None]):
            raise MalformedProblemError("a shipment exceeds its centre's capacity")
    grid.flags.writeable = False
    return Allocation(kind, grid)


def allocation_cost(inst, alloc: Allocation) -> float:
    if alloc.kind == "kmedoid":
        D = inst.distances
        return float(sum(D[i, j] for j, i in enumerate(alloc.assignment)))
    return float((inst.costs * alloc.grid).sum())
