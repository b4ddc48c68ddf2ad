"""Brute-force ground truth for small instances.

Nothing here touches the LP machinery: the transport oracle is an exhaustive
dynamic program over integer shipments, the non-expendable oracle fills each
destination greedily (columns share no constraints), and the k-medoid oracle
scores every ``k``-subset of points.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .errors import InfeasibleInstanceError, MalformedProblemError, WorkLimitError

TRANSPORT_BUDGET = 2_000_000
KMEDOID_BUDGET = 2_000_000


def _column_fills(caps, demand):
    """Every integer vector ``v`` with ``0 <= v <= caps`` and ``sum(v) == demand``."""
    if not caps:
        if demand == 0:
            yield ()
        return
    head, rest = caps[0], caps[1:]
    room = sum(rest)
    for v in range(max(0, demand - room), min(head, demand) + 1):
        for tail in _column_fills(rest, demand - v):
            yield (v,) + tail


def oracle_transport(inst, work_budget: int = TRANSPORT_BUDGET):
    """Cheapest integral shipment plan, found exhaustively.

    The search runs destination by destination over all remaining-capacity
    states.  Only columns that deliver exactly ``d_j`` are generated: with
    nonnegative costs any plan that over-delivers can be trimmed to one of
    these without raising its cost.  Returns ``(objective, grid)``.
    """
    s = tuple(int(v) for v in inst.supplies)
    d = tuple(int(v) for v in inst.demands)
    C = np.asarray(inst.costs, dtype=float)
    m, n = len(s), len(d)
    if sum(d) > sum(s):
        raise InfeasibleInstanceError(f"total demand {sum(d)} exceeds total supply {sum(s)}")
    work = n * math.prod(v + 1 for v in s)
    if work > work_budget:
        raise WorkLimitError(f"transport oracle needs ~{work} states, budget is {work_budget}")

    memo = {}

    def best(j, caps):
        if j == n:
            return 0.0, ()
        key = (j, caps)
        if key in memo:
            return memo[key]
        result = (math.inf, None)
        for col in _column_fills(caps, d[j]):
            cost = float(np.dot(C[:, j], col))
            if cost >= result[0]:
                continue
            tail_cost, tail = best(j + 1, tuple(c - v for c, v in zip(caps, col)))
            if tail is None:
                continue
            if cost + tail_cost < result[0]:
                result = (cost + tail_cost, (col,) + tail)
        memo[key] = result
        return result

    objective, cols = best(0, s)
    if cols is None:
        raise InfeasibleInstanceError("no integral shipment plan meets every demand")
    grid = np.array(cols, dtype=np.int64).reshape(n, m).T if n else np.zeros((m, 0), dtype=np.int64)
    return objective, grid


def oracle_nonexpendable(inst):
    """Fill every destination from its cheapest centres first.

    Each shipment is capped by its centre's stock and destinations share no
    constraint, so the greedy fill is optimal column by column.  Ties in
    cost go to the lower centre index.  Returns ``(objective, grid)``.
    """
    s = np.asarray(inst.supplies, dtype=np.int64)
    d = np.asarray(inst.demands, dtype=np.int64)
    C = np.asarray(inst.costs, dtype=float)
    m, n = C.shape
    grid = np.zeros((m, n), dtype=np.int64)
    total = 0.0
    for j in range(n):
        need = int(d[j])
        for i in np.argsort(C[:, j], kind="stable"):
            if need == 0:
                break
            take = min(int(s[i]), need)
            grid[i, j] = take
            need -= take
            total += take * C[i, j]
        if need:
            raise InfeasibleInstanceError(
                f"destination {j} needs {int(d[j])} units but centres can send only {int(s.sum())}")
    return total, grid


def oracle_kmedoid(inst, work_budget: int = KMEDOID_BUDGET):
    """Best medoid set by scoring all ``C(n, k)`` subsets.

    Each point is charged its distance to the nearest chosen medoid.  Among
    equal-cost subsets the lexicographically smallest wins.  Returns
    ``(objective, medoids)``.
    """
    D = np.asarray(inst.distances, dtype=float)
    n, k = D.shape[0], int(inst.k)
    if not 1 <= k <= n:
        raise MalformedProblemError(f"k = {k} outside [1, {n}]")
    count = math.comb(n, k)
    if count > work_budget:
        raise WorkLimitError(f"C({n}, {k}) = {count} subsets exceed the budget of {work_budget}")
    best_cost, best_set = math.inf, None
    combos = itertools.combinations(range(n), k)
    chunk = max(1, 400_000 // (k * n))
    while True:
        block = np.array(list(itertools.islice(combos, chunk)), dtype=np.intp)
        if block.size == 0:
            break
        costs = D[block].min(axis=1).sum(axis=1)
        i = int(np.argmin(costs))
        if costs[i] < best_cost:
            best_cost, best_set = float(costs[i]), tuple(int(v) for v in block[i])
    return best_cost, best_set
