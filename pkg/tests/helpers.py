"""Shared generators and brute-force checks for the test suite."""

import itertools

import numpy as np


def directed_incidence(rng, rows, cols):
    """Columns with one +1 and one -1 (arcs of a digraph on ``rows`` nodes)."""
    A = np.zeros((rows, cols), dtype=int)
    for j in range(cols):
        if rows >= 2 and rng.random() < 0.8:
            u, v = rng.choice(rows, size=2, replace=False)
            A[u, j], A[v, j] = 1, -1
        else:
            A[rng.integers(rows), j] = rng.choice([-1, 1])
    return A


def interval_matrix(rng, rows, cols):
    """Every column is a run of consecutive ones."""
    A = np.zeros((rows, cols), dtype=int)
    for j in range(cols):
        a, b = sorted(rng.integers(0, rows + 1, size=2))
        A[a:b, j] = 1
    return A


def random_tu_matrix(rng, max_rows=5, max_cols=6):
    """Incidence or interval matrix (possibly transposed) with random row and column signs."""
    rows, cols = int(rng.integers(1, max_rows + 1)), int(rng.integers(1, max_cols + 1))
    family = rng.integers(3)
    if family == 0:
        A = directed_incidence(rng, rows, cols)
    elif family == 1:
        A = interval_matrix(rng, rows, cols)
    else:
        A = interval_matrix(rng, cols, rows).T
    A = A * rng.choice([-1, 1], size=(A.shape[0], 1)) * rng.choice([-1, 1], size=(1, A.shape[1]))
    return A


def random_sign_matrix(rng, max_rows=5, max_cols=6):
    rows, cols = int(rng.integers(1, max_rows + 1)), int(rng.integers(1, max_cols + 1))
    p0 = rng.uniform(0.2, 0.9)
    return rng.choice([-1, 0, 1], size=(rows, cols), p=[(1 - p0) / 2, p0, (1 - p0) / 2])


def enumerate_transport(s, d, c, expendable=True):
    """Every integer grid with 0 <= x_ij <= min(s_i, sum d); the cheapest feasible one."""
    s, d, c = np.asarray(s), np.asarray(d), np.asarray(c, dtype=float)
    m, n = c.shape
    ranges = [range(min(int(s[i]), int(d.sum())) + 1) for i in range(m) for _ in range(n)]
    best, arg = np.inf, None
    for cells in itertools.product(*ranges):
        X = np.array(cells).reshape(m, n)
        if np.any(X.sum(axis=0) < d):
            continue
        if expendable and np.any(X.sum(axis=1) > s):
            continue
        cost = float((c * X).sum())
        if cost < best:
            best, arg = cost, X
    return best, arg

