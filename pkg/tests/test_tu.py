import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from relieflp.errors import MalformedProblemError, WorkLimitError
from relieflp.tu import (Method, SignMatrix, SplitWitness, SubmatrixWitness, bareiss_det,
                         batch_det, find_split, is_tu_exhaustive, is_tu_ghouila_houri,
                         negate_line, prepend_identity, transpose)

from helpers import random_sign_matrix, random_tu_matrix


def cofactor_det(M):
    M = [list(r) for r in M]
    if not M:
        return 1
    if len(M) == 1:
        return M[0][0]
    return sum((-1) ** j * M[0][j] * cofactor_det([r[:j] + r[j + 1:] for r in M[1:]])
               for j in range(len(M)) if M[0][j])


def signed_split_exists(A, cols):
    """Try every assignment of the columns to the two parts."""
    for signs in itertools.product((1, -1), repeat=len(cols)):
        total = sum(s * A[:, j] for s, j in zip(signs, cols))
        if np.all(np.abs(total) <= 1):
            return True
    return False


sign_matrices = st.integers(1, 5).flatmap(lambda r: st.integers(1, 6).flatmap(
    lambda c: st.lists(st.lists(st.sampled_from([-1, 0, 1]), min_size=c, max_size=c),
                       min_size=r, max_size=r))).map(np.array)


class TestDeterminants:
    @given(st.integers(1, 6).flatmap(lambda k: st.lists(
        st.lists(st.integers(-3, 3), min_size=k, max_size=k), min_size=k, max_size=k)))
    def test_bareiss_matches_cofactor(self, M):
        assert bareiss_det(M) == cofactor_det(M)

    def test_batch_matches_scalar(self, rng):
        for k in range(1, 8):
            stack = rng.integers(-1, 2, size=(300, k, k))
            expect = [cofactor_det(m.tolist()) if k <= 5 else bareiss_det(m) for m in stack]
            np.testing.assert_array_equal(batch_det(stack), expect)

    def test_empty(self):
        assert bareiss_det(np.zeros((0, 0))) == 1


class TestExhaustive:
    def test_identity(self):
        rep = is_tu_exhaustive(np.eye(3, dtype=int))
        assert rep.is_tu and rep.method is Method.EXHAUSTIVE and rep.witness is None

    def test_det_two(self):
        rep = is_tu_exhaustive([[1, 1], [-1, 1]])
        assert not rep.is_tu
        assert rep.witness == SubmatrixWitness((0, 1), (0, 1), 2)

    def test_budget(self):
        with pytest.raises(WorkLimitError):
            is_tu_exhaustive(np.eye(6, dtype=int), work_budget=10)

    def test_rejects_other_entries(self):
        with pytest.raises(MalformedProblemError):
            SignMatrix([[2, 0]])

    @given(sign_matrices)
    def test_witness_is_valid(self, A):
        rep = is_tu_exhaustive(A)
        if not rep.is_tu:
            w = rep.witness
            sub = A[np.ix_(w.rows, w.cols)]
            assert abs(cofactor_det(sub.tolist())) >= 2
            assert cofactor_det(sub.tolist()) == w.determinant

    @given(sign_matrices)
    def test_verdict_matches_cofactor_enumeration(self, A):
        r, c = A.shape
        expect = all(abs(cofactor_det(A[np.ix_(rs, cs)].tolist())) <= 1
                     for k in range(1, min(r, c) + 1)
                     for rs in itertools.combinations(range(r), k)
                     for cs in itertools.combinations(range(c), k))
        assert is_tu_exhaustive(A).is_tu is expect


class TestGhouilaHouri:
    def test_identity(self):
        assert is_tu_ghouila_houri(np.eye(3, dtype=int), "all").is_tu

    def test_det_two_witness(self):
        A = np.array([[1, 1], [-1, 1]])
        assert not any([signed_split_exists(A, (0, 1))])
        rep = is_tu_ghouila_houri(A, "all")
        assert not rep.is_tu
        assert rep.witness == SplitWitness((0, 1))

    def test_split_is_valid(self, rng):
        for _ in range(50):
            A = random_sign_matrix(rng)
            cols = tuple(j for j in range(A.shape[1]) if rng.random() < 0.6) or (0,)
            signs = find_split(A, cols)
            assert (signs is not None) == signed_split_exists(A, cols)
            if signs is not None:
                assert np.all(np.abs(A[:, list(cols)] @ signs) <= 1)

    def test_agrees_with_exhaustive_on_random_4x5(self, rng):
        for _ in range(200):
            A = rng.choice([-1, 0, 1], size=(4, 5), p=[0.25, 0.5, 0.25])
            assert is_tu_ghouila_houri(A, "all").is_tu == is_tu_exhaustive(A).is_tu

    def test_sampled_finds_witness(self):
        rep = is_tu_ghouila_houri([[1, 1], [-1, 1]], "sampled", seed=3, trials=200)
        assert not rep.is_tu and rep.method is Method.SAMPLED

    def test_sampled_positive_is_flagged(self):
        rep = is_tu_ghouila_houri(np.eye(4, dtype=int), "sampled", seed=1, trials=50)
        assert rep.is_tu and rep.method is Method.SAMPLED

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            is_tu_ghouila_houri(np.eye(2, dtype=int), "greedy")

    @given(sign_matrices)
    def test_criterion_equivalence(self, A):
        assert is_tu_ghouila_houri(A, "all").is_tu == is_tu_exhaustive(A).is_tu


class TestClosure:
    def test_transpose_identity(self):
        assert transpose(np.eye(3, dtype=int)) == SignMatrix(np.eye(3, dtype=int))

    def test_negate_row(self):
        assert negate_line([[1, 0]], 0, 0) == SignMatrix([[-1, 0]])

    def test_negate_out_of_range(self):
        with pytest.raises(IndexError):
            negate_line([[1, 0]], 1, 2)

    def test_prepend_identity_shape(self):
        assert prepend_identity([[1, -1]]) == SignMatrix([[1, 1, -1]])

    def test_prepend_identity_keeps_tu(self, rng):
        for _ in range(100):
            A = random_tu_matrix(rng, 4, 4)
            assert is_tu_exhaustive(A).is_tu
            assert is_tu_exhaustive(prepend_identity(A)).is_tu

    @given(sign_matrices, st.data())
    def test_verdict_invariant(self, A, data):
        base = is_tu_exhaustive(A).is_tu
        assert is_tu_exhaustive(transpose(A)).is_tu is base
        axis = data.draw(st.sampled_from([0, 1]))
        idx = data.draw(st.integers(0, A.shape[axis] - 1))
        assert is_tu_exhaustive(negate_line(A, axis, idx)).is_tu is base
        assert is_tu_exhaustive(prepend_identity(A)).is_tu is base
