import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relieflp.bnb import solve_bnb
from relieflp.errors import InfeasibleInstanceError, IntegralityError, MalformedProblemError
from relieflp.harness import gen_kmedoid_instance, gen_nonexpendable_instance, gen_transport_instance
from relieflp.lp import SimplexSolution, SolverOptions, Status, solve_simplex
from relieflp.models import (KMedoidInstance, NonExpendableInstance, TransportInstance,
                             allocation_cost, build_expendable, build_expendable_matrix,
                             build_kmedoid, build_kmedoid_reduced_matrix, build_model,
                             build_nonexpendable, build_nonexpendable_matrix, extract_allocation,
                             integer_vars, kmedoid_block_c, kmedoid_reduced_b)
from relieflp.tu import is_tu_exhaustive

from helpers import enumerate_transport

LINE = KMedoidInstance.from_points([[0, 0], [1, 0], [2, 0], [10, 0]], 2)


def le_form(problem):
    """Coefficient matrix with every >= row negated into <= form."""
    A = problem.A.toarray()
    flip = np.array([s == ">=" for s in problem.senses])
    A[flip] *= -1
    return A


class TestInstances:
    def test_cost_shape(self):
        with pytest.raises(MalformedProblemError):
            TransportInstance([1, 2], [1], [[1, 2]])

    def test_negative_supply(self):
        with pytest.raises(MalformedProblemError):
            TransportInstance([-1], [0], [[1]])

    def test_fractional_demand(self):
        with pytest.raises(MalformedProblemError):
            TransportInstance([1], [0.5], [[1]])

    def test_asymmetric_distances_name_the_pair(self):
        with pytest.raises(MalformedProblemError, match=r"\(0, 2\)"):
            KMedoidInstance([[0, 1, 2], [1, 0, 1], [3, 1, 0]], 1)

    def test_nonzero_diagonal(self):
        with pytest.raises(MalformedProblemError, match="d\\[1,1\\]"):
            KMedoidInstance([[0, 1], [1, 2]], 1)


class TestExpendable:
    def test_dimensions(self):
        p = build_expendable(TransportInstance([1, 1], [1, 1, 0], np.ones((2, 3))))
        assert (p.num_vars, p.num_rows) == (6, 5)

    def test_example(self):
        inst = TransportInstance([3, 2], [2, 3], [[1, 2], [3, 1]])
        cost, _ = enumerate_transport(inst.supplies, inst.demands, inst.costs)
        assert solve_simplex(build_expendable(inst)).objective == pytest.approx(cost) == 6

    def test_zero_demand(self):
        sol = solve_simplex(build_expendable(TransportInstance([2, 1], [0, 0], [[1, 2], [3, 4]])))
        assert sol.objective == 0
        np.testing.assert_array_equal(sol.point, 0)

    def test_short_supply(self):
        with pytest.raises(InfeasibleInstanceError):
            build_expendable(TransportInstance([1], [2], [[1]]))

    def test_matrix_smallest(self):
        np.testing.assert_array_equal(build_expendable_matrix(1, 1).entries, [[-1], [1]])

    def test_matrix_2x2(self):
        np.testing.assert_array_equal(build_expendable_matrix(2, 2).entries,
                                      [[-1, 0, -1, 0], [0, -1, 0, -1], [1, 1, 0, 0], [0, 0, 1, 1]])

    @pytest.mark.parametrize("m,n", list(itertools.product(range(1, 4), repeat=2)))
    def test_matrix_matches_problem(self, m, n):
        p = build_expendable(TransportInstance(np.ones(m), np.zeros(n), np.ones((m, n))))
        np.testing.assert_array_equal(le_form(p), build_expendable_matrix(m, n).entries)


class TestNonExpendable:
    def test_dimensions(self):
        p = build_nonexpendable(NonExpendableInstance([1, 1], [1, 1], np.ones((2, 2))))
        assert (p.num_vars, p.num_rows) == (4, 2 + 4)
        assert build_nonexpendable_matrix(2, 2).shape == (2 * 3, 4)

    def test_example(self):
        inst = NonExpendableInstance([2, 1], [3, 2], [[1, 4], [2, 3]])
        brute, _ = enumerate_transport(inst.supplies, inst.demands, inst.costs, expendable=False)
        assert brute == 11
        assert solve_simplex(build_nonexpendable(inst)).objective == pytest.approx(11)

    def test_zero_demand(self):
        inst = NonExpendableInstance([2, 1], [0, 0], [[1, 4], [2, 3]])
        assert solve_simplex(build_nonexpendable(inst)).objective == 0

    def test_demand_beyond_capacity(self):
        with pytest.raises(InfeasibleInstanceError):
            build_nonexpendable(NonExpendableInstance([2, 1], [4, 0], np.ones((2, 2))))

    @pytest.mark.parametrize("m,n", list(itertools.product(range(1, 4), repeat=2)))
    def test_matrix_matches_problem(self, m, n):
        p = build_nonexpendable(NonExpendableInstance(np.ones(m), np.zeros(n), np.ones((m, n))))
        np.testing.assert_array_equal(le_form(p), build_nonexpendable_matrix(m, n).entries)

    @given(st.integers(0, 10_000))
    @settings(max_examples=30)
    def test_columns_decouple(self, seed):
        inst = gen_nonexpendable_instance(3, 4, seed, 6)
        full = solve_simplex(build_nonexpendable(inst)).objective
        parts = sum(
            solve_simplex(build_nonexpendable(NonExpendableInstance(
                inst.supplies, inst.demands[[j]], inst.costs[:, [j]]))).objective
            for j in range(inst.n))
        assert full == pytest.approx(parts, abs=1e-9)


class TestKMedoid:
    def test_dimensions(self):
        p = build_kmedoid(gen_kmedoid_instance(4, 0, 2))
        assert p.num_vars == 16 + 4
        assert p.num_rows == 4 + 16 + 1
        assert np.all(p.lower == 0) and np.all(p.upper == 1)

    def test_k_equals_n(self):
        inst = gen_kmedoid_instance(3, 5, 3)
        sol = solve_simplex(build_kmedoid(inst))
        assert sol.objective == pytest.approx(0)
        np.testing.assert_allclose(sol.point[9:], 1)
        np.testing.assert_allclose(sol.point[:9].reshape(3, 3), np.eye(3))

    def test_line(self):
        subsets = {s: sum(min(LINE.distances[i, j] for i in s) for j in range(4))
                   for s in itertools.combinations(range(4), 2)}
        best = min(subsets, key=subsets.get)
        assert best == (1, 3) and subsets[best] == 2
        sol = solve_simplex(build_kmedoid(LINE))
        assert sol.objective == pytest.approx(2)
        alloc = extract_allocation(sol, "kmedoid", 4, LINE)
        assert alloc.medoids == (1, 3)

    def test_two_points(self):
        inst = KMedoidInstance([[0, 2.5], [2.5, 0]], 1)
        assert solve_simplex(build_kmedoid(inst)).objective == pytest.approx(2.5)

    @pytest.mark.parametrize("k", [0, 5])
    def test_k_out_of_range(self, k):
        with pytest.raises(MalformedProblemError):
            build_kmedoid(gen_kmedoid_instance(4, 0, k))

    def test_reduced_matrix_n2(self):
        # I_2 over -I_2, then one column: e_2 in block 1, -e_2 in block 2
        np.testing.assert_array_equal(build_kmedoid_reduced_matrix(2).entries,
                                      [[1, 0, 1], [0, 1, 1], [-1, 0, -1], [0, -1, -1]])

    def test_reduced_matrix_n3(self):
        A = build_kmedoid_reduced_matrix(3)
        assert A.shape == (9, 8)
        assert is_tu_exhaustive(A).is_tu

    def test_block_c_n3(self):
        np.testing.assert_array_equal(kmedoid_block_c(3).entries,
                                      [[1, 1]] * 3 + [[-1, 0]] * 3)
        assert kmedoid_block_c(4).shape == (12, 3)

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_folding_last_block_gives_b(self, n):
        A = build_kmedoid_reduced_matrix(n).entries.astype(int)
        blocks = A.reshape(n, n, -1)
        folded = blocks[-1] + blocks[:-1].sum(axis=0)
        np.testing.assert_array_equal(folded, 0)
        np.testing.assert_array_equal(A[: n * (n - 1)], kmedoid_reduced_b(n).entries)


class TestExtract:
    def test_transport_grid(self):
        inst = TransportInstance([3, 2], [2, 3], [[1, 2], [3, 1]])
        alloc = extract_allocation(solve_simplex(build_expendable(inst)), "expendable", (2, 2), inst)
        np.testing.assert_array_equal(alloc.grid, [[2, 1], [0, 2]])
        assert allocation_cost(inst, alloc) == 6

    def test_kmedoid_self_assignment(self):
        inst = gen_kmedoid_instance(3, 1, 3)
        alloc = extract_allocation(solve_simplex(build_kmedoid(inst)), "kmedoid", 3, inst)
        assert alloc.medoids == (0, 1, 2)
        assert alloc.assignment == (0, 1, 2)

    def test_fractional_point(self):
        sol = SimplexSolution(Status.OPTIMAL, np.array([0.5, 1, 0, 1]), 0.0)
        with pytest.raises(IntegralityError) as err:
            extract_allocation(sol, "expendable", (2, 2))
        assert err.value.report.fractional_indices == (0,)

    def test_not_optimal(self):
        with pytest.raises(ValueError):
            extract_allocation(SimplexSolution(Status.INFEASIBLE, None, np.inf), "expendable", (1, 1))


@pytest.mark.parametrize("seed", range(15))
def test_allocation_lp_equals_ilp(seed):
    for inst in (gen_transport_instance(3, 4, seed, 6), gen_nonexpendable_instance(3, 3, seed, 6)):
        p = build_model(inst)
        lp = solve_simplex(p)
        ip = solve_bnb(p, integer_vars(inst))
        assert lp.objective == pytest.approx(ip.objective, abs=1e-6)


def test_kmedoid_relaxation_gap():
    # half-integral optimum strictly below the best medoid set; both LP engines agree
    inst = gen_kmedoid_instance(12, 21, 3)
    p = build_kmedoid(inst)
    lp = solve_simplex(p)
    assert lp.objective == pytest.approx(2.288842147591108, abs=1e-9)
    assert solve_simplex(p, SolverOptions(engine="highs")).objective == pytest.approx(lp.objective, abs=1e-9)
    assert lp.integrality().max_fractional_deviation == pytest.approx(0.5)
    ip = solve_bnb(p, integer_vars(inst))
    assert ip.objective == pytest.approx(2.310472209474914, abs=1e-9)
    assert ip.nodes_explored > 1
    with pytest.raises(IntegralityError):
        extract_allocation(lp, "kmedoid", 12, inst)


@given(st.integers(4, 12), st.integers(0, 10_000), st.data())
@settings(max_examples=30)
def test_assignment_targets_medoids(n, seed, data):
    k = data.draw(st.integers(1, n))
    inst = gen_kmedoid_instance(n, seed, k)
    sol = solve_simplex(build_kmedoid(inst))
    try:
        alloc = extract_allocation(sol, "kmedoid", n, inst)
    except IntegralityError:
        alloc = extract_allocation(solve_bnb(build_kmedoid(inst), integer_vars(inst)), "kmedoid", n, inst)
    assert len(alloc.medoids) == k
    assert set(alloc.assignment) <= set(alloc.medoids)
