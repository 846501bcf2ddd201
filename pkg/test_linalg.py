"""Тесты сборки разреженных матриц и линейных решателей."""
import numpy as np
import pytest

from src.linalg import assemble, solve, solve_constrained
from src.utils.errors import InvalidInputError, SolverFailureError


def test_duplicate_triplets_are_summed():
    A = assemble([(0, 0, 1.0), (0, 0, 2.0), (1, 1, 4.0)], (2, 2))
    assert A[0, 0] == 3.0
    assert A[1, 1] == 4.0
    assert A.nnz == 2


def test_empty_triplets_give_zero_matrix():
    A = assemble([], (3, 3))
    assert A.shape == (3, 3)
    assert A.nnz == 0


def test_assembly_independent_of_triplet_order(rng):
    rows = rng.integers(0, 5, 40)
    cols = rng.integers(0, 5, 40)
    values = rng.normal(size=40)
    order = rng.permutation(40)
    A = assemble((rows, cols, values), (5, 5))
    B = assemble((rows[order], cols[order], values[order]), (5, 5))
    assert np.array_equal(A.indptr, B.indptr)
    assert np.array_equal(A.indices, B.indices)
    assert np.array_equal(A.data, B.data)


def test_out_of_range_index_rejected():
    with pytest.raises(InvalidInputError):
        assemble([(2, 0, 1.0)], (2, 2))


def test_identity_solve():
    A = assemble([(i, i, 1.0) for i in range(4)], (4, 4))
    b = np.array([1.0, -2.0, 3.0, 0.5])
    x, report = solve(A, b)
    assert np.allclose(x, b)
    assert report.success


@pytest.mark.parametrize("method", ["direct", "cg"])
def test_small_spd_solve(method):
    A = assemble([(0, 0, 2.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 2.0)], (2, 2))
    x, report = solve(A, [3.0, 3.0], method=method)
    assert x == pytest.approx([1.0, 1.0], abs=1e-10)
    assert report.method == method


def test_singular_matrix_fails():
    A = assemble([(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)], (2, 2))
    with pytest.raises(SolverFailureError):
        solve(A, [1.0, 2.0])


def test_unknown_method_and_shape_mismatch():
    A = assemble([(0, 0, 1.0), (1, 1, 1.0)], (2, 2))
    with pytest.raises(InvalidInputError):
        solve(A, [1.0, 1.0], method="gmres")
    with pytest.raises(InvalidInputError):
        solve(A, [1.0, 1.0, 1.0])


def test_constrained_solve_keeps_fixed_entries_zero():
    A = assemble([(i, i, 2.0) for i in range(3)], (3, 3))
    x, _ = solve_constrained(A, np.array([2.0, 4.0, 6.0]), np.array([0, 2]))
    assert x == pytest.approx([1.0, 0.0, 3.0])
