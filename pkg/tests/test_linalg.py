import numpy as np
import pytest

from core.errors import DimensionMismatchError, NotSPDError, SingularMatrixError
from core.linalg import (
    as_symmat,
    as_vec,
    is_psd,
    is_spd,
    solve_general,
    solve_spd,
    weighted_norm_sq,
)


def test_solve_general_two_by_two():
    x = solve_general(np.array([[4.0, 1.0], [1.0, 3.0]]), np.array([1.0, 2.0]))
    np.testing.assert_allclose(x, [1.0 / 11.0, 7.0 / 11.0], rtol=0, atol=1e-15)


def test_solve_general_random_system(rng):
    A = rng.normal(size=(5, 5)) + 5.0 * np.eye(5)
    x = rng.normal(size=5)
    b = A @ x
    solved = solve_general(A, b)
    assert np.linalg.norm(A @ solved - b) <= 1e-12 * (np.linalg.norm(A) * np.linalg.norm(solved) + np.linalg.norm(b))
    np.testing.assert_allclose(solved, x, rtol=1e-12)


@pytest.mark.parametrize("A", [
    [[1.0, 2.0], [2.0, 4.0]],
    [[1.0, 0.0], [0.0, 0.0]],
])
def test_solve_general_singular(A):
    with pytest.raises(SingularMatrixError):
        solve_general(np.array(A), np.ones(2))


def test_solve_spd_two_by_two():
    x = solve_spd(np.array([[4.0, 1.0], [1.0, 3.0]]), np.array([1.0, 2.0]))
    np.testing.assert_allclose(x, [1.0 / 11.0, 7.0 / 11.0], rtol=0, atol=1e-15)


def test_solve_spd_round_trip(rng):
    B = rng.normal(size=(6, 6))
    A = B @ B.T + 6.0 * np.eye(6)
    x = rng.normal(size=6)
    np.testing.assert_allclose(solve_spd(A, A @ x), x, rtol=1e-10)


def test_solve_spd_rejects_indefinite():
    with pytest.raises(NotSPDError):
        solve_spd(np.array([[1.0, 2.0], [2.0, 1.0]]), np.ones(2))


def test_shape_mismatch():
    with pytest.raises(DimensionMismatchError):
        solve_general(np.eye(3), np.ones(2))


def test_as_symmat_symmetrizes_and_wraps_scalars():
    mat = as_symmat([[1.0, 2.0], [0.0, 1.0]])
    np.testing.assert_array_equal(mat, mat.T)
    assert mat[0, 1] == 1.0
    assert as_symmat(3.0).shape == (1, 1)
    with pytest.raises(NotSPDError):
        as_symmat([[0.0, 0.0], [0.0, 1.0]], require_spd=True)


def test_as_vec_checks():
    assert as_vec(2.0).shape == (1,)
    with pytest.raises(DimensionMismatchError):
        as_vec([1.0, 2.0], dim=3)
    with pytest.raises(ValueError):
        as_vec([1.0, np.nan])


def test_definiteness_predicates():
    assert is_spd(np.eye(2))
    assert not is_spd(np.diag([1.0, 0.0]))
    assert is_psd(np.diag([1.0, 0.0]))
    assert not is_psd(np.diag([1.0, -1.0]))


def test_weighted_norm():
    assert weighted_norm_sq(np.array([1.0, 2.0]), np.diag([2.0, 3.0])) == 14.0
    with pytest.raises(DimensionMismatchError):
        weighted_norm_sq(np.ones(2), np.eye(3))
