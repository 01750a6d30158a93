from fractions import Fraction

import numpy as np
import pytest

from dstab.compound import compound_of_product, pair_index, second_additive_compound
from dstab.exceptions import MatrixShapeError
from dstab.linalg import as_rational


def test_known_3x3():
    # oracle: derivative at t = 0 of the 2x2-minor matrix of I + tA (sympy)
    A = as_rational([[1, 2, 3], [4, 5, 6], [7, 8, 10]])
    C = second_additive_compound(A)
    assert C.matrix.tolist() == [[6, 6, -3], [8, 11, 2], [-7, 4, 15]]
    assert all(isinstance(x, Fraction) for x in C.matrix.ravel())
    assert C.index == ((0, 1), (0, 2), (1, 2))


def test_2x2_is_trace():
    A = np.array([[1.5, 2.0], [-3.0, 0.25]])
    assert second_additive_compound(A).matrix.tolist() == [[1.75]]


def test_diagonal():
    C = second_additive_compound(np.diag([1.0, 2.0, 4.0]))
    assert np.allclose(C.matrix, np.diag([3.0, 5.0, 6.0]))


def test_dimension(rng):
    for n in range(2, 7):
        C = second_additive_compound(rng.normal(size=(n, n)))
        assert C.matrix.shape == (n * (n - 1) // 2,) * 2
        assert len(pair_index(n)) == n * (n - 1) // 2


def test_n1_rejected():
    with pytest.raises(MatrixShapeError, match='n < 2'):
        second_additive_compound(np.eye(1))


def test_linearity(rng):
    A, B = rng.normal(size=(4, 4)), rng.normal(size=(4, 4))
    lhs = second_additive_compound(2 * A - B).matrix
    rhs = 2 * second_additive_compound(A).matrix - second_additive_compound(B).matrix
    assert np.allclose(lhs, rhs)


def test_product_with_diagonal(rng):
    A = rng.normal(size=(4, 4))
    d = np.array([0.5, 2.0, 3.0, 0.1])
    assert np.allclose(compound_of_product(d, A).matrix,
                       second_additive_compound(np.diag(d) @ A).matrix)
    assert np.allclose(np.asarray(compound_of_product(np.diag(d), A)),
                       second_additive_compound(np.diag(d) @ A).matrix)
    with pytest.raises(MatrixShapeError):
        compound_of_product([1.0, -1.0, 1.0, 1.0], A)
