from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dstab import config
from dstab.exceptions import (DimensionGuardError, MatrixShapeError, NotSymmetricError,
                              SingularMatrixError, SpectrumObstructionError)
from dstab.linalg import (Polynomial, as_matrix, as_rational, char_poly, det, eigenvalues, inv,
                          is_exact, is_negative_definite, is_positive_definite,
                          is_positive_semidefinite, kron, lyapunov_solve, principal_minor_sums)


def small_int_matrices(max_n=5):
    return st.integers(1, max_n).flatmap(
        lambda n: st.lists(st.lists(st.integers(-6, 6), min_size=n, max_size=n),
                           min_size=n, max_size=n))


class TestAsMatrix:
    def test_rejects_non_square(self):
        with pytest.raises(MatrixShapeError):
            as_matrix(np.zeros((2, 3)))

    def test_guard(self):
        with pytest.raises(DimensionGuardError):
            as_matrix(np.eye(65))
        assert as_matrix(np.eye(65), guard=None).shape == (65, 65)

    def test_scalar_becomes_1x1(self):
        assert as_matrix(3.0).shape == (1, 1)

    def test_exact_conversion_is_exact(self):
        A = as_matrix([[0.1]], exact=True)
        assert is_exact(A)
        assert A[0, 0] == Fraction(0.1)

    def test_non_finite(self):
        with pytest.raises(MatrixShapeError):
            as_matrix([[np.nan]])


class TestEigenvalues:
    def test_identity(self):
        s = eigenvalues(np.eye(3))
        assert np.allclose(s.eigenvalues, [1, 1, 1])
        assert s.residual == 0.0

    def test_rotation_pairs_conjugates(self):
        s = eigenvalues([[0.0, 1.0], [-1.0, 0.0]])
        assert s.eigenvalues[0] == np.conj(s.eigenvalues[1])
        assert s.abscissa == pytest.approx(0.0)

    def test_companion(self, companion4):
        s = eigenvalues(companion4)
        assert s.residual < 1e-12
        assert s.abscissa < 0
        assert np.allclose(sorted(s.eigenvalues.real), sorted(np.linalg.eigvals(
            np.asarray(companion4, dtype=float)).real))

    def test_to_dict(self):
        d = eigenvalues(np.diag([1.0, 2.0])).to_dict()
        assert d['eigenvalues'] == [[1.0, 0.0], [2.0, 0.0]]


class TestCharPoly:
    def test_exact_companion(self, companion4):
        # coefficients from a sympy expansion of det(XI - A)
        p = char_poly(companion4)
        assert p.coefficients == (Fraction(4, 5), Fraction(9, 5), 6, 6, 1)

    def test_exact_and_float_agree(self, rng):
        A = rng.integers(-5, 6, size=(5, 5))
        exact = char_poly(as_rational(A)).coefficients
        approx = char_poly(A.astype(float)).coefficients
        assert np.allclose([float(x) for x in exact], approx, rtol=1e-9, atol=1e-9)

    def test_matches_numpy_poly(self, rng):
        A = rng.normal(size=(6, 6))
        ours = char_poly(A).coefficients
        ref = np.poly(A)[::-1]
        assert np.allclose(ours, ref, rtol=1e-8, atol=1e-10)

    @settings(max_examples=60, deadline=None)
    @given(small_int_matrices())
    def test_cayley_hamilton(self, rows):
        A = as_rational(np.array(rows, dtype=object))
        p = char_poly(A)
        n = A.shape[0]
        acc = np.zeros((n, n), dtype=object)
        acc[...] = Fraction(0)
        power = as_rational(np.eye(n, dtype=int))
        for c in p.coefficients:
            acc = acc + c * power
            power = power.dot(A)
        assert all(x == 0 for x in acc.ravel())

    def test_minor_sums(self):
        A = np.array([[2.0, 1.0], [1.0, 3.0]])
        assert np.allclose(principal_minor_sums(A), [5.0, 5.0])

    def test_polynomial_trims_and_evaluates(self):
        p = Polynomial((1, 0, 2, 0, 0))
        assert p.degree == 2
        assert p(3) == 19
        assert p[7] == 0


class TestDetInv:
    def test_exact_det(self, companion4):
        assert det(companion4) == Fraction(4, 5)

    @settings(max_examples=60, deadline=None)
    @given(small_int_matrices())
    def test_det_matches_float(self, rows):
        A = np.array(rows, dtype=float)
        assert float(det(as_rational(A))) == pytest.approx(np.linalg.det(A), abs=1e-6, rel=1e-9)

    def test_inverse_exact(self, companion4):
        B = inv(companion4)
        prod = companion4.dot(B)
        assert all(prod[i, j] == (1 if i == j else 0) for i in range(4) for j in range(4))

    def test_singular(self):
        with pytest.raises(SingularMatrixError):
            inv(as_rational([[1, 2], [2, 4]]))
        with pytest.raises(SingularMatrixError):
            inv(np.array([[1.0, 2.0], [2.0, 4.0]]))


class TestKronLyapunov:
    def test_kron_block_layout(self):
        A = np.array([[1.0, 2.0], [3.0, 4.0]])
        K = kron(A, np.eye(2))
        assert np.array_equal(K[2:, :2], 3 * np.eye(2))

    def test_lyapunov_identity(self):
        sol = lyapunov_solve(-np.eye(3), np.eye(3))
        assert np.allclose(sol.H, 0.5 * np.eye(3))
        assert sol.residual < 1e-12

    def test_lyapunov_random_residual(self, rng):
        A = rng.normal(size=(5, 5)) - 4 * np.eye(5)
        sol = lyapunov_solve(A, np.eye(5))
        assert np.allclose(sol.H @ A + A.T @ sol.H, -np.eye(5), atol=1e-9)
        assert is_positive_definite(sol.H)

    def test_lyapunov_obstruction(self):
        # eigenvalues 1 and -1 make the vectorized operator singular
        with pytest.raises(SpectrumObstructionError):
            lyapunov_solve(np.diag([1.0, -1.0]), np.eye(2))

    def test_lyapunov_rejects_nonsymmetric_q(self):
        with pytest.raises(NotSymmetricError):
            lyapunov_solve(-np.eye(2), np.array([[1.0, 1.0], [0.0, 1.0]]))


class TestDefiniteness:
    def test_signs(self):
        assert is_positive_definite(np.eye(2))
        assert is_negative_definite(-np.eye(2))
        assert not is_positive_definite(np.diag([1.0, 0.0]))
        assert is_positive_semidefinite(np.diag([1.0, 0.0]))

    def test_band_follows_tolerance(self):
        S = np.diag([1.0, 1e-12])
        assert not is_positive_definite(S)
        with config.tolerance(1e-14):
            assert is_positive_definite(S)

    def test_nonsymmetric(self):
        with pytest.raises(NotSymmetricError):
            is_positive_definite(np.array([[1.0, 2.0], [0.0, 1.0]]))
