import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.linalg import eig
from scipy.optimize import linear_sum_assignment

from dstab.criteria import DiagonalPerturbation, PerturbationClass, VerdictStatus
from dstab.exceptions import MatrixShapeError, PerturbationClassError, RegionError
from dstab.linalg import as_rational, is_exact
from dstab.regions import make_sector, spectrum_in_region
from dstab.systems import (DirectFormSystem, FractionalSystem, PerturbationShape, SecondOrderSystem,
                           StructuredPerturbation, canonical_form, embed_perturbation,
                           frac_order_to_sector, frac_system_dstab, relative_dstab_check,
                           sector_to_frac_order, system_from_dict, to_first_order,
                           to_first_order_eq6)

from conftest import COMPANION4


def random_system(rng, n):
    R = rng.normal(size=(n, n))
    mass = R @ R.T + n * np.eye(n)
    return SecondOrderSystem(mass, rng.normal(size=(n, n)), rng.normal(size=(n, n)))


class TestFirstOrder:
    def test_scalar(self):
        T = to_first_order(SecondOrderSystem([[2]], [[2]], [[4]]))
        assert np.array_equal(np.asarray(T, dtype=float), [[-1, -2], [1, 0]])

    def test_exact_stays_exact(self):
        sys = SecondOrderSystem(as_rational([[3]]), as_rational([[1]]), as_rational([[2]]))
        T = to_first_order(sys)
        assert is_exact(T) and T[0, 0] == Fraction(-1, 3) and T[0, 1] == Fraction(-2, 3)

    def test_quadratic_eigenvalues(self, rng):
        # generalized eigenproblem of the companion pencil as an independent oracle
        for _ in range(20):
            n = int(rng.integers(1, 5))
            sys = random_system(rng, n)
            M, B, C = sys.mass, sys.damping, sys.stiffness
            Z, I = np.zeros((n, n)), np.eye(n)
            ref = eig(np.block([[Z, I], [-C, -B]]), np.block([[I, Z], [Z, M]]), right=False)
            ours = np.linalg.eigvals(to_first_order(sys))
            cost = np.abs(np.subtract.outer(ours, ref))
            r, c = linear_sum_assignment(cost)
            assert cost[r, c].max() < 1e-8

    def test_shapes_and_mass(self):
        with pytest.raises(MatrixShapeError):
            SecondOrderSystem(np.eye(2), np.eye(2), np.eye(3))
        with pytest.raises(MatrixShapeError, match='symmetric'):
            SecondOrderSystem([[1.0, 1.0], [0.0, 1.0]], np.eye(2), np.eye(2))
        with pytest.raises(MatrixShapeError, match='positive definite'):
            SecondOrderSystem(-np.eye(2), np.eye(2), np.eye(2))

    def test_eq6_reproduces_companion(self):
        B = [[-1, -1], [-4, -5]]
        C = [[-1, Fraction(-4, 5)], [-4, -4]]
        T = DirectFormSystem(as_rational(B), as_rational(C)).first_order()
        assert [[T[i, j] for j in range(4)] for i in range(4)] == [
            [Fraction(x) for x in row] for row in COMPANION4]
        with pytest.raises(MatrixShapeError):
            to_first_order_eq6(np.eye(2), np.eye(3))

    def test_canonical_form(self, rng):
        for _ in range(10):
            sys = random_system(rng, 3)
            canon, Q = canonical_form(sys)
            assert np.allclose(Q.T @ Q, np.eye(3))
            assert np.allclose(canon.mass, np.diag(np.diag(canon.mass)))
            a = np.linalg.eigvals(to_first_order(sys))
            b = np.linalg.eigvals(to_first_order(canon))
            cost = np.abs(np.subtract.outer(a, b))
            r, c = linear_sum_assignment(cost)
            assert cost[r, c].max() < 1e-8


class TestEmbedding:
    T = np.arange(16, dtype=float).reshape(4, 4)

    def test_block_diag(self):
        p = StructuredPerturbation(PerturbationShape.BLOCK_DIAG_D, DiagonalPerturbation((2.0, 3.0)))
        out = embed_perturbation(p, self.T)
        assert np.array_equal(out, np.diag([2.0, 3.0, 1.0, 1.0]) @ self.T)

    def test_multiplicative_with_mass(self):
        d = DiagonalPerturbation((2.0, 0.5))
        mass = np.array([[2.0, 1.0], [1.0, 3.0]])
        p = StructuredPerturbation('SpeedsAndCoordsMultiplicative', d)
        out = embed_perturbation(p, self.T, mass)
        top = np.linalg.inv(mass) @ np.diag(d.d) @ mass @ self.T[:2]
        assert np.allclose(out[:2], top) and np.array_equal(out[2:], self.T[2:])
        assert np.array_equal(embed_perturbation(p, self.T),
                              np.diag([2.0, 0.5, 1.0, 1.0]) @ self.T)

    def test_additive(self):
        d = DiagonalPerturbation((1.0, 0.0), PerturbationClass.DNONNEG_ADDITIVE)
        D = np.diag([1.0, 0.0])
        for shape, mask in (('AdditiveSpeeds', (1, 0)), ('AdditiveCoords', (0, 1)),
                            ('AdditiveBoth', (1, 1))):
            out = embed_perturbation(StructuredPerturbation(shape, d), self.T)
            expect = self.T.copy()
            expect[:2, :2] += mask[0] * D
            expect[:2, 2:] += mask[1] * D
            assert np.array_equal(out, expect)

    def test_class_must_match_shape(self):
        with pytest.raises(PerturbationClassError):
            StructuredPerturbation('AdditiveSpeeds', DiagonalPerturbation((1.0, 1.0)))
        with pytest.raises(PerturbationClassError):
            StructuredPerturbation('BlockDiagD', DiagonalPerturbation((0.0, 1.0), 'DnonnegAdditive'))

    def test_shape_mismatch(self):
        p = StructuredPerturbation('BlockDiagD', DiagonalPerturbation((1.0,)))
        with pytest.raises(MatrixShapeError):
            embed_perturbation(p, self.T)


class TestRelativeCheck:
    def test_scalar_oscillator(self):
        # u'' + 2 d u' + 4 d u: damping ratio sqrt(d)/2 drops below 0.4 once d < 0.64
        sys = SecondOrderSystem([[1]], [[2]], [[4]])
        v = relative_dstab_check(sys, 0.4, budget=500)
        assert v.status is VerdictStatus.FALSIFIED
        assert v.witness.perturbation.d[0] == pytest.approx(0.64, abs=1e-6)

    def test_overdamped_is_falsified(self):
        # [[-3d, -d], [1, 0]] has damping ratio 1.5 sqrt(d) for d < 4/9
        sys = SecondOrderSystem(np.eye(2), 3 * np.eye(2), np.eye(2))
        v = relative_dstab_check(sys, 0.9, budget=500)
        assert v.status is VerdictStatus.FALSIFIED
        d = v.witness.perturbation.d
        assert min(d) == pytest.approx(0.36, abs=1e-6)

    def test_well_damped_diagonal_inconclusive(self):
        sys = SecondOrderSystem([[1]], [[2]], [[1]])
        assert relative_dstab_check(sys, 0.01, budget=300).status is VerdictStatus.INCONCLUSIVE

    def test_witness_leaves_the_sector(self):
        sys = SecondOrderSystem(np.eye(2), np.array([[1.0, 0.3], [0.3, 2.0]]), np.eye(2))
        v = relative_dstab_check(sys, 0.5, budget=300, seed=2)
        assert v.status is VerdictStatus.FALSIFIED
        out = np.diag(list(v.witness.perturbation.d) + [1.0, 1.0]) @ to_first_order(sys)
        assert not spectrum_in_region(np.linalg.eigvals(out), make_sector(math.acos(0.5))).all_inside

    @pytest.mark.parametrize('zeta', [0.0, 1.0, -0.2, 1.5])
    def test_zeta_range(self, zeta):
        with pytest.raises(RegionError):
            relative_dstab_check(SecondOrderSystem([[1]], [[1]], [[1]]), zeta)


class TestFractional:
    def test_maps(self):
        assert frac_order_to_sector(1) == pytest.approx(math.pi / 2)
        assert frac_order_to_sector(Fraction(4, 3)) == pytest.approx(math.pi / 3)
        assert sector_to_frac_order(math.pi / 3) == pytest.approx(4 / 3)
        for bad in (2, 0.5):
            with pytest.raises(RegionError):
                frac_order_to_sector(bad)
        with pytest.raises(RegionError):
            sector_to_frac_order(0.0)

    def test_exact_angle(self):
        v = frac_system_dstab(-np.eye(2), Fraction(4, 3))
        assert v.status is VerdictStatus.CERTIFIED

    def test_irrational_angle(self):
        v = frac_system_dstab(-np.eye(2), 1.5, budget=200)
        assert v.status is VerdictStatus.INCONCLUSIVE

    def test_falsified(self):
        v = frac_system_dstab([[-1.0, -6.0], [6.0, -9.0]], Fraction(4, 3), budget=500)
        assert v.status is VerdictStatus.FALSIFIED


class TestFromDict:
    def test_second_order(self):
        sys = system_from_dict({'mass': [[1]], 'damping': [[2]], 'stiffness': [[4]]})
        assert isinstance(sys, SecondOrderSystem) and sys.n == 1

    def test_eq6(self):
        sys = system_from_dict({'convention': 'eq6', 'B': [[1]], 'C': [[2]]})
        assert isinstance(sys, DirectFormSystem)
        with pytest.raises(MatrixShapeError):
            system_from_dict({'convention': 'eq6', 'B': [[1]], 'C': [[1, 2], [3, 4]]})

    def test_fractional(self):
        sys = system_from_dict({'matrix': [[-1]], 'gamma': '4/3'})
        assert isinstance(sys, FractionalSystem) and sys.gamma == Fraction(4, 3)

    def test_errors(self):
        with pytest.raises(MatrixShapeError):
            system_from_dict([1, 2])
        with pytest.raises(MatrixShapeError, match='stiffness'):
            system_from_dict({'mass': [[1]], 'damping': [[1]]})
