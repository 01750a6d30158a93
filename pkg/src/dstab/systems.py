"""Second-order mechanical systems, structured perturbations and fractional-order maps."""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
import math

import numpy as np

from . import config
from .criteria import (DiagonalPerturbation, PerturbationClass, StabilityVerdict, dstab_check,
                       falsify_sweep)
from .exceptions import MatrixShapeError, PerturbationClassError, RegionError
from .formats import matrix_from_rows
from .linalg import as_float, as_matrix, identity, inv, is_exact, is_positive_definite
from .regions import make_sector

__all__ = ['SecondOrderSystem', 'DirectFormSystem', 'FractionalSystem', 'PerturbationShape',
           'StructuredPerturbation', 'to_first_order', 'to_first_order_eq6',
           'embed_perturbation', 'canonical_form', 'relative_dstab_check',
           'frac_order_to_sector', 'sector_to_frac_order', 'frac_system_dstab',
           'system_from_dict']


def _block(B, C):
    # [[B, C], [I, O]]
    n = B.shape[0]
    exact = is_exact(B) or is_exact(C)
    if exact:
        B, C = as_matrix(B, exact=True), as_matrix(C, exact=True)
    top = np.concatenate([B, C], axis=1)
    bottom = np.concatenate([identity(n, exact), identity(n, exact) * 0], axis=1)
    return np.concatenate([top, bottom], axis=0)


@dataclass(frozen=True, eq=False)
class SecondOrderSystem:
    """``mass u'' + damping u' + stiffness u = 0`` with a symmetric positive definite mass."""
    mass: np.ndarray
    damping: np.ndarray
    stiffness: np.ndarray

    def __post_init__(self):
        mass, damping, stiffness = (as_matrix(x) for x in (self.mass, self.damping, self.stiffness))
        if not (mass.shape == damping.shape == stiffness.shape):
            raise MatrixShapeError(
                f"mass, damping and stiffness shapes differ: "
                f"{mass.shape}, {damping.shape}, {stiffness.shape}")
        M = as_float(mass)
        if not np.allclose(M, M.T, rtol=0, atol=config.get_tolerance() * max(1.0, np.abs(M).max())):
            raise MatrixShapeError("mass matrix must be symmetric")
        if not is_positive_definite(M):
            raise MatrixShapeError("mass matrix must be positive definite")
        object.__setattr__(self, 'mass', mass)
        object.__setattr__(self, 'damping', damping)
        object.__setattr__(self, 'stiffness', stiffness)

    @property
    def n(self) -> int:
        return self.mass.shape[0]


@dataclass(frozen=True, eq=False)
class DirectFormSystem:
    """``x'' - B x' - C x = 0``, first-order matrix ``[[B, C], [I, O]]``."""
    B: np.ndarray
    C: np.ndarray

    def first_order(self):
        return to_first_order_eq6(self.B, self.C)


@dataclass(frozen=True, eq=False)
class FractionalSystem:
    matrix: np.ndarray
    gamma: float


def to_first_order(sys: SecondOrderSystem) -> np.ndarray:
    """``[[-A^-1 B, -A^-1 C], [I, O]]`` acting on ``(u', u)``."""
    Ainv = inv(sys.mass)
    return _block(-Ainv.dot(sys.damping), -Ainv.dot(sys.stiffness))


def to_first_order_eq6(B, C) -> np.ndarray:
    """``[[B, C], [I, O]]``; note the sign convention differs from :func:`to_first_order`."""
    B, C = as_matrix(B), as_matrix(C)
    if B.shape != C.shape:
        raise MatrixShapeError(f"B has shape {B.shape} but C has shape {C.shape}")
    return _block(B, C)


def canonical_form(sys: SecondOrderSystem):
    """Diagonalize the mass matrix by an orthogonal ``Q``.

    Returns the transformed system ``(Q^T A Q, Q^T B Q, Q^T C Q)`` and ``Q``.
    """
    w, Q = np.linalg.eigh(as_float(sys.mass))
    B, C = as_float(sys.damping), as_float(sys.stiffness)
    return SecondOrderSystem(np.diag(w), Q.T @ B @ Q, Q.T @ C @ Q), Q


class PerturbationShape(str, Enum):
    #: A u'' + D (B u' + C u) = 0, needs the mass matrix
    SPEEDS_AND_COORDS_MULTIPLICATIVE = 'SpeedsAndCoordsMultiplicative'
    ADDITIVE_SPEEDS = 'AdditiveSpeeds'
    ADDITIVE_COORDS = 'AdditiveCoords'
    ADDITIVE_BOTH = 'AdditiveBoth'
    #: diag(D, I) times the first-order matrix
    BLOCK_DIAG_D = 'BlockDiagD'

    @property
    def additive(self) -> bool:
        return self.value.startswith('Additive')


@dataclass(frozen=True)
class StructuredPerturbation:
    shape: PerturbationShape
    D: DiagonalPerturbation

    def __post_init__(self):
        shape = PerturbationShape(self.shape)
        object.__setattr__(self, 'shape', shape)
        if shape.additive != self.D.cls.additive:
            want = 'DnonnegAdditive' if shape.additive else 'Dplus'
            raise PerturbationClassError(f"shape {shape.value} needs a {want} perturbation")


def embed_perturbation(p: StructuredPerturbation, A_tilde, mass=None) -> np.ndarray:
    """Apply a structured perturbation to a 2n x 2n first-order matrix.

    Additive shapes add ``D`` to the speed block, the coordinate block or
    both of the top block row. ``BlockDiagD`` multiplies by ``diag(D, I)``.
    ``SpeedsAndCoordsMultiplicative`` multiplies the top block row by
    ``A^-1 D A`` for the given mass matrix ``A`` (identity if omitted, in
    which case it coincides with ``BlockDiagD``).
    """
    T = as_float(A_tilde)
    n = p.D.n
    if T.shape != (2 * n, 2 * n):
        raise MatrixShapeError(f"first-order matrix has shape {T.shape}, expected {(2 * n, 2 * n)}")
    d = np.asarray(p.D.d)
    out = T.copy()
    if p.shape is PerturbationShape.BLOCK_DIAG_D:
        out[:n] = d[:, None] * T[:n]
    elif p.shape is PerturbationShape.SPEEDS_AND_COORDS_MULTIPLICATIVE:
        if mass is None:
            out[:n] = d[:, None] * T[:n]
        else:
            A = as_float(mass)
            if A.shape != (n, n):
                raise MatrixShapeError(f"mass has shape {A.shape}, expected {(n, n)}")
            out[:n] = np.linalg.solve(A, d[:, None] * (A @ T[:n]))
    else:
        if p.shape in (PerturbationShape.ADDITIVE_SPEEDS, PerturbationShape.ADDITIVE_BOTH):
            out[:n, :n] += np.diag(d)
        if p.shape in (PerturbationShape.ADDITIVE_COORDS, PerturbationShape.ADDITIVE_BOTH):
            out[:n, n:] += np.diag(d)
    return out


def relative_dstab_check(sys: SecondOrderSystem, zeta, budget=1000, seed=0, tol=None,
                         workers=None) -> StabilityVerdict:
    """Search for ``diag(D, I) Ã`` leaving the sector of minimal damping ratio ``zeta``.

    The block condition tested here is implied by sector D-stability of the
    full first-order matrix; sampling can only falsify it or stay inconclusive.
    """
    zeta = float(zeta)
    if not 0.0 < zeta < 1.0:
        raise RegionError(f"damping ratio must lie in (0, 1), got {zeta!r}")
    theta = math.acos(zeta)
    T = as_float(to_first_order(sys))
    n = sys.n

    def embed(A, D):
        return embed_perturbation(StructuredPerturbation(PerturbationShape.BLOCK_DIAG_D, D), A)

    verdict = falsify_sweep(T, make_sector(theta), PerturbationClass.DPLUS, budget, seed, tol,
                            workers, embed=embed, dim=n)
    verdict.reason = f"block perturbation diag(D, I) of the first-order matrix, theta = {theta:.12g}: {verdict.reason}"
    return verdict


def frac_order_to_sector(gamma) -> float:
    """Sector half-angle ``theta = pi (1 - gamma / 2)`` for ``1 <= gamma < 2``."""
    g = float(gamma)
    if not 1.0 <= g < 2.0:
        raise RegionError(f"fractional order must satisfy 1 <= gamma < 2, got {gamma!r}")
    return math.pi * (1.0 - g / 2.0)


def sector_to_frac_order(theta) -> float:
    """Inverse map ``gamma = 2 (pi - theta) / pi`` for ``0 < theta <= pi/2``."""
    t = float(theta)
    if not 0.0 < t <= math.pi / 2 + 1e-15:
        raise RegionError(f"sector angle must lie in (0, pi/2], got {theta!r}")
    return 2.0 * (math.pi - t) / math.pi


def _frac_two_cos(gamma):
    # exact 2cos(theta) for gamma = 1 (theta = pi/2) and gamma = 4/3 (theta = pi/3)
    if isinstance(gamma, (Fraction, int)):
        g = Fraction(gamma)
        return {Fraction(1): Fraction(0), Fraction(4, 3): Fraction(1)}.get(g)
    return None


def frac_system_dstab(A, gamma, budget=1000, seed=0, tol=None, workers=None) -> StabilityVerdict:
    """D-stability of ``d^gamma x = D A x`` as sector D-stability of ``A``."""
    theta = frac_order_to_sector(gamma)
    two_cos = _frac_two_cos(gamma)
    region = make_sector(two_cos=two_cos) if two_cos is not None else make_sector(theta)
    return dstab_check(A, region, PerturbationClass.DPLUS, budget, seed, tol, workers)


def system_from_dict(doc, exact=False, source=None):
    """Build a system from its JSON form.

    ``{"mass", "damping", "stiffness"}`` gives a :class:`SecondOrderSystem`,
    ``{"convention": "eq6", "B", "C"}`` a :class:`DirectFormSystem` and
    ``{"matrix", "gamma"}`` a :class:`FractionalSystem`.
    """
    if not isinstance(doc, dict):
        raise MatrixShapeError("system JSON must be an object")

    def mat(key):
        if key not in doc:
            raise MatrixShapeError(f'system JSON is missing "{key}"')
        return matrix_from_rows(doc[key], exact, source=source)

    if doc.get('convention') == 'eq6':
        B, C = mat('B'), mat('C')
        if B.shape != C.shape:
            raise MatrixShapeError(f"B has shape {B.shape} but C has shape {C.shape}")
        return DirectFormSystem(B, C)
    if 'gamma' in doc:
        gamma = doc['gamma']
        if isinstance(gamma, str):
            gamma = Fraction(gamma)
        return FractionalSystem(mat('matrix'), gamma)
    return SecondOrderSystem(mat('mass'), mat('damping'), mat('stiffness'))
