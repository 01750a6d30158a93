"""Stability criteria over LMI regions under diagonal perturbations.

Per-D predicates (Lyapunov inequalities, the six boundary conditions, the
compound Q-tests) are decided exactly up to tolerance. Universally
quantified statements ("for every positive diagonal D") are decided only by
an exact polynomial certificate or by an explicit falsifying witness; random
sampling on its own never yields ``Certified``.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
import math
import time

import numpy as np

from . import certify, config
from .classes import classify, is_P0plus, is_Q
from .compound import second_additive_compound
from .exceptions import (DimensionGuardError, MatrixShapeError, PerturbationClassError,
                         RegionError, SingularMatrixError, SpectrumObstructionError,
                         UnsupportedError)
from .linalg import (as_float, as_matrix, as_rational, char_poly, eigenvalues, is_exact,
                     is_negative_definite, is_positive_definite, kron, lyapunov_solve)
from .regions import (LmiRegion, RegionKind, contains, spectrum_in_region,
                      zero_in_closure)

__all__ = ['PerturbationClass', 'DiagonalPerturbation', 'BoundaryTestBundle', 'VerdictStatus',
           'Witness', 'StabilityVerdict', 'verify_lyapunov', 'find_lyapunov_certificate',
           'sector_tilde', 'shift_reduce', 'boundary_tests_sector', 'boundary_tests_imaginary',
           'boundary_distance', 'fuller_stable', 'dstab_necessary', 'falsify_sweep',
           'relative_dstab_compound_check', 'shift_dstab_compound_check', 'dstab_check',
           'default_class', 'SAMPLE_RANGES', 'BISECTION_TOL']

#: log-uniform sampling intervals for the entries of D
SAMPLE_RANGES = {'Dplus': (1e-3, 1e3), 'DplusGe1': (1.0, 1e3), 'DnonnegAdditive': (1e-3, 1e3)}
BISECTION_TOL = 1e-10
#: probability that an additive sample entry is exactly zero
_ADDITIVE_ZERO_RATE = 0.25


class PerturbationClass(str, Enum):
    DPLUS = 'Dplus'
    DPLUS_GE1 = 'DplusGe1'
    DNONNEG_ADDITIVE = 'DnonnegAdditive'

    @property
    def additive(self) -> bool:
        return self is PerturbationClass.DNONNEG_ADDITIVE


@dataclass(frozen=True)
class DiagonalPerturbation:
    d: tuple
    cls: PerturbationClass = PerturbationClass.DPLUS

    def __post_init__(self):
        d = tuple(float(x) for x in np.ravel(self.d))
        object.__setattr__(self, 'd', d)
        object.__setattr__(self, 'cls', PerturbationClass(self.cls))
        if not all(math.isfinite(x) for x in d):
            raise PerturbationClassError("diagonal entries must be finite")
        if self.cls is PerturbationClass.DPLUS and min(d) <= 0:
            raise PerturbationClassError("class Dplus needs every d_i > 0")
        if self.cls is PerturbationClass.DPLUS_GE1 and min(d) < 1:
            raise PerturbationClassError("class DplusGe1 needs every d_i >= 1")
        if self.cls is PerturbationClass.DNONNEG_ADDITIVE and min(d) < 0:
            raise PerturbationClassError("class DnonnegAdditive needs every d_i >= 0")

    @property
    def n(self) -> int:
        return len(self.d)

    def matrix(self) -> np.ndarray:
        return np.diag(self.d)

    def apply(self, A) -> np.ndarray:
        """``D A`` for the multiplicative classes, ``A - D`` for the additive one."""
        A = as_float(A)
        if A.shape[0] != self.n:
            raise MatrixShapeError(f"D has {self.n} entries, A has dimension {A.shape[0]}")
        d = np.asarray(self.d)
        if self.cls.additive:
            return A - np.diag(d)
        return d[:, None] * A

    def to_dict(self):
        return {'d': list(self.d), 'class': self.cls.value}


def _diag_entries(D, n=None):
    if isinstance(D, DiagonalPerturbation):
        d = np.asarray(D.d, dtype=float)
    else:
        D = np.asarray(D, dtype=float)
        if D.ndim == 2:
            if np.any(D - np.diag(np.diag(D)) != 0):
                raise MatrixShapeError("D must be diagonal")
            D = np.diag(D)
        d = np.atleast_1d(D)
    if n is not None and d.shape[0] != n:
        raise MatrixShapeError(f"D has {d.shape[0]} entries, A has dimension {n}")
    return d


def _positive_entries(D, n):
    d = _diag_entries(D, n)
    if np.any(d <= 0):
        raise PerturbationClassError("D must be positive diagonal")
    return d


@dataclass(frozen=True)
class BoundaryTestBundle:
    """Outcome of the six boundary conditions for one fixed D.

    Each flag is ``True`` when the corresponding condition holds, i.e. no
    boundary eigenvalue is detected by that test.
    """
    c_i: bool
    c_ii: bool
    c_iii: bool
    c_iv: bool
    c_v: bool
    c_vi: bool

    @property
    def values(self):
        return (self.c_i, self.c_ii, self.c_iii, self.c_iv, self.c_v, self.c_vi)

    @property
    def agreement(self) -> bool:
        return len(set(self.values)) == 1

    def to_dict(self):
        keys = ('i', 'ii', 'iii', 'iv', 'v', 'vi')
        out = {k: v for k, v in zip(keys, self.values)}
        out['agreement'] = self.agreement
        return out


class VerdictStatus(str, Enum):
    CERTIFIED = 'Certified'
    FALSIFIED = 'Falsified'
    INCONCLUSIVE = 'Inconclusive'

    @property
    def exit_code(self) -> int:
        return {'Certified': 0, 'Falsified': 1, 'Inconclusive': 2}[self.value]


@dataclass(frozen=True)
class Witness:
    #: perturbation at which the spectrum leaves (or touches the boundary of) the region
    perturbation: DiagonalPerturbation
    eigenvalue: complex
    #: sampled perturbation that started the bisection, if any
    sample: DiagonalPerturbation | None = None
    t: float | None = None

    def to_dict(self):
        return {
            'd': list(self.perturbation.d),
            'class': self.perturbation.cls.value,
            'eigenvalue': [self.eigenvalue.real, self.eigenvalue.imag],
            'sample': None if self.sample is None else list(self.sample.d),
            't': self.t,
        }


@dataclass
class StabilityVerdict:
    status: VerdictStatus
    witness: Witness | None = None
    #: certificate document (polynomial) or Lyapunov matrix
    certificate: object = None
    certificate_id: str | None = None
    samples_tested: int = 0
    seed: int | None = None
    reason: str = ''
    stages: list = field(default_factory=list)

    def __post_init__(self):
        if self.status is VerdictStatus.FALSIFIED and self.witness is None:
            raise ValueError("a Falsified verdict needs a witness")
        if self.status is VerdictStatus.CERTIFIED and self.certificate is None:
            raise ValueError("a Certified verdict needs a certificate")

    @property
    def exit_code(self) -> int:
        return self.status.exit_code

    def timings(self) -> dict:
        return {s['stage']: s['seconds'] for s in self.stages if 'seconds' in s}

    def to_dict(self, include_certificate=True):
        # wall times are left out so that the dictionary is reproducible
        cert = self.certificate
        if isinstance(cert, np.ndarray):
            cert = {'lyapunovH': cert.tolist()}
        out = {
            'status': self.status.value,
            'witness': None if self.witness is None else self.witness.to_dict(),
            'certificateId': self.certificate_id,
            'samplesTested': self.samples_tested,
            'seed': self.seed,
            'reason': self.reason,
            'stages': [{k: v for k, v in s.items() if k != 'seconds'} for s in self.stages],
        }
        if include_certificate:
            out['certificate'] = cert
        return out


# --------------------------------------------------------------------------
# Lyapunov inequalities and reductions
# --------------------------------------------------------------------------

def sector_tilde(A, theta) -> np.ndarray:
    """Real 2n x 2n matrix whose Hurwitz stability is sector stability of ``A``.

    Its spectrum is ``sigma(A)`` rotated by ``+-(pi/2 - theta)``.
    """
    theta = float(theta)
    if not 0.0 < theta <= math.pi / 2 + 1e-15:
        raise RegionError(f"sector angle must lie in (0, pi/2], got {theta!r}")
    A = as_float(A)
    s, c = math.sin(theta), math.cos(theta)
    if abs(theta - math.pi / 2) <= 1e-15:
        s, c = 1.0, 0.0
    return np.block([[s * A, -c * A], [c * A, s * A]])


def shift_reduce(A, alpha) -> np.ndarray:
    A = as_matrix(A)
    if is_exact(A):
        return A - np.diag([Fraction(alpha)] * A.shape[0]).astype(object)
    return A - float(alpha) * np.eye(A.shape[0])


def _hurwitz(A, tol):
    return spectrum_in_region(eigenvalues(A), _HALF_PLANE, tol).all_inside


def verify_lyapunov(region: LmiRegion, A, H, tol=None) -> bool:
    """Check a Lyapunov certificate ``H`` for ``sigma(A)`` inside ``region``.

    An n x n ``H`` is tested against the Kronecker form
    ``W = L (x) H + M (x) (H A) + M^T (x) (A^T H)``. For sector regions a
    2n x 2n ``H`` is read as a certificate for the rotated matrix
    :func:`sector_tilde`, i.e. ``H Ã + Ã^T H < 0``.
    """
    tol = config.resolve(tol)
    A = as_float(A)
    H = np.atleast_2d(np.asarray(H, dtype=float))
    n = A.shape[0]
    if H.shape == (n, n):
        if not is_positive_definite(H, tol):
            return False
        W = kron(region.L, H) + kron(region.M, H @ A) + kron(region.M.T, A.T @ H)
        return is_negative_definite(0.5 * (W + W.T), tol)
    if H.shape == (2 * n, 2 * n) and region.kind is RegionKind.SECTOR:
        if not is_positive_definite(H, tol):
            return False
        T = sector_tilde(A, region.theta)
        W = H @ T + T.T @ H
        return is_negative_definite(0.5 * (W + W.T), tol)
    raise MatrixShapeError(f"H has shape {H.shape}, incompatible with A of dimension {n}")


def find_lyapunov_certificate(region: LmiRegion, A, tol=None):
    """Solve the Lyapunov equation with ``Q = I`` for the reduced matrix.

    Returns ``H`` (2n x 2n for sectors) or ``None`` when the reduced matrix
    is not Hurwitz.
    """
    tol = config.resolve(tol)
    A = as_float(A)
    if region.kind is RegionKind.LEFT_HALF_PLANE:
        R = A
    elif region.kind is RegionKind.SHIFTED:
        R = shift_reduce(A, region.alpha)
    elif region.kind is RegionKind.SECTOR:
        R = sector_tilde(A, region.theta)
    else:
        raise UnsupportedError("unsupported: general LMI feasibility out of scope")
    if not _hurwitz(R, tol):
        return None
    try:
        sol = lyapunov_solve(R, np.eye(R.shape[0]), tol)
    except SpectrumObstructionError:
        return None
    return sol.H


# --------------------------------------------------------------------------
# Boundary conditions for one fixed D
# --------------------------------------------------------------------------

def _nonsingular(M, tol, scale=0.0):
    # scale: size of the summands, so that exact cancellation reads as singular
    s = np.linalg.svd(M, compute_uv=False)
    return bool(s[-1] > tol * max(s[0], scale, np.finfo(float).tiny))


def _ray_distance(lam, w):
    # distance from lam to the ray {t w : t >= 0}, |w| = 1
    p = lam * w.conjugate()
    return abs(p.imag) if p.real > 0 else abs(lam)


def boundary_tests_sector(A, D, theta, tol=None, mirrored=False) -> BoundaryTestBundle:
    """Evaluate the six boundary conditions for one positive diagonal ``D``.

    ``z = cos(theta) + i sin(theta)`` as in the classical statement, whose
    rays lie in the closed right half-plane. ``mirrored=True`` uses
    ``z = -cos(theta) + i sin(theta)``, the rays bounding the sector about
    the negative real axis. Conditions (i), (iii) and (vi) concern ``DA``;
    (ii), (iv) and (v) concern ``D^-1 A`` (both determinants factor through
    it), so for a fixed D they coincide generically rather than identically.
    """
    tol = config.resolve(tol)
    A = as_float(A)
    n = A.shape[0]
    d = _positive_entries(D, n)
    if not _nonsingular(A, tol):
        raise SingularMatrixError("A must be nonsingular")
    theta = float(theta)
    if not 0.0 < theta <= math.pi / 2 + 1e-15:
        raise RegionError(f"sector angle must lie in (0, pi/2], got {theta!r}")
    c, s = math.cos(theta), math.sin(theta)
    if abs(theta - math.pi / 2) <= 1e-15:
        c, s = 0.0, 1.0
    if mirrored:
        c = -c
    z = complex(c, s)
    c2 = 2.0 * c
    Dm = np.diag(d)
    DA = d[:, None] * A
    eye = np.eye(n)

    spec = eigenvalues(DA).eigenvalues
    scale = max(1.0, float(np.max(np.abs(spec))))
    c_i = all(min(_ray_distance(lam, z), _ray_distance(lam, z.conjugate())) > tol * scale
              for lam in spec)

    ad = np.linalg.norm(A, 2) + float(d.max())
    c_ii = _nonsingular(A - z * Dm, tol, ad) and _nonsingular(A - z.conjugate() * Dm, tol, ad)

    S = DA @ DA - c2 * DA
    sq = eigenvalues(S).eigenvalues
    c_iii = bool(np.min(np.abs(sq + 1.0)) > tol * max(1.0, float(np.max(np.abs(sq)))))

    Ainv = np.linalg.inv(A)
    P, Q = A / d[None, :], d[:, None] * Ainv
    c_iv = _nonsingular(P + Q - c2 * eye, tol,
                        np.linalg.norm(P, 2) + np.linalg.norm(Q, 2) + abs(c2))

    block = np.block([[A, Dm], [-Dm, A - c2 * Dm]])
    c_v = _nonsingular(block, tol, ad * (1.0 + abs(c2)))

    coeffs = list(char_poly(DA).coefficients)
    r0, r1 = certify.divisibility_remainder(coeffs, Fraction(c2) if c2 else 0)
    c_vi = bool(max(abs(r0), abs(r1)) > tol * sum(abs(x) for x in coeffs))

    return BoundaryTestBundle(c_i, c_ii, c_iii, c_iv, c_v, c_vi)


def boundary_tests_imaginary(A, D, tol=None) -> BoundaryTestBundle:
    """The imaginary-axis case ``theta = pi/2`` of :func:`boundary_tests_sector`."""
    return boundary_tests_sector(A, D, math.pi / 2, tol)


def boundary_distance(A, D, theta, mirrored=False) -> float:
    """How close one instance is to a boundary event of the six conditions.

    Minimum of the distance from ``sigma(DA)`` to the two rays and the
    distances from ``sigma(DA)`` and ``sigma(D^-1 A)`` to ``{z, conj z}``.
    """
    A = as_float(A)
    d = _positive_entries(D, A.shape[0])
    c, s = math.cos(theta), math.sin(theta)
    z = complex(-c if mirrored else c, s)
    targets = (z, z.conjugate())
    best = math.inf
    for lam in eigenvalues(d[:, None] * A).eigenvalues:
        best = min(best, _ray_distance(lam, z), _ray_distance(lam, z.conjugate()),
                   *(abs(lam - t) for t in targets))
    for lam in eigenvalues(A / d[:, None]).eigenvalues:
        best = min(best, *(abs(lam - t) for t in targets))
    return best


# --------------------------------------------------------------------------
# Compound and minor criteria
# --------------------------------------------------------------------------

def fuller_stable(A, tol=None) -> bool:
    """Hurwitz stability via two Q-tests: ``-A`` and ``-A^[2]``."""
    A = as_matrix(A)
    if A.shape[0] < 2:
        raise MatrixShapeError("Fuller's test needs n >= 2")
    return is_Q(-A, tol) and is_Q(-second_additive_compound(A).matrix, tol)


def dstab_necessary(A, tol=None, guard=None) -> bool:
    """``-A`` is a P0+ matrix; ``False`` rules out multiplicative D-stability."""
    from .classes import ENUMERATION_GUARD
    return is_P0plus(-as_matrix(A), tol, ENUMERATION_GUARD if guard is None else guard)


def relative_dstab_compound_check(A, theta, D, tol=None) -> bool:
    """Both Q-tests on ``-(D~ Ã)`` and its second compound, for one fixed D."""
    A = as_float(A)
    d = _positive_entries(D, A.shape[0])
    dd = np.concatenate([d, d])
    M = dd[:, None] * sector_tilde(A, theta)
    return is_Q(-M, tol) and is_Q(-second_additive_compound(M).matrix, tol)


def shift_dstab_compound_check(A, alpha, D, tol=None) -> bool:
    """Both Q-tests on ``-(DA - alpha I)`` and its second compound, for one fixed D.

    Shifts ``alpha < 0`` admit only ``d_i >= 1``.
    """
    A = as_float(A)
    alpha = float(alpha)
    d = _positive_entries(D, A.shape[0])
    if alpha < 0:
        wrong = isinstance(D, DiagonalPerturbation) and D.cls is not PerturbationClass.DPLUS_GE1
        if wrong or np.any(d < 1):
            raise PerturbationClassError(
                "alpha < 0 requires D in class DplusGe1 (every d_i >= 1)")
    M = d[:, None] * A - alpha * np.eye(A.shape[0])
    return is_Q(-M, tol) and is_Q(-second_additive_compound(M).matrix, tol)


# --------------------------------------------------------------------------
# Falsification
# --------------------------------------------------------------------------

def default_class(region: LmiRegion, tol=None) -> PerturbationClass:
    """``Dplus`` when 0 lies in the closure of the region, otherwise ``DplusGe1``."""
    return PerturbationClass.DPLUS if zero_in_closure(region, tol) else PerturbationClass.DPLUS_GE1


def _sample(n, cls, seed, index):
    rng = np.random.default_rng([seed, index])
    lo, hi = SAMPLE_RANGES[cls.value]
    d = np.exp(rng.uniform(math.log(lo), math.log(hi), n))
    if cls.additive:
        d[rng.random(n) < _ADDITIVE_ZERO_RATE] = 0.0
    return DiagonalPerturbation(tuple(d), cls)


def _identity_perturbation(n, cls):
    return DiagonalPerturbation((0.0,) * n if cls.additive else (1.0,) * n, cls)


def _worst_eigenvalue(M, region):
    vals = eigenvalues(M).eigenvalues
    return complex(min(vals, key=lambda lam: contains(region, lam, 0.0).margin))


def _inside(M, region, tol):
    return spectrum_in_region(eigenvalues(M), region, tol).all_inside


def _bisect(perturb, region, sample, tol, bisect_tol=BISECTION_TOL):
    """Localize a boundary crossing on the segment from the identity to ``sample``."""
    cls = sample.cls
    d0 = np.asarray(sample.d)
    one = np.zeros_like(d0) if cls.additive else np.ones_like(d0)

    def at(t):
        return DiagonalPerturbation(tuple(t * d0 + (1 - t) * one), cls)

    lo, hi = 0.0, 1.0
    while hi - lo > bisect_tol:
        mid = 0.5 * (lo + hi)
        if _inside(perturb(at(mid)), region, tol):
            lo = mid
        else:
            hi = mid
    D = at(hi)
    return Witness(D, _worst_eigenvalue(perturb(D), region), sample, hi)


def _first_failure(perturb, n, region, cls, budget, seed, tol, workers):
    def check(i):
        D = _sample(n, cls, seed, i)
        return None if _inside(perturb(D), region, tol) else D

    if not workers or workers <= 1:
        for i in range(budget):
            D = check(i)
            if D is not None:
                return i, D
        return None
    chunk = max(1, 4 * workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for start in range(0, budget, chunk):
            idx = range(start, min(budget, start + chunk))
            for i, D in zip(idx, pool.map(check, idx)):
                if D is not None:
                    return i, D
    return None


def falsify_sweep(A, region: LmiRegion, cls=None, budget=1000, seed=0, tol=None,
                  workers=None, embed=None, dim=None) -> StabilityVerdict:
    """Search for a diagonal perturbation pushing the spectrum out of ``region``.

    Samples are drawn from per-index RNG streams derived from ``seed``, so
    the verdict does not depend on ``workers``. A failing sample is followed
    by bisection along the segment from the identity (zero for the additive
    class) to the sample.

    ``embed(A, D)`` overrides how a perturbation acts (default ``D.apply(A)``);
    ``dim`` is then the number of diagonal entries to sample.
    """
    if budget is None or int(budget) <= 0:
        raise ValueError("budget must be a positive integer")
    budget = int(budget)
    tol = config.resolve(tol)
    A = as_float(A)
    n = A.shape[0] if dim is None else int(dim)
    cls = default_class(region, tol) if cls is None else PerturbationClass(cls)

    def perturb(D):
        return D.apply(A) if embed is None else embed(A, D)

    base = _identity_perturbation(n, cls)
    if not _inside(perturb(base), region, tol):
        w = Witness(base, _worst_eigenvalue(perturb(base), region))
        return StabilityVerdict(VerdictStatus.FALSIFIED, w, samples_tested=0, seed=seed,
                                reason="spectrum of the unperturbed matrix is not inside the region")
    hit = _first_failure(perturb, n, region, cls, budget, seed, tol, workers)
    if hit is None:
        return StabilityVerdict(VerdictStatus.INCONCLUSIVE, samples_tested=budget, seed=seed,
                                reason=f"no violating perturbation among {budget} samples")
    index, sample = hit
    w = _bisect(perturb, region, sample, tol)
    return StabilityVerdict(VerdictStatus.FALSIFIED, w, samples_tested=index + 1, seed=seed,
                            reason=f"sample {index} leaves the region; boundary localized at t = {w.t:.12g}")


# --------------------------------------------------------------------------
# Pipeline
# --------------------------------------------------------------------------

_HALF_PLANE = LmiRegion(np.zeros((1, 1)), np.ones((1, 1)), RegionKind.LEFT_HALF_PLANE)


def _within_left_half_plane(region):
    # regions whose multiplicative D-stability implies ordinary D-stability
    if region.kind in (RegionKind.LEFT_HALF_PLANE, RegionKind.SECTOR):
        return True
    return region.kind is RegionKind.SHIFTED and region.alpha == 0


def _boundary_two_cos(region):
    """Exact ``2 Re z`` for the boundary point z of unit modulus, or ``None``."""
    if region.kind is RegionKind.LEFT_HALF_PLANE:
        return Fraction(0)
    if region.kind is RegionKind.SHIFTED and region.alpha == 0:
        return Fraction(0)
    if region.kind is RegionKind.SECTOR and region.two_cos is not None:
        # the rays bounding the sector pass through -cos(theta) +- i sin(theta)
        return -region.two_cos
    return None


def _applier(A):
    return lambda D: D.apply(A)


def _minor_witness(A, region, tol):
    """Perturbation exposing a failed minor condition: D = diag(1 on S, eps off S)."""
    n = A.shape[0]
    v = classify(-as_matrix(A), tol).first_violation
    if v is None:
        return None
    cls = PerturbationClass.DPLUS
    for k in range(1, 9):
        eps = 10.0 ** -k
        d = tuple(1.0 if i in v.indices else eps for i in range(n))
        sample = DiagonalPerturbation(d, cls)
        if not _inside(sample.apply(A), region, tol):
            return _bisect(_applier(A), region, sample, tol)
    return None


def _exact_certificate(A, region, multiplier_degree):
    c2 = _boundary_two_cos(region)
    if c2 is None:
        return None, "no rational value of 2cos(theta) for this region"
    Aq = as_matrix(A) if is_exact(as_matrix(A)) else as_rational(A)
    if Aq.shape[0] > certify.SYMBOLIC_GUARD:
        return None, f"n exceeds the symbolic guard {certify.SYMBOLIC_GUARD}"
    poly = certify.parametric_block_det(Aq, c2)
    cert = certify.orthant_positivity(poly, multiplier_degree)
    doc = certify.certificate_document(
        poly, cert, kind='blockDeterminant', twoCos=str(c2),
        matrix=[[str(x) for x in row] for row in Aq],
        constantTerm=str(cert.constant_term))
    return (cert, doc), None


def dstab_check(A, region: LmiRegion, cls=None, budget=1000, seed=0, tol=None, workers=None,
                multiplier_degree=6) -> StabilityVerdict:
    """Decide (region, D)-stability as far as the available tools allow.

    Stages: stability of ``A`` itself; the minor condition on ``-A`` for
    regions inside the left half-plane; an exact orthant certificate for the
    parametric boundary determinant; a falsification sweep.
    """
    tol = config.resolve(tol)
    A_in = as_matrix(A)
    A = as_float(A_in)
    n = A.shape[0]
    cls = default_class(region, tol) if cls is None else PerturbationClass(cls)
    if (cls is PerturbationClass.DPLUS and region.kind is RegionKind.SHIFTED
            and region.alpha < 0):
        raise PerturbationClassError("alpha < 0 requires D in class DplusGe1 (every d_i >= 1)")
    stages = []

    def stage(name, started, result):
        stages.append({'stage': name, 'result': result,
                       'seconds': round(time.perf_counter() - started, 6)})

    t0 = time.perf_counter()
    base = _identity_perturbation(n, cls)
    ok = _inside(base.apply(A), region, tol)
    stage('regionStability', t0, ok)
    if not ok:
        w = Witness(base, _worst_eigenvalue(base.apply(A), region))
        return StabilityVerdict(VerdictStatus.FALSIFIED, w, seed=seed, stages=stages,
                                reason="spectrum of A is not inside the region")

    multiplicative_plus = cls is PerturbationClass.DPLUS
    if multiplicative_plus and _within_left_half_plane(region):
        t0 = time.perf_counter()
        try:
            necessary = dstab_necessary(A_in, tol)
        except DimensionGuardError:
            necessary = None
        stage('necessaryMinors', t0, necessary)
        if necessary is False:
            t0 = time.perf_counter()
            w = _minor_witness(A, region, tol)
            stage('minorWitness', t0, w is not None)
            if w is not None:
                return StabilityVerdict(
                    VerdictStatus.FALSIFIED, w, seed=seed, stages=stages,
                    reason="-A is not a P0+ matrix; witness localized from the violated minor")

    certificate_note = "exact certificate not attempted"
    if multiplicative_plus and _boundary_two_cos(region) is not None:
        t0 = time.perf_counter()
        try:
            found, why = _exact_certificate(A_in, region, multiplier_degree)
        except (DimensionGuardError, SingularMatrixError) as exc:
            found, why = None, str(exc)
        if found is not None:
            cert, doc = found
            stage('exactCertificate', t0, cert.status.value)
            if cert.certified:
                return StabilityVerdict(
                    VerdictStatus.CERTIFIED, certificate=doc,
                    certificate_id=certify.certificate_id(doc), seed=seed, stages=stages,
                    reason=("parametric boundary determinant has one-signed coefficients"
                            + (f" after multiplying by prod(1 + d_i)^{cert.multiplier_degree}"
                               if cert.multiplier_degree else "")))
            certificate_note = "boundary determinant has mixed-sign coefficients"
        else:
            stage('exactCertificate', t0, why)
            certificate_note = why

    t0 = time.perf_counter()
    sweep = falsify_sweep(A, region, cls, budget, seed, tol, workers)
    stage('falsifySweep', t0, sweep.status.value)
    sweep.stages = stages
    if sweep.status is VerdictStatus.INCONCLUSIVE:
        sweep.reason = f"{certificate_note}; {sweep.reason}"
    return sweep
