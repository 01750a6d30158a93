"""Dense matrix kernels shared by every other module.

Two matrix representations are used throughout:

* floating matrices -- ``numpy.ndarray`` with ``float64`` (or ``complex128``) dtype;
* rational matrices -- ``numpy.ndarray`` with ``object`` dtype holding
  :class:`fractions.Fraction` entries. Arithmetic on these is exact.

Functions accept either and preserve exactness where the operation allows it.
"""

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
import warnings

import numpy as np
import scipy.linalg as sla

from . import config
from .exceptions import (DimensionGuardError, EigenvalueError, MatrixShapeError,
                         NotSymmetricError, SingularMatrixError,
                         SpectrumObstructionError)

__all__ = ['MAX_DIMENSION', 'Spectrum', 'Polynomial', 'LyapunovSolution',
           'as_matrix', 'as_float', 'as_rational', 'is_exact', 'identity',
           'eigenvalues', 'char_poly', 'principal_minor_sums', 'kron',
           'lyapunov_solve', 'is_positive_definite', 'is_negative_definite',
           'is_positive_semidefinite', 'det', 'inv', 'diag']

#: Desk-scale guard on dense matrix dimension.
MAX_DIMENSION = 64


def as_matrix(A, exact=None, *, guard=MAX_DIMENSION):
    """Validate ``A`` as a square matrix.

    ``exact=None`` keeps the representation of the input (an object array of
    rationals stays rational, everything else becomes ``float64``);
    ``exact=True`` converts to rationals (floats are converted exactly);
    ``exact=False`` converts to floats.
    """
    if isinstance(A, np.ndarray) and A.dtype == object:
        arr = A
    else:
        arr = np.asarray(A)
        if arr.dtype == object:
            pass
        elif not np.issubdtype(arr.dtype, np.number) and arr.dtype != bool:
            raise MatrixShapeError(f"non-numeric matrix of dtype {arr.dtype}")
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise MatrixShapeError(f"expected a square matrix, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise MatrixShapeError("empty matrix")
    if guard is not None and arr.shape[0] > guard:
        raise DimensionGuardError(
            f"dimension {arr.shape[0]} exceeds the dense guard n <= {guard}")

    if exact is None:
        exact = arr.dtype == object
    if exact:
        return as_rational(arr)
    out = as_float(arr)
    return out


def as_float(A):
    arr = np.asarray(A)
    if arr.dtype == object:
        try:
            arr = arr.astype(float)
        except TypeError:
            arr = arr.astype(complex)
    elif not np.issubdtype(arr.dtype, np.complexfloating):
        arr = arr.astype(float)
    if not np.all(np.isfinite(arr)):
        raise MatrixShapeError("matrix has non-finite entries")
    return arr


def _to_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, Rational):
        return Fraction(int(x.numerator), int(x.denominator))
    if isinstance(x, (float, np.floating)):
        if not np.isfinite(x):
            raise MatrixShapeError("matrix has non-finite entries")
        return Fraction(float(x))
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    raise MatrixShapeError(f"cannot represent {x!r} as an exact rational")


def as_rational(A):
    arr = np.asarray(A, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, x in np.ndenumerate(arr):
        out[idx] = _to_fraction(x)
    return out


def is_exact(A) -> bool:
    return isinstance(A, np.ndarray) and A.dtype == object


def identity(n, exact=False):
    if exact:
        out = np.empty((n, n), dtype=object)
        out[...] = Fraction(0)
        for i in range(n):
            out[i, i] = Fraction(1)
        return out
    return np.eye(n)


def diag(d, exact=None):
    """Diagonal matrix from a vector; exact when the vector holds rationals."""
    d = list(d)
    if exact is None:
        exact = any(isinstance(x, Fraction) for x in d)
    n = len(d)
    if exact:
        out = identity(n, exact=True)
        for i, x in enumerate(d):
            out[i, i] = _to_fraction(x)
        return out
    return np.diag(np.asarray(d, dtype=float))


# --------------------------------------------------------------------------
# Spectra
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Spectrum:
    """Eigenvalue multiset with a normwise backward-error estimate."""
    eigenvalues: np.ndarray
    residual: float

    def __len__(self):
        return len(self.eigenvalues)

    def __iter__(self):
        return iter(self.eigenvalues)

    @property
    def abscissa(self) -> float:
        """Largest real part."""
        return float(np.max(self.eigenvalues.real))

    def to_dict(self):
        return {'eigenvalues': [[float(z.real), float(z.imag)] for z in self.eigenvalues],
                'residual': float(self.residual)}


def _pair_conjugates(vals):
    # LAPACK returns exact pairs for real input; this keeps the invariant
    # when a caller hands in data that drifted.
    upper = vals[vals.imag > 0]
    lower = vals[vals.imag < 0]
    if len(upper) != len(lower):
        return vals
    real = vals[vals.imag == 0]
    return np.concatenate([real, upper, upper.conj()])


def _sort_spectrum(vals):
    order = np.lexsort((vals.imag, vals.real))
    return vals[order]


def eigenvalues(A) -> Spectrum:
    """Eigenvalues of a square matrix with a backward-error estimate.

    The residual is ``max_i ||A v_i - l_i v_i|| / (||A||_F ||v_i||)``, i.e. the
    normwise backward error of the computed eigenpairs (zero for ``A = 0``).
    """
    arr = as_matrix(A, exact=False)
    try:
        vals, vecs = np.linalg.eig(arr)
    except np.linalg.LinAlgError as exc:
        raise EigenvalueError(f"eigenvalue iteration failed to converge: {exc}") from exc

    scale = np.linalg.norm(arr)
    if scale == 0:
        residual = 0.0
    else:
        r = arr @ vecs - vecs * vals
        residual = float(np.max(np.linalg.norm(r, axis=0) / np.linalg.norm(vecs, axis=0)) / scale)
    if np.isrealobj(arr):
        vals = _pair_conjugates(vals.astype(complex))
    return Spectrum(_sort_spectrum(vals.astype(complex)), residual)


# --------------------------------------------------------------------------
# Characteristic polynomials
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Polynomial:
    """Univariate polynomial, coefficients in ascending degree."""
    coefficients: tuple

    def __post_init__(self):
        coeffs = list(self.coefficients)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, 'coefficients', tuple(coeffs))

    @property
    def degree(self) -> int:
        if len(self.coefficients) == 1 and self.coefficients[0] == 0:
            return -1
        return len(self.coefficients) - 1

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def __getitem__(self, k):
        return self.coefficients[k] if k < len(self.coefficients) else 0

    def __len__(self):
        return len(self.coefficients)


def _faddeev_leverrier(A):
    """Exact characteristic polynomial coefficients (ascending) over Q."""
    n = A.shape[0]
    eye = identity(n, exact=True)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    M = np.empty((n, n), dtype=object)
    M[...] = Fraction(0)
    for k in range(1, n + 1):
        M = A.dot(M) + coeffs[n - k + 1] * eye
        AM = A.dot(M)
        coeffs[n - k] = -sum(AM[i, i] for i in range(n)) / k
    return coeffs


def _hessenberg_charpoly(A):
    """Floating characteristic polynomial via Hessenberg reduction.

    Uses the three-term-free recurrence for upper Hessenberg determinants:
    p_k = (x - h_kk) p_{k-1} - sum_{i<k} h_ik (prod_{j=i+1..k} h_{j,j-1}) p_{i-1}.
    """
    H = sla.hessenberg(A)
    n = H.shape[0]
    polys = [np.array([1.0])]  # ascending coefficients; polys[k] = p_k
    for k in range(1, n + 1):
        hk = k - 1
        pk = np.zeros(k + 1)
        prev = polys[k - 1]
        pk[1:k + 1] += prev
        pk[:k] -= H[hk, hk] * prev
        sub = 1.0
        for i in range(k - 1, 0, -1):
            sub *= H[i, i - 1]
            if sub == 0.0:
                break
            term = H[i - 1, hk] * sub
            pk[:i] -= term * polys[i - 1]
        polys.append(pk)
    return list(polys[n])


def char_poly(A) -> Polynomial:
    """Monic characteristic polynomial ``det(x I - A)``, ascending coefficients.

    Exact (Faddeev-LeVerrier over the rationals) when ``A`` is rational,
    Hessenberg-based in floating point otherwise.
    """
    if is_exact(A):
        return Polynomial(tuple(_faddeev_leverrier(as_matrix(A, exact=True))))
    arr = as_matrix(A, exact=False)
    if np.iscomplexobj(arr):
        raise MatrixShapeError("char_poly expects a real or rational matrix")
    return Polynomial(tuple(_hessenberg_charpoly(arr)))


def principal_minor_sums(A) -> list:
    """Sums ``E_1..E_n`` of the k-by-k principal minors of ``A``.

    Read off the characteristic polynomial: ``det(xI - A) = sum_k (-1)^k E_k x^(n-k)``.
    """
    p = char_poly(A)
    n = len(p.coefficients) - 1
    return [(-1) ** k * p[n - k] for k in range(1, n + 1)]


def kron(A, B):
    """Kronecker product; block ``(i, j)`` equals ``a_ij * B``."""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.ndim != 2 or B.ndim != 2:
        raise MatrixShapeError("kron expects two matrices")
    return np.kron(A, B)


# --------------------------------------------------------------------------
# Exact and floating determinants / inverses
# --------------------------------------------------------------------------

def _det_exact(A):
    M = [list(row) for row in A]
    n = len(M)
    result = Fraction(1)
    for c in range(n):
        pivot = next((r for r in range(c, n) if M[r][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            M[c], M[pivot] = M[pivot], M[c]
            result = -result
        p = M[c][c]
        result *= p
        for r in range(c + 1, n):
            f = M[r][c]
            if f != 0:
                f = f / p
                row_r, row_c = M[r], M[c]
                for k in range(c + 1, n):
                    row_r[k] -= f * row_c[k]
    return result


def det(A):
    """Determinant; exact for rational input."""
    if is_exact(A):
        return _det_exact(as_matrix(A, exact=True, guard=None))
    arr = np.asarray(A)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise MatrixShapeError(f"expected a square matrix, got shape {arr.shape}")
    if arr.shape[0] == 0:
        return 1.0
    return np.linalg.det(arr)


def inv(A):
    """Inverse; exact Gauss-Jordan for rational input."""
    if not is_exact(A):
        try:
            return np.linalg.inv(as_matrix(A))
        except np.linalg.LinAlgError as exc:
            raise SingularMatrixError(str(exc)) from exc
    A = as_matrix(A, exact=True)
    n = A.shape[0]
    M = [list(A[i]) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for c in range(n):
        pivot = next((r for r in range(c, n) if M[r][c] != 0), None)
        if pivot is None:
            raise SingularMatrixError("matrix is singular")
        M[c], M[pivot] = M[pivot], M[c]
        p = M[c][c]
        M[c] = [x / p for x in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            out[i, j] = M[i][n + j]
    return out


# --------------------------------------------------------------------------
# Lyapunov equation
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LyapunovSolution:
    H: np.ndarray
    residual: float


def lyapunov_solve(A, Q, tol=None) -> LyapunovSolution:
    """Solve ``H A + A^T H = -Q`` through the vectorized n^2 x n^2 system.

    With column-major vectorization, ``vec(HA) = (A^T kron I) vec(H)`` and
    ``vec(A^T H) = (I kron A^T) vec(H)``.
    """
    tol = config.resolve(tol)
    A = as_matrix(A, exact=False)
    Q = as_matrix(Q, exact=False)
    n = A.shape[0]
    if Q.shape != A.shape:
        raise MatrixShapeError(f"Q has shape {Q.shape}, expected {A.shape}")
    if not np.allclose(Q, Q.T, rtol=0, atol=tol * max(1.0, np.abs(Q).max())):
        raise NotSymmetricError("Q must be symmetric")

    eye = np.eye(n)
    K = kron(A.T, eye) + kron(eye, A.T)
    rhs = -Q.reshape(-1, order='F')
    message = "vectorized Lyapunov operator is singular: sigma(A) intersects sigma(-A^T)"
    with warnings.catch_warnings(), np.errstate(divide='ignore', invalid='ignore'):
        warnings.simplefilter('error', sla.LinAlgWarning)
        try:
            vec = sla.solve(K, rhs)
        except (np.linalg.LinAlgError, sla.LinAlgWarning) as exc:
            raise SpectrumObstructionError(message) from exc
    if not np.all(np.isfinite(vec)):
        raise SpectrumObstructionError(message)
    H = vec.reshape(n, n, order='F')
    H = 0.5 * (H + H.T)
    residual = float(np.linalg.norm(H @ A + A.T @ H + Q))
    return LyapunovSolution(H, residual)


# --------------------------------------------------------------------------
# Definiteness
# --------------------------------------------------------------------------

def _hermitian_eigs(S, tol):
    S = np.asarray(S)
    if S.dtype == object:
        S = as_float(S)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise MatrixShapeError(f"expected a square matrix, got shape {S.shape}")
    scale = max(1.0, float(np.abs(S).max()) if S.size else 1.0)
    if np.abs(S - S.conj().T).max() > tol * scale:
        raise NotSymmetricError("matrix is not symmetric/Hermitian within tolerance")
    S = 0.5 * (S + S.conj().T)
    w = np.linalg.eigvalsh(S)
    return w, max(1.0, float(np.max(np.abs(w))))


def is_positive_definite(S, tol=None) -> bool:
    tol = config.resolve(tol)
    w, scale = _hermitian_eigs(S, tol)
    return bool(w[0] > tol * scale)


def is_negative_definite(S, tol=None) -> bool:
    tol = config.resolve(tol)
    w, scale = _hermitian_eigs(S, tol)
    return bool(w[-1] < -tol * scale)


def is_positive_semidefinite(S, tol=None) -> bool:
    tol = config.resolve(tol)
    w, scale = _hermitian_eigs(S, tol)
    return bool(w[0] > -tol * scale)
