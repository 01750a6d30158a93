"""Exact multivariate polynomials over Q and orthant non-vanishing certificates.

Polynomials live in the diagonal variables ``d1..dn`` plus one distinguished
indeterminate ``X``. Parametric determinants are expanded by a memoized
Laplace expansion over column subsets, so no polynomial division is needed.
"""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
import hashlib
import json
from numbers import Rational

import numpy as np

from .exceptions import DimensionGuardError, MatrixShapeError, SingularMatrixError
from .linalg import as_matrix, det, inv

__all__ = ['SYMBOLIC_GUARD', 'MultiPoly', 'det_multipoly', 'parametric_block_det',
           'parametric_charpoly_sum', 'parametric_charpoly', 'divisibility_remainder',
           'CertificateStatus', 'SignReason', 'PositivityCertificate', 'orthant_positivity',
           'certificate_document', 'certificate_id']

SYMBOLIC_GUARD = 6


def _frac(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, Rational):
        return Fraction(int(c.numerator), int(c.denominator))
    if isinstance(c, (int, np.integer)):
        return Fraction(int(c))
    if isinstance(c, (float, np.floating)):
        return Fraction(float(c))
    raise TypeError(f"cannot use {c!r} as an exact coefficient")


class MultiPoly:
    """Sparse polynomial in ``d1..dn`` and ``X`` with rational coefficients.

    ``terms`` maps exponent tuples of length ``nvars + 1`` (the last slot is
    the exponent of ``X``) to nonzero :class:`Fraction` coefficients.
    """

    __slots__ = ('nvars', 'terms')

    def __init__(self, terms=None, nvars=0):
        self.nvars = nvars
        clean = {}
        if terms:
            for exp, c in terms.items():
                exp = tuple(exp)
                if len(exp) != nvars + 1:
                    raise ValueError(f"exponent {exp} has length {len(exp)}, expected {nvars + 1}")
                c = _frac(c)
                if c != 0:
                    clean[exp] = c
        self.terms = clean

    @classmethod
    def _raw(cls, terms, nvars):
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj.terms = terms
        return obj

    @classmethod
    def constant(cls, c, nvars):
        c = _frac(c)
        return cls._raw({(0,) * (nvars + 1): c} if c else {}, nvars)

    @classmethod
    def variable(cls, i, nvars):
        """The diagonal variable ``d_{i+1}`` (``i`` is 0-based)."""
        exp = [0] * (nvars + 1)
        exp[i] = 1
        return cls._raw({tuple(exp): Fraction(1)}, nvars)

    @classmethod
    def indeterminate(cls, nvars):
        """The distinguished indeterminate ``X``."""
        return cls._raw({(0,) * nvars + (1,): Fraction(1)}, nvars)

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            if other.nvars != self.nvars:
                raise ValueError("polynomials over different variable sets")
            return other
        return MultiPoly.constant(other, self.nvars)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for exp, c in other.terms.items():
            s = out.get(exp, 0) + c
            if s:
                out[exp] = s
            else:
                out.pop(exp, None)
        return MultiPoly._raw(out, self.nvars)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw({e: -c for e, c in self.terms.items()}, self.nvars)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            c = _frac(other)
            if c == 0:
                return MultiPoly._raw({}, self.nvars)
            return MultiPoly._raw({e: v * c for e, v in self.terms.items()}, self.nvars)
        other = self._coerce(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return MultiPoly._raw(out, self.nvars)

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers are supported")
        result = MultiPoly.constant(1, self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        try:
            return self == MultiPoly.constant(other, self.nvars)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    # -- inspection -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    @property
    def variables(self):
        return [f"d{i + 1}" for i in range(self.nvars)] + ['X']

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * (self.nvars + 1), Fraction(0))

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree(self, var) -> int:
        """Degree in one variable; ``var`` is a 0-based d-index or ``'X'``."""
        pos = self.nvars if var == 'X' else var
        return max((e[pos] for e in self.terms), default=-1)

    def coefficients_in_x(self):
        """Coefficients of ``X^0, X^1, ...`` as polynomials in ``d`` only."""
        deg = self.degree('X')
        parts = [{} for _ in range(max(deg, 0) + 1)]
        for e, c in self.terms.items():
            parts[e[-1]][e[:-1] + (0,)] = c
        return [MultiPoly._raw(p, self.nvars) for p in parts]

    def substitute_x(self, value):
        value = _frac(value)
        out = MultiPoly._raw({}, self.nvars)
        power = Fraction(1)
        for k, coeff in enumerate(self.coefficients_in_x()):
            if k:
                power *= value
            out = out + coeff * power
        return out

    def evaluate(self, d, x=0):
        """Value at ``d = (d1..dn)`` and ``X = x``; exact for rational inputs."""
        d = list(d)
        if len(d) != self.nvars:
            raise ValueError(f"expected {self.nvars} values, got {len(d)}")
        point = d + [x]
        acc = 0
        for e, c in self.terms.items():
            term = c if all(isinstance(v, (Fraction, int)) for v in point) else float(c)
            for v, k in zip(point, e):
                if k:
                    term = term * v ** k
            acc = acc + term
        return acc

    def sorted_terms(self):
        """Terms in descending graded lexicographic order."""
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)

    def signs(self):
        return {1 if c > 0 else -1 for c in self.terms.values()}

    def to_dict(self):
        return {
            'variables': self.variables,
            'terms': [{'exp': list(e), 'coef': f"{c.numerator}/{c.denominator}"}
                      for e, c in self.sorted_terms()],
        }

    @classmethod
    def from_dict(cls, doc):
        nvars = len(doc['variables']) - 1
        return cls({tuple(t['exp']): Fraction(t['coef']) for t in doc['terms']}, nvars)

    def __repr__(self):
        if not self.terms:
            return '0'
        names = self.variables
        parts = []
        for e, c in self.sorted_terms():
            mono = '*'.join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append('-' + mono)
            else:
                parts.append(f"{c}*{mono}")
        return ' + '.join(parts).replace('+ -', '- ')


def _as_poly(x, nvars):
    return x if isinstance(x, MultiPoly) else MultiPoly.constant(x, nvars)


def det_multipoly(matrix, nvars):
    """Determinant of a square matrix of polynomials (memoized Laplace expansion)."""
    rows = [[_as_poly(x, nvars) for x in row] for row in matrix]
    m = len(rows)
    if any(len(r) != m for r in rows):
        raise MatrixShapeError("polynomial matrix must be square")
    if m == 0:
        return MultiPoly.constant(1, nvars)
    nonzero = [[c for c in range(m) if rows[r][c]] for r in range(m)]
    memo = {}

    def minor(r, mask):
        # determinant of rows r.. restricted to the columns set in mask
        if r == m:
            return MultiPoly.constant(1, nvars)
        key = (r, mask)
        hit = memo.get(key)
        if hit is not None:
            return hit
        acc = MultiPoly._raw({}, nvars)
        for c in nonzero[r]:
            bit = 1 << c
            if not mask & bit:
                continue
            sub = minor(r + 1, mask & ~bit)
            if not sub:
                continue
            # sign from the position of c among the remaining columns
            below = bin(mask & (bit - 1)).count('1')
            term = rows[r][c] * sub
            acc = acc - term if below & 1 else acc + term
        memo[key] = acc
        return acc

    return minor(0, (1 << m) - 1)


def _check_symbolic(A, guard):
    A = as_matrix(A, exact=True)
    n = A.shape[0]
    if guard is not None and n > guard:
        raise DimensionGuardError(f"n = {n} exceeds the symbolic guard n <= {guard}")
    return A, n


def parametric_block_det(A, two_cos, guard=SYMBOLIC_GUARD) -> MultiPoly:
    """``det([[A, D], [-D, A - 2cos(theta) D]])`` as a polynomial in ``d1..dn``.

    ``two_cos`` must be an exact rational (0 for theta = pi/2, 1 for pi/3).
    """
    A, n = _check_symbolic(A, guard)
    c = _frac(two_cos)
    if det(A) == 0:
        raise SingularMatrixError("A must be nonsingular")
    zero = MultiPoly.constant(0, n)
    d = [MultiPoly.variable(i, n) for i in range(n)]
    size = 2 * n
    M = [[zero] * size for _ in range(size)]
    for i in range(n):
        for j in range(n):
            M[i][j] = MultiPoly.constant(A[i, j], n)
            M[n + i][n + j] = MultiPoly.constant(A[i, j], n)
        M[i][n + i] = d[i]
        M[n + i][i] = -d[i]
        M[n + i][n + i] = M[n + i][n + i] - c * d[i]
    return det_multipoly(M, n)


def parametric_charpoly_sum(A, guard=SYMBOLIC_GUARD) -> MultiPoly:
    """Denominator-cleared characteristic polynomial of ``A D^-1 + D A^-1``.

    Returns ``det(X A D - A^2 - A D A^-1 D)``, which equals
    ``det(A) * prod(d) * det(X I - A D^-1 - D A^-1)``.
    """
    A, n = _check_symbolic(A, guard)
    if det(A) == 0:
        raise SingularMatrixError("A must be nonsingular")
    B = inv(A)
    A2 = A.dot(A)
    X = MultiPoly.indeterminate(n)
    d = [MultiPoly.variable(i, n) for i in range(n)]
    dd = [[d[k] * d[j] for j in range(n)] for k in range(n)]
    M = []
    for i in range(n):
        row = []
        for j in range(n):
            entry = X * d[j] * A[i, j] - A2[i, j]
            for k in range(n):
                coef = A[i, k] * B[k, j]
                if coef:
                    entry = entry - dd[k][j] * coef
            row.append(entry)
        M.append(row)
    return det_multipoly(M, n)


def parametric_charpoly(A, guard=SYMBOLIC_GUARD):
    """Coefficients (ascending in lambda) of ``det(lambda I - D A)``, each a polynomial in ``d``."""
    A, n = _check_symbolic(A, guard)
    X = MultiPoly.indeterminate(n)
    d = [MultiPoly.variable(i, n) for i in range(n)]
    M = [[(X if i == j else 0) - d[i] * A[i, j] for j in range(n)] for i in range(n)]
    return det_multipoly(M, n).coefficients_in_x()


def divisibility_remainder(coefficients, two_cos):
    """Remainder ``r1 * lambda + r0`` of division by ``lambda^2 - 2cos(theta) lambda + 1``.

    ``coefficients`` are ascending in lambda and may be rationals or
    :class:`MultiPoly`; the divisor is monic so the division is exact.
    """
    c = _frac(two_cos)
    coeffs = list(coefficients)
    if len(coeffs) < 3:
        raise ValueError("polynomial must have degree >= 2")
    for k in range(len(coeffs) - 1, 1, -1):
        q = coeffs[k]
        coeffs[k - 1] = coeffs[k - 1] + q * c
        coeffs[k - 2] = coeffs[k - 2] - q
        coeffs[k] = q * 0
    return coeffs[0], coeffs[1]


# --------------------------------------------------------------------------
# Orthant certificates
# --------------------------------------------------------------------------

class CertificateStatus(str, Enum):
    NONVANISHING = 'NonvanishingOnOrthant'
    INCONCLUSIVE = 'Inconclusive'


class SignReason(str, Enum):
    ALL_POSITIVE = 'AllCoefficientsPositive'
    ALL_NEGATIVE = 'AllCoefficientsNegative'
    MIXED = 'MixedSigns'
    ZERO = 'ZeroPolynomial'


@dataclass(frozen=True)
class PositivityCertificate:
    status: CertificateStatus
    reason: SignReason
    constant_term: Fraction
    #: N such that prod(1 + v)^N * poly is one-signed (0: the polynomial itself)
    multiplier_degree: int = 0
    checked: MultiPoly | None = field(default=None, compare=False, repr=False)

    @property
    def certified(self) -> bool:
        return self.status is CertificateStatus.NONVANISHING

    def to_dict(self):
        return {'status': self.status.value, 'reason': self.reason.value,
                'constantTerm': str(self.constant_term),
                'multiplierDegree': self.multiplier_degree}


def _one_sign(poly):
    if poly.is_zero():
        return SignReason.ZERO
    signs = poly.signs()
    if signs == {1}:
        return SignReason.ALL_POSITIVE
    if signs == {-1}:
        return SignReason.ALL_NEGATIVE
    return SignReason.MIXED


def orthant_positivity(poly: MultiPoly, multiplier_degree=0) -> PositivityCertificate:
    """Sufficient test that ``poly`` has no zero with all variables positive.

    A nonzero polynomial whose coefficients share one sign cannot vanish on
    the open positive orthant. With ``multiplier_degree = N > 0`` the test is
    repeated on ``prod_v (1 + v)^k * poly`` for k = 1..N (v ranging over the
    variables that occur); the multiplier is positive on the orthant, so a
    one-signed product is an equally valid certificate. Mixed signs at every
    k give ``Inconclusive``. ``X`` is treated as one more orthant variable.
    """
    reason = _one_sign(poly)
    const = poly.constant_term()
    if reason in (SignReason.ALL_POSITIVE, SignReason.ALL_NEGATIVE):
        return PositivityCertificate(CertificateStatus.NONVANISHING, reason, const, 0, poly)
    if reason is SignReason.ZERO or multiplier_degree <= 0:
        return PositivityCertificate(CertificateStatus.INCONCLUSIVE, reason, const, 0, poly)

    used = [i for i in range(poly.nvars + 1) if any(e[i] for e in poly.terms)]
    base = MultiPoly.constant(1, poly.nvars)
    for i in used:
        unit = [0] * (poly.nvars + 1)
        unit[i] = 1
        base = base * MultiPoly({tuple(unit): 1, (0,) * (poly.nvars + 1): 1}, poly.nvars)
    product = poly
    for k in range(1, multiplier_degree + 1):
        product = product * base
        r = _one_sign(product)
        if r is not SignReason.MIXED:
            return PositivityCertificate(CertificateStatus.NONVANISHING, r, const, k, product)
    return PositivityCertificate(CertificateStatus.INCONCLUSIVE, SignReason.MIXED, const, 0, poly)


def certificate_document(poly: MultiPoly, cert: PositivityCertificate, **context) -> dict:
    doc = poly.to_dict()
    doc['status'] = cert.status.value
    doc['reason'] = cert.reason.value
    doc['multiplierDegree'] = cert.multiplier_degree
    doc.update(context)
    return doc


def certificate_id(doc: dict) -> str:
    """Content hash of a certificate document (sha256 of canonical JSON)."""
    blob = json.dumps(doc, sort_keys=True, separators=(',', ':')).encode()
    return hashlib.sha256(blob).hexdigest()
