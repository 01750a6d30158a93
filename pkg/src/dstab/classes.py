"""Determinantal matrix classes: Q, P, P0 and P0+.

``Q`` is decided from the characteristic polynomial in polynomial time; ``P``
and ``P0`` need every principal minor and are guarded by an enumeration
limit.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import config
from .exceptions import DimensionGuardError
from .linalg import as_matrix, det, is_exact, principal_minor_sums

__all__ = ['ENUMERATION_GUARD', 'ClassReport', 'Violation', 'principal_minors',
           'is_Q', 'is_P', 'is_P0', 'is_P0plus', 'classify']

ENUMERATION_GUARD = 12


@dataclass(frozen=True)
class Violation:
    k: int
    indices: tuple
    value: object


@dataclass(frozen=True)
class ClassReport:
    isQ: bool
    isP: bool
    isP0: bool
    isP0plus: bool
    first_violation: Violation | None = None

    def to_dict(self):
        v = self.first_violation
        return {
            'isQ': self.isQ, 'isP': self.isP, 'isP0': self.isP0, 'isP0plus': self.isP0plus,
            'firstViolation': None if v is None else {
                'k': v.k, 'indices': [i + 1 for i in v.indices], 'value': str(v.value)},
        }


def _elementary_symmetric(values, k):
    # e_k by the standard O(n k) recurrence
    e = [1.0] + [0.0] * k
    for v in values:
        for j in range(k, 0, -1):
            e[j] += v * e[j - 1]
    return e[k]


def _q_thresholds(A, tol):
    """Per-order zero bands for the minor sums of a floating matrix.

    ``|E_k| <= e_k(singular values)``, so the band is relative to that bound.
    """
    s = np.linalg.svd(A, compute_uv=False)
    n = len(s)
    return [tol * max(_elementary_symmetric(s, k), np.finfo(float).tiny) for k in range(1, n + 1)]


def is_Q(A, tol=None) -> bool:
    """All sums of k-by-k principal minors are positive, k = 1..n."""
    A = as_matrix(A)
    sums = principal_minor_sums(A)
    if is_exact(A):
        return all(e > 0 for e in sums)
    thresholds = _q_thresholds(A, config.resolve(tol))
    return all(e > t for e, t in zip(sums, thresholds))


def _check_guard(n, guard):
    if guard is not None and n > guard:
        raise DimensionGuardError(
            f"enumeration too large: n = {n} exceeds the principal-minor guard {guard}; "
            f"raise the guard explicitly to enumerate {2 ** n - 1} minors")


def principal_minors(A, guard=ENUMERATION_GUARD):
    """Yield ``(k, indices, minor)`` for every principal minor, by increasing order."""
    A = as_matrix(A)
    n = A.shape[0]
    _check_guard(n, guard)
    for k in range(1, n + 1):
        for idx in combinations(range(n), k):
            sub = A[np.ix_(idx, idx)]
            yield k, idx, det(sub)


def _scan(A, strict, tol, guard):
    # floating minors of order k are treated as zero inside tol * max(1, ||A||)^k
    exact = is_exact(A)
    scale = 1.0 if exact else max(1.0, float(np.linalg.norm(np.asarray(A, dtype=float), 2)))
    for k, idx, m in principal_minors(A, guard):
        limit = 0 if exact else tol * scale ** k
        ok = m > limit if strict else m >= -limit
        if not ok:
            return Violation(k, idx, m)
    return None


def is_P(A, tol=None, guard=ENUMERATION_GUARD) -> bool:
    return _scan(as_matrix(A), True, config.resolve(tol), guard) is None


def is_P0(A, tol=None, guard=ENUMERATION_GUARD) -> bool:
    return _scan(as_matrix(A), False, config.resolve(tol), guard) is None


def is_P0plus(A, tol=None, guard=ENUMERATION_GUARD) -> bool:
    return is_P0(A, tol, guard) and is_Q(A, tol)


def classify(A, tol=None, guard=ENUMERATION_GUARD) -> ClassReport:
    """Full report; ``first_violation`` is the first minor failing the P0 test
    (or, for a P0-matrix, the first one failing the P test)."""
    A = as_matrix(A)
    tol = config.resolve(tol)
    q = is_Q(A, tol)
    v0 = _scan(A, False, tol, guard)
    vp = _scan(A, True, tol, guard) if v0 is None else v0
    p0 = v0 is None
    return ClassReport(isQ=q, isP=vp is None, isP0=p0, isP0plus=p0 and q,
                       first_violation=v0 if v0 is not None else vp)
