"""Second additive compound matrices."""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .exceptions import MatrixShapeError
from .linalg import as_matrix, is_exact

__all__ = ['CompoundMatrix', 'pair_index', 'second_additive_compound', 'compound_of_product']


@dataclass(frozen=True)
class CompoundMatrix:
    n: int
    matrix: np.ndarray
    #: row/column labels, 0-based pairs (i, j) with i < j in lexicographic order
    index: tuple

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


def pair_index(n):
    return tuple(combinations(range(n), 2))


def second_additive_compound(A) -> CompoundMatrix:
    """``A^[2]`` with entries

        a2[(i,j),(k,l)] = det([[a_ik, d_il], [a_jk, d_jl]]) + det([[d_ik, a_il], [d_jk, a_jl]])

    where ``d`` is the Kronecker delta. Its eigenvalues are the sums
    ``l_i + l_j`` (i < j) of eigenvalues of ``A``.
    """
    A = as_matrix(A)
    n = A.shape[0]
    if n < 2:
        raise MatrixShapeError("second compound undefined for n < 2")
    pairs = pair_index(n)
    m = len(pairs)
    exact = is_exact(A)
    out = np.empty((m, m), dtype=object) if exact else np.zeros((m, m))
    if exact:
        out[...] = 0 * A[0, 0]

    def delta(p, q):
        return 1 if p == q else 0

    for r, (i, j) in enumerate(pairs):
        for c, (k, l) in enumerate(pairs):
            first = A[i, k] * delta(j, l) - delta(i, l) * A[j, k]
            second = delta(i, k) * A[j, l] - A[i, l] * delta(j, k)
            out[r, c] = first + second
    return CompoundMatrix(n, out, pairs)


def compound_of_product(D, A) -> CompoundMatrix:
    """``(D A)^[2]`` for a positive diagonal ``D`` (matrix or vector of entries)."""
    A = as_matrix(A)
    D = np.asarray(D, dtype=object if is_exact(A) else None)
    d = np.diag(D) if D.ndim == 2 else D
    if d.shape[0] != A.shape[0]:
        raise MatrixShapeError(f"D has {d.shape[0]} entries, A has dimension {A.shape[0]}")
    if D.ndim == 2 and np.any(D - np.diag(d) != 0):
        raise MatrixShapeError("D must be diagonal")
    if np.any(np.asarray(d <= 0, dtype=bool)):
        raise MatrixShapeError("D must be positive diagonal")
    return second_additive_compound(d[:, None] * A)
