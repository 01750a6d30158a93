"""Matrix text formats.

CSV: one row per line, comma separated; tokens are integers, decimals
(``-0.8``, ``1e-3``) or rationals ``p/q``. Blank lines and ``#`` comments are
ignored. JSON: ``{"n": int, "rows": [[...], ...]}`` where entries are numbers
or strings using the CSV token syntax.

In exact mode every token is converted to a :class:`~fractions.Fraction`
(decimal tokens exactly, ``"0.1" -> 1/10``); writers emit ``p/q`` so that a
parse/format round trip is the identity.
"""

import json
from fractions import Fraction
import re
from pathlib import Path

import numpy as np

from .exceptions import MatrixFormatError
from .linalg import MAX_DIMENSION

__all__ = ['parse_token', 'parse_matrix_text', 'parse_matrix', 'matrix_from_rows',
           'format_matrix_csv', 'format_matrix_json', 'matrix_to_rows']

_TOKEN = re.compile(r'^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?(/[+-]?\d+)?$')


def parse_token(token, exact=False, *, line=None, column=None, source=None):
    tok = token.strip() if isinstance(token, str) else token
    if isinstance(tok, bool):
        raise MatrixFormatError(f"invalid matrix entry {token!r}", line, column, source)
    if isinstance(tok, (int, float)):
        if isinstance(tok, float) and not np.isfinite(tok):
            raise MatrixFormatError(f"non-finite entry {token!r}", line, column, source)
        return Fraction(tok) if exact else float(tok)
    if not isinstance(tok, str) or not _TOKEN.match(tok):
        raise MatrixFormatError(f"invalid matrix entry {token!r}", line, column, source)
    if '/' in tok:
        num, den = tok.split('/')
        if '.' in num or 'e' in num.lower():
            raise MatrixFormatError(f"rational token must have an integer numerator: {tok!r}",
                                    line, column, source)
        if int(den) == 0:
            raise MatrixFormatError(f"zero denominator in {tok!r}", line, column, source)
        value = Fraction(int(num), int(den))
    else:
        value = Fraction(tok)
    return value if exact else float(value)


def matrix_from_rows(rows, exact=False, *, source=None, positions=None):
    if not rows:
        raise MatrixFormatError("matrix has no rows", source=source)
    n = len(rows)
    for i, row in enumerate(rows):
        if len(row) != n:
            line = positions[i] if positions else i + 1
            raise MatrixFormatError(
                f"row {i + 1} has {len(row)} entries, expected {n} (matrix must be square)",
                line=line, source=source)
    if n > MAX_DIMENSION:
        raise MatrixFormatError(f"dimension {n} exceeds the dense guard n <= {MAX_DIMENSION}",
                                source=source)
    out = np.empty((n, n), dtype=object if exact else float)
    for i, row in enumerate(rows):
        line = positions[i] if positions else i + 1
        for j, tok in enumerate(row):
            out[i, j] = parse_token(tok, exact, line=line, column=j + 1, source=source)
    return out


def _parse_csv(text, exact, source):
    rows, positions = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        rows.append([t for t in line.split(',')])
        positions.append(lineno)
    if not rows:
        raise MatrixFormatError("no matrix rows found", source=source)
    return matrix_from_rows(rows, exact, source=source, positions=positions)


def _parse_json(text, exact, source):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MatrixFormatError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno, source) from exc
    if isinstance(doc, list):
        rows = doc
    elif isinstance(doc, dict) and 'rows' in doc:
        rows = doc['rows']
    else:
        raise MatrixFormatError('expected {"n": int, "rows": [[...]]}', source=source)
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise MatrixFormatError('"rows" must be a list of lists', source=source)
    A = matrix_from_rows(rows, exact, source=source)
    if isinstance(doc, dict) and 'n' in doc and doc['n'] != A.shape[0]:
        raise MatrixFormatError(f'"n" is {doc["n"]} but {A.shape[0]} rows were given',
                                source=source)
    return A


def parse_matrix_text(text, exact=False, fmt=None, source=None):
    """Parse CSV or JSON text; ``fmt=None`` sniffs the first character."""
    if fmt is None:
        fmt = 'json' if text.lstrip()[:1] in '{[' else 'csv'
    if fmt == 'json':
        return _parse_json(text, exact, source)
    if fmt == 'csv':
        return _parse_csv(text, exact, source)
    raise ValueError(f"unknown matrix format {fmt!r}")


def parse_matrix(path, exact=False):
    path = Path(path)
    fmt = 'json' if path.suffix.lower() == '.json' else None
    return parse_matrix_text(path.read_text(), exact, fmt, source=str(path))


def _format_entry(x):
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def matrix_to_rows(A):
    A = np.asarray(A)
    return [[_format_entry(x) for x in row] for row in A]


def format_matrix_csv(A) -> str:
    return '\n'.join(','.join(row) for row in matrix_to_rows(A)) + '\n'


def format_matrix_json(A) -> str:
    A = np.asarray(A)
    rows = matrix_to_rows(A)
    if A.dtype != object:
        rows = [[float(x) for x in row] for row in A]
    return json.dumps({'n': len(rows), 'rows': rows})
