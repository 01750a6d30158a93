class DStabError(Exception):
    """Base class for all library errors."""


class MatrixShapeError(DStabError, ValueError):
    pass


class DimensionGuardError(DStabError, ValueError):
    """Input exceeds a configured size guard (dense, enumeration or symbolic)."""


class EigenvalueError(DStabError, ArithmeticError):
    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class SpectrumObstructionError(DStabError, ArithmeticError):
    """The vectorized Lyapunov operator is singular: sigma(A) meets sigma(-A^T)."""


class NotSymmetricError(DStabError, ValueError):
    pass


class SingularMatrixError(DStabError, ArithmeticError):
    pass


class RegionError(DStabError, ValueError):
    pass


class UnsupportedError(DStabError, NotImplementedError):
    pass


class PerturbationClassError(DStabError, ValueError):
    pass


class MatrixFormatError(DStabError, ValueError):
    def __init__(self, message, line=None, column=None, source=None):
        where = []
        if source:
            where.append(str(source))
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)
        self.line = line
        self.column = column
        self.source = source
