"""Global numeric tolerance.

The tolerance is held in a context variable so that threads and tasks can
override it locally without affecting each other. Library functions take
``tol=None`` and resolve it through :func:`resolve` at call time.
"""

from contextlib import contextmanager
from contextvars import ContextVar

DEFAULT_TOLERANCE = 1e-9

_tolerance: ContextVar[float] = ContextVar("dstab_tolerance", default=DEFAULT_TOLERANCE)


def get_tolerance() -> float:
    return _tolerance.get()


def set_tolerance(value: float) -> None:
    if not value > 0:
        raise ValueError(f"tolerance must be positive, got {value!r}")
    _tolerance.set(float(value))


@contextmanager
def tolerance(value: float):
    """Temporarily override the tolerance inside a ``with`` block."""
    if not value > 0:
        raise ValueError(f"tolerance must be positive, got {value!r}")
    token = _tolerance.set(float(value))
    try:
        yield
    finally:
        _tolerance.reset(token)


def resolve(tol: float | None) -> float:
    return get_tolerance() if tol is None else float(tol)
