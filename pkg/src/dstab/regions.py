"""LMI regions ``{z : L + z M + conj(z) M^T < 0}`` and membership tests."""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
import math
import warnings

import numpy as np

from . import config
from .exceptions import RegionError
from .linalg import Spectrum, eigenvalues, is_positive_semidefinite

__all__ = ['RegionKind', 'Status', 'LmiRegion', 'RegionMembership', 'SpectrumLocation',
           'make_half_plane', 'make_shifted', 'make_sector', 'make_general',
           'contains', 'has_recession_negative_real_axis', 'spectrum_in_region',
           'zero_in_closure', 'region_from_dict', 'region_to_dict', 'boundary_samples',
           'exact_two_cos']


class RegionKind(str, Enum):
    LEFT_HALF_PLANE = 'half_plane'
    SHIFTED = 'shifted'
    SECTOR = 'sector'
    GENERAL = 'general'


class Status(str, Enum):
    INSIDE = 'inside'
    ON_BOUNDARY = 'on_boundary'
    OUTSIDE = 'outside'


@dataclass(frozen=True, eq=False)
class LmiRegion:
    L: np.ndarray
    M: np.ndarray
    kind: RegionKind = RegionKind.GENERAL
    alpha: float | None = None
    theta: float | None = None
    #: exact value of 2 cos(theta) for sectors when it is rational
    two_cos: Fraction | None = field(default=None)

    @property
    def order(self) -> int:
        return self.L.shape[0]

    def characteristic_value(self, z):
        """Hermitian matrix ``L + z M + conj(z) M^T``."""
        z = complex(z)
        return self.L + z * self.M + z.conjugate() * self.M.T

    def __repr__(self):
        if self.kind is RegionKind.SHIFTED:
            return f"LmiRegion(shifted, alpha={self.alpha!r})"
        if self.kind is RegionKind.SECTOR:
            return f"LmiRegion(sector, theta={self.theta!r})"
        if self.kind is RegionKind.LEFT_HALF_PLANE:
            return "LmiRegion(half_plane)"
        return f"LmiRegion(general, L={self.L.tolist()}, M={self.M.tolist()})"


@dataclass(frozen=True)
class RegionMembership:
    status: Status
    #: minus the largest eigenvalue of the characteristic function value
    margin: float


@dataclass(frozen=True)
class SpectrumLocation:
    all_inside: bool
    boundary_hits: list
    outside: list


def make_half_plane() -> LmiRegion:
    return LmiRegion(np.zeros((1, 1)), np.ones((1, 1)), RegionKind.LEFT_HALF_PLANE)


def make_shifted(alpha) -> LmiRegion:
    alpha = float(alpha)
    if not math.isfinite(alpha):
        raise RegionError("alpha must be finite")
    return LmiRegion(np.array([[-2.0 * alpha]]), np.ones((1, 1)), RegionKind.SHIFTED, alpha=alpha)


def exact_two_cos(theta, tol=1e-12):
    """Rational value of ``2 cos(theta)`` when one exists for ``theta`` in (0, pi/2].

    Only ``theta = pi/2`` (0) and ``theta = pi/3`` (1) qualify among rational
    multiples of pi; anything else returns ``None``.
    """
    c = 2.0 * math.cos(theta)
    for candidate in (Fraction(0), Fraction(1)):
        if abs(c - float(candidate)) <= tol:
            return candidate
    return None


def make_sector(theta=None, two_cos=None) -> LmiRegion:
    """Conic sector of half-aperture ``theta`` around the negative real axis.

    Either ``theta`` or an exact rational ``two_cos = 2 cos(theta)`` may be
    given; the latter keeps the exact certificate path available.
    """
    if two_cos is not None:
        two_cos = Fraction(two_cos)
        if not 0 <= two_cos < 2:
            raise RegionError(f"2cos(theta) = {two_cos} is outside [0, 2)")
        from_cos = math.acos(float(two_cos) / 2)
        if theta is not None and abs(float(theta) - from_cos) > 1e-12:
            raise RegionError("theta and two_cos disagree")
        theta = from_cos
    if theta is None:
        raise RegionError("make_sector needs theta or two_cos")
    theta = float(theta)
    if not (0.0 < theta <= math.pi / 2 + 1e-15):
        raise RegionError(f"sector angle must lie in (0, pi/2], got {theta!r}")
    theta = min(theta, math.pi / 2)
    if two_cos is None:
        two_cos = exact_two_cos(theta)
    s, c = math.sin(theta), math.cos(theta)
    if two_cos == 0:
        s, c = 1.0, 0.0
    M = np.array([[s, c], [-c, s]])
    return LmiRegion(np.zeros((2, 2)), M, RegionKind.SECTOR, theta=theta, two_cos=two_cos)


def make_general(L, M, tol=None) -> LmiRegion:
    tol = config.resolve(tol)
    L = np.atleast_2d(np.asarray(L, dtype=float))
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if L.shape != M.shape or L.shape[0] != L.shape[1]:
        raise RegionError(f"L and M must be square of equal size, got {L.shape} and {M.shape}")
    if not (np.all(np.isfinite(L)) and np.all(np.isfinite(M))):
        raise RegionError("generating matrices must be finite")
    sym = 0.5 * (L + L.T)
    if np.abs(sym - L).max() > tol * max(1.0, np.abs(L).max()):
        warnings.warn("L was not symmetric; using its symmetric part", stacklevel=2)
    return LmiRegion(sym, M, RegionKind.GENERAL)


def contains(region: LmiRegion, z, tol=None) -> RegionMembership:
    """Classify ``z`` against the region using a relative boundary band.

    ``OnBoundary`` when the largest eigenvalue of ``f(z)`` is within
    ``tol * (1 + |z|)`` of zero.
    """
    tol = config.resolve(tol)
    z = complex(z)
    top = float(np.linalg.eigvalsh(region.characteristic_value(z))[-1])
    band = tol * (1.0 + abs(z))
    if abs(top) <= band:
        status = Status.ON_BOUNDARY
    elif top < 0:
        status = Status.INSIDE
    else:
        status = Status.OUTSIDE
    return RegionMembership(status, -top)


def has_recession_negative_real_axis(region: LmiRegion, tol=None) -> bool:
    """Whether ``z - t`` stays in the region for all ``t >= 0`` (``M + M^T >= 0``)."""
    return is_positive_semidefinite(region.M + region.M.T, tol)


def spectrum_in_region(spectrum, region: LmiRegion, tol=None) -> SpectrumLocation:
    if not isinstance(spectrum, Spectrum):
        vals = np.asarray(spectrum)
        if vals.ndim == 2:
            spectrum = eigenvalues(vals)
            vals = spectrum.eigenvalues
    else:
        vals = spectrum.eigenvalues
    hits, outside = [], []
    for lam in np.atleast_1d(vals):
        status = contains(region, lam, tol).status
        if status is Status.ON_BOUNDARY:
            hits.append(complex(lam))
        elif status is Status.OUTSIDE:
            outside.append(complex(lam))
    return SpectrumLocation(not hits and not outside, hits, outside)


def zero_in_closure(region: LmiRegion, tol=None) -> bool:
    return contains(region, 0.0, tol).status is not Status.OUTSIDE


def region_from_dict(doc) -> LmiRegion:
    """Build a region from its JSON form (see :func:`region_to_dict`)."""
    if not isinstance(doc, dict) or 'type' not in doc:
        raise RegionError('region JSON needs a "type" field')
    kind = doc['type']
    if kind in ('half_plane', 'halfplane'):
        return make_half_plane()
    if kind == 'shifted':
        if 'alpha' not in doc:
            raise RegionError('shifted region needs "alpha"')
        return make_shifted(doc['alpha'])
    if kind == 'sector':
        two_cos = doc.get('two_cos')
        if two_cos is not None:
            two_cos = Fraction(str(two_cos))
        if 'theta' not in doc and two_cos is None:
            raise RegionError('sector region needs "theta" or "two_cos"')
        return make_sector(doc.get('theta'), two_cos)
    if kind == 'general':
        if 'L' not in doc or 'M' not in doc:
            raise RegionError('general region needs "L" and "M"')
        return make_general(doc['L'], doc['M'])
    raise RegionError(f"unknown region type {kind!r}")


def region_to_dict(region: LmiRegion) -> dict:
    if region.kind is RegionKind.LEFT_HALF_PLANE:
        return {'type': 'half_plane'}
    if region.kind is RegionKind.SHIFTED:
        return {'type': 'shifted', 'alpha': region.alpha}
    if region.kind is RegionKind.SECTOR:
        out = {'type': 'sector', 'theta': region.theta}
        if region.two_cos is not None:
            out['two_cos'] = str(region.two_cos)
        return out
    return {'type': 'general', 'L': region.L.tolist(), 'M': region.M.tolist()}


def boundary_samples(region: LmiRegion, radius=5.0, count=101, tol=None):
    """Points approximately on the region boundary, for plotting."""
    if region.kind in (RegionKind.LEFT_HALF_PLANE, RegionKind.SHIFTED):
        x = region.alpha or 0.0
        return [complex(x, y) for y in np.linspace(-radius, radius, count)]
    if region.kind is RegionKind.SECTOR:
        ray = -math.cos(region.theta) + 1j * math.sin(region.theta)
        ts = np.linspace(0.0, radius, count)
        return [t * ray for t in ts] + [t * ray.conjugate() for t in ts[1:]]
    # general: sign changes of the top eigenvalue along grid rows
    xs = np.linspace(-radius, radius, count)
    points = []
    for y in xs:
        tops = [np.linalg.eigvalsh(region.characteristic_value(complex(x, y)))[-1] for x in xs]
        for k in range(len(xs) - 1):
            if (tops[k] < 0) != (tops[k + 1] < 0):
                t = tops[k] / (tops[k] - tops[k + 1])
                points.append(complex(xs[k] + t * (xs[k + 1] - xs[k]), y))
    return points
