"""Moebius maps of the unit disk and the inclusion <-> concentric-ball correspondence.

Points of the plane are Python ``complex`` numbers (or complex numpy arrays);
``x1 + i x2`` stands for ``(x1, x2)``.  The disk automorphism used throughout is

    M_a(x) = (x - a) / (conj(a) x - 1),    |a| < 1,

which is an involution of the closed unit disk.  For a ball ``B(C, R)`` inside
the disk there is a unique ``a`` such that ``M_a`` sends it onto a ball
``B(0, r)`` centred at the origin; :func:`to_concentric` and
:func:`from_concentric` convert between the two descriptions.
"""
from __future__ import annotations

import math
import cmath
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InvalidGeometryError,
    InvalidIndexError,
    InvalidParameterError,
    SingularityError,
)

SQRT_2PI = math.sqrt(2.0 * math.pi)

_RADICAND_CLAMP = 1e-15


def _check_param(a) -> complex:
    a = complex(a)
    if not (cmath.isfinite(a) and abs(a) < 1.0):
        raise InvalidParameterError(f"Moebius parameter must satisfy |a| < 1, got {a!r}")
    return a


def _normalize_angle(zeta: float) -> float:
    # np.angle returns values in [-pi, pi]; fold -pi onto pi
    return math.pi if zeta <= -math.pi else zeta


@dataclass(frozen=True)
class Inclusion:
    """Ball ``B(center, radius)`` with conductivity ``1 + contrast`` inside it."""

    center: complex
    radius: float
    contrast: float = 0.0

    def __post_init__(self):
        center = complex(self.center)
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "contrast", float(self.contrast))
        if not (cmath.isfinite(center) and math.isfinite(self.radius)):
            raise InvalidGeometryError("inclusion parameters must be finite")
        if self.radius <= 0.0:
            raise InvalidGeometryError(f"inclusion radius must be positive, got {self.radius}")
        if abs(center) + self.radius >= 1.0:
            raise InvalidGeometryError(
                f"inclusion not inside unit disk: |C| + R = {abs(center) + self.radius:.17g} >= 1"
            )
        if not (math.isfinite(self.contrast) and self.contrast > -1.0):
            raise InvalidParameterError(f"contrast must satisfy A > -1, got {self.contrast}")

    def conductivity(self, x):
        """Evaluate ``1 + A * indicator(B(C, R))`` at points ``x``."""
        inside = np.abs(np.asarray(x) - self.center) < self.radius
        return 1.0 + self.contrast * inside


@dataclass(frozen=True)
class MobiusParam:
    """The parameter ``a = rho e^{i zeta}`` of ``M_a`` together with the concentric radius ``r``."""

    a: complex
    r: float
    rho: float = field(init=False)
    zeta: float = field(init=False)

    def __post_init__(self):
        a = _check_param(self.a)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "r", float(self.r))
        if not 0.0 < self.r < 1.0:
            raise InvalidParameterError(f"concentric radius must lie in (0, 1), got {self.r}")
        object.__setattr__(self, "rho", abs(a))
        object.__setattr__(self, "zeta", _normalize_angle(cmath.phase(a)))


def mobius_apply(a, x):
    """Return ``M_a(x) = (x - a) / (conj(a) x - 1)``; ``x`` may be an array."""
    a = _check_param(a)
    x = np.asarray(x, dtype=complex) if not np.isscalar(x) else complex(x)
    denom = np.conj(a) * x - 1.0
    if np.any(np.abs(denom) < 1e-15):
        raise SingularityError("conj(a) x - 1 vanishes")
    return (x - a) / denom


def _concentric_radius(c: float, R: float) -> float:
    h = 1.0 + R * R - c * c
    radicand = ((1.0 - R) ** 2 - c * c) * ((1.0 + R) ** 2 - c * c)
    if radicand < 0.0:
        if radicand < -_RADICAND_CLAMP:
            raise InvalidGeometryError("inclusion not inside unit disk")
        radicand = 0.0
    # rationalized form of (h - sqrt(radicand)) / (2R); no cancellation for small R
    return 2.0 * R / (h + math.sqrt(radicand))


def to_concentric(inc: Inclusion) -> MobiusParam:
    """Find ``a`` and ``r`` with ``M_a(B(C, R)) = B(0, r)``."""
    C, R = inc.center, inc.radius
    if abs(C) + R >= 1.0:
        raise InvalidGeometryError("inclusion not inside unit disk")
    r = _concentric_radius(abs(C), R)
    return MobiusParam(C / (1.0 - R * r), r)


def from_concentric(a, r: float) -> tuple[complex, float]:
    """Centre and radius of ``M_a(B(0, r))``."""
    a = _check_param(a)
    if not 0.0 < r < 1.0:
        raise InvalidParameterError(f"concentric radius must lie in (0, 1), got {r}")
    rho2 = abs(a) ** 2
    denom = 1.0 - rho2 * r * r
    return a * (1.0 - r * r) / denom, r * (1.0 - rho2) / denom


def jacobian_sqrt_boundary(a, theta):
    """Boundary stretching factor ``(1 - rho^2) / (1 + rho^2 - 2 rho cos(theta - zeta))`` of ``M_a``."""
    a = _check_param(a)
    rho, zeta = abs(a), cmath.phase(a)
    return (1.0 - rho * rho) / (1.0 + rho * rho - 2.0 * rho * np.cos(np.asarray(theta) - zeta))


def fourier_coeff_h(a, n: int) -> complex:
    """n-th Fourier coefficient of :func:`jacobian_sqrt_boundary`."""
    a = _check_param(a)
    n = int(n)
    if n == 0:
        return 1.0 + 0.0j
    if n > 0:
        return a.conjugate() ** n
    return a ** (-n)


def basis_phi(a, n: int, theta):
    """``phi_n(theta) = M_a(e^{i theta})^n / sqrt(2 pi)``, orthonormal in the +1/2 weighted product."""
    w = mobius_apply(a, np.exp(1j * np.asarray(theta, dtype=float)))
    return w ** int(n) / SQRT_2PI


def basis_psi(a, n: int, theta):
    """``psi_n = J_a^{1/2} phi_n``, orthonormal in the -1/2 weighted product on mean-free functions."""
    if int(n) == 0:
        raise InvalidIndexError("psi_0 is not part of the mean-free basis")
    return jacobian_sqrt_boundary(a, theta) * basis_phi(a, n, theta)
