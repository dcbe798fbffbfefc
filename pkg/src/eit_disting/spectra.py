"""Closed-form spectra of the boundary maps for a ball centred at the origin.

For ``gamma = 1 + A * indicator(B(0, r))`` the Fourier modes ``e^{i n theta}``
diagonalize both the Dirichlet-to-Neumann (DN) and the Neumann-to-Dirichlet (ND)
map.  All functions accept a scalar or an integer array for ``n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidIndexError, InvalidParameterError


@dataclass(frozen=True)
class ConcentricSpec:
    r: float
    A: float

    def __post_init__(self):
        if not 0.0 < self.r < 1.0:
            raise InvalidParameterError(f"concentric radius must lie in (0, 1), got {self.r}")
        if not (math.isfinite(self.A) and self.A > -1.0):
            raise InvalidParameterError(f"contrast must satisfy A > -1, got {self.A}")


def _abs_index(n):
    return np.abs(np.asarray(n, dtype=np.int64))


def _r_power(spec: ConcentricSpec, absn):
    # r^{2|n|} through exp/log: no drift for large |n|, underflows cleanly to 0
    return np.exp(2.0 * absn * math.log(spec.r))


def _as_output(value, n):
    return float(value) if np.ndim(n) == 0 else value


def _require_nonzero(n):
    if np.any(np.asarray(n) == 0):
        raise InvalidIndexError("ND eigenvalues are defined for n != 0 only")


def dn_eigenvalue(spec: ConcentricSpec, n):
    m = _abs_index(n)
    q = _r_power(spec, m)
    A = spec.A
    return _as_output(m * (2.0 + A * (1.0 + q)) / (2.0 + A * (1.0 - q)), n)


def dn_diff_eigenvalue(spec: ConcentricSpec, n):
    """Eigenvalue of ``Lambda(gamma_{0,r}) - Lambda(1)`` on ``e^{i n theta}``."""
    m = _abs_index(n)
    q = _r_power(spec, m)
    A = spec.A
    return _as_output(2.0 * A * q * m / (2.0 + A * (1.0 - q)), n)


def nd_eigenvalue(spec: ConcentricSpec, n):
    _require_nonzero(n)
    m = _abs_index(n)
    q = _r_power(spec, m)
    A = spec.A
    return _as_output((2.0 + A * (1.0 - q)) / ((2.0 + A * (1.0 + q)) * m), n)


def nd_diff_eigenvalue(spec: ConcentricSpec, n):
    """Eigenvalue of ``R(gamma_{0,r}) - R(1)``; its magnitude decays monotonically in ``|n|``."""
    _require_nonzero(n)
    m = _abs_index(n)
    q = _r_power(spec, m)
    A = spec.A
    return _as_output(-2.0 * A * q / ((2.0 + A * (1.0 + q)) * m), n)


def dn_diff_norm(spec: ConcentricSpec) -> tuple[float, int]:
    """Return ``(max_n |lambda_n|, argmax n >= 1)`` for the DN difference.

    The scan stops once the envelope ``2 |A| n r^{2n}`` (valid past its own
    maximum) falls below the running maximum.
    """
    if spec.A == 0.0:
        return 0.0, 1
    best, arg = 0.0, 1
    n = 1
    envelope_peak = -1.0 / (2.0 * math.log(spec.r))
    while True:
        value = abs(dn_diff_eigenvalue(spec, n))
        if value > best:
            best, arg = value, n
        envelope = 2.0 * abs(spec.A) * n * spec.r ** (2 * n)
        if n >= envelope_peak and envelope <= best:
            return best, arg
        n += 1


def nd_diff_norm(spec: ConcentricSpec) -> float:
    return abs(nd_diff_eigenvalue(spec, 1))
