"""Depth-dependent bounds on distinguishability and their numerical verification.

The ratio reported everywhere is ``||concentric difference|| / ||off-centre difference||``
for the pair of balls linked by ``M_a``.  For the DN maps it lies in

    [(1 - rho) / (1 + rho),  sqrt((1 - rho^2) / (1 + rho^2))]

and for the ND maps in

    [(1 - rho) / (1 + rho),  sqrt(1 + rho^2) / (1 - rho^2)].
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import spectra
from .eigensolve import DEFAULT_N_MAX, DEFAULT_TOL, compute_spectrum
from .errors import InvalidGeometryError, InvalidParameterError
from .geometry import Inclusion, from_concentric
from .operator_matrix import MatrixKind

RHO_MAX = 0.99
BOUND_SLACK = 1e-9
MONOTONE_SLACK = 1e-10


def _check_rho(rho: float) -> float:
    rho = float(rho)
    if not 0.0 <= rho < 1.0:
        raise InvalidParameterError(f"rho must lie in [0, 1), got {rho}")
    return rho


def dn_bound_interval(rho: float) -> tuple[float, float]:
    rho = _check_rho(rho)
    return (1.0 - rho) / (1.0 + rho), math.sqrt((1.0 - rho * rho) / (1.0 + rho * rho))


def nd_bound_interval(rho: float) -> tuple[float, float]:
    rho = _check_rho(rho)
    return (1.0 - rho) / (1.0 + rho), math.sqrt(1.0 + rho * rho) / (1.0 - rho * rho)


def bound_interval(rho: float, kind) -> tuple[float, float]:
    kind = MatrixKind(kind)
    if kind is MatrixKind.ND_FULL:
        raise InvalidParameterError("bounds are stated for boundary-map differences")
    return dn_bound_interval(rho) if kind.is_dn else nd_bound_interval(rho)


def concentric_norm(r: float, A: float, kind) -> float:
    spec = spectra.ConcentricSpec(r, A)
    if MatrixKind(kind).is_dn:
        return spectra.dn_diff_norm(spec)[0]
    return spectra.nd_diff_norm(spec)


def _parallel_map(func, items, threads: int | None):
    items = list(items)
    if threads is None:
        threads = int(os.environ.get("EIT_DISTING_THREADS", 0)) or os.cpu_count() or 1
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))  # map keeps input order


def is_nondecreasing(values: Sequence[float], rel: float = MONOTONE_SLACK) -> bool:
    values = list(values)
    return all(b >= a - rel * max(abs(a), abs(b)) for a, b in zip(values, values[1:]))


@dataclass
class BoundsReport:
    rho: float
    ratio: float
    lower: float
    upper: float
    kind: MatrixKind
    in_bounds: bool
    norms: tuple[float, float]  # (concentric, off-centre)
    converged: bool = True
    r: float = float("nan")
    A: float = float("nan")
    center: complex = 0j
    radius: float = float("nan")
    N_used: int = 0


def bounds_point(r: float, A: float, rho: float, kind=MatrixKind.DN_DIFF,
                 tol: float = DEFAULT_TOL, N_max: int = DEFAULT_N_MAX) -> BoundsReport:
    kind = MatrixKind(kind)
    rho = _check_rho(rho)
    lower, upper = bound_interval(rho, kind)
    C, R = from_concentric(rho, r)
    result = compute_spectrum(Inclusion(C, R, A), kind, 1, tol, N_max)
    outer = float(abs(result.eigenvalues[0]))
    inner = concentric_norm(r, A, kind)
    ratio = inner / outer
    eps = BOUND_SLACK * upper
    return BoundsReport(rho, ratio, lower, upper, kind, lower - eps <= ratio <= upper + eps,
                        (inner, outer), result.converged, r, A, C, R, result.N_used)


def verify_bounds(r: float, A: float, rho_grid: Sequence[float], kind=MatrixKind.DN_DIFF,
                  rho_max: float = RHO_MAX, tol: float = DEFAULT_TOL,
                  N_max: int = DEFAULT_N_MAX, threads: int | None = None) -> list[BoundsReport]:
    """One report per grid value of ``rho``, in grid order."""
    spectra.ConcentricSpec(r, A)
    if A == 0.0:
        raise InvalidParameterError("bounds need a nonzero contrast")
    for rho in rho_grid:
        if not 0.0 <= rho <= rho_max:
            raise InvalidParameterError(f"rho={rho} outside [0, {rho_max}]")
    return _parallel_map(lambda rho: bounds_point(r, A, rho, kind, tol, N_max), rho_grid, threads)


def all_in_bounds(reports: Sequence[BoundsReport]) -> bool:
    """Pass/fail over converged points; non-converged points are excluded."""
    return all(rep.in_bounds for rep in reports if rep.converged)


def moebius_rho_for_center(c: float, r: float) -> float:
    """``rho`` such that ``M_rho`` sends ``B(0, r)`` to a ball centred at distance ``c``."""
    s = 1.0 - r * r
    return 2.0 * c / (s + math.sqrt(s * s + 4.0 * c * c * r * r))


@dataclass
class FixedSizeReport:
    c: float
    rho: float
    small_radius: float
    norms: tuple[float, float, float]  # (B(0,r), B(C,R), B(C,r))
    bound: float
    in_bounds: bool
    monotone: bool
    converged: bool


def verify_fixed_size(r: float, A: float, c_grid: Sequence[float], tol: float = DEFAULT_TOL,
                      N_max: int = DEFAULT_N_MAX, threads: int | None = None) -> list[FixedSizeReport]:
    """Check ``||D(0,r)|| <= k(rho) ||D(C,R)|| <= k(rho) ||D(C,r)||`` along ``|C|`` (DN maps).

    ``rho`` is the Moebius parameter of the smaller ball ``B(C, R)`` linked to
    ``B(0, r)``, so ``B(C, R)`` sits inside ``B(C, r)``.  ``monotone`` records
    that ``||D(C, r)||`` has not decreased since the previous grid point.
    """
    inner = concentric_norm(r, A, MatrixKind.DN_DIFF)
    for c in c_grid:
        if not 0.0 <= c < 1.0 - r:
            raise InvalidGeometryError(f"|C|={c} must satisfy |C| < 1 - r = {1.0 - r}")

    def point(c):
        rho = moebius_rho_for_center(c, r)
        C, R = from_concentric(rho, r)
        small = compute_spectrum(Inclusion(C, R, A), MatrixKind.DN_DIFF, 1, tol, N_max)
        fixed = compute_spectrum(Inclusion(c, r, A), MatrixKind.DN_DIFF, 1, tol, N_max)
        return rho, R, abs(small.eigenvalues[0]), abs(fixed.eigenvalues[0]), small.converged and fixed.converged

    rows = _parallel_map(point, c_grid, threads)
    reports, previous = [], None
    for c, (rho, R, n_small, n_fixed, ok) in zip(c_grid, rows):
        k = dn_bound_interval(rho)[1]
        eps = BOUND_SLACK * inner
        in_bounds = inner <= k * n_small + eps and k * n_small <= k * n_fixed + eps
        monotone = previous is None or is_nondecreasing([previous, n_fixed])
        reports.append(FixedSizeReport(float(c), rho, float(R), (inner, float(n_small), float(n_fixed)),
                                       k, in_bounds, monotone, ok))
        previous = n_fixed
    return reports


@dataclass
class DepthReport:
    c: float
    magnitudes: np.ndarray
    eigenvalues: np.ndarray
    converged: bool
    N_used: int


def depth_profile(R: float, A: float, c_grid: Sequence[float], k: int = 10,
                  kind=MatrixKind.DN_DIFF, tol: float = DEFAULT_TOL, N_max: int = DEFAULT_N_MAX,
                  threads: int | None = None) -> list[DepthReport]:
    """Leading ``k`` eigenvalues for a ball of fixed radius moved along the positive axis."""
    kind = MatrixKind(kind)

    def point(c):
        res = compute_spectrum(Inclusion(c, R, A), kind, k, tol, N_max)
        return DepthReport(float(c), np.abs(res.eigenvalues), res.eigenvalues, res.converged, res.N_used)

    return _parallel_map(point, c_grid, threads)


@dataclass
class MonotonicityReport:
    radius: float
    norm: float
    nondecreasing: bool
    converged: bool


def verify_monotonicity(center, radii: Sequence[float], A: float, kind=MatrixKind.DN_DIFF,
                        tol: float = DEFAULT_TOL, N_max: int = DEFAULT_N_MAX) -> list[MonotonicityReport]:
    """Norms of the difference maps for nested balls ``B(center, R_i)``, ascending ``R_i``."""
    radii = [float(x) for x in radii]
    if any(b < a for a, b in zip(radii, radii[1:])):
        raise InvalidParameterError("radii must be ascending")
    reports, previous = [], None
    for R in radii:
        res = compute_spectrum(Inclusion(center, R, A), kind, 1, tol, N_max)
        norm = float(abs(res.eigenvalues[0]))
        ok = previous is None or is_nondecreasing([previous, norm])
        reports.append(MonotonicityReport(R, norm, ok, res.converged))
        previous = norm
    return reports
