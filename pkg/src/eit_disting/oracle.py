"""Independent sample-level verification path.

Boundary functions are sampled on uniform angles ``theta_j = 2 pi j / M``.  The
boundary maps of the off-centre ball are applied through the transformation
law, composing with ``M_a`` pointwise (``Theta(theta) = arg M_a(e^{i theta})``)
and diagonalizing the concentric operator by direct, deliberately unoptimized
Fourier sums on the non-uniform images ``Theta(theta_j)``:

    DN:  H f = J^{1/2} * (H_0 (f o M_a)) o M_a
    ND:  H g = P ((H_0 (J^{1/2} * (g o M_a))) o M_a),   P = Id - mean

Since ``dTheta/dtheta = J^{1/2}``, the Fourier coefficients of the composed
function follow from the original samples with a change of variables, so no
interpolation is needed.  Nothing here touches the closed-form matrix entries.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import geometry, spectra
from .errors import InvalidInputError, InvalidParameterError
from .geometry import Inclusion, to_concentric
from .operator_matrix import MatrixKind

TAIL_TOLERANCE = 1e-10


def theta_grid(M: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(M) / M


def boundary_angle_map(a, theta) -> np.ndarray:
    """``Theta(theta) = arg M_a(e^{i theta})``."""
    return np.angle(geometry.mobius_apply(a, np.exp(1j * np.asarray(theta, dtype=float))))


@dataclass(eq=False)
class BoundaryFunction:
    samples: np.ndarray
    mean_free: bool = False
    degraded: bool = False

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=complex)
        M = self.samples.size
        if M < 8 or M & (M - 1):
            raise InvalidParameterError(f"sample count must be a power of two >= 8, got {M}")
        if self.mean_free and abs(self.mean()) > 1e-12 * max(np.max(np.abs(self.samples)), 1e-300):
            raise InvalidInputError("function flagged mean-free has nonzero mean")

    @classmethod
    def from_callable(cls, func, M: int, mean_free: bool = False) -> "BoundaryFunction":
        return cls(func(theta_grid(M)), mean_free=mean_free)

    @property
    def M(self) -> int:
        return self.samples.size

    @property
    def theta(self) -> np.ndarray:
        return theta_grid(self.M)

    def mean(self) -> complex:
        return complex(np.mean(self.samples))


def l2_inner(f: BoundaryFunction, g: BoundaryFunction) -> complex:
    """``int f conj(g) ds`` by the trapezoid rule."""
    return complex(2.0 * np.pi / f.M * np.sum(f.samples * np.conj(g.samples)))


def l2_norm(f: BoundaryFunction) -> float:
    return math.sqrt(max(l2_inner(f, f).real, 0.0))


@dataclass(frozen=True)
class WeightedProduct:
    """``<f, g>_s = int f conj(g) J_a^s ds`` for ``s = +1/2`` or ``-1/2``."""

    a: complex
    exponent: float

    def __post_init__(self):
        if self.exponent not in (0.5, -0.5):
            raise InvalidParameterError("weight exponent must be +1/2 or -1/2")

    def weight(self, theta) -> np.ndarray:
        j = geometry.jacobian_sqrt_boundary(self.a, theta)
        return j if self.exponent > 0 else 1.0 / j

    def inner(self, f: BoundaryFunction, g: BoundaryFunction) -> complex:
        w = self.weight(f.theta)
        return complex(2.0 * np.pi / f.M * np.sum(f.samples * np.conj(g.samples) * w))

    def norm(self, f: BoundaryFunction) -> float:
        return math.sqrt(max(self.inner(f, f).real, 0.0))


def compose_with_mobius(a, func, M: int) -> BoundaryFunction:
    """Samples of ``func o M_a`` on the uniform grid (``func`` takes angles)."""
    return BoundaryFunction(func(boundary_angle_map(a, theta_grid(M))))


def grid_size(K: int, rho: float) -> int:
    """Power-of-two sample count adequate for modes ``|n| <= K`` composed with ``M_a``."""
    stretch = (1.0 + rho) / (1.0 - rho)
    need = max(1024, 8 * K, int(math.ceil(8 * K * stretch)))
    return 1 << (need - 1).bit_length()


def concentric_truncation(spec: spectra.ConcentricSpec, rel: float = 1e-17) -> int:
    """Smallest ``K`` beyond which every concentric difference eigenvalue is below ``rel * max``."""
    peak = spectra.dn_diff_norm(spec)[0]
    if peak == 0.0:
        return 1
    envelope_peak = -1.0 / (2.0 * math.log(spec.r))
    n = 1
    while n < envelope_peak or 2.0 * abs(spec.A) * n * spec.r ** (2 * n) > rel * peak:
        n += 1
    return n


class _TransformPlan:
    """Dense direct-transform kernels for one inclusion, truncation and grid."""

    def __init__(self, inc: Inclusion, K: int, M: int):
        if K < 1:
            raise InvalidParameterError("concentric truncation K must be >= 1")
        if M < 8 * K:
            raise InvalidParameterError(f"grid size M={M} below 8K={8 * K}")
        self.param = to_concentric(inc)
        self.spec = spectra.ConcentricSpec(self.param.r, inc.contrast)
        self.K, self.M = K, M
        theta = theta_grid(M)
        self.jac = geometry.jacobian_sqrt_boundary(self.param.a, theta)
        big_theta = boundary_angle_map(self.param.a, theta)
        self.modes = np.arange(-K, K + 1)
        # analysis[n, j] = e^{-i n Theta(theta_j)}
        self.analysis = np.exp(-1j * self.modes[:, None] * big_theta[None, :])

    def dn(self, samples: np.ndarray):
        weighted = samples * self.jac
        coeffs = self.analysis @ weighted / self.M
        total = float(np.sum(np.abs(samples) ** 2 * self.jac) / self.M)
        tail = total - float(np.sum(np.abs(coeffs) ** 2))
        lam = spectra.dn_diff_eigenvalue(self.spec, self.modes)
        out = self.jac * (np.conj(self.analysis).T @ (lam * coeffs))
        return out, tail > TAIL_TOLERANCE * max(total, 1e-300)

    def nd(self, samples: np.ndarray, kind: MatrixKind):
        coeffs = self.analysis @ samples / self.M
        total = float(np.sum(np.abs(samples) ** 2 / self.jac) / self.M)
        tail = total - float(np.sum(np.abs(coeffs) ** 2))
        nonzero = self.modes != 0
        lam = np.zeros(self.modes.size)
        if kind is MatrixKind.ND_FULL:
            lam[nonzero] = spectra.nd_eigenvalue(self.spec, self.modes[nonzero])
        else:
            lam[nonzero] = spectra.nd_diff_eigenvalue(self.spec, self.modes[nonzero])
        out = np.conj(self.analysis).T @ (lam * coeffs)
        out -= out.mean()
        return out, tail > TAIL_TOLERANCE * max(total, 1e-300)


def _plan_for(inc: Inclusion, K: int | None, M: int | None):
    param = to_concentric(inc)
    if K is None:
        K = concentric_truncation(spectra.ConcentricSpec(param.r, inc.contrast))
    if M is None:
        M = grid_size(K, param.rho)
    return _TransformPlan(inc, K, M)


def apply_dn_diff(inc: Inclusion, f: BoundaryFunction, K: int) -> BoundaryFunction:
    """``(Lambda(gamma_{C,R}) - Lambda(1)) f`` through the transformation law."""
    plan = _TransformPlan(inc, K, f.M)
    out, degraded = plan.dn(f.samples)
    return BoundaryFunction(out, degraded=degraded)


def apply_nd_diff(inc: Inclusion, g: BoundaryFunction, K: int,
                  kind=MatrixKind.ND_DIFF) -> BoundaryFunction:
    """``(R(gamma_{C,R}) - R(1)) g`` (or ``R(gamma_{C,R}) g``) for mean-free ``g``."""
    kind = MatrixKind(kind)
    if kind.is_dn:
        raise InvalidParameterError("apply_nd_diff handles ND kinds only")
    if abs(g.mean()) > 1e-12 * max(np.max(np.abs(g.samples)), 1e-300):
        raise InvalidInputError("ND maps act on mean-free boundary data")
    plan = _TransformPlan(inc, K, g.M)
    out, degraded = plan.nd(g.samples, kind)
    return BoundaryFunction(out, mean_free=True, degraded=degraded)


def operator_closure(inc: Inclusion, kind=MatrixKind.DN_DIFF, K: int | None = None,
                     M: int | None = None):
    """Return ``(apply, M)`` with ``apply`` mapping sample arrays to sample arrays."""
    kind = MatrixKind(kind)
    plan = _plan_for(inc, K, M)
    if kind.is_dn:
        return (lambda x: plan.dn(x)[0]), plan.M
    return (lambda x: plan.nd(x, kind)[0]), plan.M


def quadrature_dn_entries(inc: Inclusion, N: int, K: int | None = None,
                          M: int | None = None) -> np.ndarray:
    """``[m, n] -> <H phi_m, phi_n>_{1/2}`` for ``|m|, |n| <= N``, all by quadrature."""
    K = 2 * N if K is None else K
    plan = _plan_for(inc, K, M)
    a = plan.param.a
    theta = theta_grid(plan.M)
    idx = np.arange(-N, N + 1)
    basis = np.array([geometry.basis_phi(a, n, theta) for n in idx])
    images = np.array([plan.dn(phi)[0] for phi in basis])
    return 2.0 * np.pi / plan.M * (images * plan.jac) @ np.conj(basis).T


def quadrature_nd_entries(inc: Inclusion, N: int, kind=MatrixKind.ND_DIFF,
                          K: int | None = None, M: int | None = None) -> np.ndarray:
    """``[n, m] -> <H psi_m, psi_n>_{-1/2}`` for ``0 < |m|, |n| <= N``, all by quadrature."""
    kind = MatrixKind(kind)
    K = 2 * N if K is None else K
    plan = _plan_for(inc, K, M)
    a = plan.param.a
    theta = theta_grid(plan.M)
    idx = np.r_[np.arange(-N, 0), np.arange(1, N + 1)]
    basis = np.array([geometry.basis_psi(a, n, theta) for n in idx])
    images = np.array([plan.nd(psi, kind)[0] for psi in basis])
    return (2.0 * np.pi / plan.M * (images / plan.jac) @ np.conj(basis).T).T


@dataclass
class PowerIterationResult:
    estimate: float
    converged: bool
    iterations: int
    relative_change: float


def norm_by_power_iteration(apply, M: int, iterations: int = 500, seed: int = 0,
                            tol: float = 1e-13, mean_free: bool = False) -> PowerIterationResult:
    """Largest |eigenvalue| of a self-adjoint sample-space operator by power iteration.

    The estimate is ``||H x||`` for the unit iterate ``x``, the square root of
    the Rayleigh quotient of ``H^2``; unlike the quotient of ``H`` itself it does
    not stall when ``+lambda`` and ``-lambda`` are both present.  ``iterations``
    caps the loop; the estimate is flagged as stagnated when the last relative
    change still exceeds 1e-6.
    """
    if iterations < 50:
        raise InvalidParameterError("power iteration needs at least 50 iterations")
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(M) + 1j * rng.standard_normal(M)
    if mean_free:
        x -= x.mean()
    x /= np.linalg.norm(x)
    estimate, change = 0.0, math.inf
    for it in range(1, iterations + 1):
        y = apply(x)
        norm = float(np.linalg.norm(y))
        if norm == 0.0:
            return PowerIterationResult(0.0, True, it, 0.0)
        change = abs(norm - estimate) / norm
        estimate = norm
        x = y / norm
        if it >= 3 and change < tol:
            return PowerIterationResult(estimate, True, it, change)
    return PowerIterationResult(estimate, change <= 1e-6, iterations, change)


def power_norm(inc: Inclusion, kind=MatrixKind.DN_DIFF, iterations: int = 2000,
               seed: int = 0) -> PowerIterationResult:
    apply, M = operator_closure(inc, kind)
    return norm_by_power_iteration(apply, M, iterations, seed,
                                   mean_free=not MatrixKind(kind).is_dn)
