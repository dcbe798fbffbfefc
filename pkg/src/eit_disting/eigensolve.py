"""Leading eigenpairs of the truncated operator matrices with adaptive truncation.

For a real Moebius parameter and single-signed concentric eigenvalues the action
matrix ``G diag(lam)`` is similar to the real symmetric ``s D G D`` with
``D = diag(sqrt|lam|)`` and ``s = sign(lam)``.  For the DN difference ``G`` is
tridiagonal and the zero at ``n = 0`` splits the problem into two mirror-image
blocks, so the spectrum is exactly paired; only the ``n >= 1`` block is solved,
by bisection, which keeps small eigenvalues accurate to high relative precision.
Anything else falls back to a general dense complex eigensolver.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
import scipy.linalg as sla

from . import geometry
from .errors import InvalidParameterError
from .geometry import Inclusion
from .operator_matrix import MatrixKind, TruncatedOperatorMatrix, build, rotate_to_real

DEFAULT_TOL = 1e-12
DEFAULT_N_MAX = 4096

# concentric eigenvalues below this are treated as exact zeros (avoids subnormals)
_LAM_FLOOR = 1e-290
_BISECTION_TOL = 2.0 * np.finfo(float).tiny


class NonConvergenceWarning(RuntimeWarning):
    pass


@dataclass
class SpectrumResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns, indexed like ``indices``
    indices: np.ndarray
    N_used: int
    converged: bool
    residual: float
    kind: MatrixKind
    param: geometry.MobiusParam
    rotation: float = 0.0
    history: list = field(default_factory=list)

    def magnitudes(self) -> np.ndarray:
        return np.abs(self.eigenvalues)


@dataclass
class EigenfunctionTrace:
    theta_grid: np.ndarray
    values: np.ndarray
    eigenvalue: float

    @property
    def normalization(self) -> float:
        """Unweighted boundary L^2 norm by the trapezoid rule (1 after construction)."""
        M = self.theta_grid.size
        return math.sqrt(2.0 * math.pi / M * float(np.sum(np.abs(self.values) ** 2)))


def _order(values: np.ndarray) -> np.ndarray:
    # magnitude descending, positive first on ties, then original position
    return np.lexsort((np.arange(values.size), -np.sign(values), -np.abs(values)))


def _fix_phase(vectors: np.ndarray) -> np.ndarray:
    out = np.array(vectors, dtype=complex)
    for j in range(out.shape[1]):
        v = out[:, j]
        norm = np.linalg.norm(v)
        if norm == 0.0:
            continue
        v = v / norm
        big = v[np.argmax(np.abs(v))]
        out[:, j] = v * (abs(big) / big)
    return out


def _single_signed(lam: np.ndarray) -> int:
    nz = lam[np.abs(lam) > _LAM_FLOOR]
    if nz.size == 0:
        return 0
    if np.all(nz > 0):
        return 1
    if np.all(nz < 0):
        return -1
    return 0


def _symmetric_path_ok(matrix: TruncatedOperatorMatrix) -> int:
    if matrix.param.a.imag != 0.0:
        return 0
    return _single_signed(matrix.lam)


def _mirror(indices: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Coefficients of the reflected function: ``(F v)_m = v_{-m}``."""
    lookup = {int(n): i for i, n in enumerate(indices)}
    return v[[lookup[-int(n)] for n in indices]]


def _parity_pair(indices, x1, x2):
    """Split a two-dimensional eigenspace into its even and odd members."""
    even = x1 + _mirror(indices, x1)
    if np.linalg.norm(even) < 1e-8 * np.linalg.norm(x1):
        even = x2 + _mirror(indices, x2)
    odd = x1 - _mirror(indices, x1)
    if np.linalg.norm(odd) < 1e-8 * np.linalg.norm(x1):
        odd = x2 - _mirror(indices, x2)
    return even, odd


def _solve_dn_symmetric(matrix: TruncatedOperatorMatrix, k: int, sign: int):
    idx, lam, gram = matrix.indices, matrix.lam, matrix.gram.real
    pos = np.flatnonzero((idx > 0) & (np.abs(lam) > _LAM_FLOOR))
    count = min(math.ceil(k / 2), pos.size)
    if count == 0:
        return np.zeros(0), np.zeros((idx.size, 0))
    d = np.sqrt(np.abs(lam[pos]))
    diag = lam[pos] * np.diag(gram)[pos]
    off = sign * d[:-1] * d[1:] * gram[pos[:-1], pos[1:]]
    n = pos.size
    lo, hi = (n - count, n - 1) if sign > 0 else (0, count - 1)
    vals, vecs = sla.eigh_tridiagonal(
        diag, off, select="i", select_range=(lo, hi),
        lapack_driver="stebz", tol=_BISECTION_TOL,
    )
    values, vectors = [], []
    for j in range(vals.size):
        z = np.zeros(idx.size)
        z[pos] = d * vecs[:, j]
        x = gram @ z  # eigenvector of gram @ diag(lam); no division by small lam
        even, odd = _parity_pair(idx, x, x)
        values += [vals[j], vals[j]]
        vectors += [even, odd]
    return np.array(values), np.column_stack(vectors)


def _solve_dense_symmetric(matrix: TruncatedOperatorMatrix, k: int, sign: int):
    idx, lam, gram = matrix.indices, matrix.lam, matrix.gram.real
    keep = np.flatnonzero(np.abs(lam) > _LAM_FLOOR)
    count = min(k + 1, keep.size)  # one extra so a trailing pair is not split
    if count == 0:
        return np.zeros(0), np.zeros((idx.size, 0))
    d = np.sqrt(np.abs(lam[keep]))
    sub = gram[np.ix_(keep, keep)]
    if not np.any(sub - np.diag(np.diag(sub))):
        # diagonal gram (a = 0): the eigenpairs are exact, no solve needed
        x = np.zeros((idx.size, keep.size))
        x[keep, np.arange(keep.size)] = 1.0
        vals = lam[keep] * np.diag(sub)
        order = _order(vals)[:count]
        vals, x = vals[order], x[:, order]
    else:
        sym = sign * d[:, None] * sub * d[None, :]
        n = keep.size
        lo, hi = (n - count, n - 1) if sign > 0 else (0, count - 1)
        vals, vecs = sla.eigh(sym, subset_by_index=(lo, hi))
        z = np.zeros((idx.size, vals.size))
        z[keep] = d[:, None] * vecs
        x = gram @ z
    order = _order(vals)
    vals, x = vals[order], x[:, order]
    # canonical even/odd members inside numerically degenerate pairs
    j = 0
    while j + 1 < vals.size:
        if abs(vals[j] - vals[j + 1]) <= 1e-10 * abs(vals[j]):
            x[:, j], x[:, j + 1] = _parity_pair(idx, x[:, j], x[:, j + 1])
            j += 2
        else:
            j += 1
    return vals, x


def _solve_general(matrix: TruncatedOperatorMatrix, k: int):
    vals, vecs = sla.eig(matrix.action)
    order = _order(vals.real)[: k + 1]
    return vals.real[order], vecs[:, order]


def solve_matrix(matrix: TruncatedOperatorMatrix, k: int, method: str = "auto"):
    """Return ``(eigenvalues, eigenvectors)`` of the ``k`` largest-magnitude eigenpairs, sorted."""
    sign = _symmetric_path_ok(matrix)
    if method == "general" or (method == "auto" and sign == 0):
        vals, vecs = _solve_general(matrix, k)
    elif matrix.kind.is_dn:
        vals, vecs = _solve_dn_symmetric(matrix, k, sign)
    else:
        vals, vecs = _solve_dense_symmetric(matrix, k, sign)
    order = _order(vals)[:k]
    return vals[order], _fix_phase(vecs[:, order])


def leading_eigenpairs(builder: Callable[[int], TruncatedOperatorMatrix], k: int,
                       tol: float = DEFAULT_TOL, N_max: int = DEFAULT_N_MAX,
                       N0: int | None = None, method: str = "auto") -> SpectrumResult:
    """Double the truncation until the top ``k`` magnitudes move by less than ``tol``.

    A result that fails to settle before ``N_max`` comes back with
    ``converged=False``; no exception is raised.
    """
    if k < 1:
        raise InvalidParameterError("k must be at least 1")
    if not tol > 0:
        raise InvalidParameterError("tol must be positive")
    N = N0 if N0 is not None else max(16, 2 * k)
    previous = None
    history = []
    while True:
        matrix = builder(N)
        vals, vecs = solve_matrix(matrix, k, method)
        mags = np.abs(vals)
        if previous is not None:
            width = min(previous.size, mags.size)
            residual = float(np.max(np.abs(mags[:width] - previous[:width]), initial=0.0))
            if mags.size > previous.size:
                residual = max(residual, float(np.max(mags[width:])))
            history.append((N, residual))
            if residual < tol or 2 * N > N_max:
                return SpectrumResult(vals, vecs, matrix.indices, N, residual < tol, residual,
                                      matrix.kind, matrix.param, history=history)
        previous = mags
        N *= 2


def compute_spectrum(inc: Inclusion, kind=MatrixKind.DN_DIFF, k: int = 1,
                     tol: float = DEFAULT_TOL, N_max: int = DEFAULT_N_MAX) -> SpectrumResult:
    """Leading eigenpairs for an inclusion; the build runs in the frame where ``a`` is real."""
    kind = MatrixKind(kind)
    rotated, zeta = rotate_to_real(inc)
    result = leading_eigenpairs(lambda N: build(rotated, N, kind), k, tol, N_max)
    return replace(result, rotation=zeta)


def operator_norm(inc: Inclusion, kind=MatrixKind.DN_DIFF, tol: float = DEFAULT_TOL,
                  N_max: int = DEFAULT_N_MAX) -> float:
    """Operator norm on boundary L^2, i.e. the largest eigenvalue magnitude.

    Emits :class:`NonConvergenceWarning` when the truncation did not settle.
    """
    if inc.contrast == 0.0:
        raise InvalidParameterError("operator norm requires a nonzero contrast")
    result = compute_spectrum(inc, kind, 1, tol, N_max)
    if not result.converged:
        warnings.warn(f"norm not converged at N={result.N_used} (residual {result.residual:.3g})",
                      NonConvergenceWarning, stacklevel=2)
    return float(abs(result.eigenvalues[0]))


def eigenfunction_trace(result: SpectrumResult, k: int = 0, M: int = 1024) -> EigenfunctionTrace:
    """Evaluate the ``k``-th eigenfunction (0-based) on ``M`` uniform angles, unit L^2 norm."""
    if not 0 <= k < result.eigenvalues.size:
        raise IndexError(k)
    if M < 64:
        raise InvalidParameterError("grid size must be at least 64")
    theta = 2.0 * np.pi * np.arange(M) / M
    local = theta - result.rotation  # the solve ran in the rotated frame
    a = result.param.a
    w = geometry.mobius_apply(a, np.exp(1j * local))
    coeffs = result.eigenvectors[:, k]
    values = np.zeros(M, dtype=complex)
    for n, c in zip(result.indices, coeffs):
        if c != 0:
            values += c * w ** int(n)
    values /= geometry.SQRT_2PI
    if not result.kind.is_dn:
        values *= geometry.jacobian_sqrt_boundary(a, local)
    trace = EigenfunctionTrace(theta, values, float(result.eigenvalues[k]))
    trace.values = values / trace.normalization
    return trace
