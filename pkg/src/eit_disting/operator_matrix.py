"""Exact truncated matrices of the boundary-map differences of an off-centre ball.

DN difference, basis ``phi_n = M_a f_n`` (orthonormal in the +1/2 weighted product):

    entries[m, n] = <(Lambda(gamma_{C,R}) - Lambda(1)) phi_m, phi_n>_{1/2}
                  = lam_m * { (1+rho^2)/(1-rho^2),  m == n
                              -a/(1-rho^2),         m - n == 1
                              -conj(a)/(1-rho^2),   m - n == -1
                              0                     otherwise }

ND difference (or full ND map), basis ``psi_n = J_a^{1/2} M_a f_n``, ``n != 0``:

    entries[n, m] = <H psi_m, psi_n>_{-1/2} = lam_m * (h_{n-m} - conj(h_m) h_n)

with ``h_k`` the Fourier coefficients of ``J_a^{1/2}``.  ``lam`` are the
concentric eigenvalues at the Moebius-linked radius ``r``.  Both cases factor
as ``action = gram @ diag(lam)`` with a Hermitian positive definite ``gram``;
``action[i, j]`` is the coefficient of output basis function ``i`` produced by
input basis function ``j``.  Entries come from closed forms only.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import spectra
from .errors import InvalidParameterError
from .geometry import Inclusion, MobiusParam, to_concentric


class MatrixKind(str, enum.Enum):
    DN_DIFF = "dn_diff"
    ND_DIFF = "nd_diff"
    ND_FULL = "nd_full"

    @property
    def is_dn(self) -> bool:
        return self is MatrixKind.DN_DIFF


@dataclass(frozen=True, eq=False)
class TruncatedOperatorMatrix:
    kind: MatrixKind
    N: int
    indices: np.ndarray
    entries: np.ndarray
    gram: np.ndarray
    lam: np.ndarray
    inclusion: Inclusion
    param: MobiusParam

    @property
    def action(self) -> np.ndarray:
        """Matrix acting on basis-coefficient vectors (row = output index)."""
        return self.entries.T if self.kind.is_dn else self.entries

    def position(self, n: int) -> int:
        pos = np.flatnonzero(self.indices == n)
        if pos.size == 0:
            raise KeyError(n)
        return int(pos[0])

    def entry(self, i: int, j: int) -> complex:
        """Entry addressed by signed Fourier indices, in the ``entries`` orientation."""
        return complex(self.entries[self.position(i), self.position(j)])

    def augmented(self) -> np.ndarray:
        """ND matrix on all of L^2, i.e. of ``H P``, with the ``n = 0`` row and column added.

        Row 0 vanishes and column 0 is ``-sum_{k != 0} h_k A[n, k]``.
        Indices of the result run over ``-N..N``.
        """
        if self.kind.is_dn:
            raise InvalidParameterError("augmentation applies to ND matrices only")
        N = self.N
        h = _h_coefficients(self.param.a, self.indices)
        column = -(self.entries @ h)
        out = np.zeros((2 * N + 1, 2 * N + 1), dtype=complex)
        keep = np.r_[0:N, N + 1:2 * N + 1]
        out[np.ix_(keep, keep)] = self.entries
        out[keep, N] = column
        return out

    def to_text(self) -> str:
        return export_text(self)


def rotate_to_real(inc: Inclusion) -> tuple[Inclusion, float]:
    """Rotate the inclusion about the origin so that its centre is real and nonnegative."""
    c = abs(inc.center)
    zeta = math.atan2(inc.center.imag, inc.center.real) if c > 0.0 else 0.0
    if zeta <= -math.pi:
        zeta = math.pi
    return Inclusion(complex(c, 0.0), inc.radius, inc.contrast), zeta


def _check_N(N) -> int:
    if int(N) != N or N < 1:
        raise InvalidParameterError(f"truncation N must be a positive integer, got {N}")
    return int(N)


def _h_coefficients(a: complex, k) -> np.ndarray:
    k = np.asarray(k)
    rho, zeta = abs(a), math.atan2(a.imag, a.real)
    # h_k = conj(a)^k for k > 0 and a^{|k|} for k < 0, i.e. rho^{|k|} e^{-i k zeta}
    return rho ** np.abs(k) * np.exp(-1j * k * zeta)


def build_dn_diff(inc: Inclusion, N: int) -> TruncatedOperatorMatrix:
    """Tridiagonal representation of ``Lambda(gamma_{C,R}) - Lambda(1)`` on ``|n| <= N``."""
    N = _check_N(N)
    param = to_concentric(inc)
    a, rho = param.a, param.rho
    idx = np.arange(-N, N + 1)
    lam = spectra.dn_diff_eigenvalue(spectra.ConcentricSpec(param.r, inc.contrast), idx)
    scale = 1.0 - rho * rho
    size = 2 * N + 1
    # gram[n, m] = <J_a^{-1/2} f_m, f_n>: Toeplitz in m - n, three bands
    gram = np.zeros((size, size), dtype=complex)
    gram[np.arange(size), np.arange(size)] = (1.0 + rho * rho) / scale
    sub = np.arange(1, size)
    gram[sub, sub - 1] = -a / scale            # m - n == 1 with n = row
    gram[sub - 1, sub] = -np.conj(a) / scale   # m - n == -1
    gram = gram.T  # row index = output n, column = input m
    action = gram * lam[None, :]
    return TruncatedOperatorMatrix(MatrixKind.DN_DIFF, N, idx, action.T.copy(), gram, lam, inc, param)


def build_nd(inc: Inclusion, N: int, kind=MatrixKind.ND_DIFF) -> TruncatedOperatorMatrix:
    """Dense representation of ``R(gamma_{C,R}) - R(1)`` (or ``R(gamma_{C,R})``) on ``0 < |n| <= N``."""
    N = _check_N(N)
    kind = MatrixKind(kind)
    if kind.is_dn:
        raise InvalidParameterError("build_nd builds ND_DIFF or ND_FULL matrices")
    param = to_concentric(inc)
    idx = np.r_[np.arange(-N, 0), np.arange(1, N + 1)]
    spec = spectra.ConcentricSpec(param.r, inc.contrast)
    if kind is MatrixKind.ND_DIFF:
        lam = spectra.nd_diff_eigenvalue(spec, idx)
    else:
        lam = spectra.nd_eigenvalue(spec, idx)
    h = _h_coefficients(param.a, idx)
    gram = _h_coefficients(param.a, idx[:, None] - idx[None, :]) - h[:, None] * np.conj(h)[None, :]
    entries = gram * lam[None, :]
    return TruncatedOperatorMatrix(kind, N, idx, entries, gram, lam, inc, param)


def build(inc: Inclusion, N: int, kind) -> TruncatedOperatorMatrix:
    kind = MatrixKind(kind)
    if kind.is_dn:
        return build_dn_diff(inc, N)
    return build_nd(inc, N, kind)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def export_text(matrix: TruncatedOperatorMatrix) -> str:
    """Plain-text export: ``#`` header lines, then one ``m n re im`` line per nonzero entry."""
    inc, p = matrix.inclusion, matrix.param
    lines = [
        "# eit-disting matrix v1",
        f"# kind={matrix.kind.value} N={matrix.N}",
        f"# center={_fmt(inc.center.real)},{_fmt(inc.center.imag)} radius={_fmt(inc.radius)} "
        f"contrast={_fmt(inc.contrast)}",
        f"# a={_fmt(p.a.real)},{_fmt(p.a.imag)} rho={_fmt(p.rho)} zeta={_fmt(p.zeta)} r={_fmt(p.r)}",
        "# m n re im",
    ]
    idx = matrix.indices
    rows, cols = np.nonzero(matrix.entries)
    for i, j in zip(rows, cols):
        z = matrix.entries[i, j]
        lines.append(f"{idx[i]} {idx[j]} {_fmt(z.real)} {_fmt(z.imag)}")
    return "\n".join(lines) + "\n"


def parse_text(text: str) -> dict:
    """Read back :func:`export_text` output into ``{"header": {...}, "entries": {(m, n): complex}}``."""
    header, entries = {}, {}
    for line in text.splitlines():
        if line.startswith("#"):
            for token in line[1:].split():
                if "=" in token:
                    key, value = token.split("=", 1)
                    header[key] = value
            continue
        if not line.strip():
            continue
        m, n, re, im = line.split()
        entries[(int(m), int(n))] = complex(float(re), float(im))
    return {"header": header, "entries": entries}
