"""Distinguishability of a circular conductivity inclusion in the unit disk.

The boundary-map differences of an off-centre ball are represented exactly in a
Moebius-transformed Fourier basis, which gives their norms to near machine
precision and lets the depth-dependent bounds be checked numerically.
"""
from .bounds import (
    BoundsReport,
    dn_bound_interval,
    nd_bound_interval,
    verify_bounds,
    verify_fixed_size,
    verify_monotonicity,
)
from .eigensolve import (
    EigenfunctionTrace,
    SpectrumResult,
    compute_spectrum,
    eigenfunction_trace,
    leading_eigenpairs,
    operator_norm,
)
from .errors import (
    EITDistingError,
    InvalidGeometryError,
    InvalidIndexError,
    InvalidInputError,
    InvalidParameterError,
)
from .geometry import (
    Inclusion,
    MobiusParam,
    basis_phi,
    basis_psi,
    fourier_coeff_h,
    from_concentric,
    jacobian_sqrt_boundary,
    mobius_apply,
    to_concentric,
)
from .operator_matrix import (
    MatrixKind,
    TruncatedOperatorMatrix,
    build_dn_diff,
    build_nd,
    rotate_to_real,
)
from .spectra import (
    ConcentricSpec,
    dn_diff_eigenvalue,
    dn_eigenvalue,
    nd_diff_eigenvalue,
    nd_eigenvalue,
)

__version__ = "0.1.0"
