import cmath
import warnings

import numpy as np
import pytest
from numpy.testing import assert_allclose

from eit_disting import spectra
from eit_disting.bounds import concentric_norm
from eit_disting.eigensolve import (NonConvergenceWarning, compute_spectrum, eigenfunction_trace,
                                    leading_eigenpairs, operator_norm, solve_matrix)
from eit_disting.geometry import Inclusion, to_concentric
from eit_disting.operator_matrix import MatrixKind, build, rotate_to_real

from multipole import dn_difference_eigenvalues

REFERENCE = Inclusion(0.7, 0.2, 2.0)


def test_converges_with_nonincreasing_residuals():
    for inc in (REFERENCE, Inclusion(0.5, 0.3, -0.5), Inclusion(0.85, 0.1, 10.0)):
        res = compute_spectrum(inc, MatrixKind.DN_DIFF, 5)
        assert res.converged and res.residual < 1e-12
        steps = [r for _, r in res.history]
        assert all(b <= 10 * a for a, b in zip(steps, steps[1:]))


def test_result_layout():
    res = compute_spectrum(REFERENCE, MatrixKind.DN_DIFF, 6)
    assert res.eigenvalues.shape == (6,)
    assert res.eigenvectors.shape == (2 * res.N_used + 1, 6)
    assert np.all(np.diff(np.abs(res.eigenvalues)) <= 1e-15)
    assert res.N_used == res.history[-1][0]


def test_non_convergence_is_flagged():
    res = leading_eigenpairs(lambda N: build(Inclusion(0.95, 0.04, 2.0), N, MatrixKind.DN_DIFF),
                             4, tol=1e-300, N_max=64)
    assert not res.converged
    assert res.N_used == 64


def test_operator_norm_warns_when_unconverged():
    with pytest.warns(NonConvergenceWarning):
        operator_norm(Inclusion(0.97, 0.02, 2.0), tol=1e-300, N_max=32)


def test_operator_norm_requires_contrast():
    with pytest.raises(ValueError):
        operator_norm(Inclusion(0.6, 0.1, 0.0))


@pytest.mark.parametrize("kind", [MatrixKind.DN_DIFF, MatrixKind.ND_DIFF, MatrixKind.ND_FULL])
@pytest.mark.parametrize("A", [2.0, -0.5])
def test_symmetric_path_matches_general(kind, A):
    inc = Inclusion(0.6, 0.2, A)
    m = build(inc, 48, kind)
    fast, _ = solve_matrix(m, 12)
    slow, _ = solve_matrix(m, 12, method="general")
    assert np.max(np.abs(fast - slow)) < 1e-11


def test_complex_parameter_uses_general_path():
    inc = Inclusion(0.5j, 0.2, 2.0)
    vals, _ = solve_matrix(build(inc, 32, MatrixKind.DN_DIFF), 4)
    rotated, _ = rotate_to_real(inc)
    ref, _ = solve_matrix(build(rotated, 32, MatrixKind.DN_DIFF), 4)
    assert_allclose(vals, ref, rtol=1e-12)


def test_eigenvectors_satisfy_equation():
    for kind in MatrixKind:
        m = build(Inclusion(0.5, 0.25, 2.0), 40, kind)
        vals, vecs = solve_matrix(m, 6)
        for j in range(6):
            resid = m.action @ vecs[:, j] - vals[j] * vecs[:, j]
            assert np.linalg.norm(resid) < 1e-12 * max(abs(vals[0]), 1.0)
            big = vecs[np.argmax(np.abs(vecs[:, j])), j]
            assert big.imag == 0 and big.real > 0


@pytest.mark.parametrize("kind", [MatrixKind.DN_DIFF, MatrixKind.ND_DIFF])
def test_pairing(kind):
    for c in (0.2, 0.5, 0.8):
        vals = compute_spectrum(Inclusion(c, 0.1, 2.0), kind, 10).eigenvalues
        gap = np.abs(vals[0::2] - vals[1::2]) / np.abs(vals[0::2])
        assert np.all(gap < 1e-10)


def test_rotation_invariance():
    a = compute_spectrum(Inclusion(0.45 * cmath.exp(2.2j), 0.2, 2.0), MatrixKind.DN_DIFF, 8)
    b = compute_spectrum(Inclusion(0.45, 0.2, 2.0), MatrixKind.DN_DIFF, 8)
    assert_allclose(a.eigenvalues, b.eigenvalues, rtol=1e-13)
    assert a.rotation == pytest.approx(2.2)


def test_concentric_norm():
    inc = Inclusion(0, 0.4, 2.0)
    scan = max(abs(spectra.dn_diff_eigenvalue(spectra.ConcentricSpec(0.4, 2.0), n)) for n in range(1, 200))
    assert operator_norm(inc) == pytest.approx(scan, rel=1e-14)


def test_off_centre_exceeds_concentric():
    r = to_concentric(REFERENCE).r
    assert operator_norm(REFERENCE) > concentric_norm(r, 2.0, MatrixKind.DN_DIFF)
    assert operator_norm(REFERENCE, MatrixKind.ND_DIFF) <= concentric_norm(r, 2.0, MatrixKind.ND_DIFF)


@pytest.mark.parametrize("C, R, A, P", [(0.7, 0.2, 2.0, 160), (0.5 * cmath.exp(1j), 0.2, 2.0, 160),
                                        (0.3, 0.5, -0.5, 160), (0.85, 0.1, 10.0, 400)])
def test_against_multipole_solver(C, R, A, P):
    # independent solution of the transmission problem, no Moebius map involved;
    # P multipoles resolve |C| + R to about (|C| + R)^P
    reference = dn_difference_eigenvalues(C, R, A, P)[:6]
    res = compute_spectrum(Inclusion(C, R, A), MatrixKind.DN_DIFF, 12)
    assert_allclose(res.eigenvalues[0::2], reference, rtol=1e-10, atol=1e-14)


def test_small_eigenvalues_keep_relative_accuracy():
    # the dense reference is only accurate in absolute terms, so check the
    # small end against the concentric limit instead: for tiny rho the
    # eigenvalues approach the concentric ones with a relative shift of O(rho^2)
    inc = Inclusion(1e-6, 0.3, 2.0)
    res = compute_spectrum(inc, MatrixKind.DN_DIFF, 40)
    r = to_concentric(inc).r
    exact = spectra.dn_diff_eigenvalue(spectra.ConcentricSpec(r, 2.0), np.arange(1, 21))
    assert exact[-1] < 1e-18
    assert_allclose(res.eigenvalues[0::2], exact, rtol=1e-9)
    assert_allclose(res.eigenvalues[1::2], exact, rtol=1e-9)


class TestEigenfunctionTrace:
    def test_concentric_exponential(self):
        inc = Inclusion(0, 0.5, 2.0)
        res = compute_spectrum(inc, MatrixKind.DN_DIFF, 2)
        trace = eigenfunction_trace(res, 0, 512)
        assert trace.normalization == pytest.approx(1.0, abs=1e-12)
        # top mode is |n| = 1; the even member is a cosine
        n_star = spectra.dn_diff_norm(spectra.ConcentricSpec(0.5, 2.0))[1]
        assert n_star == 1
        theta = trace.theta_grid
        assert_allclose(np.abs(trace.values), np.abs(np.cos(theta)) / np.sqrt(np.pi), atol=1e-12)
        odd = eigenfunction_trace(res, 1, 512)
        assert_allclose(np.abs(odd.values), np.abs(np.sin(theta)) / np.sqrt(np.pi), atol=1e-12)

    def test_single_mode_in_concentric_case(self):
        res = compute_spectrum(Inclusion(0, 0.5, 2.0), MatrixKind.DN_DIFF, 1)
        v = res.eigenvectors[:, 0]
        assert np.count_nonzero(np.abs(v) > 1e-14) == 2

    def test_peak_points_to_centre(self):
        res = compute_spectrum(Inclusion(0.5, 0.1, 2.0), MatrixKind.DN_DIFF, 1)
        trace = eigenfunction_trace(res, 0, 1024)
        assert trace.normalization == pytest.approx(1.0, abs=1e-8)
        assert np.argmax(np.abs(trace.values)) == 0

    def test_peak_follows_rotation(self):
        res = compute_spectrum(Inclusion(0.5j, 0.1, 2.0), MatrixKind.DN_DIFF, 1)
        trace = eigenfunction_trace(res, 0, 1024)
        assert np.argmax(np.abs(trace.values)) == 256

    def test_localization_grows_with_depth_change(self):
        peaks = []
        for c in (0.3, 0.5, 0.7):
            res = compute_spectrum(Inclusion(c, 0.1, 2.0), MatrixKind.DN_DIFF, 1)
            peaks.append(np.max(np.abs(eigenfunction_trace(res, 0, 1024).values)))
        assert peaks[0] < peaks[1] < peaks[2]

    def test_nd_trace(self):
        res = compute_spectrum(Inclusion(0.6, 0.1, 2.0), MatrixKind.ND_DIFF, 2)
        trace = eigenfunction_trace(res, 0, 1024)
        assert trace.normalization == pytest.approx(1.0, abs=1e-8)
        assert abs(np.mean(trace.values)) < 1e-10

    def test_bad_arguments(self):
        res = compute_spectrum(REFERENCE, MatrixKind.DN_DIFF, 2)
        with pytest.raises(IndexError):
            eigenfunction_trace(res, 2)
        with pytest.raises(ValueError):
            eigenfunction_trace(res, 0, 32)
