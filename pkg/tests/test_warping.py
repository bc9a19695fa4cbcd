import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from coneharm.errors import DomainError, ValidationError
from coneharm.warping import CurvatureSign, WarpingFunction, WarpingKind


def test_euclidean_eval():
    w = WarpingFunction.euclidean()
    assert w.eval(2.0) == (2.0, 1.0, 0.0)
    assert w.eval(0.0) == (0.0, 1.0, 0.0)


def test_hyperbolic_eval():
    w = WarpingFunction.hyperbolic()
    assert_allclose(w.eval(1.0), (math.sinh(1.0), math.cosh(1.0), math.sinh(1.0)), rtol=1e-15)


def test_bounded_eval():
    w = WarpingFunction.bounded()
    assert_allclose(w.eval(1.0), (0.5, 0.25, -0.25), rtol=1e-15)
    # tip: phi = 0, phi' = 1, phi'' = -2
    assert_allclose(w.eval(0.0), (0.0, 1.0, -2.0), rtol=1e-15)


def test_eval_vectorized():
    w = WarpingFunction.bounded()
    r = np.array([0.5, 1.0, 2.0])
    phi, phi_p, phi_pp = w.eval(r)
    assert_allclose(phi, r / (1 + r), rtol=1e-15)
    assert_allclose(phi_p, (1 + r) ** -2.0, rtol=1e-15)
    assert_allclose(phi_pp, -2 * (1 + r) ** -3.0, rtol=1e-15)


def test_eval_domain_errors():
    w = WarpingFunction.euclidean(r_max=10.0)
    with pytest.raises(DomainError):
        w.eval(-0.5)
    with pytest.raises(DomainError):
        w.eval(10.5)


def _fd_derivatives(w, r):
    # 5-point central differences, 4th order; h balances truncation against
    # cancellation across all built-in kinds and radii.
    h = min(max(0.02, 1.3e-4 * r), r / 3.0)
    f = [w.eval(r + j * h)[0] for j in (-2, -1, 0, 1, 2)]
    d1 = (-f[4] + 8 * f[3] - 8 * f[1] + f[0]) / (12 * h)
    d2 = (-f[4] + 16 * f[3] - 30 * f[2] + 16 * f[1] - f[0]) / (12 * h * h)
    return d1, d2


@pytest.mark.parametrize("kind,r_max", [
    (WarpingKind.EUCLIDEAN, 1.0e3),
    (WarpingKind.HYPERBOLIC, 1.0e2),   # sinh overflows double near r ~ 710
    (WarpingKind.BOUNDED, 1.0e3),
])
def test_finite_difference_consistency(kind, r_max):
    w = WarpingFunction(kind, r_max=r_max)
    for r in np.geomspace(1e-3, r_max / 1.5, 40):
        phi, phi_p, phi_pp = w.eval(r)
        d1, d2 = _fd_derivatives(w, r)
        scale_p = max(abs(phi_p), abs(phi) / r)
        scale_pp = max(abs(phi_pp), abs(phi_p) / r, abs(phi) / r ** 2)
        assert abs(d1 - phi_p) <= 1e-6 * scale_p
        assert abs(d2 - phi_pp) <= 1e-6 * scale_pp


def test_radial_curvature_values():
    assert WarpingFunction.euclidean().radial_curvature(3.7) == 0.0
    assert_allclose(WarpingFunction.hyperbolic().radial_curvature(1.0), -1.0, rtol=1e-15)
    assert_allclose(WarpingFunction.bounded().radial_curvature(1.0), 0.5, rtol=1e-15)


def test_radial_curvature_rejects_tip():
    with pytest.raises(DomainError):
        WarpingFunction.euclidean().radial_curvature(0.0)


def test_classify_curvature():
    # flat tie resolves to NONPOSITIVE so the general bound applies to phi = r
    assert WarpingFunction.euclidean().classify_curvature(64) is CurvatureSign.NONPOSITIVE
    assert WarpingFunction.hyperbolic(r_max=100).classify_curvature(64) is CurvatureSign.NONPOSITIVE
    assert WarpingFunction.bounded().classify_curvature(64) is CurvatureSign.NONNEGATIVE


def test_classify_curvature_deterministic():
    w = WarpingFunction.bounded(r_max=50.0)
    assert w.classify_curvature(32) is w.classify_curvature(32)
    with pytest.raises(ValidationError):
        w.classify_curvature(8)


def test_classify_mixed():
    # phi = r + r^3 e^{-r}: phi'' = e^{-r} r (r^2 - 6r + 6) changes sign at 3 +- sqrt(3)
    r = np.geomspace(1e-4, 8.0, 400)
    e = np.exp(-r)
    phi = r + r ** 3 * e
    phi_p = 1 + (3 * r ** 2 - r ** 3) * e
    phi_pp = (6 * r - 6 * r ** 2 + r ** 3) * e
    w = WarpingFunction.from_table(r, phi, phi_p, phi_pp)
    assert w.classify_curvature(64) is CurvatureSign.MIXED


def test_log_derivative_and_inv_phi_stable():
    w = WarpingFunction.hyperbolic(r_max=2048.0)
    # closed forms below the overflow threshold
    assert_allclose(w.log_derivative(5.0), math.cosh(5.0) / math.sinh(5.0), rtol=1e-14)
    assert_allclose(w.inv_phi(5.0), 1 / math.sinh(5.0), rtol=1e-14)
    # finite far beyond where sinh overflows
    assert w.log_derivative(1500.0) == 1.0
    assert w.inv_phi(1500.0) == 0.0
    assert w.inv_phi_sq(1500.0) == 0.0
    e = WarpingFunction.euclidean()
    assert_allclose(e.log_derivative(4.0), 0.25, rtol=1e-15)
    b = WarpingFunction.bounded()
    assert_allclose(b.log_derivative(2.0), 1 / 6.0, rtol=1e-15)
    assert_allclose(b.inv_phi(2.0), 1.5, rtol=1e-15)


# -- tabulated warping -------------------------------------------------

def _sinh_table(r_end=10.0, n=800):
    r = np.geomspace(1e-4, r_end, n)
    return r, np.sinh(r), np.cosh(r), np.sinh(r)


def test_tabulated_matches_source():
    w = WarpingFunction.from_table(*_sinh_table())
    r = np.linspace(0.05, 9.5, 50)
    phi, phi_p, phi_pp = w.eval(r)
    assert_allclose(phi, np.sinh(r), rtol=1e-5)
    assert_allclose(phi_p, np.cosh(r), rtol=1e-4)
    assert_allclose(phi_pp, np.sinh(r), rtol=1e-3, atol=1e-8)
    assert w.classify_curvature(64) is CurvatureSign.NONPOSITIVE


def test_tabulated_csv_roundtrip(tmp_path):
    r, phi, phi_p, phi_pp = _sinh_table()
    path = tmp_path / "warp.csv"
    rows = ["r,phi,phi_p,phi_pp"]
    rows += [f"{float(a)!r},{float(b)!r},{float(c)!r},{float(d)!r}"
             for a, b, c, d in zip(r, phi, phi_p, phi_pp)]
    path.write_text("\n".join(rows) + "\n")
    w = WarpingFunction.from_csv(path)
    assert w.kind is WarpingKind.TABULATED
    assert_allclose(w.eval(1.0)[0], math.sinh(1.0), rtol=1e-8)
    assert w.r_max == pytest.approx(r[-1])


def test_tabulated_validation():
    r, phi, phi_p, phi_pp = _sinh_table()
    with pytest.raises(ValidationError):  # first point too large
        WarpingFunction.from_table(r + 0.01, phi, phi_p, phi_pp)
    bad = phi.copy()
    bad[5] = -1.0
    with pytest.raises(ValidationError):  # phi must be positive
        WarpingFunction.from_table(r, bad, phi_p, phi_pp)
    with pytest.raises(ValidationError):  # not strictly increasing
        WarpingFunction.from_table(np.concatenate([r[:5], r[4:5], r[5:]]),
                                   np.concatenate([phi[:5], phi[4:5], phi[5:]]),
                                   np.concatenate([phi_p[:5], phi_p[4:5], phi_p[5:]]),
                                   np.concatenate([phi_pp[:5], phi_pp[4:5], phi_pp[5:]]))
    with pytest.raises(ValidationError):  # phi(0) limit violated
        WarpingFunction.from_table(r, phi + 0.5, phi_p, phi_pp)


def test_csv_header_checked(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b,c,d\n1,2,3,4\n")
    with pytest.raises(ValidationError):
        WarpingFunction.from_csv(path)
