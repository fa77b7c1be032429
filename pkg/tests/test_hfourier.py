import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nldiffusion.geometry import Kind, RadialManifold, laplace_beltrami_radial, panel_grid, sphere_area
from nldiffusion.hfourier import (
    TruncationError,
    abel_integral,
    c_inv_sq,
    drift_velocity,
    forward_transform,
    heat_kernel_K0,
    inverse_transform,
    inversion_constant,
    jhat,
    jhat_expansion,
    k_lambda,
    kernel_constant,
    lambda_grid,
    log_phi0,
    phi_lambda,
    phi_lambda_dd0,
    plancherel_norms,
    tower_cos,
)
from nldiffusion.kernels import Kernel, normalize_mass

H2 = RadialManifold(Kind.HYPERBOLIC, 2)
H3 = RadialManifold(Kind.HYPERBOLIC, 3)

# Phi_lam(r) from the Legendre-function representation, mpmath at 30 digits
PHI_ORACLE = [
    (2, 0.0, 5.0, 0.33373135220586801695),
    (2, 1.5, 2.0, -0.180444085540770055093),
    (2, 3.0, 0.7, 0.16525255004328444668),
    (4, 2.0, 1.3, 0.22556316802354390095),
    (5, 0.5, 3.0, 0.04625451345799016157),
    (2, 0.0, 30.0, 6.11227573762525797094e-6),
]
# |Gamma(i lam + rho)|^2 / (2 (2 pi)^N |Gamma(i lam)|^2) with mpmath.gamma
CINV_ORACLE = [
    (2, 0.7, 0.00865017536512219087),
    (3, 1.3, 0.00340656832450669628),
    (4, 2.0, 0.00272688251718839484),
    (5, 0.4, 9.47651456485481906784e-6),
    (6, 1.1, 4.50658009905605222738e-5),
]
# d^2/dlam^2 Phi_lam(2) at lam = 0 on H^2
DD0_ORACLE = -1.53715527791623750156
# a and b of Jhat = a - b lam^2 + ... for the mass-normalized (1, 4) kernel on H^3
A_H3 = 0.96174195816970769756
B_H3 = 0.03761672085934828956


@pytest.mark.parametrize("N,lam,r,expected", PHI_ORACLE)
def test_phi_oracle(N, lam, r, expected):
    assert phi_lambda(N, lam, r) == pytest.approx(expected, rel=1e-11, abs=1e-14)


@pytest.mark.parametrize("N,lam,expected", CINV_ORACLE)
def test_c_inv_sq_oracle(N, lam, expected):
    assert c_inv_sq(N, lam) == pytest.approx(expected, rel=1e-13)


def test_phi_n3_closed_form():
    r = np.linspace(0.1, 6, 13)
    assert np.allclose(phi_lambda(3, 1.7, r), np.sin(1.7 * r) / (1.7 * np.sinh(r)), rtol=1e-13)


@pytest.mark.parametrize("N", [2, 4, 5])
def test_abel_and_polar_agree(N):
    r = np.array([0.05, 0.8, 2.5, 6.0])
    lams = np.array([0.0, 0.9, 4.0])
    a = phi_lambda(N, lams, r, method="abel")
    p = phi_lambda(N, lams, r, method="polar")
    assert np.max(np.abs(a - p)) < 1e-12


@given(st.sampled_from([2, 3, 4]), st.floats(0, 8), st.floats(0, 6))
@settings(max_examples=40, deadline=None)
def test_phi_even_bounded_normalized(N, lam, r):
    v = phi_lambda(N, lam, r)
    assert phi_lambda(N, -lam, r) == pytest.approx(v, abs=1e-14)
    assert abs(v) <= phi_lambda(N, 0.0, r) + 1e-13
    assert phi_lambda(N, lam, 0.0) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("N", [2, 3, 4])
def test_phi_is_eigenfunction(N):
    m = RadialManifold(Kind.HYPERBOLIC, N)
    lam = 1.3
    g = panel_grid(m, 4.0, 0.01, order=2, u=lambda r: phi_lambda(N, lam, r))
    lap = laplace_beltrami_radial(m, g).values
    rho = (N - 1) / 2
    sel = g.nodes < 3.8
    assert np.max(np.abs(lap + (lam**2 + rho**2) * g.values)[sel]) < 1e-5


def test_second_lambda_derivative():
    assert phi_lambda_dd0(2, 2.0) == pytest.approx(DD0_ORACLE, rel=1e-11)
    h = 1e-3
    fd = (phi_lambda(2, h, 2.0) - 2 * phi_lambda(2, 0.0, 2.0) + phi_lambda(2, -h, 2.0)) / h**2
    assert fd == pytest.approx(DD0_ORACLE, rel=1e-5)


def test_log_phi0_large_radius():
    assert log_phi0(2, 30.0)[0] == pytest.approx(np.log(6.11227573762525797094e-6), rel=1e-12)
    assert np.isfinite(log_phi0(4, 400.0)[0])


def test_drift_velocity():
    r = np.array([0.5, 3.0, 20.0])
    assert np.allclose(drift_velocity(3, r) * r, 2.0, rtol=1e-12)
    assert 0 < drift_velocity(2, 50.0) * 50.0 < 2
    with pytest.raises(ValueError):
        drift_velocity(2, 0.0)


@pytest.mark.parametrize("N", [2, 3, 4])
def test_inversion_constant_is_sphere_area(N):
    assert inversion_constant(N) == pytest.approx(sphere_area(N - 1), rel=1e-9)


def test_kernel_constants():
    assert kernel_constant(3) == pytest.approx(-1 / (4 * np.pi**2), rel=1e-9)
    assert kernel_constant(2) == pytest.approx(-np.sqrt(2) / (4 * np.pi**2), rel=1e-7)


@pytest.mark.parametrize("lam,rho", [(0.5, 0.3), (2.0, 1.7), (4.0, 3.0)])
def test_k_lambda_routes_agree(lam, rho):
    d3 = k_lambda(3, lam, rho)
    assert k_lambda(3, lam, rho, "closed_odd") == pytest.approx(d3, rel=1e-10)
    d2 = k_lambda(2, lam, rho)
    assert k_lambda(2, lam, rho, "abel_even") == pytest.approx(d2, rel=1e-7, abs=1e-12)


def test_k_lambda_validation():
    with pytest.raises(ValueError):
        k_lambda(2, 1.0, 1.0, "closed_odd")
    with pytest.raises(ValueError):
        k_lambda(3, 1.0, 1.0, "abel_even")
    with pytest.raises(ValueError):
        k_lambda(3, 1.0, 0.0)


def test_tower():
    rho = np.array([0.4, 1.1])
    lam = 1.5
    assert np.allclose(tower_cos(1, lam, rho), -lam * np.sin(lam * rho) / np.sinh(rho), rtol=1e-14)


def test_abel_integral_closed_form():
    # int_rho^inf sinh s e^{-(cosh s - cosh rho)} / sqrt(cosh s - cosh rho) ds = sqrt(pi)
    rho = 0.8
    val = abel_integral(lambda s: np.sinh(s) * np.exp(-(np.cosh(s) - np.cosh(rho))), rho, 6.0)
    assert val == pytest.approx(np.sqrt(np.pi), rel=1e-12)


@pytest.fixture(scope="module")
def bump3():
    return panel_grid(H3, 6.0, 0.25, order=12, u=lambda r: np.exp(-r**2))


def test_round_trip_h3(bump3):
    T = forward_transform(bump3)
    back = inverse_transform(T, bump3.nodes[::7], check=True)
    assert np.max(np.abs(back - bump3.values[::7])) < 1e-10


def test_plancherel_h3(bump3):
    lhs, rhs = plancherel_norms(bump3, forward_transform(bump3))
    assert rhs == pytest.approx(lhs, rel=1e-10)


def test_laplacian_multiplier_h3():
    g = panel_grid(H3, 6.0, 0.25, order=12)
    # Delta e^{-r^2} on H^3 = (4 r^2 - 2) e^{-r^2} - 4 r coth r e^{-r^2}
    r = g.nodes
    lap = ((4 * r**2 - 2) - 4 * r / np.tanh(r)) * np.exp(-r**2)
    u = g.with_values(np.exp(-r**2))
    lams = lambda_grid(12.0, 0.1)
    lhs = forward_transform(g.with_values(lap), lams).uhat
    rhs = -(lams**2 + 1.0) * forward_transform(u, lams).uhat
    assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_truncation_detected():
    g = panel_grid(H3, 6.0, 0.25, order=12, u=lambda r: np.exp(-r**2))
    T = forward_transform(g, lambda_grid(2.0, 0.05))
    with pytest.raises(TruncationError):
        inverse_transform(T, [0.0, 1.0], check=True)
    wide = panel_grid(H3, 3.0, 0.25, order=12, u=lambda r: np.exp(-r))
    with pytest.raises(ValueError):
        forward_transform(wide)


def test_jhat_expansion_h3():
    k = normalize_mass(Kernel(1.0, 4), H3)
    ex = jhat_expansion(k, 3)
    assert ex.a == pytest.approx(A_H3, rel=1e-11)
    assert ex.b == pytest.approx(B_H3, rel=1e-9)
    lam = np.array([0.05, 0.1])
    assert np.all(np.abs(ex.f(lam)) < 2e-3)
    assert jhat(k, 3, 0.0) == pytest.approx(ex.a, rel=1e-13)
    with pytest.raises(ValueError):
        ex.f(0.0)


@pytest.mark.parametrize("N", [2, 3])
def test_heat_kernel_is_normalized(N):
    # int K0 Phi_0 dmu = 1 for every t: the a = 1 evolution preserves the Phi_0-weighted mass
    m = RadialManifold(Kind.HYPERBOLIC, N)
    g = panel_grid(m, 14.0, 0.25, order=12)
    K = heat_kernel_K0(N, 1.0, g.nodes, 1.0)
    total = g.weights @ (K * phi_lambda(N, 0.0, g.nodes))
    assert total == pytest.approx(1.0, abs=1e-9)


def test_heat_kernel_validation():
    with pytest.raises(ValueError):
        heat_kernel_K0(3, 1.0, 1.0, 0.0)
