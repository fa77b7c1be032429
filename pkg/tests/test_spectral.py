import numpy as np
import pytest

from nldiffusion.geometry import Kind, RadialManifold, uniform_grid
from nldiffusion.kernels import Kernel, normalize_mass
from nldiffusion.nonlocal_op import assemble
from nldiffusion.spectral import (
    SymmetryError,
    circle_gamma,
    decay_report,
    eigendecompose,
    legendre_values,
    match_zonal_tower,
    oracle_circle,
    pair_eigenvalues,
    sphere_gamma,
)

CIRCLE = RadialManifold(Kind.CIRCLE)
S2 = RadialManifold(Kind.SPHERE, 2)

# 2 c int_0^1 (1 - s^2)^4 cos(k s) ds with c = 315/256, mpmath at 30 digits
CIRCLE_GAMMA = [
    0.9554099389509964, 0.8315641350596862, 0.6550800005031815, 0.4610310431218959,
    0.28277069488147244, 0.1434939735613369, 0.0522108461550348, 0.004817329225232804,
    -0.011064529505348562, -0.009978187443621863,
]
# Funk-Hecke coefficients for delta = 0.5, p = 4 on S^2, mass-normalized
SPHERE_GAMMA = [
    1.0, 0.9793926276434506, 0.9392671737288144, 0.8817183890444635, 0.8096868420325198,
    0.7267386165610866, 0.6368049688675264, 0.5439057905934155, 0.45188140936357113,
]


def test_circle_constant():
    assert normalize_mass(Kernel(1.0, 4), CIRCLE).c == pytest.approx(315 / 256, rel=1e-14)


def test_circle_oracle_values():
    k = normalize_mass(Kernel(1.0, 4), CIRCLE)
    assert np.allclose(circle_gamma(k, np.arange(1, 11)), CIRCLE_GAMMA, rtol=0, atol=1e-14)
    assert circle_gamma(k, 0)[0] == pytest.approx(1.0, abs=1e-14)


def test_sphere_oracle_values():
    k = normalize_mass(Kernel(0.5, 4), S2)
    assert np.allclose(sphere_gamma(k, 8), SPHERE_GAMMA, rtol=0, atol=1e-13)


def test_legendre_recurrence():
    t = np.linspace(-1, 1, 7)
    P = legendre_values(3, t)
    assert np.allclose(P[2], 1.5 * t**2 - 0.5)
    assert np.allclose(P[3], 2.5 * t**3 - 1.5 * t)


def test_oracle_multiplicity():
    o = oracle_circle(normalize_mass(Kernel(1.0, 4), CIRCLE), 3)
    assert o.size == 7 and np.all(np.diff(o) <= 0)


def test_circle_spectrum_matches_fourier(circle_op):
    A, spec = circle_op
    assert spec.gamma[0] == pytest.approx(1.0, abs=1e-10)
    _, err = pair_eigenvalues(spec.gamma, oracle_circle(A.kernel, 20))
    assert err.max() < 1e-10
    assert spec.orthonormality_defect() < 1e-12
    assert np.all(spec.lam >= -1e-10)


def test_sphere_zonal_spectrum(sphere_op):
    A, spec = sphere_op
    assert spec.lam[0] == pytest.approx(0.0, abs=1e-9)
    idx, ov = match_zonal_tower(spec, A.grid.nodes, 6)
    assert np.all(ov > 0.999)
    assert np.allclose(spec.gamma[idx], SPHERE_GAMMA[:7], atol=1e-6)


def test_pairing_handles_permutation():
    idx, err = pair_eigenvalues([3.0, 1.0, 2.0], [1.0, 2.0, 3.0])
    assert list(idx) == [1, 2, 0] and err.max() == 0


def test_noncompact_rejected():
    H2 = RadialManifold(Kind.HYPERBOLIC, 2)
    A = assemble(H2, Kernel(1.0), uniform_grid(H2, 2.0, 0.1))
    with pytest.raises(ValueError):
        eigendecompose(A)


def test_asymmetric_rejected(circle_op):
    A, _ = circle_op
    from dataclasses import replace

    bad = replace(A, entries=A.entries + np.triu(np.full((A.n, A.n), 1e-3)))
    with pytest.raises(SymmetryError):
        eigendecompose(bad)


def test_decay_rate_matches_gap(circle_op, rng):
    A, spec = circle_op
    u0 = np.cos(A.grid.nodes) + 0.3 * np.cos(3 * A.grid.nodes) + 0.5
    rep = decay_report(A, spec, u0, np.linspace(0, 40, 21))
    assert rep.mean == pytest.approx(0.5, abs=1e-12)
    assert rep.bound_ok
    assert rep.fitted_rate == pytest.approx(rep.lambda1, rel=1e-3)
