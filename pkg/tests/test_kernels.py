import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nldiffusion.geometry import Kind, RadialManifold
from nldiffusion.kernels import (
    Kernel,
    Normalization,
    mass,
    normalize_mass,
    normalize_spectral,
    rescale,
    second_moment_q,
    spectral_coefficient,
)

E1 = RadialManifold(Kind.EUCLIDEAN, 1)
E2 = RadialManifold(Kind.EUCLIDEAN, 2)
H2 = RadialManifold(Kind.HYPERBOLIC, 2)
H3 = RadialManifold(Kind.HYPERBOLIC, 3)
S2 = RadialManifold(Kind.SPHERE, 2)

# 30-digit mpmath quadratures of the defining integrals
C_H2_P2 = 0.91599088614670739730024100956
C_S2_P2 = 3.85972365882102508514475212792
C_SPEC_H3_P2 = 0.988285591615451599959470788316
C_SPEC_H2_P2 = 0.930555298155836140412905414415


def test_indicator_on_line():
    k = normalize_mass(Kernel(1.0, 0), E1)
    assert k.c == pytest.approx(0.5, rel=1e-14)
    assert k.mode is Normalization.MASS


def test_mass_normalization_oracles():
    assert normalize_mass(Kernel(1.0, 2), H2).c == pytest.approx(C_H2_P2, rel=1e-12)
    assert normalize_mass(Kernel(0.5, 2), S2).c == pytest.approx(C_S2_P2, rel=1e-12)


def test_spectral_normalization_oracles():
    assert normalize_spectral(Kernel(1.0, 2), H3).c == pytest.approx(C_SPEC_H3_P2, rel=1e-10)
    assert normalize_spectral(Kernel(1.0, 2), H2).c == pytest.approx(C_SPEC_H2_P2, rel=1e-10)


def test_spectral_constant_approaches_mass_constant():
    ratios = [normalize_spectral(Kernel(d, 4), H3).c / normalize_mass(Kernel(d, 4), H3).c for d in (0.1, 0.01)]
    assert abs(ratios[1] - 1) < abs(ratios[0] - 1) < 1e-2
    assert abs(ratios[1] - 1) < 1e-4


def test_spectral_needs_hyperbolic():
    with pytest.raises(ValueError):
        normalize_spectral(Kernel(), S2)


def test_support_beyond_cut_locus_rejected():
    with pytest.raises(ValueError):
        normalize_mass(Kernel(3.5, 2), S2)


def test_invalid_kernels():
    for bad in (dict(delta=0.0), dict(p=-1), dict(c=0.0), dict(p=1.5)):
        with pytest.raises(ValueError):
            Kernel(**bad)


def test_second_moment_examples():
    k1 = normalize_mass(Kernel(1.0, 0), E1)
    assert second_moment_q(k1, 1) == pytest.approx(1 / 6, rel=1e-13)
    # c = 3/pi; int |x|^2 J = 2 pi c / 24 = 1/4, so q = 1/16
    k2 = normalize_mass(Kernel(1.0, 2), E2)
    assert k2.c == pytest.approx(3 / np.pi, rel=1e-13)
    assert second_moment_q(k2, 2) == pytest.approx(1 / 16, rel=1e-13)


@given(st.floats(0.05, 1.0), st.integers(1, 3))
def test_second_moment_bound(delta, N):
    k = normalize_mass(Kernel(delta, 4), RadialManifold(Kind.EUCLIDEAN, N))
    assert 0 < second_moment_q(k, N) <= delta**2 / (2 * N)


def test_rescale():
    k = Kernel(1.0, 4, 2.0)
    assert rescale(k, 1.0, 2) == k
    half = rescale(k, 0.5, 2)
    assert half.delta == 0.5 and half.c == pytest.approx(8.0)
    assert mass(half, E2) == pytest.approx(mass(k, E2), rel=1e-13)
    assert second_moment_q(half, 2) == pytest.approx(0.25 * second_moment_q(k, 2), rel=1e-13)
    with pytest.raises(ValueError):
        rescale(k, 0.0, 2)
    with pytest.raises(ValueError):
        rescale(Kernel(4.0), 0.9, 2, S2)


@given(st.floats(0.1, 2.0), st.integers(0, 6))
def test_profile_properties(delta, p):
    k = Kernel(delta, p)
    s = np.linspace(0, 2 * delta, 101)
    assert np.all(k(s) >= 0)
    assert k(delta) == 0.0 and k(1.5 * delta) == 0.0
    assert np.all(k(s[s < delta]) > 0)


@pytest.mark.parametrize("p", [2, 3, 4])
def test_flat_at_support_edge(p):
    k = Kernel(1.0, p)
    h = 1e-5
    assert abs((k(1.0) - k(1.0 - h)) / h) < 1e-4


@given(st.floats(0.2, 3.0))
def test_normalize_mass_idempotent(delta):
    k = normalize_mass(Kernel(delta, 4), H2)
    assert mass(k, H2) == pytest.approx(1.0, abs=1e-10)
    assert normalize_mass(k, H2).c == pytest.approx(k.c, rel=1e-10)


@given(st.floats(0.1, 3.0), st.sampled_from([2, 3, 4]))
@settings(max_examples=25, deadline=None)
def test_spectral_coefficient_between_zero_and_one(delta, N):
    m = RadialManifold(Kind.HYPERBOLIC, N)
    a = spectral_coefficient(normalize_mass(Kernel(delta, 4), m), m)
    assert 0 < a < 1
