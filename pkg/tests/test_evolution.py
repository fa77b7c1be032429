import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nldiffusion.evolution import check_order_preservation, evolve, functional, trajectory


def _profile(A, a, b):
    x = A.grid.nodes
    return A.grid.with_values(a * np.cos(x) + b * np.sin(2 * x) + np.exp(-x**2))


def test_schemes_agree(circle_op):
    A, spec = circle_op
    u0 = _profile(A, 1.0, 0.5)
    ref = evolve(A, u0, 2.0, "exact_spectral", spectral=spec).values
    for scheme in ("rk4", "duhamel_picard"):
        out = evolve(A, u0, 2.0, scheme).values
        assert np.max(np.abs(out - ref)) < 1e-6, scheme


def test_rk4_fourth_order(circle_op):
    A, spec = circle_op
    u0 = _profile(A, 1.0, 1.0)
    ref = evolve(A, u0, 1.0, "exact_spectral", spectral=spec).values
    e = [np.max(np.abs(evolve(A, u0, 1.0, "rk4", dt=dt).values - ref)) for dt in (0.1, 0.05)]
    assert np.log2(e[0] / e[1]) == pytest.approx(4.0, abs=0.3)


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0.1, 30))
@settings(max_examples=20, deadline=None)
def test_mass_conserved_and_contraction(circle_op, a, b, t):
    A, spec = circle_op
    u0 = _profile(A, a, b)
    u = evolve(A, u0, t, spectral=spec)
    # discrete mass drifts like |lambda_0| t with lambda_0 ~ 3e-12 (row-sum quadrature floor)
    assert functional(u, "mass") == pytest.approx(functional(u0, "mass"), abs=1e-9)
    assert functional(u, "linf") <= functional(u0, "linf") + 1e-10
    assert functional(u, "l2") <= functional(u0, "l2") + 1e-10


def test_order_preserved(circle_op):
    A, spec = circle_op
    u0 = _profile(A, 1.0, 0.3)
    v0 = u0.with_values(u0.values + 0.1 + 0.1 * np.cos(3 * A.grid.nodes))
    assert check_order_preservation(A, u0, v0, [0.5, 2.0, 8.0], spectral=spec) < 1e-12
    with pytest.raises(ValueError):
        check_order_preservation(A, v0, u0, [1.0], spectral=spec)


def test_semigroup_property(circle_op):
    A, spec = circle_op
    u0 = _profile(A, 1.0, 1.0)
    two_step = trajectory(A, u0, [1.0, 3.0], spectral=spec)[-1]
    one_step = evolve(A, u0, 3.0, spectral=spec)
    assert np.max(np.abs(two_step.values - one_step.values)) < 1e-12


def test_time_scaling(circle_op):
    A, spec = circle_op
    u0 = _profile(A, 1.0, 1.0)
    a = evolve(A, u0, 1.0, spectral=spec, c0=2.0).values
    b = evolve(A, u0, 2.0, spectral=spec).values
    assert np.max(np.abs(a - b)) < 1e-12


def test_invalid_arguments(circle_op):
    A, spec = circle_op
    u0 = _profile(A, 1.0, 0.0)
    for kw in (dict(t=-1.0), dict(t=1.0, c0=0.0), dict(t=1.0, scheme="euler"),
               dict(t=1.0, scheme="rk4", dt=0.2), dict(t=1.0, scheme="duhamel_picard", dt=0.6)):
        with pytest.raises(ValueError):
            evolve(A, u0, **kw)
    with pytest.raises(ValueError):
        functional(u0, "phi0_weighted")
    with pytest.raises(ValueError):
        functional(u0, "energy")
    with pytest.raises(ValueError):
        trajectory(A, u0, [2.0, 1.0], spectral=spec)
