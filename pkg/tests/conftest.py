import numpy as np
import pytest

from nldiffusion.geometry import Kind, RadialManifold, circle_grid, sphere_grid
from nldiffusion.kernels import Kernel, normalize_mass
from nldiffusion.nonlocal_op import assemble
from nldiffusion.spectral import eigendecompose

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def circle_op():
    m = RadialManifold(Kind.CIRCLE)
    k = normalize_mass(Kernel(1.0, 4), m)
    A = assemble(m, k, circle_grid(512))
    return A, eigendecompose(A)


@pytest.fixture(scope="session")
def sphere_op():
    m = RadialManifold(Kind.SPHERE, 2)
    k = normalize_mass(Kernel(0.5, 4), m)
    A = assemble(m, k, sphere_grid(m, 256))
    return A, eigendecompose(A)


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
