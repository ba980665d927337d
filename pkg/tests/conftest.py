import numpy as np
import pytest

from cmclab import CapSpec, DiskGrid, HeightField, cap_height_field, solve_dirichlet

_SOLVES = {}


def solved(H, n_rho=128, n_theta=256, r=1.0):
    """Session-wide cache of Dirichlet solves (the 128x256 ones take seconds)."""
    key = (r, H, n_rho, n_theta)
    if key not in _SOLVES:
        _SOLVES[key] = solve_dirichlet(r, H, grid=DiskGrid(r, n_rho, n_theta))
    return _SOLVES[key]


@pytest.fixture(scope="session")
def solve():
    return solved


@pytest.fixture(scope="session")
def cap2():
    return CapSpec.small_cap(1.0, 2.0)


@pytest.fixture(scope="session")
def fine():
    return DiskGrid(1.0, 128, 256)


@pytest.fixture(scope="session")
def cap2_fine(cap2, fine):
    return cap_height_field(cap2, fine)


def smooth_field(grid, rng, amplitude=0.1):
    """Random smooth field vanishing on the circle: ``(1 - rho^2) * p(x, y)``."""
    X, Y = grid.xy
    c = rng.normal(size=6) * amplitude
    p = c[0] + c[1] * X + c[2] * Y + c[3] * X * Y + c[4] * X**2 + c[5] * Y**2
    RHO, _ = grid.mesh
    return HeightField(grid, (1 - (RHO / grid.r) ** 2) * p)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance
    lines = [test_acceptance.RESULTS[k] for k in sorted(test_acceptance.RESULTS)]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
