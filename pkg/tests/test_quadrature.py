import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cmclab import (
    DiskGrid, HeightField, NonFiniteError, boundary_integral, boundary_trace,
    build_frame, cap_height_field, conormal_identity_residual, surface_integral,
)


def test_surface_integral_of_one_on_plane():
    for r in (0.5, 1.0, 3.0):
        g = DiskGrid(r, 16, 32)
        fr = build_frame(HeightField.zeros(g))
        assert math.isclose(surface_integral(np.ones(g.shape), fr), math.pi * r**2, rel_tol=1e-12)


def test_surface_integral_projected_area_order(cap2):
    errs = []
    for n in (32, 64, 128):
        g = DiskGrid(1.0, n, 2 * n)
        fr = build_frame(cap_height_field(cap2, g))
        errs.append(abs(surface_integral(fr.vertical, fr) - math.pi))
    # v W = 1 cancels exactly, so the midpoint rule is exact for the flat measure
    assert max(errs) < 1e-12


def test_cap_area(cap2_fine):
    fr = build_frame(cap2_fine)
    area = surface_integral(np.ones(fr.grid.shape), fr)
    assert math.isclose(area, 4 * math.pi * (2 - math.sqrt(3)), rel_tol=1e-3)


def test_surface_integral_validation(cap2_fine):
    fr = build_frame(cap2_fine)
    with pytest.raises(ValueError):
        surface_integral(np.ones((3, 3)), fr)
    bad = np.ones(fr.grid.shape)
    bad[0, 0] = np.inf
    with pytest.raises(NonFiniteError):
        surface_integral(bad, fr)


def test_boundary_integral_examples():
    g = DiskGrid(1.5, 8, 64)
    assert boundary_integral(np.ones(64), g) == pytest.approx(2 * math.pi * 1.5, rel=1e-15)
    for k in (1, 2, 5):
        assert abs(boundary_integral(np.cos(k * g.theta), g)) < 1e-14
    with pytest.raises(ValueError):
        boundary_integral(np.ones(10), g)


@settings(max_examples=25, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0, 3))
def test_boundary_integral_linear_and_monotone(a, b, c):
    g = DiskGrid(1.0, 8, 32)
    p, q = np.sin(g.theta) ** 2, np.cos(2 * g.theta) + 2
    assert math.isclose(boundary_integral(a * p + b * q, g),
                        a * boundary_integral(p, g) + b * boundary_integral(q, g),
                        rel_tol=1e-12, abs_tol=1e-12)
    assert boundary_integral(q + c, g) >= boundary_integral(q, g)


def test_trace_plane():
    g = DiskGrid(1.0, 16, 32)
    tr = boundary_trace(HeightField.zeros(g))
    c, s = np.cos(g.theta), np.sin(g.theta)
    assert np.allclose(tr.nu, np.stack([-c, -s, 0 * c], -1), atol=1e-15)
    assert np.all(tr.nu_dot_a == 0) and np.all(tr.sigma_nn == 0)


def test_trace_cap(cap2_fine):
    tr = boundary_trace(cap2_fine)
    assert np.allclose(tr.nu_dot_a, 0.5, atol=1e-4)
    assert np.allclose(tr.sigma_nn, -0.5, atol=1e-3)
    assert np.allclose(tr.dNnu_dot_a, 0.25, atol=1e-3)
    assert np.allclose(tr.dNnu_dot_a, -tr.sigma_nn * tr.nu_dot_a, atol=1e-12)
    assert boundary_integral(tr.nu_dot_a, cap2_fine.grid) == pytest.approx(math.pi, rel=1e-3)
    # orientation: tangent x nu = N
    assert np.allclose(np.cross(tr.tangent, tr.nu), tr.N, atol=1e-14)


def test_trace_requires_flat_boundary():
    g = DiskGrid(1.0, 8, 16)
    with pytest.raises(ValueError):
        boundary_trace(g.sample(lambda x, y: x))


def test_conormal_identity(cap2):
    assert conormal_identity_residual(*_trace_frame(HeightField.zeros(DiskGrid(1.0, 16, 32)))) < 1e-12
    res = []
    for n in (32, 64, 128):
        res.append(conormal_identity_residual(*_trace_frame(
            cap_height_field(cap2, DiskGrid(1.0, n, 2 * n)))))
    orders = np.log2(np.array(res[:-1]) / np.array(res[1:]))
    assert np.all(orders >= 1), orders


def test_conormal_identity_solved(solve):
    f = solve(-0.5).field
    assert conormal_identity_residual(*_trace_frame(f)) <= 1e-3


def test_synthetic_trace_with_nu_dot_a(cap2_fine):
    tr = boundary_trace(cap2_fine)
    th = cap2_fine.grid.theta
    syn = tr.with_nu_dot_a(0.5 + 0.1 * np.cos(th))
    assert np.allclose(syn.dNnu_dot_a, -tr.sigma_nn * syn.nu_dot_a)


def _trace_frame(field):
    fr = build_frame(field)
    return boundary_trace(field, fr), fr
