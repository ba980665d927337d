import math

import numpy as np
import pytest

from cmclab import CHECKS, CapSpec, DiskGrid, HeightField, boundary_trace, cap_height_field, run_check
from cmclab.identities import (
    ConvergenceStudy, check_cauchy_schwarz, check_gauss_variant, check_one_side, control_family,
    control_field, estimate_H, exact_family, run_convergence_study, solve_family, standard_ladder,
)

from conftest import smooth_field

PLANE = HeightField.zeros(DiskGrid(1.0, 32, 64))


@pytest.mark.parametrize("name", sorted(CHECKS))
def test_plane_passes_everything(name):
    rep = run_check(name, PLANE, 0.0)
    assert rep.passed, rep
    if rep.kind == "equality":
        assert rep.residual <= 1e-12


@pytest.mark.parametrize("name", sorted(CHECKS))
def test_exact_cap_passes_everything(name, cap2_fine):
    rep = run_check(name, cap2_fine, -0.5)
    assert rep.passed, rep


def test_exact_cap_values(cap2_fine):
    half_pi = math.pi / 2
    assert run_check("check_flux", cap2_fine, -0.5).lhs == pytest.approx(math.pi, rel=1e-4)
    green = run_check("check_green_identity", cap2_fine, -0.5)
    assert green.lhs == pytest.approx(half_pi, rel=1e-4)
    assert green.rhs == pytest.approx(half_pi, rel=1e-4)
    bexp = run_check("check_boundary_expression", cap2_fine, -0.5)
    assert bexp.rhs == pytest.approx(half_pi, rel=1e-4)
    chain = run_check("check_chain", cap2_fine, -0.5)
    for key in ("chain_value", "surface_integral", "boundary_integral"):
        assert chain.details[key] == pytest.approx(half_pi, rel=1e-4)
    cs = run_check("check_cauchy_schwarz", cap2_fine, -0.5)
    assert 0 <= cs.slack <= 1e-6
    gauss = run_check("check_gauss_variant", cap2_fine, -0.5)
    assert abs(gauss.slack) < 1e-8


def test_unknown_check():
    with pytest.raises(KeyError, match="check_foo"):
        run_check("check_foo", PLANE, 0.0)


def test_estimate_H(cap2_fine):
    assert estimate_H(cap2_fine) == pytest.approx(-0.5, abs=1e-4)
    assert run_check("check_flux", cap2_fine).passed


def test_synthetic_cauchy_schwarz(cap2_fine):
    tr = boundary_trace(cap2_fine).with_nu_dot_a(0.5 + 0.1 * np.cos(cap2_fine.grid.theta))
    rep = check_cauchy_schwarz(cap2_fine, -0.5, trace=tr)
    assert rep.slack == pytest.approx(0.01 * math.pi, rel=1e-12)
    assert rep.passed


def test_inequalities_never_negative_on_random_fields(rng):
    g = DiskGrid(1.0, 24, 48)
    for _ in range(10):
        f = smooth_field(g, rng, amplitude=0.3)
        assert check_cauchy_schwarz(f).slack >= -1e-10
        gv = check_gauss_variant(f)
        if gv.details["applicable"]:
            assert gv.slack >= -1e-10
        assert run_check("check_umbilicity", f).lhs >= 0


def test_control_field_is_negative_for_gauss():
    g = DiskGrid(1.0, 32, 64)
    rep = check_gauss_variant(control_field(g))
    assert rep.passed and rep.details["applicable"] is False


def test_one_side():
    g = DiskGrid(1.0, 16, 32)
    rep = check_one_side(PLANE, 0.0)
    assert rep.passed and rep.details["vacuous"]
    dip = cap_height_field(CapSpec.small_cap(1.0, 2.0), g)
    assert check_one_side(dip, -0.5).passed
    flipped = dip.with_values(-dip.values)
    assert not check_one_side(flipped, -0.5).passed


def test_h_bound_fails_for_out_of_range_H(cap2_fine):
    assert run_check("check_h_bound", cap2_fine, -0.5).passed
    assert not run_check("check_h_bound", cap2_fine, -1.2).passed


def test_projected_area_study_exact_at_rounding(cap2):
    study = run_convergence_study("check_projected_area", exact_family(cap2), standard_ladder())
    assert study.meets_order(1.9)
    assert all(r.relative_residual < 1e-12 for r in study.reports)


def test_flux_on_plane_order_undefined():
    study = run_convergence_study("check_flux", exact_family(CapSpec.plane(1.0)), standard_ladder())
    assert all(r.residual <= 1e-12 for r in study.reports)
    assert study.orders == [None, None]
    assert study.notes


def test_jacobi_study_on_cap(cap2):
    study = run_convergence_study("check_jacobi", exact_family(cap2), standard_ladder())
    assert study.min_order >= 1, study.orders


def test_negative_controls_stay_away_from_zero():
    for name in ("check_jacobi", "check_umbilicity"):
        study = run_convergence_study(name, control_family, standard_ladder())
        first = study.residuals[0]
        assert all(r >= 0.1 * first for r in study.residuals), (name, study.residuals)
        assert not any(rep.passed for rep in study.reports)


def test_convergence_study_needs_two_rungs(cap2):
    with pytest.raises(ValueError):
        run_convergence_study("check_flux", exact_family(cap2), standard_ladder(rungs=1))


def test_meets_order_logic():
    from cmclab.identities import IdentityReport
    reps = [IdentityReport("x", 1.0, 1.0, e, e, (8, 16), True, 1.0) for e in (4e-3, 1e-3, 1e-16)]
    study = ConvergenceStudy("x", reps, [2.0, None])
    assert study.meets_order(1.9) and not study.meets_order(2.1)


def test_solve_family_runs():
    field, H = solve_family(1.0, -0.25)(DiskGrid(1.0, 16, 32))
    assert H == -0.25 and run_check("check_flux", field, H).passed


def test_equality_residuals_decrease_on_exact_cap(cap2):
    family = exact_family(cap2)
    for name in CHECKS:
        study = run_convergence_study(name, family, standard_ladder())
        if study.reports[0].kind != "equality":
            continue
        res = study.residuals
        # a non-decreasing rung is tolerated only at rounding level
        assert all(b < a or b < 1e-10 for a, b in zip(res, res[1:])), (name, res)


def test_checks_are_deterministic(cap2):
    g = DiskGrid(1.0, 32, 64)
    a = [run_check(n, cap_height_field(cap2, g), -0.5).as_dict() for n in CHECKS]
    b = [run_check(n, cap_height_field(cap2, g), -0.5).as_dict() for n in CHECKS]
    assert a == b
