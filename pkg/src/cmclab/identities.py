"""Executable checks of the integral identities and inequalities behind the
uniqueness of CMC graphs over a circle.

Every check takes a height field (exact or solved) plus the prescribed mean
curvature ``H`` and returns an :class:`IdentityReport`.  Equality checks pass
when the relative residual is within tolerance; inequality checks pass when the
slack (oriented so that the inequality reads ``slack >= 0``) is not below
``-tolerance``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .catalog import CapSpec, cap_height_field
from .grid import DiskGrid, HeightField
from .quadrature import boundary_integral, boundary_trace, conormal_identity_residual, surface_integral
from .solver import SolveResult, SolverConfig, boundary_flux, solve_dirichlet
from .surface import build_frame, laplace_beltrami, umbilicity_deficit

# relative tolerances for equalities, absolute slack floors for inequalities
DEFAULT_TOLERANCES = {
    "check_flux": 1e-3,
    "check_projected_area": 1e-3,
    "check_conormal": 1e-3,
    "check_jacobi": 1e-2,
    "check_green_identity": 1e-2,
    "check_boundary_expression": 1e-2,
    "check_cauchy_schwarz": 1e-10,
    "check_chain": 1e-2,
    "check_umbilicity": 1e-2,
    "check_umbilicity_minimal": 1e-8,
    "check_h_bound": 0.0,
    "check_one_side": 0.0,
    "check_one_side_minimal": 1e-10,
    "check_gauss_variant": 1e-10,
}

JACOBI_EXCLUDED_RINGS = 2
EXACT_FLOOR = 1e-13


@dataclass
class IdentityReport:
    name: str
    lhs: float
    rhs: float
    residual: float
    relative_residual: float
    grid: tuple
    passed: bool
    tolerance: float
    kind: str = "equality"
    slack: float | None = None
    details: dict = field(default_factory=dict)

    @property
    def grid_label(self):
        return f"{self.grid[0]}x{self.grid[1]}"

    def as_dict(self):
        return {
            "name": self.name, "grid": self.grid_label, "kind": self.kind,
            "lhs": self.lhs, "rhs": self.rhs, "residual": self.residual,
            "relative_residual": self.relative_residual, "slack": self.slack,
            "tolerance": self.tolerance, "pass": self.passed, "details": self.details,
        }


def _relative(residual, scale):
    return residual / abs(scale) if abs(scale) > 1e-12 else residual


def _equality(name, lhs, rhs, grid, tol, **details):
    residual = abs(lhs - rhs)
    rel = _relative(residual, rhs)
    return IdentityReport(name, float(lhs), float(rhs), float(residual), float(rel),
                          grid.shape, bool(rel <= tol), tol, "equality", None, details)


def _inequality(name, lhs, rhs, grid, tol, slack=None, passed=None, **details):
    """``lhs >= rhs`` unless an explicit ``slack`` orientation is given."""
    slack = lhs - rhs if slack is None else slack
    residual = abs(lhs - rhs)
    ok = slack >= -tol if passed is None else passed
    return IdentityReport(name, float(lhs), float(rhs), float(residual),
                          float(_relative(residual, rhs)), grid.shape, bool(ok), tol,
                          "inequality", float(slack), details)


@lru_cache(maxsize=8)
def _geometry(field: HeightField):
    frame = build_frame(field)
    trace = boundary_trace(field, frame) if field.has_flat_boundary else None
    return frame, trace


def _need_trace(field):
    frame, trace = _geometry(field)
    if trace is None:
        raise ValueError("check requires zero Dirichlet data on the circle")
    return frame, trace


def _tol(name, tol):
    return DEFAULT_TOLERANCES[name] if tol is None else tol


def estimate_H(field: HeightField) -> float:
    """Area-weighted mean of the pointwise mean curvature."""
    frame, _ = _geometry(field)
    ones = np.ones(field.grid.shape)
    return surface_integral(frame.H, frame) / surface_integral(ones, frame)


def _H(field, H):
    return estimate_H(field) if H is None else float(H)


def check_flux(field, H=None, tol=None):
    """Boundary integral of ``<nu, a>`` against ``-2 pi r^2 H``."""
    grid = field.grid
    _, trace = _need_trace(field)
    H = _H(field, H)
    lhs = boundary_integral(trace.nu_dot_a, grid)
    return _equality("check_flux", lhs, -2 * math.pi * grid.r**2 * H, grid, _tol("check_flux", tol))


def check_projected_area(field, H=None, tol=None):
    grid = field.grid
    frame, _ = _geometry(field)
    lhs = surface_integral(frame.vertical, frame)
    return _equality("check_projected_area", lhs, math.pi * grid.r**2, grid,
                     _tol("check_projected_area", tol))


def check_conormal(field, H=None, tol=None):
    """Nodewise ``<nu, a> = <N, alpha> / r`` on the circle (max deviation)."""
    grid = field.grid
    frame, trace = _need_trace(field)
    res = conormal_identity_residual(trace, frame)
    tol = _tol("check_conormal", tol)
    return IdentityReport("check_conormal", res, 0.0, res, res, grid.shape, res <= tol, tol)


def jacobi_residual(field: HeightField, excluded_rings=JACOBI_EXCLUDED_RINGS):
    """``Delta v + |sigma|^2 v`` for ``v = <N, a>`` and its interior L2 norms.

    Returns ``(pointwise, norm, scale)`` where ``norm`` and ``scale`` (the norm
    of ``|sigma|^2 v``) are taken over all but the outermost ``excluded_rings``.
    """
    frame, _ = _geometry(field)
    v = frame.vertical
    res = laplace_beltrami(v, frame) + frame.sigma_sq * v
    keep = slice(0, field.grid.n_rho - excluded_rings)
    area = field.grid.cell_area[keep]
    norm = float(np.sqrt(np.sum(res[keep] ** 2 * area)))
    scale = float(np.sqrt(np.sum((frame.sigma_sq * v)[keep] ** 2 * area)))
    return res, norm, scale


def check_jacobi(field, H=None, tol=None, excluded_rings=JACOBI_EXCLUDED_RINGS):
    grid = field.grid
    _, norm, scale = jacobi_residual(field, excluded_rings)
    rel = _relative(norm, scale)
    tol = _tol("check_jacobi", tol)
    return IdentityReport("check_jacobi", norm, 0.0, norm, rel, grid.shape, rel <= tol, tol,
                          details={"excluded_rings": excluded_rings, "scale": scale})


def check_green_identity(field, H=None, tol=None):
    """``int |sigma|^2 <N,a> dS`` against ``int <dN nu, a> ds``."""
    grid = field.grid
    frame, trace = _need_trace(field)
    lhs = surface_integral(frame.sigma_sq * frame.vertical, frame)
    rhs = boundary_integral(trace.dNnu_dot_a, grid)
    return _equality("check_green_identity", lhs, rhs, grid, _tol("check_green_identity", tol))


def check_boundary_expression(field, H=None, tol=None):
    grid = field.grid
    _, trace = _need_trace(field)
    H = _H(field, H)
    r = grid.r
    lhs = boundary_integral(trace.dNnu_dot_a, grid)
    rhs = 4 * math.pi * r**2 * H**2 - boundary_integral(trace.nu_dot_a**2, grid) / r
    return _equality("check_boundary_expression", lhs, rhs, grid,
                     _tol("check_boundary_expression", tol))


def check_cauchy_schwarz(field, H=None, tol=None, trace=None):
    """``int <nu,a>^2 ds >= (int <nu,a> ds)^2 / length``.

    ``trace`` overrides the computed boundary trace.
    """
    grid = field.grid
    if trace is None:
        _, trace = _need_trace(field)
    length = boundary_integral(np.ones(grid.n_theta), grid)
    lhs = boundary_integral(trace.nu_dot_a**2, grid)
    rhs = boundary_integral(trace.nu_dot_a, grid) ** 2 / length
    return _inequality("check_cauchy_schwarz", lhs, rhs, grid, _tol("check_cauchy_schwarz", tol),
                       bound=2 * math.pi * grid.r**3 * _H(field, H) ** 2)


def check_chain(field, H=None, tol=None):
    """``2 pi r^2 H^2``, the surface integral and the boundary integral coincide."""
    grid = field.grid
    frame, trace = _need_trace(field)
    H = _H(field, H)
    chain = 2 * math.pi * grid.r**2 * H**2
    surf = surface_integral(frame.sigma_sq * frame.vertical, frame)
    bdry = boundary_integral(trace.dNnu_dot_a, grid)
    vals = (chain, surf, bdry)
    dev = max(abs(a - b) for a in vals for b in vals)
    scale = max(abs(v) for v in vals)
    rel = dev / scale if scale > 0 else 0.0
    tol = _tol("check_chain", tol)
    return IdentityReport("check_chain", surf, chain, dev, rel, grid.shape, rel <= tol, tol,
                          details={"chain_value": chain, "surface_integral": surf,
                                   "boundary_integral": bdry})


def check_umbilicity(field, H=None, tol=None):
    """Integrated deficit ``int (|sigma|^2 - 2H^2) <N,a> dS``; vanishes only for umbilic graphs."""
    grid = field.grid
    frame, _ = _geometry(field)
    H = _H(field, H)
    _, deficit = umbilicity_deficit(frame)
    chain = 2 * math.pi * grid.r**2 * H**2
    if H != 0:
        rel = deficit / chain
        tol = _tol("check_umbilicity", tol)
    else:
        rel = deficit
        tol = _tol("check_umbilicity_minimal", tol)
    return IdentityReport("check_umbilicity", deficit, 0.0, deficit, rel, grid.shape,
                          rel <= tol, tol, details={"chain_value": chain})


def check_h_bound(field, H=None, tol=None):
    """Strict bound ``|H| < 1/r`` together with ``|flux of grad f / W| < 2 pi r``."""
    grid = field.grid
    H = _H(field, H)
    r = grid.r
    flux, slope = boundary_flux(field)
    length = 2 * math.pi * r
    margin = _tol("check_h_bound", tol)
    ok = (abs(H) < 1.0 / r and slope < 1.0
          and abs(flux) <= length * slope * (1 + 1e-12) and abs(flux) < length - margin)
    return _inequality("check_h_bound", abs(flux), length, grid, margin,
                       slack=length - abs(flux), passed=ok, H_bound=1.0 / r,
                       max_slope=slope, slope_bound=length * slope)


def check_one_side(result, H=None, tol=None):
    """Interior values are strictly one-signed for ``H != 0``; ``f = 0`` for ``H = 0``.

    Accepts a :class:`SolveResult` or a height field with ``H``.
    """
    if isinstance(result, SolveResult):
        field, H = result.field, result.H
    else:
        field, H = result, _H(result, H)
    grid = field.grid
    f = field.values
    if H == 0:
        sup = float(np.max(np.abs(f)))
        tol = _tol("check_one_side_minimal", tol)
        return IdentityReport("check_one_side", sup, 0.0, sup, sup, grid.shape, sup <= tol, tol,
                              kind="inequality", slack=tol - sup, details={"vacuous": True})
    signed = -np.sign(H) * f
    low = float(np.min(signed))
    tol = _tol("check_one_side", tol)
    return _inequality("check_one_side", low, 0.0, grid, tol, passed=low > tol,
                       side="above" if H < 0 else "below")


def check_gauss_variant(field, H=None, tol=None):
    """``4 int H^2 v - 2 int K v >= 2 int H^2 v`` and ``K v <= H^2`` pointwise (``v = <N,a>``).

    Only applicable when ``K >= -1e-10`` everywhere; otherwise reported as a
    vacuous pass with ``applicable = False``.
    """
    grid = field.grid
    frame, _ = _geometry(field)
    tol = _tol("check_gauss_variant", tol)
    v = frame.vertical
    if np.min(frame.K) < -1e-10:
        return IdentityReport("check_gauss_variant", 0.0, 0.0, 0.0, 0.0, grid.shape, True, tol,
                              "inequality", 0.0, {"applicable": False})
    H2 = frame.H**2
    lhs = 4 * surface_integral(H2 * v, frame) - 2 * surface_integral(frame.K * v, frame)
    rhs = 2 * surface_integral(H2 * v, frame)
    pointwise = float(np.max(frame.K * v - H2))
    return _inequality("check_gauss_variant", lhs, rhs, grid, tol,
                       passed=(lhs - rhs >= -tol and pointwise <= tol),
                       applicable=True, max_Kv_minus_H2=pointwise)


CHECKS: dict[str, Callable] = {
    "check_flux": check_flux,
    "check_projected_area": check_projected_area,
    "check_conormal": check_conormal,
    "check_jacobi": check_jacobi,
    "check_green_identity": check_green_identity,
    "check_boundary_expression": check_boundary_expression,
    "check_cauchy_schwarz": check_cauchy_schwarz,
    "check_chain": check_chain,
    "check_umbilicity": check_umbilicity,
    "check_h_bound": check_h_bound,
    "check_one_side": check_one_side,
    "check_gauss_variant": check_gauss_variant,
}


def run_check(name, field, H=None, **kw):
    try:
        fn = CHECKS[name]
    except KeyError:
        raise KeyError(f"unknown check {name!r}; known: {', '.join(CHECKS)}") from None
    return fn(field, H, **kw)


# ---------------------------------------------------------------- convergence


@dataclass
class ConvergenceStudy:
    name: str
    reports: list
    orders: list
    notes: list = field(default_factory=list)

    @property
    def residuals(self):
        return [rep.residual for rep in self.reports]

    def exact(self, k):
        rep = self.reports[k]
        return rep.residual <= EXACT_FLOOR * max(1.0, abs(rep.rhs), abs(rep.lhs))

    @property
    def min_order(self):
        finite = [p for p in self.orders if p is not None]
        return min(finite) if finite else None

    def meets_order(self, p):
        """Every rung improves by at least ``2**p`` or is already exact at rounding level."""
        for k, order in enumerate(self.orders):
            if order is None:
                if not self.exact(k + 1):
                    return False
            elif order < p:
                return False
        return True


def estimated_orders(reports):
    """``log2`` of successive residual ratios; ``None`` when a rung is exact."""
    orders = []
    for a, b in zip(reports, reports[1:]):
        ea = a.residual <= EXACT_FLOOR * max(1.0, abs(a.rhs), abs(a.lhs))
        eb = b.residual <= EXACT_FLOOR * max(1.0, abs(b.rhs), abs(b.lhs))
        orders.append(None if ea or eb else math.log2(a.residual / b.residual))
    return orders


def run_convergence_study(check, family, ladder) -> ConvergenceStudy:
    """Apply one check along a refinement ladder.

    ``family`` maps a :class:`DiskGrid` to ``(field, H)``; ``ladder`` is a list
    of grids of successively doubled resolution.
    """
    if len(ladder) < 2:
        raise ValueError("ladder needs at least two grids")
    name = check if isinstance(check, str) else check.__name__
    reports = []
    for grid in ladder:
        field, H = family(grid)
        reports.append(run_check(name, field, H))
    orders = estimated_orders(reports)
    notes = []
    if any(o is None for o in orders):
        notes.append("residual at rounding level on some rungs; order undefined there")
    return ConvergenceStudy(name, reports, orders, notes)


def standard_ladder(r=1.0, base=(32, 64), rungs=3):
    n_rho, n_theta = base
    return [DiskGrid(r, n_rho * 2**k, n_theta * 2**k) for k in range(rungs)]


def exact_family(spec: CapSpec):
    def family(grid):
        return cap_height_field(spec, grid), spec.H
    return family


def solve_family(r, H, config: SolverConfig | None = None):
    def family(grid):
        return solve_dirichlet(r, H, config, grid).field, H
    return family


def control_field(grid: DiskGrid) -> HeightField:
    """Non-CMC negative control ``0.2 (1 - (rho/r)^2)(1 + 0.3 cos theta)``."""
    RHO, THETA = grid.mesh
    s = RHO / grid.r
    return HeightField(grid, 0.2 * (1 - s**2) * (1 + 0.3 * np.cos(THETA)))


def control_family(grid):
    return control_field(grid), None
