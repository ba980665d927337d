"""Dirichlet problem ``div(grad f / W) = 2H`` on the disk, ``f = 0`` on the circle.

The residual is a finite-volume balance: the flux ``grad f / W`` is evaluated on
every cell face (see :mod:`cmclab.stencils`) and its net outflow divided by the
cell area, minus ``2H``.  Newton's method uses the exact Jacobian of that
discrete map, and the target ``H`` is reached by uniform continuation from the
plane.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .catalog import CapSpec, cap_height_field
from .errors import GridError, HOutOfRange, NonConvergence
from .grid import DiskGrid, HeightField
from .stencils import face_operators

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    newton_tol: float = 1e-10
    max_newton_iters: int = 50
    damping: float = 0.5
    min_step: float = 1.0 / 64
    continuation_steps: int = 10
    h_max_fraction: float = 0.95
    linear_tol: float = 1e-12
    max_refinements: int = 3

    def __post_init__(self):
        for name in ("newton_tol", "damping", "min_step", "linear_tol", "h_max_fraction"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.h_max_fraction < 1:
            raise ValueError("h_max_fraction must be < 1")
        if not 0 < self.damping < 1 or not self.min_step <= 1:
            raise ValueError("damping must lie in (0, 1) and min_step in (0, 1]")
        if self.max_newton_iters < 1 or self.continuation_steps < 1:
            raise ValueError("iteration counts must be >= 1")
        if self.max_refinements < 0:
            raise ValueError("max_refinements must be >= 0")


@dataclass(frozen=True, eq=False)
class SolveResult:
    field: HeightField
    H: float
    residual_history: list = field(default_factory=list)
    converged: bool = False
    continuation_path: list = field(default_factory=list)
    newton_iterations: int = 0

    @property
    def grid(self) -> DiskGrid:
        return self.field.grid

    @property
    def final_residual(self):
        return self.residual_history[-1] if self.residual_history else 0.0


def _face_state(field: HeightField):
    ops = face_operators(field.grid)
    g = ops.gradient(field.values, field.boundary)
    W = np.sqrt(1.0 + g.normal**2 + g.tangential**2)
    return ops, g, W


def cmc_residual(field: HeightField, H: float) -> np.ndarray:
    """Cell-averaged ``div(grad f / W) - 2H`` at every node."""
    ops, g, W = _face_state(field)
    return (ops.divergence @ (g.normal / W)).reshape(field.grid.shape) - 2.0 * H


def residual_norm(res, grid: DiskGrid) -> float:
    """Discrete L2 norm, ``sqrt(sum res^2 * cell_area)``."""
    return float(np.sqrt(np.sum(np.asarray(res) ** 2 * grid.cell_area)))


def boundary_flux(field: HeightField):
    """Outward flux of ``grad f / W`` through the circle and ``max |grad f| / W`` there."""
    ops, g, W = _face_state(field)
    sl = ops.boundary_faces
    flux = float(np.sum(g.normal[sl] / W[sl] * ops.face_length[sl]))
    slope = np.sqrt(g.normal[sl] ** 2 + g.tangential[sl] ** 2) / W[sl]
    return flux, float(np.max(slope))


def jacobian_matrix(field: HeightField) -> sp.csr_matrix:
    """Sparse derivative of :func:`cmc_residual` with respect to the node values."""
    ops, g, W = _face_state(field)
    a, b = g.normal, g.tangential
    W3 = W**3
    dF_da = (1.0 + b**2) / W3
    dF_db = -a * b / W3
    return ops.flux_jacobian(dF_da, dF_db)


def jacobian_apply(field: HeightField, direction) -> np.ndarray:
    """Directional derivative of the residual; ``direction`` vanishes on the circle."""
    direction = np.asarray(direction, float)
    if direction.shape != field.grid.shape:
        raise GridError(f"direction has shape {direction.shape}, grid expects {field.grid.shape}")
    return (jacobian_matrix(field) @ direction.ravel()).reshape(field.grid.shape)


def _linear_solve(J, rhs, config: SolverConfig):
    """Sparse LU followed by iterative refinement toward ``config.linear_tol``."""
    lu = spla.splu(J.tocsc(), permc_spec="MMD_AT_PLUS_A")
    x = lu.solve(rhs)
    scale = np.linalg.norm(rhs)
    best = np.inf
    for _ in range(config.max_refinements):
        r = rhs - J @ x
        rel = np.linalg.norm(r) / scale if scale else 0.0
        if rel <= config.linear_tol or rel >= best:
            break
        best = rel
        x = x + lu.solve(r)
    return x


def _newton(field, H, config, history):
    grid = field.grid
    res = cmc_residual(field, H)
    norm = residual_norm(res, grid)
    history.append(norm)
    iters = 0
    while norm > config.newton_tol:
        if iters >= config.max_newton_iters:
            raise NonConvergence(
                f"Newton did not reach {config.newton_tol:g} in {iters} iterations at H = {H:.6g}",
                history, H,
            )
        step = _linear_solve(jacobian_matrix(field), -res.ravel(), config).reshape(grid.shape)
        t = 1.0
        while True:
            trial = field.with_values(field.values + t * step)
            trial_res = cmc_residual(trial, H)
            trial_norm = residual_norm(trial_res, grid)
            if trial_norm < norm or t <= config.min_step:
                break
            t *= config.damping
        field, res, norm = trial, trial_res, trial_norm
        iters += 1
        history.append(norm)
        log.debug("H=%.6g iter %d step %.4g residual %.3e", H, iters, t, norm)
        if not np.isfinite(norm):
            raise NonConvergence(f"residual became non-finite at H = {H:.6g}", history, H)
    return field, iters


def check_h_window(r, H, config: SolverConfig = SolverConfig()):
    """Raise :class:`HOutOfRange` when ``|H|`` exceeds the solver window."""
    limit = config.h_max_fraction / r
    if not np.isfinite(H) or abs(H) > limit:
        raise HOutOfRange(H, limit, f"|H| = {abs(H):.6g} outside the solver window "
                                    f"{limit:.6g} (no graph exists beyond 1/r = {1.0 / r:.6g})")


def solve_dirichlet(r, H, config: SolverConfig | None = None, grid: DiskGrid | None = None) -> SolveResult:
    """Solve the CMC Dirichlet problem with zero boundary data.

    Continuation runs through ``H_k = k H / steps`` starting from the plane;
    each step is solved by damped Newton to ``config.newton_tol`` in the
    discrete L2 norm.  The residual history concatenates all steps.
    """
    config = config or SolverConfig()
    grid = grid or DiskGrid(r, 64, 128)
    if not np.isclose(grid.r, r, rtol=1e-14, atol=0):
        raise GridError(f"grid radius {grid.r} differs from r = {r}")
    check_h_window(r, H, config)

    field = HeightField.zeros(grid)
    history, path = [], []
    total = 0
    if H == 0:
        history.append(residual_norm(cmc_residual(field, 0.0), grid))
        path.append(0.0)
    else:
        for k in range(1, config.continuation_steps + 1):
            Hk = H * k / config.continuation_steps
            field, iters = _newton(field, Hk, config, history)
            total += iters
            path.append(Hk)
    result = SolveResult(field, float(H), history, history[-1] <= config.newton_tol, path, total)
    if H != 0:
        interior = field.values
        one_sided = np.all(interior > 0) if H < 0 else np.all(interior < 0)
        if not one_sided:
            log.warning("solution at H = %.6g is not one-signed in the interior", H)
    return result


def error_vs_exact(result: SolveResult, spec: CapSpec):
    """``(L_inf, L2)`` distance between a solve and the closed-form height."""
    grid = result.grid
    if not np.isclose(grid.r, spec.r, rtol=1e-14, atol=0):
        raise GridError(f"cap radius {spec.r} does not match the solve radius {grid.r}")
    diff = result.field.values - cap_height_field(spec, grid).values
    return float(np.max(np.abs(diff))), float(np.sqrt(np.sum(diff**2 * grid.cell_area)))
