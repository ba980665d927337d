"""Surface/boundary quadrature and conormal data along the boundary circle."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteError
from .grid import DiskGrid, HeightField
from .stencils import extrapolate_to_boundary, face_operators
from .surface import SurfaceFrame, build_frame, polar_to_cartesian, theta_derivative, unit_normal


def surface_integral(phi, frame: SurfaceFrame) -> float:
    """Midpoint-rule approximation of the integral of ``phi`` over the graph.

    Uses ``dS = W rho drho dtheta``; the sum runs over nodes in i-major order.
    """
    grid = frame.grid
    phi = np.asarray(phi, float)
    if phi.shape != grid.shape:
        raise ValueError(f"phi has shape {phi.shape}, grid expects {grid.shape}")
    if not np.all(np.isfinite(phi)):
        raise NonFiniteError("integrand contains non-finite values")
    return float(np.sum((phi * frame.W * grid.cell_area).ravel()))


def boundary_integral(psi, grid: DiskGrid) -> float:
    """Periodic trapezoid rule on the boundary circle, ``ds = r dtheta``."""
    psi = np.asarray(psi, float)
    if psi.shape != (grid.n_theta,):
        raise ValueError(f"psi has shape {psi.shape}, grid expects ({grid.n_theta},)")
    if not np.all(np.isfinite(psi)):
        raise NonFiniteError("integrand contains non-finite values")
    return float(np.sum(psi)) * grid.r * grid.h_theta


@dataclass(frozen=True, eq=False)
class BoundaryTrace:
    """Conormal data at the boundary nodes ``alpha(theta_j)``.

    ``nu`` is the inward conormal, oriented so that ``tangent x nu = N``.
    """

    grid: DiskGrid
    alpha: np.ndarray
    tangent: np.ndarray
    grad: np.ndarray
    hess: np.ndarray
    N: np.ndarray
    nu: np.ndarray
    nu_dot_a: np.ndarray
    sigma_nn: np.ndarray
    dNnu_dot_a: np.ndarray

    def with_nu_dot_a(self, nu_dot_a):
        """Copy with a replaced ``<nu, a>`` trace (for exercising the integral inequalities)."""
        nu_dot_a = np.asarray(nu_dot_a, float)
        return BoundaryTrace(self.grid, self.alpha, self.tangent, self.grad, self.hess, self.N,
                             self.nu, nu_dot_a, self.sigma_nn, -self.sigma_nn * nu_dot_a)


def boundary_trace(field: HeightField, frame: SurfaceFrame | None = None) -> BoundaryTrace:
    """Conormal, ``<nu, a>``, ``sigma(nu, nu)`` and ``<dN nu, a>`` on the boundary.

    The boundary gradient comes from the one-sided radial difference through
    the Dirichlet ring (the same stencil as the boundary flux); the Hessian is
    extrapolated quadratically from the second to fourth rings in from the edge.
    """
    grid = field.grid
    if not field.has_flat_boundary:
        raise ValueError("boundary trace requires zero Dirichlet data (boundary in z = 0)")
    if frame is None:
        frame = build_frame(field)
    f = field.values
    w = face_operators(grid).w_face
    f_r = w[0] * f[-2] + w[1] * f[-1] + w[2] * field.boundary
    f_t = theta_derivative(field.boundary)
    theta = grid.theta
    grad = polar_to_cartesian(grid.r, theta, f_r, f_t)
    hess = extrapolate_to_boundary(frame.hess, skip_outer=True)
    if not (np.all(np.isfinite(grad)) and np.all(np.isfinite(hess))):
        raise NonFiniteError("boundary extrapolation produced non-finite values; refine the grid")

    c, s = np.cos(theta), np.sin(theta)
    zero = np.zeros_like(theta)
    alpha = grid.r * np.stack([c, s, zero], axis=-1)
    tangent = np.stack([-s, c, zero], axis=-1)
    N = unit_normal(grad)
    nu = np.cross(N, tangent)
    W = np.sqrt(1.0 + np.sum(grad**2, axis=-1))
    nx, ny = nu[:, 0], nu[:, 1]
    sigma_nn = (nx * nx * hess[:, 0] + 2 * nx * ny * hess[:, 1] + ny * ny * hess[:, 2]) / W
    nu_dot_a = nu[:, 2]
    # tangent is horizontal, so dN nu = -sigma(nu, nu) nu along the vertical
    return BoundaryTrace(grid, alpha, tangent, grad, hess, N, nu, nu_dot_a,
                         sigma_nn, -sigma_nn * nu_dot_a)


def conormal_identity_residual(trace: BoundaryTrace, frame: SurfaceFrame) -> float:
    """``max_j |<nu, a> - <N, alpha>/r|``.

    ``N`` on the right is extrapolated from the interior frame, so the two
    sides are computed along independent routes.
    """
    N_ext = extrapolate_to_boundary(frame.N)
    rhs = np.sum(N_ext * trace.alpha, axis=-1) / trace.grid.r
    return float(np.max(np.abs(trace.nu_dot_a - rhs)))
