"""Pointwise geometry of a graph ``z = f(x, y)`` sampled on a DiskGrid.

Sign convention: the normal points up, ``N = (-f_x, -f_y, 1) / W``.  With it a
dome over the plane has negative mean curvature.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteError
from .grid import DiskGrid, HeightField, fd_weights
from .stencils import extrapolate_to_boundary, face_operators

VERTICAL = np.array([0.0, 0.0, 1.0])

UMBILIC_FLOOR = -1e-10


def _require_finite(*arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise NonFiniteError("non-finite values in input")


def theta_derivative(a, order=1):
    """Spectral derivative along the last (periodic, angular) axis."""
    a = np.asarray(a, float)
    m = a.shape[-1]
    k = np.fft.rfftfreq(m, d=1.0 / m)
    ik = 1j * k
    if order % 2 == 1:
        ik[-1] = 0.0  # Nyquist mode has no odd derivative on the grid
    return np.fft.irfft(np.fft.rfft(a, axis=-1) * ik**order, n=m, axis=-1)


def _radial_derivatives(values, boundary, grid):
    n, _ = grid.shape
    h = grid.h_rho
    ghost = np.roll(values[0], -grid.half_turn)
    ext = np.vstack([ghost, values, boundary])  # signed radii -h/2, h/2, ..., r
    f_r = np.empty_like(values)
    f_rr = np.empty_like(values)
    f_r[:-1] = (ext[2:-1] - ext[:-3]) / (2 * h)
    f_rr[:-1] = (ext[2:-1] - 2 * ext[1:-2] + ext[:-3]) / h**2
    pts = [-2 * h, -h, 0.0, 0.5 * h]
    stencil = np.vstack([values[n - 3], values[n - 2], values[n - 1], boundary])
    f_r[-1] = fd_weights(pts, 0.0, 1) @ stencil
    f_rr[-1] = fd_weights(pts, 0.0, 2) @ stencil
    return f_r, f_rr


def polar_derivatives(field: HeightField):
    """``(f_r, f_t, f_rr, f_rt, f_tt)`` at every node."""
    grid = field.grid
    f = field.values
    _require_finite(f, field.boundary)
    f_r, f_rr = _radial_derivatives(f, field.boundary, grid)
    f_t = theta_derivative(f)
    f_tt = theta_derivative(f, 2)
    f_rt = theta_derivative(f_r)
    return f_r, f_t, f_rr, f_rt, f_tt


def polar_to_cartesian(rho, theta, f_r, f_t, f_rr=None, f_rt=None, f_tt=None):
    c, s = np.cos(theta), np.sin(theta)
    fx = c * f_r - s / rho * f_t
    fy = s * f_r + c / rho * f_t
    grad = np.stack([fx, fy], axis=-1)
    if f_rr is None:
        return grad
    sc, c2, s2 = s * c, c * c, s * s
    fxx = c2 * f_rr - 2 * sc / rho * f_rt + s2 / rho**2 * f_tt + s2 / rho * f_r + 2 * sc / rho**2 * f_t
    fyy = s2 * f_rr + 2 * sc / rho * f_rt + c2 / rho**2 * f_tt + c2 / rho * f_r - 2 * sc / rho**2 * f_t
    fxy = (sc * f_rr + (c2 - s2) / rho * f_rt - sc / rho**2 * f_tt - sc / rho * f_r
           - (c2 - s2) / rho**2 * f_t)
    return grad, np.stack([fxx, fxy, fyy], axis=-1)


def gradient_hessian(field: HeightField):
    """Cartesian gradient and Hessian of the height field at every node.

    Radial derivatives use central differences (through the origin on the
    innermost ring) and a four-point one-sided stencil that includes the
    Dirichlet ring on the outermost ring; angular derivatives are spectral.

    Returns
    -------
    grad : ndarray, shape (n_rho, n_theta, 2)
        ``(f_x, f_y)``.
    hess : ndarray, shape (n_rho, n_theta, 3)
        ``(f_xx, f_xy, f_yy)``.
    """
    RHO, THETA = field.grid.mesh
    return polar_to_cartesian(RHO, THETA, *polar_derivatives(field))


def _wfactor(grad):
    grad = np.asarray(grad, float)
    return np.sqrt(1.0 + grad[..., 0] ** 2 + grad[..., 1] ** 2)


def unit_normal(grad):
    """Upward unit normal ``(-f_x, -f_y, 1) / W`` for gradients of shape ``(..., 2)``."""
    grad = np.asarray(grad, float)
    W = _wfactor(grad)
    return np.stack([-grad[..., 0], -grad[..., 1], np.ones_like(W)], axis=-1) / W[..., None]


def mean_curvature(grad, hess):
    grad, hess = np.asarray(grad, float), np.asarray(hess, float)
    fx, fy = grad[..., 0], grad[..., 1]
    fxx, fxy, fyy = hess[..., 0], hess[..., 1], hess[..., 2]
    W = _wfactor(grad)
    return ((1 + fy**2) * fxx - 2 * fx * fy * fxy + (1 + fx**2) * fyy) / (2 * W**3)


def gauss_and_sigma(grad, hess, H):
    """Gauss curvature and ``|sigma|^2 = 4H^2 - 2K``."""
    grad, hess = np.asarray(grad, float), np.asarray(hess, float)
    W = _wfactor(grad)
    K = (hess[..., 0] * hess[..., 2] - hess[..., 1] ** 2) / W**4
    return K, 4 * np.asarray(H) ** 2 - 2 * K


@dataclass(frozen=True, eq=False)
class SurfaceFrame:
    """First- and second-order geometry at every node of a height field."""

    field: HeightField
    grad: np.ndarray
    hess: np.ndarray
    W: np.ndarray
    N: np.ndarray
    H: np.ndarray
    K: np.ndarray
    sigma_sq: np.ndarray
    vertical: np.ndarray

    @property
    def grid(self) -> DiskGrid:
        return self.field.grid


def build_frame(field: HeightField) -> SurfaceFrame:
    grad, hess = gradient_hessian(field)
    W = _wfactor(grad)
    N = unit_normal(grad)
    H = mean_curvature(grad, hess)
    K, sigma_sq = gauss_and_sigma(grad, hess, H)
    _require_finite(H, K)
    return SurfaceFrame(field, grad, hess, W, N, H, K, sigma_sq, 1.0 / W)


def laplace_beltrami(u, frame: SurfaceFrame, u_boundary=None):
    """Laplace-Beltrami operator of the graph metric applied to nodal data ``u``.

    Assembled in divergence form: the flux ``W g^{-1} grad u`` is evaluated on
    every cell face and its net outflow is divided by ``W`` times the cell area.
    Values of ``u`` on the boundary ring are taken from ``u_boundary`` or, if
    omitted, extrapolated quadratically from the outermost rings.
    """
    grid = frame.grid
    u = np.asarray(u, float)
    if u.shape != grid.shape:
        raise ValueError(f"u has shape {u.shape}, grid expects {grid.shape}")
    _require_finite(u)
    ub = extrapolate_to_boundary(u) if u_boundary is None else np.asarray(u_boundary, float)
    ops = face_operators(grid)
    du = ops.gradient(u, ub)
    df = ops.gradient(frame.field.values, frame.field.boundary)
    W = np.sqrt(1.0 + df.normal**2 + df.tangential**2)
    dot = df.normal * du.normal + df.tangential * du.tangential
    flux = W * du.normal - dot * df.normal / W
    return (ops.divergence @ flux).reshape(grid.shape) / frame.W


def umbilicity_deficit(frame: SurfaceFrame):
    """Pointwise ``|sigma|^2 - 2H^2`` and its integral against ``<N, a> dS``.

    Values in ``[UMBILIC_FLOOR, 0)`` are rounding noise and are clamped to 0.
    """
    from .quadrature import surface_integral

    d = frame.sigma_sq - 2 * frame.H**2
    if np.any(d < UMBILIC_FLOOR * np.maximum(1.0, frame.sigma_sq)):
        raise ValueError("umbilicity deficit is negative beyond rounding")
    d = np.maximum(d, 0.0)
    return d, surface_integral(d * frame.vertical, frame)
