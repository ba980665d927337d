"""Staggered polar grid over the disk and height fields sampled on it.

Nodes sit at half-integer radii, ``rho_i = (i + 1/2) h_rho``, so the origin is
never sampled.  The radial neighbour of the innermost ring is the node on the
opposite side of the origin, ``(0, j + n_theta/2)``, which makes every interior
stencil uniform in the signed radius.  The Dirichlet ring sits at ``rho = r``,
half a cell outside the outermost node ring.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import GridError, NonFiniteError


def fd_weights(nodes, x0, order):
    """Finite-difference weights for the ``order``-th derivative at ``x0``.

    Solves the (small) moment system on the given abscissae; exact for
    polynomials of degree ``len(nodes) - 1``.
    """
    nodes = np.asarray(nodes, dtype=float) - x0
    n = len(nodes)
    if order >= n:
        raise ValueError("need more nodes than the derivative order")
    V = np.vander(nodes, n, increasing=True).T
    rhs = np.zeros(n)
    rhs[order] = float(np.prod(np.arange(1, order + 1)))
    return np.linalg.solve(V, rhs)


@dataclass(frozen=True)
class DiskGrid:
    """Polar discretization of the disk of radius ``r``.

    Parameters
    ----------
    r : float
        Radius of the boundary circle.
    n_rho : int
        Number of node rings (>= 4).
    n_theta : int
        Number of nodes per ring; even and >= 8.
    """

    r: float
    n_rho: int
    n_theta: int

    def __post_init__(self):
        if not np.isfinite(self.r) or self.r <= 0:
            raise GridError(f"radius must be positive and finite, got {self.r!r}")
        if int(self.n_rho) != self.n_rho or self.n_rho < 4:
            raise GridError(f"n_rho must be an integer >= 4, got {self.n_rho!r}")
        if int(self.n_theta) != self.n_theta or self.n_theta < 8 or self.n_theta % 2:
            raise GridError(f"n_theta must be an even integer >= 8, got {self.n_theta!r}")
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "n_rho", int(self.n_rho))
        object.__setattr__(self, "n_theta", int(self.n_theta))

    @property
    def shape(self):
        return (self.n_rho, self.n_theta)

    @property
    def h_rho(self):
        return self.r / self.n_rho

    @property
    def h_theta(self):
        return 2.0 * np.pi / self.n_theta

    @cached_property
    def rho(self):
        return (np.arange(self.n_rho) + 0.5) * self.h_rho

    @cached_property
    def theta(self):
        return np.arange(self.n_theta) * self.h_theta

    @cached_property
    def mesh(self):
        """``(RHO, THETA)`` node coordinates, each of shape ``(n_rho, n_theta)``."""
        return np.meshgrid(self.rho, self.theta, indexing="ij")

    @cached_property
    def xy(self):
        RHO, THETA = self.mesh
        return RHO * np.cos(THETA), RHO * np.sin(THETA)

    @cached_property
    def boundary_xy(self):
        return self.r * np.cos(self.theta), self.r * np.sin(self.theta)

    @cached_property
    def cell_area(self):
        """Flat area of each polar cell, ``rho_i h_rho h_theta``."""
        return np.broadcast_to(
            (self.rho * self.h_rho * self.h_theta)[:, None], self.shape
        ).copy()

    @property
    def half_turn(self):
        return self.n_theta // 2

    def refined(self):
        return DiskGrid(self.r, 2 * self.n_rho, 2 * self.n_theta)

    def label(self):
        return f"{self.n_rho}x{self.n_theta}"

    def sample(self, func):
        """Evaluate ``func(x, y)`` at the nodes and on the boundary ring."""
        x, y = self.xy
        bx, by = self.boundary_xy
        return HeightField(self, np.asarray(func(x, y), float) * np.ones(self.shape),
                           np.asarray(func(bx, by), float) * np.ones(self.n_theta))


@dataclass(frozen=True, eq=False)
class HeightField:
    """Samples of ``z = f(x, y)`` at the nodes plus Dirichlet data on the ring.

    ``values`` has shape ``grid.shape``; ``boundary`` has shape ``(n_theta,)``
    and defaults to zero.
    """

    grid: DiskGrid
    values: np.ndarray
    boundary: np.ndarray = field(default=None)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != self.grid.shape:
            raise GridError(f"values have shape {values.shape}, grid expects {self.grid.shape}")
        if self.boundary is None:
            boundary = np.zeros(self.grid.n_theta)
        else:
            boundary = np.array(self.boundary, dtype=float)
        if boundary.shape != (self.grid.n_theta,):
            raise GridError(
                f"boundary has shape {boundary.shape}, grid expects ({self.grid.n_theta},)"
            )
        if not (np.all(np.isfinite(values)) and np.all(np.isfinite(boundary))):
            raise NonFiniteError("height field contains non-finite values")
        values.setflags(write=False)
        boundary.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "boundary", boundary)

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(grid.shape))

    @property
    def has_flat_boundary(self):
        return not np.any(self.boundary)

    def with_values(self, values):
        return HeightField(self.grid, values, self.boundary)
