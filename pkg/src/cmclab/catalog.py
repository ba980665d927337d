"""Closed-form planar disks and spherical caps spanning a circle of radius r."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import GridError, HOutOfRange
from .grid import DiskGrid, HeightField


class Branch(enum.Enum):
    PLANE = "plane"
    SMALL_CAP = "small_cap"
    HEMISPHERE = "hemisphere"


@dataclass(frozen=True)
class CapSpec:
    """A totally umbilic graph bounded by the circle of radius ``r`` in ``z = 0``.

    ``R`` is the sphere radius (``inf`` for the plane).  Caps open downward and
    sit above the plane, so their mean curvature is ``-1/R`` for the upward
    normal.
    """

    r: float
    R: float
    branch: Branch

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("r must be positive")
        if self.branch is Branch.PLANE:
            object.__setattr__(self, "R", float("inf"))
        elif self.branch is Branch.HEMISPHERE and self.R != self.r:
            raise ValueError("hemisphere requires R == r")
        elif self.branch is Branch.SMALL_CAP and not self.R > self.r:
            raise ValueError("small cap requires R > r")

    @classmethod
    def plane(cls, r):
        return cls(r, float("inf"), Branch.PLANE)

    @classmethod
    def small_cap(cls, r, R):
        return cls(r, R, Branch.SMALL_CAP)

    @property
    def H(self):
        return 0.0 if self.branch is Branch.PLANE else -1.0 / self.R

    @property
    def is_graph_target(self):
        return self.branch is not Branch.HEMISPHERE


def cap_from_H(r, H):
    """Umbilic graph over the disk of radius ``r`` with mean curvature ``H``.

    Raises :class:`HOutOfRange` for ``H > 0`` (no cap above the plane) or
    ``H < -1/r``.  ``H = -1/r`` gives the hemisphere, which is catalogued but
    has unbounded slope on the boundary.
    """
    if not r > 0:
        raise ValueError("r must be positive")
    if H == 0:
        return CapSpec.plane(r)
    if H > 0 or H < -1.0 / r:
        raise HOutOfRange(H, 1.0 / r, f"no upward-normal graph cap with H = {H:.6g} over r = {r:.6g}")
    R = -1.0 / H
    if R <= r:
        return CapSpec(r, r, Branch.HEMISPHERE)
    return CapSpec.small_cap(r, R)


def cap_height(spec: CapSpec, rho):
    rho = np.asarray(rho, float)
    if spec.branch is Branch.PLANE:
        return np.zeros_like(rho)
    R, r = spec.R, spec.r
    return np.sqrt(R**2 - rho**2) - np.sqrt(R**2 - r**2)


def cap_height_field(spec: CapSpec, grid: DiskGrid) -> HeightField:
    if not np.isclose(grid.r, spec.r, rtol=1e-14, atol=0):
        raise GridError(f"grid radius {grid.r} does not match cap boundary radius {spec.r}")
    if not spec.is_graph_target:
        raise ValueError("hemisphere has unbounded boundary slope; not a height-field target")
    RHO, _ = grid.mesh
    return HeightField(grid, cap_height(spec, RHO))


@dataclass(frozen=True)
class CapValues:
    """Closed-form quantities of a plane or small cap (see :func:`cap_exact_values`)."""

    R: float
    H: float
    K: float
    sigma_sq: float
    nu_dot_a: float
    area: float
    projected_integral: float
    flux: float
    sigma_nn: float
    dNnu_dot_a: float
    green_integral: float
    center_height: float

    def vertical(self, rho):
        """``<N, a>`` at radius ``rho``."""
        rho = np.asarray(rho, float)
        if np.isinf(self.R):
            return np.ones_like(rho)
        return np.sqrt(self.R**2 - rho**2) / self.R


def cap_exact_values(spec: CapSpec) -> CapValues:
    r = spec.r
    if spec.branch is Branch.PLANE:
        return CapValues(
            R=float("inf"), H=0.0, K=0.0, sigma_sq=0.0, nu_dot_a=0.0,
            area=np.pi * r**2, projected_integral=np.pi * r**2, flux=0.0,
            sigma_nn=0.0, dNnu_dot_a=0.0, green_integral=0.0, center_height=0.0,
        )
    R = spec.R
    H = -1.0 / R
    nu_a = r / R
    sigma_nn = 2 * H + nu_a / r
    return CapValues(
        R=R,
        H=H,
        K=1.0 / R**2,
        sigma_sq=2.0 / R**2,
        nu_dot_a=nu_a,
        area=2 * np.pi * R * (R - np.sqrt(R**2 - r**2)),
        projected_integral=np.pi * r**2,
        flux=2 * np.pi * r**2 / R,
        sigma_nn=sigma_nn,
        dNnu_dot_a=-sigma_nn * nu_a,
        green_integral=2 * H**2 * np.pi * r**2,
        center_height=R - np.sqrt(R**2 - r**2),
    )
