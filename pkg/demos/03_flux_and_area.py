"""The balancing (flux) formula and the projected-area identity.

For a CMC graph spanning the circle of radius r in z = 0, the boundary integral
of <nu, a> equals -2 pi r^2 H, and the integral of <N, a> over the surface is
the area of the flat disk.  Both are checked on solves across the H window.
"""
import math

from cmclab import DiskGrid, boundary_integral, boundary_trace, build_frame, solve_dirichlet, surface_integral

grid = DiskGrid(1.0, 64, 128)
print("      H   flux integral   -2 pi H     projected area")
for H in (-0.1, -0.3, -0.5, -0.7, -0.9):
    field = solve_dirichlet(1.0, H, grid=grid).field
    frame = build_frame(field)
    flux = boundary_integral(boundary_trace(field, frame).nu_dot_a, grid)
    area = surface_integral(frame.vertical, frame)
    print(f"{H:7.2f}   {flux:13.8f}   {-2 * math.pi * H:9.6f}   {area:.12f}")
