"""Solving the CMC Dirichlet problem by continuation and Newton's method.

The solver starts from the flat disk and walks H down to the target in ten
uniform steps.  The only umbilic graph over the circle with that H is the
small cap, so the solve is compared with it on two grids to read off the order.
"""
import math

from cmclab import DiskGrid, cap_from_H, error_vs_exact, solve_dirichlet

H = -0.5
spec = cap_from_H(1.0, H)
errors = []
for n in (32, 64, 128):
    result = solve_dirichlet(1.0, H, grid=DiskGrid(1.0, n, 2 * n))
    linf, l2 = error_vs_exact(result, spec)
    errors.append(linf)
    print(f"{result.grid.label():>8}  Newton iterations {result.newton_iterations:3d}"
          f"  final residual {result.final_residual:.1e}  Linf {linf:.2e}  L2 {l2:.2e}")

for a, b in zip(errors, errors[1:]):
    print(f"observed order {math.log2(a / b):.2f}")
print(f"centre height {result.field.values[0, 0]:.8f} vs 2 - sqrt(3) = {2 - math.sqrt(3):.8f}")
