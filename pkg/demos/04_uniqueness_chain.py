"""The chain of integral identities that forces umbilicity.

On a CMC graph with planar circular boundary, 2 pi r^2 H^2, the surface
integral of |sigma|^2 <N, a> and the boundary integral of <dN nu, a> coincide.
Combined with |sigma|^2 >= 2H^2 this leaves no room for a non-umbilic point,
so the integrated deficit must vanish.  A non-CMC control field breaks it.
"""
from cmclab import DiskGrid, run_check, solve_dirichlet
from cmclab.identities import control_field

grid = DiskGrid(1.0, 128, 256)
for H in (-0.25, -0.5, -0.75):
    field = solve_dirichlet(1.0, H, grid=grid).field
    chain = run_check("check_chain", field, H)
    umb = run_check("check_umbilicity", field, H)
    d = chain.details
    print(f"H = {H:5.2f}: {d['chain_value']:.6f} {d['surface_integral']:.6f} "
          f"{d['boundary_integral']:.6f}  spread {chain.relative_residual:.1e}  "
          f"deficit {umb.lhs:.1e}")

ctrl = control_field(grid)
print("control field: Jacobi residual", f"{run_check('check_jacobi', ctrl).residual:.3g},",
      "umbilicity deficit", f"{run_check('check_umbilicity', ctrl).residual:.3g}")
