"""Refinement study of every check on the exact cap.

Runs each registered check over the 32x64 -> 64x128 -> 128x256 ladder and
prints the residuals of the equality checks with the observed order between
rungs.  Rungs that are
already exact at rounding level have no defined order.
"""
from cmclab import CHECKS, CapSpec, run_convergence_study
from cmclab.identities import exact_family, standard_ladder

family = exact_family(CapSpec.small_cap(1.0, 2.0))
ladder = standard_ladder()
for name in CHECKS:
    study = run_convergence_study(name, family, ladder)
    if study.reports[0].kind != "equality":
        continue
    res = "  ".join(f"{r:.2e}" for r in study.residuals)
    orders = "  ".join("  -  " if o is None else f"{o:5.2f}" for o in study.orders)
    print(f"{name:28s} {res}   orders {orders}")
