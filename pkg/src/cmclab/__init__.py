"""Constant-mean-curvature graphs over a round disk: solver, discrete geometry,
closed-form caps and numerical checks of the integral identities that force
such graphs to be planar disks or small spherical caps."""

__version__ = "0.1.0"

from .catalog import Branch, CapSpec, CapValues, cap_exact_values, cap_from_H, cap_height_field
from .errors import (
    CMCLabError, ConfigError, FieldFormatError, GridError, HOutOfRange, NonConvergence,
    NonFiniteError,
)
from .fieldio import load_field, save_field
from .grid import DiskGrid, HeightField
from .identities import (
    CHECKS, ConvergenceStudy, IdentityReport, run_check, run_convergence_study,
)
from .quadrature import (
    BoundaryTrace, boundary_integral, boundary_trace, conormal_identity_residual,
    surface_integral,
)
from .solver import (
    SolveResult, SolverConfig, cmc_residual, error_vs_exact, jacobian_apply, solve_dirichlet,
)
from .surface import (
    SurfaceFrame, build_frame, gauss_and_sigma, gradient_hessian, laplace_beltrami,
    mean_curvature, umbilicity_deficit, unit_normal,
)
