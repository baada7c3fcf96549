"""Nodal discontinuous-Galerkin solver for the compressible Euler equations
with static gravity: well-balanced, entropy stable, positivity preserving."""

from .backend import available_backends, backend_name, get_kernels
from .basis import GLBasis, gauss_lobatto, make_basis
from .equilibrium import (Equilibrium, EquilibriumData, GravityPotential,
                          build_equilibrium_data, inertia_gravity_background,
                          isentropic_equilibrium, isothermal_equilibrium,
                          linear_potential, quadratic_radial_potential,
                          radial_potential, vertical_potential)
from .grid import Grid1D, Grid2D
from .harness import (CASES, CaseSpec, RunResult, convergence_table,
                      error_norms, get_case, perturbation_fields,
                      reference_solution, run_case)
from .limiter import LimiterParams, limit_field
from .physics import AdmissibilityError, GasModel
from .solver import (BoundaryCondition, BoundarySpec1D, BoundarySpec2D,
                     Discretization, SchemeVariant, total_entropy)
from .timestep import (StepControl, compute_dt, step_forward_euler,
                       step_ssprk104)

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityError", "BoundaryCondition", "BoundarySpec1D",
    "BoundarySpec2D", "CASES", "CaseSpec", "Discretization", "Equilibrium",
    "EquilibriumData", "GLBasis", "GasModel", "GravityPotential", "Grid1D",
    "Grid2D", "LimiterParams", "RunResult", "SchemeVariant", "StepControl",
    "available_backends", "backend_name", "build_equilibrium_data",
    "compute_dt", "convergence_table", "error_norms", "gauss_lobatto",
    "get_case", "get_kernels", "inertia_gravity_background",
    "isentropic_equilibrium", "isothermal_equilibrium", "limit_field",
    "linear_potential", "make_basis", "perturbation_fields",
    "quadratic_radial_potential", "radial_potential", "reference_solution",
    "run_case", "step_forward_euler", "step_ssprk104", "total_entropy",
    "vertical_potential", "__version__",
]
