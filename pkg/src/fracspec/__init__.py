"""Spectral Galerkin solver for rescaled time-fractional problems.

The singular problem in physical time s is rescaled by s = t^(1/gamma)
(gamma = 1/r), solved with a boundary-adapted Jacobi basis in the new
variable, and mapped back.  Subpackages: orthogonal polynomials and rules
(orthopoly), fractional operators and oracles (frac_ops), the scalar solver
(ode_solver), the space-time subdiffusion solver (pde_solver), error and
convergence tooling (analysis), the benchmark catalog (problems) and the
command line (cli).
"""

from .errors import DomainError, NumericalFailureError, StudyError
from .frac_ops import (
    FracOrder,
    PowerSum,
    TransformSpec,
    caputo_power,
    psi_caputo_numeric,
    psi_integral_numeric,
    transform_inverse,
    transform_sample,
)
from .ode_solver import TimeProblem, TimeSolution, evaluate, solve
from .orthopoly import (
    JacobiIndex,
    QuadratureRule,
    TimeBasis,
    gauss_jacobi_rule,
    gjp_deriv,
    gjp_eval,
    jacobi_eval,
    legendre_phi,
)
from .pde_solver import (
    PDEProblem,
    SpatialBasis,
    SpaceTimeSolution,
    evaluate_spacetime,
    manufactured_sine_power,
    solve_spacetime,
    space_mass_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "NumericalFailureError",
    "StudyError",
    "FracOrder",
    "PowerSum",
    "TransformSpec",
    "caputo_power",
    "psi_caputo_numeric",
    "psi_integral_numeric",
    "transform_inverse",
    "transform_sample",
    "TimeProblem",
    "TimeSolution",
    "evaluate",
    "solve",
    "JacobiIndex",
    "QuadratureRule",
    "TimeBasis",
    "gauss_jacobi_rule",
    "gjp_deriv",
    "gjp_eval",
    "jacobi_eval",
    "legendre_phi",
    "PDEProblem",
    "SpatialBasis",
    "SpaceTimeSolution",
    "evaluate_spacetime",
    "manufactured_sine_power",
    "solve_spacetime",
    "space_mass_matrix",
    "__version__",
]
