"""RBF differential quadrature for space-fractional diffusion with Caputo directional derivatives."""
from .bench import get_case, solve_case
from .dqweights import (
    ConditioningWarning,
    SingularSystemError,
    WeightMatrix,
    apply,
    dq_weights,
    reconstruction_residual,
)
from .estimators import FractionalDiffusionSolver, FractionalDQ
from .fracderiv import frac_deriv_vector, frac_dir_deriv
from .geometry import Circle, Direction, Interval, Polygon, boundary_distance, classify
from .nodes import NodeSet, chebyshev_1d, grid_2d, load_nodes, save_nodes, scattered_2d
from .quadrature import gauss_jacobi
from .rbf import RBF, Kernel, dir2, evaluate
from .stepper import FractionalTerm, ProblemSpec, TimeGrid, advance

__version__ = "0.1.0"

__all__ = [
    "RBF",
    "Circle",
    "ConditioningWarning",
    "Direction",
    "FractionalDQ",
    "FractionalDiffusionSolver",
    "FractionalTerm",
    "Interval",
    "Kernel",
    "NodeSet",
    "Polygon",
    "ProblemSpec",
    "SingularSystemError",
    "TimeGrid",
    "WeightMatrix",
    "advance",
    "apply",
    "boundary_distance",
    "chebyshev_1d",
    "classify",
    "dir2",
    "dq_weights",
    "evaluate",
    "frac_deriv_vector",
    "frac_dir_deriv",
    "gauss_jacobi",
    "get_case",
    "grid_2d",
    "load_nodes",
    "reconstruction_residual",
    "save_nodes",
    "scattered_2d",
    "solve_case",
]
