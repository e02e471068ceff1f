"""Ground states of Kirchhoff equations via their local limit problems."""
from .coefficient import Affine, Constant, CustomCoeff, eval_M, validate_M
from .exceptions import KirchhoffError
from .functionals import energy_report, pohozaev_residual, sobolev_best_constant
from .groundstate import GroundState, LocalProblem, ShootingOptions, fd_ground_state, find_ground_state
from .moser2d import criticality_scan, moser_profile
from .nonlinearity import (CriticalExponential, CriticalSobolev, CustomNonlinearity, NonlinearitySpec,
                           validate_growth)
from .radial import RadialProfile, radial_grid, uniform_grid
from .rescaling import lift, project, solve_t_u
from .semiclassical import continuation_sweep, limit_state, rational_well, solve_eps

__version__ = "0.1.0"

__all__ = [
    "Affine", "Constant", "CustomCoeff", "eval_M", "validate_M", "KirchhoffError",
    "energy_report", "pohozaev_residual", "sobolev_best_constant",
    "GroundState", "LocalProblem", "ShootingOptions", "fd_ground_state", "find_ground_state",
    "criticality_scan", "moser_profile",
    "CriticalExponential", "CriticalSobolev", "CustomNonlinearity", "NonlinearitySpec", "validate_growth",
    "RadialProfile", "radial_grid", "uniform_grid", "lift", "project", "solve_t_u",
    "continuation_sweep", "limit_state", "rational_well", "solve_eps",
]
