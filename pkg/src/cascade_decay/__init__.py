"""Non-Markovian decay of a three-level cascade atom in structured reservoirs.

Two independent routes compute the upper-level population ``P2(t)``:

* :class:`IntegralEquationSolver` discretises the Fredholm equation for the
  one-photon amplitudes on a Bromwich contour and inverts the Laplace
  transform numerically.
* :class:`MasterEquationSolver` integrates the equivalent pseudomode
  Lindblad master equation.
"""
from .exceptions import (
    BudgetExceeded,
    ConfigError,
    ConstraintError,
    DomainError,
    SingularSystemError,
    SolverError,
    StepSizeError,
)
from .integral_solver import build_grid, solve_point
from .laplace_inversion import BromwichContour, invert, invert_samples
from .master_equation import (
    build_basis,
    build_high_q_model,
    build_pbg_model,
    integrate,
    lindblad_rhs,
)
from .quasimode import (
    QuasimodeNetwork,
    new_mode_transform,
    pbg_parameter_map,
    reservoir_from_network,
)
from .reservoir import AtomOffsets, LorentzianTerm, ReservoirSpec, eval_R
from .solvers import IntegralEquationSolver, MasterEquationSolver

__version__ = "0.1.0"

__all__ = [
    "AtomOffsets",
    "BromwichContour",
    "BudgetExceeded",
    "ConfigError",
    "ConstraintError",
    "DomainError",
    "IntegralEquationSolver",
    "LorentzianTerm",
    "MasterEquationSolver",
    "QuasimodeNetwork",
    "ReservoirSpec",
    "SingularSystemError",
    "SolverError",
    "StepSizeError",
    "build_basis",
    "build_grid",
    "build_high_q_model",
    "build_pbg_model",
    "eval_R",
    "integrate",
    "invert",
    "invert_samples",
    "lindblad_rhs",
    "new_mode_transform",
    "pbg_parameter_map",
    "reservoir_from_network",
    "solve_point",
]
