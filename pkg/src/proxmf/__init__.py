"""proxmf: mean-field inference for binary energy models.

Approximates the distribution induced by a sparse multilinear energy
over binary variables with a fully factorized (product) distribution,
fitted by damped coordinate minimization of the divergence objective.
The damping keeps every update in closed form while making convergence
to a critical point provable; :mod:`proxmf.diagnostics` machine-checks
the ingredients of that proof on recorded runs.
"""

from .model import (
    ENUMERATION_LIMIT,
    EnergyBounds,
    EnergyModel,
    IterateBox,
    ModelError,
    energy,
    energy_bounds,
    energy_table,
    iterate_box,
)
from .objective import (
    ExactKL,
    MeanFieldState,
    bernoulli_kl,
    bernoulli_kl_grad,
    conditional_gap,
    exact_kl,
    gradient,
    hessian,
    mean_energy,
    objective,
)
from .solver import (
    BUDGET_EXHAUSTED,
    CONVERGED,
    IterationTrace,
    SolverConfig,
    TraceRecord,
    classic_solve,
    coordinate_update,
    solve,
    sweep,
)
from .diagnostics import (
    AnalysisConstants,
    CheckEntry,
    CheckReport,
    RateFitReport,
    TraceTooShortError,
    check_box_membership,
    check_gradient_bound,
    check_second_order,
    check_sufficient_decrease,
    compute_constants,
    fit_rate,
)
from .generate import ising_grid_model, random_poly_model, random_state

__version__ = "0.1.0"

__all__ = [
    "ENUMERATION_LIMIT",
    "AnalysisConstants",
    "BUDGET_EXHAUSTED",
    "CONVERGED",
    "CheckEntry",
    "CheckReport",
    "EnergyBounds",
    "EnergyModel",
    "ExactKL",
    "IterateBox",
    "IterationTrace",
    "MeanFieldState",
    "ModelError",
    "RateFitReport",
    "SolverConfig",
    "TraceRecord",
    "TraceTooShortError",
    "bernoulli_kl",
    "bernoulli_kl_grad",
    "check_box_membership",
    "check_gradient_bound",
    "check_second_order",
    "check_sufficient_decrease",
    "classic_solve",
    "compute_constants",
    "conditional_gap",
    "coordinate_update",
    "energy",
    "energy_bounds",
    "energy_table",
    "exact_kl",
    "fit_rate",
    "gradient",
    "hessian",
    "ising_grid_model",
    "iterate_box",
    "mean_energy",
    "objective",
    "random_poly_model",
    "random_state",
    "solve",
    "sweep",
]
