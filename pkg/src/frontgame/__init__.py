"""Arrival times of anisotropic, forced mean-curvature fronts.

The front law V = -b(n) kappa + c(n) is solved in arrival-time form through a
deterministic two-person game: a marker takes diffusion steps of size
eps*sqrt(2) (signs chosen adversarially) plus a forcing drift of size eps^2,
and the transformed value u = 1 - exp(-U) is the unique fixed point of a
discounted min-max operator, found here by value iteration on a grid.
"""

from . import directions
from .anisotropy import (
    AnisotropyModel,
    F_eval,
    forcing_of,
    make_model,
    sigma_of,
    validate_assumptions,
    wulff_gauge,
)
from .game import (
    StrategyI,
    StrategyII,
    inner_minmax,
    psi,
    psi_inv,
    sign_set,
    step_delta,
    strategy_candidates,
)
from .grid import GridSpec, TargetSet, ValueField, interpolate, rasterize_target
from .rollout import Trajectory, concentric_rollout, epsilon_optimal_rollout, payoff
from .solver import (
    ArrivalField,
    ProblemConfig,
    SolveDiagnostics,
    apply_R,
    arrival_field,
    solve,
    sublevel_set,
)
from .verification import (
    consistency_error,
    contraction_test,
    monotonicity_test,
    radial_arrival_oracle,
    refinement_study,
    upper_bound_oracle,
    wulff_inclusion_test,
)

__version__ = "0.1.0"
