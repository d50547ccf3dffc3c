"""Two-layer mean-field team competitions: intra-team effort, team-size regimes, Monte Carlo checks."""

from .model import (
    BOUNDARY_ATOL,
    DomainError,
    ModelParams,
    PowerProfile,
    best_response_effort,
    cumulative_intensity,
    effective_cost_harmonic,
    invert_cumulative,
    member_value,
    reward,
    rho_closed_form,
    symmetric_intensity,
    symmetric_value,
    zero_lambda_value,
)
from .simulator import SimulationConfig, deviation_payoff_scan, empirical_rho_check, run_simulation
from .solvers import (
    central_planner_optimum,
    expected_rank_reward,
    manager_equilibrium,
    manager_objective,
    partnership_beta_monotonicity,
    partnership_equilibrium,
    partnership_H,
    planner_objective,
    verify_manager_global_max,
    verify_partnership_global_max,
    verify_planner_global_max,
)

__version__ = "0.1.0"
