"""Two-player zero-sum deterministic impulse games on a grid.

Solves the double-obstacle quasi-variational inequality by a semi-Lagrangian
fixed-point iteration, evaluates residuals of the obstacle and gradient forms
of the inequality, and checks results against a brute-force discrete game.
"""

from .grid import Grid, GridFunction, gradient_fd, interpolate
from .operators import (
    Region,
    f_inf_c,
    h_inf_chi,
    h_sup_c,
    residual_classic,
    residual_new,
    residual_report,
    strict_supersolution_transform,
)
from .oracle import (
    DiscreteGameSpec,
    backward_induction,
    backward_induction_lower,
    backward_induction_upper,
    dpp_check,
    value_gap,
)
from .payoff import evaluate_payoff, truncation_horizon
from .problem import (
    Box,
    ClippedLinearGain,
    ConstantDrift,
    ConstantGain,
    FixedPlusProportionalCost,
    GameProblem,
    PeakGain,
    ProportionalCost,
    SaturatedAffineDrift,
    ZeroDrift,
    validate,
    validate_h1,
    validate_h2,
    value_bound,
)
from .solver import SolverConfig, bellman_operator, contraction_check, solve_fixed_point
from .trajectory import ImpulseControl, gronwall_check, integrate_drift, simulate

__version__ = "0.1.0"
