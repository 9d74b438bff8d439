"""Semi-Lagrangian fixed-point solver for the double-obstacle QVI.

One application of the discrete operator at node ``x`` is::

    transport(x) = f(x) (1 - exp(-lam dt)) / lam + exp(-lam dt) v(x + dt b(x))
    (T v)(x)     = min(H_inf v(x), max(H_sup v(x), transport(x)))

Obstacles read the previous iterate only (Jacobi sweep).  ``T`` is monotone
and sup-norm nonexpansive; on instances where neither obstacle binds it
contracts with factor ``exp(-lam dt)``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .grid import Grid, GridFunction, interpolation_matrix
from .operators import ImpulseStencils, Region
from .problem import GameProblem, estimate_sup_norms, value_bound

__all__ = [
    "SolverConfig",
    "SolveResult",
    "DiscreteOperator",
    "bellman_operator",
    "default_dt",
    "solve_fixed_point",
    "contraction_check",
    "monotonicity_check",
    "continuity_modulus",
]

logger = logging.getLogger(__name__)

INITIAL_GUESSES = ("upper_bound", "lower_bound", "zero", "file")


@dataclass
class SolverConfig:
    """Fixed-point iteration settings.

    ``stopping="error_bound"`` stops once ``q/(1-q) * change <= tol`` with
    ``q = exp(-lam dt)``, which bounds the distance to the fixed point by
    ``tol`` under contraction; ``stopping="change"`` stops at ``change <= tol``.
    Either way ``converged`` implies ``final_sup_change <= tol``.
    ``initial_guess="file"`` requires ``initial_values``.
    """

    dt: float | None = None
    tol: float = 1e-8
    max_iters: int = 100_000
    initial_guess: str = "upper_bound"
    initial_values: GridFunction | None = None
    stopping: str = "error_bound"

    def __post_init__(self):
        if self.dt is not None and not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if int(self.max_iters) < 1:
            raise ValueError("max_iters must be >= 1")
        if self.initial_guess not in INITIAL_GUESSES:
            raise ValueError(f"initial_guess must be one of {INITIAL_GUESSES}")
        if self.initial_guess == "file" and self.initial_values is None:
            raise ValueError("initial_guess='file' needs initial_values")
        if self.stopping not in ("error_bound", "change"):
            raise ValueError("stopping must be 'error_bound' or 'change'")


@dataclass
class SolveResult:
    value: GridFunction
    iterations: int
    final_sup_change: float
    converged: bool
    region: np.ndarray
    xi_action: np.ndarray
    eta_action: np.ndarray
    dt: float
    history: list = field(default_factory=list, repr=False)

    def summary_lines(self) -> list[str]:
        counts = {r.name: int(np.sum(self.region == r)) for r in Region}
        return [
            f"iterations={self.iterations}",
            f"final_sup_change={self.final_sup_change!r}",
            f"converged={'true' if self.converged else 'false'}",
            f"dt={self.dt!r}",
            *(f"region_{k.lower()}={v}" for k, v in counts.items()),
        ]


def default_dt(problem: GameProblem, grid: Grid, bound_b: float | None = None) -> float:
    """``min spacing / max(||b||, 1)``: the foot stays within one cell."""
    if bound_b is None:
        bound_b = float(np.max(np.linalg.norm(problem.drift(grid.nodes()), axis=1)))
    return float(np.min(grid.spacing)) / max(bound_b, 1.0)


class DiscreteOperator:
    """The operator ``T`` with its interpolation stencils precomputed."""

    def __init__(self, problem: GameProblem, grid: Grid, dt: float):
        if not dt > 0:
            raise ValueError("dt must be positive")
        self.problem = problem
        self.grid = grid
        self.dt = float(dt)
        self.impulses = ImpulseStencils(problem, grid)
        x = self.impulses.nodes
        lam = problem.discount
        self.decay = math.exp(-lam * self.dt)
        self.stage_gain = problem.gain(x) * (-math.expm1(-lam * self.dt)) / lam
        self.transport_matrix = interpolation_matrix(grid, x + self.dt * problem.drift(x))

    def transport(self, v: np.ndarray) -> np.ndarray:
        return self.stage_gain + self.decay * (self.transport_matrix @ v)

    def apply(self, v: np.ndarray, obstacles: bool = True):
        """One sweep on a flat value vector.

        Returns ``(new, region, xi_index, eta_index)``.  With
        ``obstacles=False`` only the transport branch is applied.
        """
        tr = self.transport(v)
        if not obstacles:
            n = len(v)
            return tr, np.zeros(n, dtype=np.int8), np.zeros(n, dtype=np.int64), np.zeros(n, dtype=np.int64)
        hinf, kinf = self.impulses.h_inf(v)
        hsup, ksup = self.impulses.h_sup(v)
        new = np.minimum(hinf, np.maximum(hsup, tr))
        # tie order: CONTINUE, then XI, then ETA
        region = np.where(new == tr, Region.CONTINUE,
                          np.where(new == hsup, Region.XI_IMPULSE, Region.ETA_IMPULSE)).astype(np.int8)
        return new, region, ksup, kinf

    def __call__(self, gf: GridFunction, obstacles: bool = True) -> GridFunction:
        return GridFunction(self.grid, self.apply(gf.flat, obstacles)[0])


def bellman_operator(problem: GameProblem, gf: GridFunction, dt: float) -> GridFunction:
    """Apply ``T`` once to ``gf``."""
    return DiscreteOperator(problem, gf.grid, dt)(gf)


def _initial(problem: GameProblem, grid: Grid, config: SolverConfig, bound_f: float) -> np.ndarray:
    guess = config.initial_guess
    if guess == "file":
        init = config.initial_values
        if init.grid.shape != grid.shape or not (
            np.allclose(init.grid.lower, grid.lower) and np.allclose(init.grid.upper, grid.upper)
        ):
            raise ValueError("initial values live on a different grid")
        return init.flat.copy()
    B = bound_f / problem.discount
    level = {"upper_bound": B, "lower_bound": -B, "zero": 0.0}[guess]
    return np.full(grid.size, level)


def solve_fixed_point(problem: GameProblem, grid: Grid, config: SolverConfig | None = None,
                      bound_f: float | None = None) -> SolveResult:
    """Iterate ``T`` from the configured guess until the stopping rule holds.

    The region labels and actions come from the last operator application.
    Non-convergence is reported through ``converged=False`` and a warning.
    """
    config = config if config is not None else SolverConfig()
    if bound_f is None:
        bound_f = estimate_sup_norms(problem, grid.box)[1]
    dt = config.dt if config.dt is not None else default_dt(problem, grid)
    op = DiscreteOperator(problem, grid, dt)
    q = op.decay
    threshold = config.tol if config.stopping == "change" else config.tol * (1.0 - q) / q
    threshold = min(threshold, config.tol)

    v = _initial(problem, grid, config, bound_f)
    history = []
    converged = False
    change = math.inf
    it = 0
    region = ksup = kinf = None
    for it in range(1, int(config.max_iters) + 1):
        new, region, ksup, kinf = op.apply(v)
        change = float(np.max(np.abs(new - v)))
        history.append(change)
        v = new
        if change <= threshold:
            converged = True
            break
    if not converged:
        logger.warning("fixed point not reached: %d iterations, last sup change %.3e", it, change)

    n = grid.dimension
    xi_act = np.full((grid.size, n), np.nan)
    eta_act = np.full((grid.size, n), np.nan)
    xi_mask = region == Region.XI_IMPULSE
    eta_mask = region == Region.ETA_IMPULSE
    xi_act[xi_mask] = problem.max_actions[ksup[xi_mask]]
    eta_act[eta_mask] = problem.min_actions[kinf[eta_mask]]
    return SolveResult(
        value=GridFunction(grid, v), iterations=it, final_sup_change=change, converged=converged,
        region=region, xi_action=xi_act, eta_action=eta_act, dt=dt, history=history,
    )


def contraction_check(problem: GameProblem, grid: Grid, dt: float, trials: int = 50,
                      seed: int = 0, amplitude: float | None = None,
                      obstacles: bool = True) -> float:
    """Largest observed ``||T g1 - T g2|| / ||g1 - g2||`` over random pairs.

    Pairs are drawn uniformly in ``[-amplitude, amplitude]`` (default: the
    value bound).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    op = DiscreteOperator(problem, grid, dt)
    if amplitude is None:
        amplitude = value_bound(problem, grid.box) or 1.0
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        g1 = rng.uniform(-amplitude, amplitude, grid.size)
        g2 = rng.uniform(-amplitude, amplitude, grid.size)
        denom = np.max(np.abs(g1 - g2))
        if denom == 0:
            continue
        num = np.max(np.abs(op.apply(g1, obstacles)[0] - op.apply(g2, obstacles)[0]))
        worst = max(worst, float(num / denom))
    return worst


def monotonicity_check(problem: GameProblem, grid: Grid, dt: float, trials: int = 50,
                       seed: int = 0, amplitude: float = 1.0) -> bool:
    """True iff ``g1 <= g2`` implied ``T g1 <= T g2`` on every sampled pair."""
    op = DiscreteOperator(problem, grid, dt)
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        g1 = rng.uniform(-amplitude, amplitude, grid.size)
        g2 = g1 + rng.uniform(0.0, amplitude, grid.size)
        if np.any(op.apply(g1)[0] > op.apply(g2)[0]):
            return False
    return True


def continuity_modulus(problem: GameProblem, value: GridFunction, interior: np.ndarray,
                       lipschitz_b: float, lipschitz_f: float, bound: float,
                       horizons=None) -> tuple[float, float]:
    """Largest adjacent-node increment of ``value`` and the continuity bound.

    The bound for a step ``d`` is the minimum over horizons ``T`` of
    ``C_f d |exp((C_b - lam) T) - 1| / |C_b - lam| + 2 bound exp(-lam T)``
    (``C_f d T`` in place of the first term when ``C_b == lam``).  Only node
    pairs with both ends in ``interior`` are compared.  Returns
    ``(observed, allowed)`` for the worst pair ratio.
    """
    grid = value.grid
    lam = problem.discount
    if horizons is None:
        horizons = np.concatenate([[0.0], np.geomspace(1e-3, 200.0, 400)])
    horizons = np.asarray(horizons, dtype=float)
    mask = np.asarray(interior).reshape(grid.shape)
    v = value.values
    worst_obs, worst_allowed, worst_ratio = 0.0, np.inf, -np.inf
    for axis, h in enumerate(grid.spacing):
        sl_a = [slice(None)] * grid.dimension
        sl_b = [slice(None)] * grid.dimension
        sl_a[axis] = slice(1, None)
        sl_b[axis] = slice(None, -1)
        both = mask[tuple(sl_a)] & mask[tuple(sl_b)]
        if not np.any(both):
            continue
        diff = float(np.max(np.abs(v[tuple(sl_a)] - v[tuple(sl_b)])[both]))
        rate = lipschitz_b - lam
        if abs(rate) < 1e-12:
            first = lipschitz_f * h * horizons
        else:
            first = lipschitz_f * h * np.abs(np.expm1(rate * horizons)) / abs(rate)
        allowed = float(np.min(first + 2.0 * bound * np.exp(-lam * horizons)))
        ratio = diff - allowed
        if ratio > worst_ratio:
            worst_obs, worst_allowed, worst_ratio = diff, allowed, ratio
    return worst_obs, worst_allowed
