"""Brute-force discrete-time game values and a dynamic-programming check.

Each stage of length ``dt`` offers player-xi the menu ``U + {none}`` and
player-eta the menu ``V + {none}``.  If eta acts, xi's action is ignored and
eta's cost is added; otherwise xi's jump (if any) is applied and its cost
subtracted.  The state then drifts for ``dt``.  The lower value lets eta
react to xi's announced stage action (``sup_xi inf_eta``), the upper value
lets xi react (``inf_eta sup_xi``).  Tables are enumerated in full; no
algebraic shortcut is taken.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import Grid, GridFunction, interpolation_matrix
from .payoff import truncation_horizon
from .problem import GameProblem, estimate_sup_norms

__all__ = [
    "DiscreteGameSpec",
    "stage_table",
    "backward_induction_lower",
    "backward_induction_upper",
    "backward_induction",
    "DppReport",
    "dpp_check",
    "value_gap",
    "tail_bound",
]


@dataclass(frozen=True)
class DiscreteGameSpec:
    problem: GameProblem
    grid: Grid
    dt: float
    steps: int

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if int(self.steps) < 1:
            raise ValueError("steps must be >= 1")
        if self.grid.dimension != self.problem.dimension:
            raise ValueError("grid and problem dimensions differ")
        object.__setattr__(self, "steps", int(self.steps))

    @property
    def horizon(self) -> float:
        return self.steps * self.dt

    @classmethod
    def for_tail(cls, problem: GameProblem, grid: Grid, dt: float, epsilon: float) -> "DiscreteGameSpec":
        """Smallest step count whose horizon meets the tail target ``epsilon``."""
        T = truncation_horizon(problem, epsilon, domain=grid.box)
        return cls(problem, grid, dt, max(1, math.ceil(T / dt - 1e-9)))


class _StageMaps:
    """Post-impulse states and interpolation operators for every menu entry.

    Entry 0 is "no impulse"; entries ``1..|U|`` are xi jumps and
    ``1..|V|`` eta jumps in their own menus.
    """

    def __init__(self, problem: GameProblem, grid: Grid, dt: float, drift_after_impulse: bool):
        x = grid.nodes()
        lam = problem.discount
        self.decay = math.exp(-lam * dt)
        weight = -math.expm1(-lam * dt) / lam

        def drifted(y):
            return weight * problem.gain(y), interpolation_matrix(grid, y + dt * problem.drift(y))

        self.none_gain, self.none_mat = drifted(x)
        self.xi = []
        for a, c in zip(problem.max_actions, problem.max_costs):
            if drift_after_impulse:
                g, M = drifted(x + a)
                self.xi.append((-c + g, self.decay, M))
            else:
                self.xi.append((np.full(len(x), -c), 1.0, interpolation_matrix(grid, x + a)))
        self.eta = []
        for a, c in zip(problem.min_actions, problem.min_costs):
            if drift_after_impulse:
                g, M = drifted(x + a)
                self.eta.append((c + g, self.decay, M))
            else:
                self.eta.append((np.full(len(x), c), 1.0, interpolation_matrix(grid, x + a)))

    def table(self, cont: np.ndarray) -> np.ndarray:
        """Stage values, shape ``(nodes, 1 + |U|, 1 + |V|)``."""
        n = len(cont)
        nu, nv = len(self.xi), len(self.eta)
        out = np.empty((n, 1 + nu, 1 + nv))
        xi_vals = [self.none_gain + self.decay * (self.none_mat @ cont)]
        xi_vals += [g + d * (M @ cont) for g, d, M in self.xi]
        eta_vals = [g + d * (M @ cont) for g, d, M in self.eta]
        for i in range(1 + nu):
            out[:, i, 0] = xi_vals[i]
            for j in range(nv):
                # eta priority: xi's choice i is ignored
                out[:, i, 1 + j] = eta_vals[j]
        return out


def stage_table(problem: GameProblem, grid: Grid, continuation: GridFunction, dt: float,
                drift_after_impulse: bool = True) -> np.ndarray:
    """Full one-stage payoff table against ``continuation``."""
    return _StageMaps(problem, grid, dt, drift_after_impulse).table(continuation.flat)


def _lower(table: np.ndarray) -> np.ndarray:
    return np.max(np.min(table, axis=2), axis=1)


def _upper(table: np.ndarray) -> np.ndarray:
    return np.min(np.max(table, axis=1), axis=1)


def backward_induction(spec: DiscreteGameSpec) -> tuple[GridFunction, GridFunction]:
    """``(lower, upper)`` stage-0 values from a zero terminal condition."""
    maps = _StageMaps(spec.problem, spec.grid, spec.dt, drift_after_impulse=True)
    lo = np.zeros(spec.grid.size)
    up = np.zeros(spec.grid.size)
    for _ in range(spec.steps):
        lo = _lower(maps.table(lo))
        up = _upper(maps.table(up))
    return GridFunction(spec.grid, lo), GridFunction(spec.grid, up)


def backward_induction_lower(spec: DiscreteGameSpec) -> GridFunction:
    maps = _StageMaps(spec.problem, spec.grid, spec.dt, drift_after_impulse=True)
    v = np.zeros(spec.grid.size)
    for _ in range(spec.steps):
        v = _lower(maps.table(v))
    return GridFunction(spec.grid, v)


def backward_induction_upper(spec: DiscreteGameSpec) -> GridFunction:
    maps = _StageMaps(spec.problem, spec.grid, spec.dt, drift_after_impulse=True)
    v = np.zeros(spec.grid.size)
    for _ in range(spec.steps):
        v = _upper(maps.table(v))
    return GridFunction(spec.grid, v)


@dataclass
class DppReport:
    max_gap: float
    worst_node: int
    gaps: np.ndarray
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_gap <= self.tol

    def to_lines(self) -> list[str]:
        return [
            f"dpp_max_gap={self.max_gap!r}",
            f"dpp_worst_node={self.worst_node}",
            f"dpp_tol={self.tol!r}",
            f"dpp_passed={'true' if self.passed else 'false'}",
        ]


def dpp_check(problem: GameProblem, grid: Grid, value: GridFunction, dt: float, tol: float,
              interior: np.ndarray | None = None,
              drift_after_impulse: bool = False) -> DppReport:
    """Compare ``value`` with its one-stage lower game value over horizon ``dt``.

    By default an impulse hands over to the continuation immediately (no
    drift after the jump), which is the menu whose branches coincide with the
    fixed-point operator.  ``drift_after_impulse=True`` uses the oracle stage.
    Gaps are taken over ``interior`` nodes (all nodes if omitted).
    """
    maps = _StageMaps(problem, grid, dt, drift_after_impulse)
    rhs = _lower(maps.table(value.flat))
    gaps = np.abs(value.flat - rhs)
    mask = np.ones(grid.size, dtype=bool) if interior is None else np.asarray(interior, dtype=bool)
    masked = np.where(mask, gaps, -np.inf)
    worst = int(np.argmax(masked))
    return DppReport(max_gap=float(masked[worst]) if mask.any() else 0.0, worst_node=worst, gaps=gaps, tol=tol)


def value_gap(lower: GridFunction, upper: GridFunction, interior: np.ndarray | None = None) -> float:
    """Largest ``|upper - lower|`` over interior nodes (all nodes by default)."""
    a, b = lower.grid, upper.grid
    if a.shape != b.shape or not (np.array_equal(a.lower, b.lower) and np.array_equal(a.upper, b.upper)):
        raise ValueError("value grids do not match")
    d = np.abs(upper.flat - lower.flat)
    if interior is not None:
        d = d[np.asarray(interior, dtype=bool)]
    return float(np.max(d)) if d.size else 0.0


def tail_bound(problem: GameProblem, spec: DiscreteGameSpec) -> float:
    """``||f|| exp(-lam T) / lam`` for the game horizon."""
    bound_f = estimate_sup_norms(problem, spec.grid.box)[1]
    return bound_f * math.exp(-problem.discount * spec.horizon) / problem.discount
