"""Discounted payoff of a simulated trajectory, with an explicit tail bound."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .problem import Box, GameProblem, estimate_sup_norms
from .trajectory import ImpulseControl, Trajectory

__all__ = ["PayoffBreakdown", "evaluate_payoff", "truncation_horizon"]


@dataclass
class PayoffBreakdown:
    running_gain_integral: float
    xi_cost_total: float
    eta_cost_total: float
    total: float
    truncation_bound: float

    def to_lines(self) -> list[str]:
        return [
            f"running_gain_integral={self.running_gain_integral!r}",
            f"xi_cost_total={self.xi_cost_total!r}",
            f"eta_cost_total={self.eta_cost_total!r}",
            f"total={self.total!r}",
            f"truncation_bound={self.truncation_bound!r}",
        ]


def _same_jumps(recs, control: ImpulseControl) -> bool:
    if len(recs) != len(control):
        return False
    for r, t, a in zip(recs, control.times, control.actions):
        if r.time != float(t) or not np.array_equal(r.action, a):
            return False
    return True


def evaluate_payoff(problem: GameProblem, traj: Trajectory, u: ImpulseControl, v: ImpulseControl,
                    bound_f: float | None = None, domain: Box | None = None) -> PayoffBreakdown:
    """Running gain minus xi costs plus eta costs, all discounted to time 0.

    The running integral is the composite trapezoid rule on the trajectory
    nodes, using the post-jump state at the left end of each interval and
    the pre-jump state at the right end.  Suppressed xi jumps cost nothing.
    ``bound_f`` (for the tail bound) defaults to a sampled estimate on
    ``domain`` or ``problem.domain``.
    """
    xi_recs = [r for r in traj.jumps if r.player == "xi"]
    eta_recs = [r for r in traj.jumps if r.player == "eta"]
    if not (_same_jumps(xi_recs, u) and _same_jumps(eta_recs, v)):
        raise ValueError("trajectory was not produced by these controls")

    lam = problem.discount
    t = traj.times
    disc = np.exp(-lam * t)
    left = problem.gain(traj.states[:-1]) * disc[:-1]
    right = problem.gain(traj.pre_states[1:]) * disc[1:]
    running = float(np.sum(0.5 * np.diff(t) * (left + right)))

    xi_cost = sum(
        float(problem.max_cost(r.action)) * math.exp(-lam * r.time) for r in xi_recs if not r.suppressed
    )
    eta_cost = sum(float(problem.min_cost(r.action)) * math.exp(-lam * r.time) for r in eta_recs)

    if bound_f is None:
        bound_f = estimate_sup_norms(problem, domain)[1]
    tail = bound_f * math.exp(-lam * traj.horizon) / lam
    return PayoffBreakdown(
        running_gain_integral=running,
        xi_cost_total=xi_cost,
        eta_cost_total=eta_cost,
        total=running - xi_cost + eta_cost,
        truncation_bound=tail,
    )


def truncation_horizon(problem: GameProblem, epsilon: float, bound_f: float | None = None,
                       domain: Box | None = None) -> float:
    """Smallest ``T`` with ``||f|| exp(-lam T) / lam <= epsilon``."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if bound_f is None:
        bound_f = estimate_sup_norms(problem, domain)[1]
    lam = problem.discount
    if bound_f == 0:
        return 0.0
    return max(0.0, math.log(bound_f / (lam * epsilon)) / lam)
