"""Reference game instances with known behaviour.

Each builder returns ``(problem, grid)``.
"""

from __future__ import annotations

from .grid import Grid
from .problem import (
    Box,
    ClippedLinearGain,
    ConstantGain,
    FixedPlusProportionalCost,
    GameProblem,
    PeakGain,
    ProportionalCost,
    SaturatedAffineDrift,
    ZeroDrift,
)

__all__ = ["constant_instance", "transport_instance", "peak_instance"]


def constant_instance(nodes: int = 101, cost: float = 2.0):
    """No drift, unit gain, unit discount, costs too high to ever pay off.

    The value is identically ``1``.
    """
    box = Box([-1.0], [1.0])
    problem = GameProblem(
        drift=ZeroDrift(1),
        gain=ConstantGain(1.0),
        discount=1.0,
        max_actions=[-0.5, 0.5],
        min_actions=[-0.5, 0.5],
        max_cost=FixedPlusProportionalCost(cost, 0.0),
        min_cost=FixedPlusProportionalCost(cost, 0.0),
        domain=box,
    )
    return problem, Grid.from_box(box, [nodes])


def transport_instance(nodes: int = 201, cost: float = 10.0):
    """``b(x) = -x`` (saturated at 5), ``f(x) = clip(x, 0, 2)`` on ``[0, 2]``.

    Impulses are priced out; the value is ``x / 2``.
    """
    box = Box([0.0], [2.0])
    problem = GameProblem(
        drift=SaturatedAffineDrift([[-1.0]], [0.0], 5.0),
        gain=ClippedLinearGain([1.0], 0.0, 0.0, 2.0),
        discount=1.0,
        max_actions=[-0.5, 0.5],
        min_actions=[-0.5, 0.5],
        max_cost=FixedPlusProportionalCost(cost, 0.0),
        min_cost=FixedPlusProportionalCost(cost, 0.0),
        domain=box,
    )
    return problem, Grid.from_box(box, [nodes])


def peak_instance(nodes: int = 81, max_actions=(-0.5, 0.5), min_actions=(-0.5, 0.5)):
    """Peak gain ``1 - min(|x|, 1)`` on ``[-2, 2]`` with both players active.

    Player-xi pays ``0.4 |xi|`` to jump toward the peak, player-eta pays
    ``0.3 + 0.2 |eta|`` to push the state away.
    """
    box = Box([-2.0], [2.0])
    problem = GameProblem(
        drift=ZeroDrift(1),
        gain=PeakGain([0.0]),
        discount=1.0,
        max_actions=list(max_actions),
        min_actions=list(min_actions),
        max_cost=ProportionalCost(0.4),
        min_cost=FixedPlusProportionalCost(0.3, 0.2),
        domain=box,
    )
    return problem, Grid.from_box(box, [nodes])
