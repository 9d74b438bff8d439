"""Impulse-controlled trajectories and the Gronwall stability check.

Between jumps the state follows ``y' = b(y)`` (classical RK4 on a fixed
time grid).  Jumps use the right-limit rule ``y(t+) = y(t-) + a``.  When both
players jump at the same instant only player-eta's jump is applied and
player-xi's is recorded as suppressed.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .problem import GameProblem, validate_h1

__all__ = [
    "ImpulseControl",
    "JumpRecord",
    "Trajectory",
    "rk4_step",
    "integrate_drift",
    "time_grid",
    "simulate",
    "gronwall_check",
]


@dataclass(frozen=True)
class ImpulseControl:
    """Finite ordered list of ``(time, action)`` jumps for one player."""

    times: np.ndarray
    actions: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float).reshape(-1)
        a = np.asarray(self.actions, dtype=float)
        if t.size == 0:
            a = a.reshape(0, a.shape[-1] if a.ndim == 2 else 0)
        elif a.ndim == 1:
            a = a[:, None] if a.size == t.size else a[None, :]
        if a.shape[0] != t.size:
            raise ValueError("times and actions differ in length")
        if np.any(t < 0) or not np.all(np.isfinite(t)):
            raise ValueError("jump times must be finite and nonnegative")
        if np.any(np.diff(t) < 0):
            raise ValueError("jump times must be nondecreasing")
        if np.any(np.diff(t) == 0):
            raise ValueError("one player cannot jump twice at the same time")
        if a.size and np.any(np.all(a == 0, axis=1)):
            raise ValueError("zero jump")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "actions", a)

    @classmethod
    def empty(cls, dimension: int = 1) -> "ImpulseControl":
        return cls(np.zeros(0), np.zeros((0, dimension)))

    @classmethod
    def from_pairs(cls, pairs, dimension: int | None = None) -> "ImpulseControl":
        pairs = list(pairs)
        if not pairs:
            return cls.empty(dimension or 1)
        times = [p[0] for p in pairs]
        actions = [np.atleast_1d(np.asarray(p[1], dtype=float)) for p in pairs]
        return cls(np.array(times), np.vstack(actions))

    def __len__(self):
        return self.times.size


@dataclass(frozen=True)
class JumpRecord:
    time: float
    node_time: float
    player: str
    action: np.ndarray
    pre_state: np.ndarray
    post_state: np.ndarray
    suppressed: bool


@dataclass
class Trajectory:
    """Sampled path.

    ``states[i]`` is the state at ``times[i]`` after any jump there;
    ``pre_states[i]`` is the left limit (equal to ``states[i]`` where nothing
    happened).
    """

    times: np.ndarray
    states: np.ndarray
    pre_states: np.ndarray
    jumps: list = field(default_factory=list)

    @property
    def samples(self) -> list:
        return list(zip(self.times.tolist(), self.states))

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    def write_csv(self, path) -> None:
        """Columns ``t, x_1..x_n, jump_player, jump_suppressed``."""
        n = self.states.shape[1]
        by_node: dict[int, list[JumpRecord]] = {}
        index = {t: i for i, t in enumerate(self.times.tolist())}
        for rec in self.jumps:
            by_node.setdefault(index[rec.node_time], []).append(rec)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", *(f"x_{k + 1}" for k in range(n)), "jump_player", "jump_suppressed"])
            for i, (t, y) in enumerate(zip(self.times, self.states)):
                recs = by_node.get(i, [])
                applied = "+".join(r.player for r in recs if not r.suppressed)
                suppressed = int(any(r.suppressed for r in recs))
                w.writerow([repr(float(t)), *(repr(float(c)) for c in y), applied, suppressed])


def rk4_step(problem: GameProblem, y: np.ndarray, h: float) -> np.ndarray:
    b = problem.drift
    k1 = b(y)
    k2 = b(y + 0.5 * h * k1)
    k3 = b(y + 0.5 * h * k2)
    k4 = b(y + h * k3)
    return y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def time_grid(horizon: float, step: float) -> np.ndarray:
    """Nodes ``0, step, 2 step, ...`` ending exactly at ``horizon``."""
    if not horizon > 0 or not step > 0:
        raise ValueError("horizon and step must be positive")
    n = max(1, math.ceil(horizon / step - 1e-12))
    t = np.arange(n + 1) * step
    t[-1] = horizon
    return t


def integrate_drift(problem: GameProblem, state, duration: float, step: float) -> np.ndarray:
    """Flow of ``y' = b(y)`` for ``duration`` using RK4 substeps of ``step``.

    The last substep is shortened to land on ``duration``.  ``state`` may be
    a batch of shape ``(m, n)``.
    """
    if not duration > 0 or not step > 0:
        raise ValueError("duration and step must be positive")
    if step > duration:
        raise ValueError("step must not exceed duration")
    y = np.asarray(state, dtype=float).copy()
    t = time_grid(duration, step)
    for h in np.diff(t):
        y = rk4_step(problem, y, h)
    return y


def _snap(times: np.ndarray, grid: np.ndarray) -> np.ndarray:
    # nearest node, ties to the earlier one
    right = np.clip(np.searchsorted(grid, times, side="left"), 0, len(grid) - 1)
    left = np.clip(right - 1, 0, len(grid) - 1)
    pick_left = (times - grid[left]) <= (grid[right] - times)
    return np.where(pick_left, left, right)


def _check_actions(actions: np.ndarray, allowed: np.ndarray, name: str):
    for a in actions:
        if not np.any(np.all(allowed == a, axis=1)):
            raise ValueError(f"{name} action {a.tolist()} is not in the declared action set")


def simulate(problem: GameProblem, x0, u: ImpulseControl, v: ImpulseControl,
             horizon: float, step: float) -> Trajectory:
    """Integrate the controlled dynamics from ``x0`` over ``[0, horizon]``.

    Jump times are snapped to the nearest integration node (ties to the
    earlier node).  A xi jump is suppressed when eta jumps at exactly the
    same time; jumps at distinct times that snap to one node are applied in
    time order.
    """
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if x0.shape != (problem.dimension,):
        raise ValueError("initial state has the wrong dimension")
    _check_actions(u.actions, problem.max_actions, "xi")
    _check_actions(v.actions, problem.min_actions, "eta")
    if (len(u) and u.times[-1] > horizon) or (len(v) and v.times[-1] > horizon):
        raise ValueError("jump after the horizon")
    t = time_grid(horizon, step)

    events = []  # (node, exact time, order, player, action)
    eta_times = set(v.times.tolist())
    for tm, a in zip(u.times, u.actions):
        events.append([0, float(tm), 0, "xi", a, float(tm) in eta_times])
    for tm, a in zip(v.times, v.actions):
        events.append([0, float(tm), 1, "eta", a, False])
    if events:
        nodes = _snap(np.array([e[1] for e in events]), t)
        for e, k in zip(events, nodes):
            e[0] = int(k)
    events.sort(key=lambda e: (e[0], e[1], e[2]))

    states = np.empty((len(t), problem.dimension))
    pre = np.empty_like(states)
    jumps = []
    y = x0.copy()
    ev = 0
    for i in range(len(t)):
        if i > 0:
            y = rk4_step(problem, y, t[i] - t[i - 1])
        pre[i] = y
        while ev < len(events) and events[ev][0] == i:
            _, tm, _, player, a, suppressed = events[ev]
            before = y.copy()
            if not suppressed:
                y = y + a
            jumps.append(JumpRecord(tm, float(t[i]), player, a.copy(), before, y.copy(), suppressed))
            ev += 1
        states[i] = y
    return Trajectory(times=t, states=states, pre_states=pre, jumps=jumps)


def gronwall_check(problem: GameProblem, x, x_prime, horizon: float, step: float,
                   slack: float, lipschitz_b: float | None = None, **h1_kwargs) -> bool:
    """``||y_x(t) - y_x'(t)|| <= (1 + slack) exp(C_b t) ||x - x'||`` at every node.

    ``C_b`` defaults to the sampled estimate from :func:`validate_h1`
    (``h1_kwargs`` are passed through).
    """
    if lipschitz_b is None:
        lipschitz_b = validate_h1(problem, **h1_kwargs).lipschitz_b_estimate
    x = np.atleast_1d(np.asarray(x, dtype=float))
    xp = np.atleast_1d(np.asarray(x_prime, dtype=float))
    t = time_grid(horizon, step)
    d0 = float(np.linalg.norm(x - xp))
    y = np.stack([x, xp])
    for i in range(len(t)):
        if i > 0:
            y = rk4_step(problem, y, t[i] - t[i - 1])
        dist = float(np.linalg.norm(y[0] - y[1]))
        if dist > (1.0 + slack) * math.exp(lipschitz_b * t[i]) * d0:
            return False
    return True
