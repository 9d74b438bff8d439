"""Problem configuration files (YAML or JSON).

Example::

    dimension: 1
    domain: {lower: [-2.0], upper: [2.0]}
    grid: {nodes_per_axis: [81]}
    drift: {kind: zero}
    gain: {kind: peak, params: {center: [0.0]}}
    discount: 1.0
    max_player:
      actions: [[-0.5], [0.5]]
      cost: {kind: proportional, params: {k1: 0.4}}
    min_player:
      actions: [[-0.5], [0.5]]
      cost: {kind: fixed_plus_proportional, params: {k0: 0.3, k1: 0.2}}
    solver: {dt: 0.01, tol: 1.0e-8, max_iters: 100000, initial_guess: upper_bound}
    # initial_guess: file reads initial_path (relative to this file)
    oracle: {dt: 0.01, steps: 2000}
    seed: 0
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .grid import Grid
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
)
from .solver import SolverConfig
from .trajectory import ImpulseControl

__all__ = ["ConfigError", "ProblemConfig", "load_config", "parse_config"]


class ConfigError(ValueError):
    """The configuration file cannot be parsed or names unknown catalog kinds."""


@dataclass
class ProblemConfig:
    problem: GameProblem
    grid: Grid
    solver: SolverConfig
    oracle_dt: float
    oracle_steps: int
    seed: int = 0
    simulate: dict | None = None
    compare: dict = field(default_factory=dict)


def _vec(value, n: int, what: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    if arr.shape != (n,):
        raise ConfigError(f"{what} must have length {n}")
    return arr


def _float(value, what: str) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{what} must be a number, got {value!r}") from None


def _drift(spec: dict, n: int):
    kind = spec.get("kind")
    p = spec.get("params", {}) or {}
    if kind == "zero":
        return ZeroDrift(n)
    if kind == "constant":
        return ConstantDrift(_vec(p.get("d"), n, "drift.params.d"))
    if kind == "saturated_affine":
        A = np.asarray(p.get("A"), dtype=float).reshape(n, n)
        d = _vec(p.get("d", [0.0] * n), n, "drift.params.d")
        s = p.get("s", 1.0)
        return SaturatedAffineDrift(A, d, np.asarray(s, dtype=float))
    raise ConfigError(f"unknown drift kind {kind!r}")


def _gain(spec: dict, n: int):
    kind = spec.get("kind")
    p = spec.get("params", {}) or {}
    if kind == "constant":
        return ConstantGain(_float(p.get("value", 1.0), "gain.params.value"))
    if kind == "clipped_linear":
        return ClippedLinearGain(
            _vec(p.get("w"), n, "gain.params.w"),
            _float(p.get("offset", 0.0), "gain.params.offset"),
            _float(p.get("lower", 0.0), "gain.params.lower"),
            _float(p.get("upper", 1.0), "gain.params.upper"),
        )
    if kind == "peak":
        return PeakGain(_vec(p.get("center", [0.0] * n), n, "gain.params.center"),
                        _float(p.get("height", 1.0), "gain.params.height"))
    raise ConfigError(f"unknown gain kind {kind!r}")


def _cost(spec: dict):
    kind = spec.get("kind")
    p = spec.get("params", {}) or {}
    if kind == "proportional":
        return ProportionalCost(_float(p.get("k1"), "cost.params.k1"))
    if kind == "fixed_plus_proportional":
        return FixedPlusProportionalCost(_float(p.get("k0"), "cost.params.k0"),
                                         _float(p.get("k1", 0.0), "cost.params.k1"))
    raise ConfigError(f"unknown cost kind {kind!r}")


def _actions(raw, n: int, what: str) -> np.ndarray:
    arr = np.asarray(raw, dtype=float)
    if arr.ndim == 1 and n == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[1] != n:
        raise ConfigError(f"{what} must be a list of length-{n} vectors")
    return arr


def _control(raw, n: int) -> ImpulseControl:
    pairs = [(float(t), _vec(a, n, "jump action")) for t, a in (raw or [])]
    return ImpulseControl.from_pairs(pairs, n)


def parse_config(doc: dict, base_dir=".") -> ProblemConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a mapping")
    try:
        n = int(doc["dimension"])
        box = Box(_vec(doc["domain"]["lower"], n, "domain.lower"), _vec(doc["domain"]["upper"], n, "domain.upper"))
        grid = Grid.from_box(box, [int(k) for k in doc["grid"]["nodes_per_axis"]])
        problem = GameProblem(
            drift=_drift(doc["drift"], n),
            gain=_gain(doc["gain"], n),
            discount=_float(doc["discount"], "discount"),
            max_actions=_actions(doc["max_player"]["actions"], n, "max_player.actions"),
            min_actions=_actions(doc["min_player"]["actions"], n, "min_player.actions"),
            max_cost=_cost(doc["max_player"]["cost"]),
            min_cost=_cost(doc["min_player"]["cost"]),
            domain=box,
        )
        s = doc.get("solver", {}) or {}
        initial_values = None
        if s.get("initial_guess") == "file":
            from .io import read_grid_csv

            initial_values = read_grid_csv(Path(base_dir) / s["initial_path"], grid)
        solver = SolverConfig(
            dt=None if s.get("dt") is None else _float(s["dt"], "solver.dt"),
            tol=_float(s.get("tol", 1e-8), "solver.tol"),
            max_iters=int(s.get("max_iters", 100_000)),
            initial_guess=s.get("initial_guess", "upper_bound"),
            initial_values=initial_values,
            stopping=s.get("stopping", "error_bound"),
        )
        o = doc.get("oracle", {}) or {}
        oracle_dt = _float(o.get("dt", solver.dt or 0.01), "oracle.dt")
        oracle_steps = int(o.get("steps", 1000))
        sim = doc.get("simulate")
        if sim is not None:
            sim = {
                "x0": _vec(sim["x0"], n, "simulate.x0"),
                "horizon": _float(sim["horizon"], "simulate.horizon"),
                "step": _float(sim.get("step", 0.01), "simulate.step"),
                "u": _control(sim.get("u"), n),
                "v": _control(sim.get("v"), n),
            }
        return ProblemConfig(
            problem=problem, grid=grid, solver=solver, oracle_dt=oracle_dt,
            oracle_steps=oracle_steps, seed=int(doc.get("seed", 0)), simulate=sim,
            compare=dict(doc.get("compare", {}) or {}),
        )
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError, OSError) as exc:
        raise ConfigError(f"invalid config: {exc!r}") from exc


def load_config(path) -> ProblemConfig:
    try:
        doc = yaml.safe_load(Path(path).read_text())
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return parse_config(doc, Path(path).parent)
