"""Cost operators, the gradient cost operator, and pointwise QVI residuals.

For a grid function ``v``:

* ``h_inf_chi``: ``min_eta v(x + eta) + chi(eta)``  (player-eta obstacle)
* ``h_sup_c``:   ``max_xi v(x + xi) - c(xi)``       (player-xi obstacle)
* ``f_inf_c``:   ``min_xi -p . xi + c(xi)``         (gradient form of the xi obstacle)

``residual_classic`` evaluates the double-obstacle left-hand side with the
``v - h_sup_c`` obstacle, ``residual_new`` with ``f_inf_c(Dv)`` in its place.
Gradients are finite differences on the grid; argmin/argmax ties go to the
first action in declared order.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .grid import (
    Grid,
    GridFunction,
    boundary_zone_mask,
    gradient_fd,
    gradient_field,
    interpolate,
    interpolation_matrix,
)
from .problem import GameProblem, estimate_sup_norms

__all__ = [
    "Region",
    "ImpulseStencils",
    "h_inf_chi",
    "h_sup_c",
    "f_inf_c",
    "residual_classic",
    "residual_new",
    "QviResidualReport",
    "residual_report",
    "strict_supersolution_transform",
    "alpha_window",
    "boundary_margin",
]


class Region(IntEnum):
    CONTINUE = 0
    XI_IMPULSE = 1
    ETA_IMPULSE = 2


class ImpulseStencils:
    """Interpolation matrices for ``x + a`` at every node, one per action.

    The jump targets never change between fixed-point iterations, so the
    solver and the residual code share these.
    """

    def __init__(self, problem: GameProblem, grid: Grid):
        if grid.dimension != problem.dimension:
            raise ValueError("grid and problem dimensions differ")
        self.problem = problem
        self.grid = grid
        x = grid.nodes()
        self.nodes = x
        self.max_mats = [interpolation_matrix(grid, x + a) for a in problem.max_actions]
        self.min_mats = [interpolation_matrix(grid, x + a) for a in problem.min_actions]

    def h_inf(self, flat_values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        cand = np.stack([M @ flat_values for M in self.min_mats], axis=1) + self.problem.min_costs
        arg = np.argmin(cand, axis=1)
        return cand[np.arange(len(arg)), arg], arg

    def h_sup(self, flat_values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        cand = np.stack([M @ flat_values for M in self.max_mats], axis=1) - self.problem.max_costs
        arg = np.argmax(cand, axis=1)
        return cand[np.arange(len(arg)), arg], arg


def _jump_candidates(problem: GameProblem, gf: GridFunction, x, actions):
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        x = x[None]
    pts = x[..., None, :] + actions
    return interpolate(gf, pts)


def h_inf_chi(problem: GameProblem, gf: GridFunction, x):
    """``(value, argmin action)`` of ``min_eta gf(x + eta) + chi(eta)``."""
    cand = _jump_candidates(problem, gf, x, problem.min_actions) + problem.min_costs
    k = np.argmin(cand, axis=-1)
    val = np.take_along_axis(cand, k[..., None], axis=-1)[..., 0]
    act = problem.min_actions[k]
    if np.ndim(val) == 0:
        return float(val), act
    return val, act


def h_sup_c(problem: GameProblem, gf: GridFunction, x):
    """``(value, argmax action)`` of ``max_xi gf(x + xi) - c(xi)``."""
    cand = _jump_candidates(problem, gf, x, problem.max_actions) - problem.max_costs
    k = np.argmax(cand, axis=-1)
    val = np.take_along_axis(cand, k[..., None], axis=-1)[..., 0]
    act = problem.max_actions[k]
    if np.ndim(val) == 0:
        return float(val), act
    return val, act


def f_inf_c(problem: GameProblem, p):
    """``min_xi -p . xi + c(xi)``; ``p`` has shape ``(n,)`` or ``(m, n)``."""
    p = np.asarray(p, dtype=float)
    cand = -(p @ problem.max_actions.T) + problem.max_costs
    out = np.min(cand, axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def _node_pieces(problem: GameProblem, gf: GridFunction, node):
    grid = gf.grid
    flat = node if np.ndim(node) == 0 else grid.flat_index(node)
    x = grid.nodes()[int(flat)]
    v = float(gf.flat[int(flat)])
    grad = gradient_fd(gf, int(flat))
    pde = problem.discount * v - grad @ problem.drift(x) - float(problem.gain(x))
    return x, v, grad, pde


def residual_classic(problem: GameProblem, gf: GridFunction, node) -> float:
    """``max{min[lam v - Dv.b - f, v - H_sup v], v - H_inf v}`` at one node."""
    x, v, _, pde = _node_pieces(problem, gf, node)
    hsup, _ = h_sup_c(problem, gf, x)
    hinf, _ = h_inf_chi(problem, gf, x)
    return float(max(min(pde, v - hsup), v - hinf))


def residual_new(problem: GameProblem, gf: GridFunction, node) -> float:
    """``max{min[lam v - Dv.b - f, F(Dv)], v - H_inf v}`` at one node."""
    x, v, grad, pde = _node_pieces(problem, gf, node)
    hinf, _ = h_inf_chi(problem, gf, x)
    return float(max(min(pde, f_inf_c(problem, grad)), v - hinf))


@dataclass
class QviResidualReport:
    """Per-node residuals of both inequalities plus region labels.

    ``region`` is XI_IMPULSE where ``v`` meets the xi obstacle within
    ``region_tol``, else ETA_IMPULSE where it meets the eta obstacle, else
    CONTINUE.  Action arrays hold NaN rows where the label does not apply.
    ``boundary`` flags nodes inside the boundary influence zone.
    """

    grid: Grid
    residual_classic: np.ndarray
    residual_new: np.ndarray
    region: np.ndarray
    xi_action: np.ndarray
    eta_action: np.ndarray
    boundary: np.ndarray
    pde_term: np.ndarray
    xi_obstacle: np.ndarray
    eta_obstacle: np.ndarray
    gradient_obstacle: np.ndarray

    @property
    def interior(self) -> np.ndarray:
        return ~self.boundary


def boundary_margin(problem: GameProblem, dt: float = 0.0, bound_b: float | None = None) -> float:
    """Width of the boundary influence zone: largest jump plus one drift step."""
    reach = max(
        float(np.max(np.linalg.norm(problem.max_actions, axis=1))),
        float(np.max(np.linalg.norm(problem.min_actions, axis=1))),
    )
    if bound_b is None:
        bound_b = estimate_sup_norms(problem)[0] if problem.domain is not None else 0.0
    return reach + bound_b * float(dt)


def residual_report(problem: GameProblem, gf: GridFunction, dt: float = 0.0,
                    region_tol: float = 1e-6, stencils: ImpulseStencils | None = None,
                    bound_b: float | None = None) -> QviResidualReport:
    """Vectorized residuals of both inequalities at every node."""
    grid = gf.grid
    st = stencils if stencils is not None else ImpulseStencils(problem, grid)
    x = st.nodes
    v = gf.flat
    grad = gradient_field(gf)
    pde = problem.discount * v - np.sum(grad * problem.drift(x), axis=1) - problem.gain(x)
    hinf, kinf = st.h_inf(v)
    hsup, ksup = st.h_sup(v)
    fterm = f_inf_c(problem, grad)
    classic = np.maximum(np.minimum(pde, v - hsup), v - hinf)
    new = np.maximum(np.minimum(pde, fterm), v - hinf)

    region = np.full(grid.size, Region.CONTINUE, dtype=np.int8)
    xi_hit = v - hsup <= region_tol
    eta_hit = (v - hinf >= -region_tol) & ~xi_hit
    region[xi_hit] = Region.XI_IMPULSE
    region[eta_hit] = Region.ETA_IMPULSE
    n = grid.dimension
    xi_act = np.full((grid.size, n), np.nan)
    eta_act = np.full((grid.size, n), np.nan)
    xi_act[xi_hit] = problem.max_actions[ksup[xi_hit]]
    eta_act[eta_hit] = problem.min_actions[kinf[eta_hit]]

    if bound_b is None:
        bound_b = float(np.max(np.linalg.norm(problem.drift(x), axis=1)))
    boundary = boundary_zone_mask(grid, boundary_margin(problem, dt, bound_b))
    return QviResidualReport(
        grid=grid, residual_classic=classic, residual_new=new, region=region,
        xi_action=xi_act, eta_action=eta_act, boundary=boundary,
        pde_term=pde, xi_obstacle=v - hsup, eta_obstacle=v - hinf, gradient_obstacle=fterm,
    )


def alpha_window(problem: GameProblem, mu: float, K: float,
                        bound_b: float | None = None, bound_f: float | None = None) -> float:
    """Upper limit ``(1 - mu) min(min c, (lam K - ||f||)/||b||)`` for ``alpha``.

    With ``||b|| = 0`` the drift term imposes no limit.
    """
    if bound_b is None or bound_f is None:
        eb, ef = estimate_sup_norms(problem)
        bound_b = eb if bound_b is None else bound_b
        bound_f = ef if bound_f is None else bound_f
    drift_limit = np.inf if bound_b == 0 else (problem.discount * K - bound_f) / bound_b
    return (1.0 - mu) * min(float(problem.max_costs.min()), drift_limit)


def strict_supersolution_transform(problem: GameProblem, gf: GridFunction, mu: float,
                                   alpha: float, K: float, bound_b: float | None = None,
                                   bound_f: float | None = None) -> GridFunction:
    """``mu v + alpha sqrt(||x||^2 + 1) + K (1 - mu)`` at every node.

    Parameters must satisfy ``0 < mu < 1``, ``K > ||f||/lam`` and
    ``0 < alpha < alpha_window(...)``; otherwise ``ValueError``.
    Sup norms default to sampled estimates on ``problem.domain``.
    """
    if bound_b is None or bound_f is None:
        eb, ef = estimate_sup_norms(problem)
        bound_b = eb if bound_b is None else bound_b
        bound_f = ef if bound_f is None else bound_f
    if not 0.0 < mu < 1.0:
        raise ValueError(f"mu must lie in (0, 1), got {mu}")
    if not K > bound_f / problem.discount:
        raise ValueError(f"K must exceed ||f||/lambda = {bound_f / problem.discount}, got {K}")
    limit = alpha_window(problem, mu, K, bound_b, bound_f)
    if not 0.0 < alpha < limit:
        raise ValueError(f"alpha must lie in (0, {limit}), got {alpha}")
    x = gf.grid.nodes()
    vals = mu * gf.flat + alpha * np.sqrt(np.sum(x * x, axis=1) + 1.0) + K * (1.0 - mu)
    return GridFunction(gf.grid, vals)
