"""Verification checks on solved grids.

Each check returns a :class:`CheckResult` with the measured quantity, the
allowed limit and a pass flag.  ``compare`` in the CLI and the acceptance
tests both go through these.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import GridFunction
from .operators import (
    QviResidualReport,
    residual_report,
    strict_supersolution_transform,
    alpha_window,
)
from .problem import GameProblem, estimate_sup_norms

__all__ = [
    "CheckResult",
    "FD_ERROR_CONSTANT",
    "obstacle_checks",
    "gradient_form_crosscheck",
    "transform_strictness",
    "crosscheck_slack",
]

# central differences of a function with unit-bounded curvature are off by
# at most h/2 per axis; two such errors enter F(Dv)
FD_ERROR_CONSTANT = 1.0


@dataclass
class CheckResult:
    name: str
    measured: float
    allowed: float
    passed: bool
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f" {self.detail}" if self.detail else ""
        return f"{status} {self.name}: measured={self.measured:.6g} allowed={self.allowed:.6g}{extra}"


def obstacle_checks(report: QviResidualReport, upper_tol: float = 1e-6,
                  active_gap: float = 1e-3, lower_tol: float = 1e-6) -> tuple[CheckResult, CheckResult]:
    """``v <= H_inf v`` everywhere; ``v >= H_sup v`` where ``H_inf v - v > active_gap``."""
    upper = float(np.max(report.eta_obstacle))
    free = -report.eta_obstacle > active_gap
    lower = float(np.max(-report.xi_obstacle[free])) if np.any(free) else -np.inf
    return (
        CheckResult("eta_obstacle", upper, upper_tol, upper <= upper_tol),
        CheckResult("xi_obstacle", lower, lower_tol, lower <= lower_tol,
                    f"nodes={int(np.sum(free))}"),
    )


def crosscheck_slack(problem: GameProblem, report: QviResidualReport, base_tol: float = 1e-4) -> float:
    """``base_tol + C h`` with ``C = 2 max(c(xi)/|xi|) FD_ERROR_CONSTANT``."""
    ratio = float(np.max(problem.max_costs / np.linalg.norm(problem.max_actions, axis=1)))
    h = float(np.max(report.grid.spacing))
    return base_tol + 2.0 * ratio * FD_ERROR_CONSTANT * h


def gradient_form_crosscheck(problem: GameProblem, report: QviResidualReport,
                        classic_tol: float = 1e-4, base_tol: float = 1e-4) -> CheckResult:
    """Where ``residual_classic >= -classic_tol``, require ``residual_new >= -slack``."""
    sel = report.interior & (report.residual_classic >= -classic_tol)
    slack = crosscheck_slack(problem, report, base_tol)
    if not np.any(sel):
        return CheckResult("gradient_form_crosscheck", 0.0, slack, True, "no qualifying nodes")
    worst_val = np.where(sel, -report.residual_new, -np.inf)
    worst = int(np.argmax(worst_val))
    measured = float(worst_val[worst])
    x = report.grid.nodes()[worst]
    return CheckResult(
        "gradient_form_crosscheck", measured, slack, measured <= slack,
        f"worst_node={worst} x={x.tolist()} residual_new={report.residual_new[worst]:.6g}",
    )


def transform_strictness(problem: GameProblem, value: GridFunction, report: QviResidualReport,
                      mu: float = 0.9, active_gap: float = 1e-3, dt: float = 0.0):
    """Transform ``value`` and require ``residual_new(v*) > 0`` off the eta obstacle.

    Uses ``K = 2 ||f||/lam`` and half the admissible ``alpha`` window.
    Returns ``(CheckResult, v_star, v_star_report)``.
    """
    bound_b, bound_f = estimate_sup_norms(problem, value.grid.box)
    K = 2.0 * bound_f / problem.discount
    alpha = 0.5 * alpha_window(problem, mu, K, max(bound_b, 1e-9), bound_f)
    v_star = strict_supersolution_transform(problem, value, mu, alpha, K, bound_b, bound_f)
    rep_star = residual_report(problem, v_star, dt=dt)
    sel = report.interior & (report.eta_obstacle < -active_gap)
    if not np.any(sel):
        return CheckResult("transform_strictness", 0.0, 0.0, True, "no qualifying nodes"), v_star, rep_star
    vals = np.where(sel, rep_star.residual_new, np.inf)
    worst = int(np.argmin(vals))
    measured = float(vals[worst])
    result = CheckResult(
        "transform_strictness", measured, 0.0, measured > 0.0,
        f"min residual_new(v*) over {int(np.sum(sel))} nodes; worst_node={worst} alpha={alpha:.6g} K={K:.6g}",
    )
    return result, v_star, rep_star
