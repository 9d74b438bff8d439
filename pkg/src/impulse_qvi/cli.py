"""Command-line entry point.

Exit codes: 0 success, 1 validation or check failure, 2 unreadable config,
3 solver did not converge.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .checks import obstacle_checks, transform_strictness, gradient_form_crosscheck, CheckResult
from .config import ConfigError, load_config
from .io import read_grid_csv, write_grid_csv, write_lines, write_policy_csv, write_residual_csv
from .operators import residual_report, strict_supersolution_transform
from .oracle import DiscreteGameSpec, backward_induction, dpp_check, tail_bound, value_gap
from .payoff import evaluate_payoff
from .problem import estimate_sup_norms, validate
from .solver import default_dt, solve_fixed_point
from .trajectory import simulate

log = logging.getLogger("impulse_qvi")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NOCONV = 0, 1, 2, 3


def _emit(lines, out: Path | None, name: str):
    for line in lines:
        print(line)
    if out is not None:
        write_lines(out / name, lines)


def _solve(cfg, out):
    result = solve_fixed_point(cfg.problem, cfg.grid, cfg.solver)
    if out is not None:
        write_grid_csv(out / "value.csv", result.value)
        write_policy_csv(out / "policy.csv", cfg.grid, result.value.flat, result.region,
                         result.xi_action, result.eta_action)
    return result


def cmd_validate(cfg, args, out):
    report = validate(cfg.problem, cfg.grid.box, samples=args.samples, seed=cfg.seed)
    _emit(report.to_lines(), out, "assumptions.txt")
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_solve(cfg, args, out):
    result = _solve(cfg, out)
    _emit(result.summary_lines(), out, "summary.txt")
    return EXIT_OK if result.converged else EXIT_NOCONV


def _value_from(args, cfg):
    if args.value is None:
        raise ConfigError("--value CSV is required")
    return read_grid_csv(args.value, cfg.grid)


def _dt(cfg):
    return cfg.solver.dt if cfg.solver.dt is not None else default_dt(cfg.problem, cfg.grid)


def cmd_residual(cfg, args, out):
    value = _value_from(args, cfg)
    rep = residual_report(cfg.problem, value, dt=_dt(cfg))
    if out is not None:
        write_residual_csv(out / "residuals.csv", rep)
    m = rep.interior
    _emit([
        f"max_abs_residual_classic_interior={float(np.max(np.abs(rep.residual_classic[m]))) if m.any() else 0.0!r}",
        f"min_residual_new_interior={float(np.min(rep.residual_new[m])) if m.any() else 0.0!r}",
        f"interior_nodes={int(m.sum())}",
    ], out, "residual_summary.txt")
    return EXIT_OK


def cmd_oracle(cfg, args, out):
    spec = DiscreteGameSpec(cfg.problem, cfg.grid, cfg.oracle_dt, cfg.oracle_steps)
    lower, upper = backward_induction(spec)
    rep = residual_report(cfg.problem, lower, dt=cfg.oracle_dt)
    if out is not None:
        write_grid_csv(out / "oracle_lower.csv", lower)
        write_grid_csv(out / "oracle_upper.csv", upper)
    _emit([
        f"horizon={spec.horizon!r}",
        f"tail_bound={tail_bound(cfg.problem, spec)!r}",
        f"value_gap_interior={value_gap(lower, upper, rep.interior)!r}",
        f"value_gap_all={value_gap(lower, upper)!r}",
    ], out, "oracle_summary.txt")
    return EXIT_OK


def cmd_dpp(cfg, args, out):
    value = _value_from(args, cfg)
    dt = _dt(cfg)
    rep = residual_report(cfg.problem, value, dt=dt)
    tol = args.tol if args.tol is not None else 10 * cfg.solver.tol
    dpp = dpp_check(cfg.problem, cfg.grid, value, dt, tol, rep.interior)
    _emit(dpp.to_lines(), out, "dpp.txt")
    return EXIT_OK if dpp.passed else EXIT_FAIL


def cmd_simulate(cfg, args, out):
    sim = cfg.simulate
    if sim is None:
        raise ConfigError("config has no 'simulate' section")
    traj = simulate(cfg.problem, sim["x0"], sim["u"], sim["v"], sim["horizon"], sim["step"])
    pay = evaluate_payoff(cfg.problem, traj, sim["u"], sim["v"], domain=cfg.grid.box)
    if out is not None:
        traj.write_csv(out / "trajectory.csv")
    _emit(pay.to_lines(), out, "payoff.txt")
    return EXIT_OK


def cmd_transform(cfg, args, out):
    value = _value_from(args, cfg)
    bound_b, bound_f = estimate_sup_norms(cfg.problem, cfg.grid.box)
    v_star = strict_supersolution_transform(cfg.problem, value, args.mu, args.alpha, args.K, bound_b, bound_f)
    rep = residual_report(cfg.problem, v_star, dt=_dt(cfg))
    if out is not None:
        write_grid_csv(out / "transformed.csv", v_star)
        write_residual_csv(out / "transformed_residuals.csv", rep)
    m = rep.interior
    _emit([f"min_residual_new_interior={float(np.min(rep.residual_new[m])) if m.any() else 0.0!r}"],
          out, "transform_summary.txt")
    return EXIT_OK


def cmd_compare(cfg, args, out):
    opts = cfg.compare
    result = _solve(cfg, out)
    checks = [CheckResult("solver_converged", result.final_sup_change, cfg.solver.tol, result.converged,
                          f"iterations={result.iterations}")]
    dt = result.dt
    rep = residual_report(cfg.problem, result.value, dt=dt)
    spec = DiscreteGameSpec(cfg.problem, cfg.grid, cfg.oracle_dt, cfg.oracle_steps)
    lower, upper = backward_induction(spec)
    m = rep.interior
    diff = float(np.max(np.abs(result.value.flat - lower.flat)[m])) if m.any() else 0.0
    oracle_tol = float(opts.get("oracle_tol", 5e-2))
    checks.append(CheckResult("oracle_agreement", diff, oracle_tol, diff <= oracle_tol))
    gap = value_gap(lower, upper, m)
    gap_tol = float(opts.get("gap_tol", 5e-2))
    checks.append(CheckResult("value_gap", gap, gap_tol, gap <= gap_tol))
    checks.extend(obstacle_checks(rep))
    dpp = dpp_check(cfg.problem, cfg.grid, result.value, dt, 10 * cfg.solver.tol, m)
    checks.append(CheckResult("dpp_gap", dpp.max_gap, dpp.tol, dpp.passed))
    checks.append(gradient_form_crosscheck(cfg.problem, rep))
    checks.append(transform_strictness(cfg.problem, result.value, rep, dt=dt)[0])
    if out is not None:
        write_residual_csv(out / "residuals.csv", rep)
        write_grid_csv(out / "oracle_lower.csv", lower)
        write_grid_csv(out / "oracle_upper.csv", upper)
    lines = [c.line() for c in checks]
    lines.append(f"overall={'PASS' if all(c.passed for c in checks) else 'FAIL'}")
    _emit(lines, out, "compare.txt")
    if not result.converged:
        return EXIT_NOCONV
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAIL


COMMANDS = {
    "validate": cmd_validate,
    "solve": cmd_solve,
    "residual": cmd_residual,
    "oracle": cmd_oracle,
    "dpp-check": cmd_dpp,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "transform": cmd_transform,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="impulse-qvi", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("config", help="problem config (YAML or JSON)")
        p.add_argument("--out", type=Path, default=None, help="directory for CSV and report files")
        p.add_argument("-v", "--verbose", action="store_true")
        if name == "validate":
            p.add_argument("--samples", type=int, default=512)
        if name in ("residual", "dpp-check", "transform"):
            p.add_argument("--value", type=Path, help="value CSV written by 'solve'")
        if name == "dpp-check":
            p.add_argument("--tol", type=float, default=None)
        if name == "transform":
            p.add_argument("--mu", type=float, required=True)
            p.add_argument("--alpha", type=float, required=True)
            p.add_argument("--K", type=float, required=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = args.out
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    try:
        return COMMANDS[args.command](cfg, args, out)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
