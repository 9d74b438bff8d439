"""
A game with both players active
===============================

The running gain peaks at the origin.  The maximizer pays 0.4 per unit to
jump toward it; the minimizer pays 0.3 + 0.2 per unit to push the state away.
"""

import numpy as np

from impulse_qvi import (
    DiscreteGameSpec,
    Region,
    SolverConfig,
    backward_induction,
    residual_report,
    solve_fixed_point,
    value_gap,
)
from impulse_qvi.instances import peak_instance

problem, grid = peak_instance()
res = solve_fixed_point(problem, grid, SolverConfig(dt=0.01, tol=1e-8))
print("converged after", res.iterations, "sweeps")

x = grid.nodes()[:, 0]
names = {Region.CONTINUE: ".", Region.XI_IMPULSE: ">", Region.ETA_IMPULSE: "<"}
print("policy (. wait, > max-player jumps, < min-player jumps):")
print("  " + "".join(names[Region(r)] for r in res.region))

# where the maximizer jumps, which way does it go?
jumps = res.region == Region.XI_IMPULSE
for xk, a in zip(x[jumps][::8], res.xi_action[jumps][::8, 0]):
    print(f"  at x={xk:+.2f} jump by {a:+.1f}")

# Independent check: backward induction over the discrete game on T = 20.
spec = DiscreteGameSpec(problem, grid, dt=0.01, steps=2000)
lower, upper = backward_induction(spec)
rep = residual_report(problem, res.value, dt=res.dt)
print("solver vs oracle (interior):", np.max(np.abs(res.value.flat - lower.flat)[rep.interior]))
print("lower/upper gap:", value_gap(lower, upper, rep.interior))
