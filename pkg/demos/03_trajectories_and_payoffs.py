"""
Simulating impulse controls
===========================

Controls are lists of (time, jump).  When both players jump at the same
instant, only the minimizer's jump happens and the maximizer pays nothing.
"""

import math

from impulse_qvi import ImpulseControl, evaluate_payoff, simulate, truncation_horizon
from impulse_qvi.instances import peak_instance, transport_instance

problem, _ = peak_instance()

u = ImpulseControl([0.0, 1.0], [[-0.5], [-0.5]])
v = ImpulseControl([1.0], [[0.5]])
traj = simulate(problem, [1.2], u, v, horizon=5.0, step=0.01)

for rec in traj.jumps:
    tag = "suppressed" if rec.suppressed else "applied"
    print(f"t={rec.time:.2f} {rec.player:3s} {rec.action[0]:+.1f} {tag}: "
          f"{rec.pre_state[0]:+.2f} -> {rec.post_state[0]:+.2f}")

pay = evaluate_payoff(problem, traj, u, v)
for line in pay.to_lines():
    print(" ", line)

# How long a horizon keeps the neglected tail below 1e-3?
print("horizon for 1e-3 tail:", truncation_horizon(problem, 1e-3))

# Pure drift: x' = -x from 1 reaches e^{-1} at t = 1.
problem, _ = transport_instance()
traj = simulate(problem, [1.0], ImpulseControl.empty(1), ImpulseControl.empty(1), 1.0, 0.01)
print("x(1) =", traj.states[-1, 0], " e^-1 =", math.exp(-1))
