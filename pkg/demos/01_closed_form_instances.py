"""
Two instances with known values
===============================

Impulses that are too expensive to ever pay off leave a plain discounted
transport problem.  Both of these have a value in closed form.
"""

import numpy as np

from impulse_qvi import SolverConfig, residual_report, solve_fixed_point
from impulse_qvi.instances import constant_instance, transport_instance

# No drift and unit gain: the value is 1/lambda = 1 everywhere.
problem, grid = constant_instance()
res = solve_fixed_point(problem, grid, SolverConfig(dt=0.01, tol=1e-8))
print("constant instance")
print("  iterations:", res.iterations)
print("  max |V - 1|:", np.max(np.abs(res.value.flat - 1.0)))

# b(x) = -x and f(x) = x on [0, 2].  Along a path x e^{-t}, so
# V(x) = int x e^{-t} e^{-t} dt = x / 2.
problem, grid = transport_instance()
res = solve_fixed_point(problem, grid, SolverConfig(dt=0.005, tol=1e-8))
rep = residual_report(problem, res.value, dt=res.dt)
x = grid.nodes()[:, 0]
err = np.abs(res.value.flat - x / 2)

print("transport instance")
print("  interior nodes:", rep.interior.sum(), "of", grid.size)
print("  max interior error:", err[rep.interior].max())
# clamping at x = 2 bends the solution near the upper face
print("  max error anywhere:", err.max())

for xi in (0.5, 1.0, 1.5):
    print(f"  V({xi}) = {res.value([xi]):.5f}   exact {xi / 2:.5f}")
