"""Two lines through the origin, solved by hand and by the library.

The constraints are x1 = 0 and x1 - x2 = 0; the only common point is the
origin. Starting from (2, 1), one cyclic sweep of orthogonal projections
lands on (0.5, 0.5). The extrapolated step stretches that displacement by
sigma = 1.4 and lands much closer to the origin.
"""

import numpy as np

from cutfeas import CyclicOperator, Hyperplane, SolveConfig, StepPolicy, solve, sweep
from cutfeas import sigma_max_generic

U = CyclicOperator([Hyperplane([1, 0], 0), Hyperplane([1, -1], 0)])
x0 = np.array([2.0, 1.0])

# One sweep, stage by stage.
tr = sweep(U, x0)
for i, (p, y) in enumerate(zip(tr.points[1:], tr.increments), start=1):
    print(f"stage {i}: point {p}, increment {y}")
print(f"Ux - x = {tr.displacement}, |Ux - x|^2 = {tr.displacement_sq:g}")
print(f"sum of squared increments = {tr.increment_sq_sum:g}")

# sigma = (|d|^2 + sum |y|^2) / (2 |d|^2) = (2.5 + 4.5) / 5
sigma = sigma_max_generic(tr)
x1 = x0 + sigma * tr.displacement
print(f"sigma = {sigma:g}, next iterate = {x1}, distance to origin = {np.linalg.norm(x1):.8f}")

# The plain cyclic method only reaches |Ux| = 0.7071 after the same sweep.
print(f"plain sweep distance = {np.linalg.norm(tr.image):.8f}")

# Full runs: the extrapolated method against the plain one.
for policy in (StepPolicy.unit(), StepPolicy.sigma_max()):
    res = solve(U, x0, SolveConfig(1.0, policy=policy), z_ref=[0, 0])
    print(f"{str(policy):>10}: {res.status.value} after {res.iterations} iterations")
