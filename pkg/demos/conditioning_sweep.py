"""How extrapolation pays off as the rows of a linear system line up.

Generated equation systems blend their rows toward a shared direction as
the conditioning knob goes from 0 to 1. With orthogonal rows one sweep of
projections already solves the system; with nearly parallel rows the plain
cyclic method crawls, and the extrapolated step recovers most of the loss.
"""

import numpy as np

from cutfeas import GeneratorSpec, SolveConfig, StepPolicy, generate, solve

policies = [StepPolicy.unit(), StepPolicy.sigma_max(), StepPolicy.clamped(0.5)]
print(f"{'cond':>6} " + " ".join(f"{str(p):>12}" for p in policies))

for cond in (0.0, 0.3, 0.6, 0.9, 0.97):
    counts = {str(p): [] for p in policies}
    for seed in range(20):
        problem = generate(GeneratorSpec(seed, dim=10, m=6, kind="eq", conditioning=cond))
        x0 = np.random.default_rng(seed).uniform(-3, 3, problem.dim)
        for p in policies:
            res = solve(problem.operator(), x0, SolveConfig(1.0, policy=p, max_iters=20000))
            counts[str(p)].append(res.iterations)
    print(f"{cond:>6.2f} " + " ".join(f"{np.median(c):>12.0f}" for c in counts.values()))

print("(median iterations to residual 1e-8 over 20 seeded systems)")
