"""A mixed feasibility problem written in the text format and solved from Python.

Two discs and a half-plane share a small lens-shaped region. The discs are
handled by subgradient projectors, which only move to the linearisation of
the constraint. The step sizes chosen along the way can fall below 1 here:
when the stage increments point the same way, the sweep has already
overshot what a single cutter step would justify. The distance to the
witness never grows, whatever the policy.
"""

import io

from cutfeas import SolveConfig, StepPolicy, parse_problem, solve, write_trace_csv

TEXT = """\
dim 2
ball 0 0 1.5      # |x|^2 <= 1.5^2
ball 2 0 1.5      # |x - (2, 0)|^2 <= 1.5^2
ineq 0 1 0.2      # x2 <= 0.2
witness 1 0
"""

problem = parse_problem(TEXT)
print(f"{problem.m} constraints of kind {problem.kind!r} in dimension {problem.dim}")

for policy in (StepPolicy.unit(), StepPolicy.sigma_max(), StepPolicy.floored()):
    res = solve(problem.operator(), [1.0, 4.0], SolveConfig(1.0, policy=policy),
                z_ref=problem.witness)
    d = [r.dist_to_ref for r in res.trace]
    monotone = all(b <= a + 1e-12 for a, b in zip(d, d[1:]))
    print(f"{str(policy):>10}: {res.status.value}, {res.iterations} iterations, "
          f"point {res.final_point.round(6)}, distance to witness non-increasing: {monotone}")

# The first few trace rows of the last run, as written by `cutfeas solve --trace`.
buf = io.StringIO()
write_trace_csv(res.trace[:4], buf)
print(buf.getvalue())
