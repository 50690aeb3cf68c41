"""Command-line front end: ``cutfeas solve|bench|gen``.

Exit codes: 0 converged, 1 usage or input error, 2 iteration limit reached,
3 stalled.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .cyclic import StepPolicy
from .operators import UsageError, as_vector
from .problems_io import (
    KINDS,
    GeneratorSpec,
    ParseError,
    ValidationError,
    generate,
    load_problem,
    serialize_problem,
)
from .solver import SolveConfig, Status, solve, write_trace_csv

EXIT_OK, EXIT_USAGE, EXIT_MAX_ITERS, EXIT_STALLED = 0, 1, 2, 3

_STATUS_EXIT = {
    Status.CONVERGED: EXIT_OK,
    Status.MAX_ITERS: EXIT_MAX_ITERS,
    Status.STALLED: EXIT_STALLED,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cutfeas", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def solver_flags(p):
        p.add_argument("--policy", default="sigma-max", type=StepPolicy.parse,
                       help="unit | sigma-max | sigma-specialized | clamped:<alpha> | floored")
        p.add_argument("--lambda", dest="lam", type=float, default=1.0)
        p.add_argument("--epsilon", type=float, default=1e-2)
        p.add_argument("--tol", type=float, default=1e-8)
        p.add_argument("--max-iters", type=int, default=10000)
        p.add_argument("--trace", metavar="PATH")
        p.add_argument("--use-witness", action="store_true",
                       help="use the file's witness as reference point")
        p.add_argument("--x0", default="zeros",
                       help="'zeros', 'witness', or comma-separated coordinates")

    def gen_flags(p, required):
        p.add_argument("--seed", type=int, required=required)
        p.add_argument("--dim", type=int, required=required)
        p.add_argument("--m", type=int, required=required)
        p.add_argument("--kind", choices=KINDS, default="eq")
        p.add_argument("--conditioning", type=float, default=0.0)

    p = sub.add_parser("solve", help="solve a problem file")
    p.add_argument("--problem", required=True, metavar="PATH")
    solver_flags(p)

    p = sub.add_parser("bench", help="compare step policies on one problem")
    p.add_argument("--problem", metavar="PATH")
    solver_flags(p)
    gen_flags(p, required=False)

    p = sub.add_parser("gen", help="write a seeded random problem")
    gen_flags(p, required=True)
    p.add_argument("--out", metavar="PATH")
    return parser


def _start(args, problem) -> np.ndarray:
    if args.x0 == "zeros":
        return np.zeros(problem.dim)
    if args.x0 == "witness":
        if problem.witness is None:
            raise UsageError("--x0 witness needs a witness line in the problem")
        return problem.witness.copy()
    try:
        coords = [float(v) for v in args.x0.split(",")]
    except ValueError:
        raise UsageError(f"bad --x0 {args.x0!r}") from None
    return as_vector(coords, problem.dim, "x0")


def _reference(args, problem):
    if not args.use_witness:
        return None
    if problem.witness is None:
        raise UsageError("--use-witness needs a witness line in the problem")
    return problem.witness


def _config(args, policy=None) -> SolveConfig:
    return SolveConfig(
        lambda_schedule=args.lam,
        epsilon=args.epsilon,
        policy=args.policy if policy is None else policy,
        tol_residual=args.tol,
        max_iters=args.max_iters,
    )


def run_solve(args, out=None) -> int:
    out = out or sys.stdout
    problem = load_problem(args.problem)
    result = solve(problem.operator(), _start(args, problem), _config(args),
                   z_ref=_reference(args, problem))
    if args.trace:
        write_trace_csv(result.trace, args.trace)
    point = " ".join(f"{v:.17g}" for v in result.final_point)
    print(f"status: {result.status.value}", file=out)
    print(f"iterations: {result.iterations}", file=out)
    print(f"residual: {result.residual:.6e}", file=out)
    print(f"point: {point}", file=out)
    return _STATUS_EXIT[result.status]


def bench_policies(problem) -> list[StepPolicy]:
    policies = [StepPolicy.unit(), StepPolicy.sigma_max(), StepPolicy.floored()]
    if problem.operator().homogeneous_kind() is not None:
        policies.append(StepPolicy.specialized())
    return policies


def run_bench(args, out=None) -> int:
    out = out or sys.stdout
    if args.problem:
        problem = load_problem(args.problem)
    else:
        if None in (args.seed, args.dim, args.m):
            raise UsageError("bench needs --problem or all of --seed, --dim, --m")
        problem = generate(GeneratorSpec(args.seed, args.dim, args.m, args.kind,
                                         args.conditioning))
    x0 = _start(args, problem)
    z_ref = _reference(args, problem)
    op = problem.operator()
    results = [(pol, solve(op, x0, _config(args, pol), z_ref=z_ref))
               for pol in bench_policies(problem)]

    print(f"{'policy':<18} {'status':<10} {'iters':>7} {'residual':>12} {'op_apps':>9}", file=out)
    for pol, res in results:
        print(f"{str(pol):<18} {res.status.value:<10} {res.iterations:>7d} "
              f"{res.residual:>12.4e} {res.operator_applications:>9d}", file=out)
        if args.trace:
            root, ext = os.path.splitext(args.trace)
            write_trace_csv(res.trace, f"{root}.{str(pol).replace(':', '_')}{ext or '.csv'}")
    return max(_STATUS_EXIT[res.status] for _, res in results)


def run_gen(args, out=None) -> int:
    out = out or sys.stdout
    text = serialize_problem(generate(GeneratorSpec(args.seed, args.dim, args.m, args.kind,
                                                    args.conditioning)))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        handler = {"solve": run_solve, "bench": run_bench, "gen": run_gen}[args.command]
        return handler(args)
    except (UsageError, ParseError, ValidationError, OSError) as exc:
        print(f"cutfeas: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
