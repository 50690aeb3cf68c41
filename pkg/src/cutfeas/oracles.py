"""Brute-force reference computations for the test suite.

Nothing here shares code paths with the production step sizes or
projections; everything is recomputed from fresh operator applications or
from a generic linear-algebra routine.  Speed is not a goal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cyclic import CyclicOperator, FIX_TOL, SweepTrace
from .operators import HalfSpace, Hyperplane, UsageError, as_vector

__all__ = [
    "LineSearchResult",
    "line_search_oracle",
    "projection_oracle",
    "sigma_bruteforce",
    "sigma_partial_sums",
    "sigma_tail_sums",
]

GRID = np.linspace(-1.0, 4.0, 10_001)


class OracleMismatch(AssertionError):
    pass


@dataclass(frozen=True)
class LineSearchResult:
    alpha_star: float
    min_dist: float


def line_search_oracle(x, d, z) -> LineSearchResult:
    """Minimize ``alpha -> ||x + alpha d - z||`` over the reals.

    The closed form ``<z - x, d> / ||d||^2`` is checked against a grid of
    10^4 samples on [-1, 4]: no sample may beat the closed-form minimum, and
    when the minimizer lies inside the grid the best sample must be within
    one grid step of it.
    """
    x, d, z = as_vector(x), as_vector(d, name="d"), as_vector(z, name="z")
    dsq = float(d @ d)
    if dsq == 0.0:
        raise UsageError("zero search direction")
    alpha = float((z - x) @ d) / dsq
    best = float(np.linalg.norm(x + alpha * d - z))

    dists = np.linalg.norm(x[None, :] + GRID[:, None] * d[None, :] - z[None, :], axis=1)
    j = int(np.argmin(dists))
    h = GRID[1] - GRID[0]
    if dists[j] < best - 1e-12 * (1.0 + best):
        raise OracleMismatch(f"grid sample {GRID[j]} beats closed form {alpha}")
    if GRID[0] <= alpha <= GRID[-1] and abs(GRID[j] - alpha) > h:
        raise OracleMismatch(f"grid minimizer {GRID[j]} far from closed form {alpha}")
    return LineSearchResult(alpha, best)


def _least_norm_shift(a: np.ndarray, rhs: float) -> np.ndarray:
    # Minimum-norm solution of <a, s> = rhs through LAPACK least squares.
    s, *_ = np.linalg.lstsq(a[None, :], np.array([rhs]), rcond=None)
    return s


def projection_oracle(constraint, x) -> np.ndarray:
    """Projection onto a hyperplane or half-space via a least-norm solve."""
    x = as_vector(x, constraint.dim)
    if isinstance(constraint, Hyperplane):
        return x + _least_norm_shift(constraint.a, constraint.b - float(constraint.a @ x))
    if isinstance(constraint, HalfSpace):
        # KKT: either x is feasible, or the projection lies on the boundary.
        if float(constraint.a @ x) <= constraint.b:
            return x.copy()
        return x + _least_norm_shift(constraint.a, constraint.b - float(constraint.a @ x))
    raise UsageError(f"no projection oracle for {type(constraint).__name__}")


def _partial(U: CyclicOperator, x: np.ndarray, i: int) -> np.ndarray:
    u = x.copy()
    for op in U.ops[:i]:
        u = op(u)
    return u


def sigma_bruteforce(U: CyclicOperator, x, fix_tol: float = FIX_TOL) -> float:
    """``sum_i <Ux - S_{i-1}x, S_i x - S_{i-1}x> / ||Ux - x||^2``.

    Every partial composition ``S_i x`` is recomputed from ``x``.
    """
    x = as_vector(x, U.dim)
    ux = _partial(U, x, U.m)
    d = ux - x
    dsq = float(d @ d)
    if dsq == 0.0 or np.sqrt(dsq) <= fix_tol * (1.0 + np.linalg.norm(x)):
        raise UsageError("x is a fixed point of U")
    total = 0.0
    for i in range(1, U.m + 1):
        prev = _partial(U, x, i - 1)
        cur = _partial(U, x, i)
        total += float((ux - prev) @ (cur - prev))
    return total / dsq


def sigma_partial_sums(trace: SweepTrace) -> float:
    """``sum_i <S_i x - x, S_i x - S_{i-1} x> / ||Ux - x||^2`` from a trace."""
    x = trace.x
    total = sum(float((trace.points[i] - x) @ trace.increments[i - 1])
                for i in range(1, trace.m + 1))
    return total / trace.displacement_sq


def sigma_tail_sums(trace: SweepTrace) -> float:
    """``sum_i <y^i + ... + y^m, y^i> / ||Ux - x||^2`` from a trace."""
    y = trace.increments
    total = sum(float(y[i:].sum(axis=0) @ y[i]) for i in range(trace.m))
    return total / trace.displacement_sq
