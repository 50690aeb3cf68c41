"""Iteration driver for ``x^{k+1} = x^k + lam_k * sigma(x^k) * (Ux^k - x^k)``."""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .cyclic import FIX_TOL, CyclicOperator, StepPolicy, apply_policy, sweep
from .operators import UsageError, as_vector, generalized_relaxation

__all__ = [
    "Status",
    "SolveConfig",
    "IterationRecord",
    "SolveResult",
    "lambda_at",
    "solve",
    "fejer_certificate",
    "write_trace_csv",
    "TRACE_HEADER",
]

TRACE_HEADER = ("iter", "residual", "sigma", "lambda", "dist_to_ref", "stage_sq_sum")


class Status(enum.Enum):
    CONVERGED = "converged"
    MAX_ITERS = "max_iters"
    STALLED = "stalled"


@dataclass(frozen=True)
class SolveConfig:
    """Solver settings.

    ``lambda_schedule`` is a constant or a sequence cycled over iterations.
    Every relaxation parameter must lie in ``[epsilon, 2 - epsilon]``;
    :func:`solve` rejects a schedule that leaves the band.
    """

    lambda_schedule: float | Sequence[float] = 1.0
    epsilon: float = 1e-2
    policy: StepPolicy = field(default_factory=StepPolicy.sigma_max)
    tol_residual: float = 1e-8
    max_iters: int = 10000
    fix_tol: float = FIX_TOL
    stall_window: int = 50

    def lambdas(self) -> tuple[float, ...]:
        if np.isscalar(self.lambda_schedule):
            return (float(self.lambda_schedule),)
        return tuple(float(v) for v in self.lambda_schedule)

    def validate(self) -> None:
        if not 0.0 < self.epsilon < 1.0:
            raise UsageError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        lams = self.lambdas()
        if not lams:
            raise UsageError("empty lambda schedule")
        lo, hi = self.epsilon, 2.0 - self.epsilon
        bad = [v for v in lams if not lo <= v <= hi]
        if bad:
            raise UsageError(f"relaxation parameters {bad} outside [{lo:g}, {hi:g}]")
        if self.tol_residual < 0.0:
            raise UsageError("tol_residual must be non-negative")
        if int(self.max_iters) < 0:
            raise UsageError("max_iters must be non-negative")
        if int(self.stall_window) < 1:
            raise UsageError("stall_window must be positive")


def lambda_at(cfg: SolveConfig, k: int) -> float:
    """Relaxation parameter for iteration ``k``, clamped into ``[eps, 2 - eps]``."""
    lams = cfg.lambdas()
    lam = lams[k % len(lams)]
    return min(max(lam, cfg.epsilon), 2.0 - cfg.epsilon)


@dataclass(frozen=True)
class IterationRecord:
    """Diagnostics at ``x^k`` (before the step to ``x^{k+1}``)."""

    k: int
    residual: float
    sigma: float
    lam: float
    dist_to_ref: float | None
    stage_sq_sum: float


@dataclass(frozen=True, eq=False)
class SolveResult:
    final_point: np.ndarray
    status: Status
    trace: list
    sweeps: int
    m: int
    iterates: np.ndarray | None = None

    @property
    def iterations(self) -> int:
        """Number of steps taken."""
        return len(self.trace) - 1

    @property
    def residual(self) -> float:
        return self.trace[-1].residual

    @property
    def operator_applications(self) -> int:
        return self.sweeps * self.m


def solve(U: CyclicOperator, x0, cfg: SolveConfig | None = None, z_ref=None,
          keep_iterates: bool = False) -> SolveResult:
    """Run the extrapolated cyclic method from ``x0``.

    Stops when ``||Ux^k - x^k|| <= cfg.tol_residual`` (converged), after
    ``cfg.max_iters`` steps, or when ``cfg.stall_window`` consecutive steps
    fail to move the iterate by more than a few ulps (stalled).

    Parameters
    ----------
    z_ref : array_like, optional
        A known common point; enables ``dist_to_ref`` in the records.
    keep_iterates : bool
        Store every ``x^k`` in ``SolveResult.iterates``.
    """
    cfg = SolveConfig() if cfg is None else cfg
    cfg.validate()
    x = as_vector(x0, U.dim, "x0").copy()
    if z_ref is not None:
        z_ref = as_vector(z_ref, U.dim, "z_ref")
        if not U.contains(z_ref):
            raise UsageError("z_ref is not a common fixed point of the cutters")

    records = []
    iterates = [x.copy()] if keep_iterates else None
    still = 0
    status = Status.MAX_ITERS
    eps = np.finfo(np.float64).eps
    k = 0
    while True:
        trace = sweep(U, x)
        residual = float(np.sqrt(trace.displacement_sq))
        lam = lambda_at(cfg, k)
        sigma = apply_policy(cfg.policy, trace, cfg.fix_tol)
        dist = None if z_ref is None else float(np.linalg.norm(x - z_ref))
        records.append(IterationRecord(k, residual, sigma, lam, dist, trace.increment_sq_sum))
        # a violated stage with a zero subgradient also yields a zero residual
        if residual <= cfg.tol_residual and not trace.stalled_stages:
            status = Status.CONVERGED
            break
        if k >= cfg.max_iters:
            status = Status.MAX_ITERS
            break
        # sigma is 1 at (near-)fixed points, so this reduces to a plain relaxed sweep
        x_next = generalized_relaxation(lambda _: trace.image, sigma, lam, x)
        if np.linalg.norm(x_next - x) <= 4 * eps * (1.0 + np.linalg.norm(x)):
            still += 1
            if still >= cfg.stall_window:
                status = Status.STALLED
                break
        else:
            still = 0
        x = x_next
        k += 1
        if keep_iterates:
            iterates.append(x.copy())

    return SolveResult(
        final_point=x,
        status=status,
        trace=records,
        sweeps=len(records),
        m=U.m,
        iterates=None if iterates is None else np.array(iterates),
    )


def fejer_certificate(prev: IterationRecord, nxt: IterationRecord,
                      sigma: float | None = None, lam: float | None = None) -> float:
    """Slack in the per-step decrease of the squared distance to the reference.

    ``||x^k - z||^2 - ||x^{k+1} - z||^2 - lam (2 - lam) sigma^2 ||Ux^k - x^k||^2``,
    which is non-negative whenever ``x + sigma (Ux - x)`` is a cutter step.
    ``sigma`` and ``lam`` default to the values stored in ``prev``.
    """
    if prev.dist_to_ref is None or nxt.dist_to_ref is None:
        raise UsageError("the certificate needs dist_to_ref on both records")
    sigma = prev.sigma if sigma is None else sigma
    lam = prev.lam if lam is None else lam
    return (prev.dist_to_ref ** 2 - nxt.dist_to_ref ** 2
            - lam * (2.0 - lam) * sigma ** 2 * prev.residual ** 2)


def write_trace_csv(records, path_or_file) -> None:
    """Write one CSV row per record; ``dist_to_ref`` is blank without a reference."""
    def rows():
        for r in records:
            yield (r.k, repr(r.residual), repr(r.sigma), repr(r.lam),
                   "" if r.dist_to_ref is None else repr(r.dist_to_ref),
                   repr(r.stage_sq_sum))

    if hasattr(path_or_file, "write"):
        w = csv.writer(path_or_file, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        w.writerows(rows())
        return
    with open(path_or_file, "w", newline="", encoding="utf-8") as fh:
        write_trace_csv(records, fh)
