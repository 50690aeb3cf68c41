"""Cyclic compositions of cutters and extrapolated step sizes.

For cutters ``U_1, ..., U_m`` the cyclic operator is ``U = U_m ... U_1``.
One application of ``U`` is a *sweep*: ``u^0 = x``, ``u^i = U_i u^{i-1}``,
with increments ``y^i = u^i - u^{i-1}``.  The largest certified step along
``Ux - x`` is

.. math::

    \\sigma_{\\max}(x) = \\frac{\\|Ux - x\\|^2 + \\sum_i \\|y^i\\|^2}
                              {2 \\|Ux - x\\|^2},

and ``x + sigma_max(x) * (Ux - x)`` is again a cutter.  For hyperplanes the
extrapolated point is the point on the line through ``x`` and ``Ux`` closest
to every solution.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .operators import (
    HalfSpace,
    Hyperplane,
    SubgradientProjector,
    UsageError,
    _halfspace_step,
    _hyperplane_step,
    _subgradient_step,
    as_vector,
    generalized_relaxation,
)

__all__ = [
    "FIX_TOL",
    "CyclicOperator",
    "SweepTrace",
    "StepPolicy",
    "sweep",
    "sigma_max_generic",
    "sigma_kaczmarz",
    "sigma_halfspace",
    "sigma_subgrad",
    "sigma_specialized",
    "floored_sigma",
    "apply_policy",
    "extrapolated_step",
]

#: ``||Ux - x|| <= FIX_TOL * (1 + ||x||)`` counts as a fixed point.
FIX_TOL = 1e-13


class CyclicOperator:
    """The composition ``U_m ... U_1`` of a fixed ordered list of cutters."""

    def __init__(self, ops):
        ops = tuple(ops)
        if not ops:
            raise UsageError("a cyclic operator needs at least one cutter")
        dims = {op.dim for op in ops}
        if len(dims) != 1:
            raise UsageError(f"cutters disagree on dimension: {sorted(dims)}")
        self.ops = ops
        self.dim = dims.pop()

    @property
    def m(self) -> int:
        return len(self.ops)

    def __len__(self):
        return len(self.ops)

    def __call__(self, x) -> np.ndarray:
        u = as_vector(x, self.dim)
        for op in self.ops:
            u = op(u)
        return u

    def sweep(self, x) -> "SweepTrace":
        return sweep(self, x)

    def contains(self, q) -> bool:
        """True if ``q`` passes every constituent membership test."""
        return all(op.contains(q) for op in self.ops)

    def homogeneous_kind(self) -> str | None:
        """``'hyperplane'``, ``'halfspace'``, ``'subgradient'`` or None if mixed."""
        kinds = {_stage_kind(op) for op in self.ops}
        if len(kinds) == 1:
            kind = kinds.pop()
            return None if kind == "custom" else kind
        return None


def _stage_kind(op) -> str:
    if isinstance(op, Hyperplane):
        return "hyperplane"
    if isinstance(op, HalfSpace):
        return "halfspace"
    if isinstance(op, SubgradientProjector):
        return "subgradient"
    return "custom"


@dataclass(frozen=True, eq=False)
class SweepTrace:
    """Record of one pass ``u^0, ..., u^m`` of a cyclic operator.

    Attributes
    ----------
    points : ndarray, shape (m + 1, n)
        ``u^0 = x`` through ``u^m = Ux``.
    increments : ndarray, shape (m, n)
        ``y^i = u^i - u^{i-1}``.
    residuals : ndarray, shape (m,)
        ``<a^i, u^{i-1}> - b_i`` for linear stages, ``c_i(u^{i-1})`` for
        subgradient stages, NaN for custom cutters.
    normsq : ndarray, shape (m,)
        ``||a^i||^2`` or ``||g_i(u^{i-1})||^2``; NaN for custom cutters.
    directions : ndarray, shape (m, n)
        ``a^i`` or ``g_i(u^{i-1})``; NaN rows for custom cutters.
    kinds : tuple of str
        Stage kinds, see :meth:`CyclicOperator.homogeneous_kind`.
    stalled_stages : tuple of int
        Subgradient stages with ``c > 0`` but a zero subgradient.
    """

    points: np.ndarray
    increments: np.ndarray
    residuals: np.ndarray
    normsq: np.ndarray
    directions: np.ndarray
    kinds: tuple
    ops: tuple = field(repr=False)
    stalled_stages: tuple = ()

    @property
    def m(self) -> int:
        return len(self.kinds)

    @property
    def x(self) -> np.ndarray:
        return self.points[0]

    @property
    def image(self) -> np.ndarray:
        """``Ux``."""
        return self.points[-1]

    @property
    def displacement(self) -> np.ndarray:
        """``Ux - x``."""
        return self.points[-1] - self.points[0]

    @property
    def displacement_sq(self) -> float:
        d = self.displacement
        return float(d @ d)

    @property
    def increment_sq_sum(self) -> float:
        """``sum_i ||y^i||^2``."""
        return float(np.einsum("ij,ij->", self.increments, self.increments))

    def is_fixed(self, fix_tol: float = FIX_TOL) -> bool:
        return np.sqrt(self.displacement_sq) <= fix_tol * (1.0 + np.linalg.norm(self.x))


def sweep(U: CyclicOperator, x) -> SweepTrace:
    """Apply ``U`` stage by stage and record every intermediate point."""
    x = as_vector(x, U.dim)
    m, n = U.m, U.dim
    points = np.empty((m + 1, n))
    residuals = np.full(m, np.nan)
    normsq = np.full(m, np.nan)
    directions = np.full((m, n), np.nan)
    kinds = []
    stalled = []
    points[0] = x
    u = x
    for i, op in enumerate(U.ops):
        kind = _stage_kind(op)
        if kind == "hyperplane":
            u, residuals[i] = _hyperplane_step(op, u)
            normsq[i], directions[i] = op.normsq, op.a
        elif kind == "halfspace":
            u, residuals[i] = _halfspace_step(op, u)
            normsq[i], directions[i] = op.normsq, op.a
        elif kind == "subgradient":
            u, c, g, gsq = _subgradient_step(op.f, u)
            residuals[i], normsq[i], directions[i] = c, gsq, g
            if c > 0.0 and gsq == 0.0:
                stalled.append(i)
        else:
            u = op(u)
        kinds.append(kind)
        points[i + 1] = u
    return SweepTrace(
        points=points,
        increments=np.diff(points, axis=0),
        residuals=residuals,
        normsq=normsq,
        directions=directions,
        kinds=tuple(kinds),
        ops=U.ops,
        stalled_stages=tuple(stalled),
    )


def _require_moving(trace: SweepTrace, fix_tol: float) -> float:
    dsq = trace.displacement_sq
    if dsq == 0.0 or trace.is_fixed(fix_tol):
        raise UsageError("x is a fixed point of U; the step size is defined as 1 there")
    return dsq


def sigma_max_generic(trace: SweepTrace, fix_tol: float = FIX_TOL) -> float:
    """``(||Ux - x||^2 + sum ||y^i||^2) / (2 ||Ux - x||^2)``.

    Raises
    ------
    UsageError
        If ``x`` is (numerically) fixed; callers branch to ``sigma = 1`` first.
    """
    dsq = _require_moving(trace, fix_tol)
    return (dsq + trace.increment_sq_sum) / (2.0 * dsq)


def _check_stages(trace: SweepTrace, kind: str, ops) -> tuple:
    if ops is None:
        ops = trace.ops
    ops = tuple(ops)
    if len(ops) != trace.m:
        raise UsageError(f"expected {trace.m} constraints, got {len(ops)}")
    if any(k != kind for k in trace.kinds) or any(_stage_kind(op) != kind for op in ops):
        raise UsageError(f"every stage must be a {kind} projection")
    return ops


def sigma_kaczmarz(trace: SweepTrace, rows=None, fix_tol: float = FIX_TOL) -> float:
    """Step size for a sweep of hyperplane projections.

    ``sum_i (b_i - <a^i, x>)(b_i - <a^i, u^{i-1}>) / ||a^i||^2``, divided by
    ``||Ux - x||^2``.  Equal to :func:`sigma_max_generic` in exact arithmetic.
    """
    rows = _check_stages(trace, "hyperplane", rows)
    dsq = _require_moving(trace, fix_tol)
    x = trace.x
    total = 0.0
    for h, r_prev in zip(rows, trace.residuals):
        total += h.residual(x) * r_prev / h.normsq
    return total / dsq


def sigma_halfspace(trace: SweepTrace, rows=None, fix_tol: float = FIX_TOL) -> float:
    """Step size for a sweep of half-space projections.

    ``sum_i (<a^i, x> - b_i)(<a^i, u^{i-1}> - b_i)_+ / ||a^i||^2``, divided by
    ``||Ux - x||^2``.  Inactive stages contribute nothing.
    """
    rows = _check_stages(trace, "halfspace", rows)
    dsq = _require_moving(trace, fix_tol)
    x = trace.x
    total = 0.0
    for h, r_prev in zip(rows, trace.residuals):
        if r_prev > 0.0:
            total += h.residual(x) * r_prev / h.normsq
    return total / dsq


def sigma_subgrad(trace: SweepTrace, fns=None, fix_tol: float = FIX_TOL) -> float:
    """Step size for a sweep of subgradient projections.

    ``-sum_i c_i(u^{i-1})_+ / ||g_i||^2 * <u^i - x, g_i>``, divided by
    ``||Ux - x||^2``, with ``g_i = g_i(u^{i-1})``.  Stages with a zero
    subgradient contribute nothing.
    """
    _check_stages(trace, "subgradient",
                  None if fns is None else [SubgradientProjector(f) for f in fns])
    dsq = _require_moving(trace, fix_tol)
    x = trace.x
    total = 0.0
    for i in range(trace.m):
        c, gsq = trace.residuals[i], trace.normsq[i]
        if c <= 0.0 or gsq == 0.0:
            continue
        g = trace.directions[i]
        total -= (c / gsq) * float((trace.points[i + 1] - x) @ g)
    return total / dsq


def sigma_specialized(trace: SweepTrace, fix_tol: float = FIX_TOL) -> float:
    """Dispatch to the closed form matching a homogeneous sweep."""
    kinds = set(trace.kinds)
    if kinds == {"hyperplane"}:
        return sigma_kaczmarz(trace, fix_tol=fix_tol)
    if kinds == {"halfspace"}:
        return sigma_halfspace(trace, fix_tol=fix_tol)
    if kinds == {"subgradient"}:
        return sigma_subgrad(trace, fix_tol=fix_tol)
    raise UsageError("specialized step size needs a homogeneous list of "
                     f"hyperplanes, half-spaces or subgradient projectors, got {sorted(kinds)}")


def floored_sigma(sigma_max: float, m: int) -> float:
    """``max((m + 1) / (2m), sigma_max)``."""
    return max((m + 1) / (2 * m), sigma_max)


@dataclass(frozen=True)
class StepPolicy:
    """Which step-size function to use.

    ``kind`` is one of ``unit``, ``sigma-max``, ``sigma-specialized``,
    ``clamped`` (needs ``alpha`` in (0, 1/2]) or ``floored``.
    """

    kind: str = "sigma-max"
    alpha: float | None = None

    KINDS = ("unit", "sigma-max", "sigma-specialized", "clamped", "floored")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise UsageError(f"unknown step policy {self.kind!r}")
        if self.kind == "clamped":
            if self.alpha is None or not 0.0 < self.alpha <= 0.5:
                raise UsageError(f"clamped policy needs alpha in (0, 1/2], got {self.alpha}")
        elif self.alpha is not None:
            raise UsageError(f"{self.kind} policy takes no alpha")

    @classmethod
    def unit(cls):
        return cls("unit")

    @classmethod
    def sigma_max(cls):
        return cls("sigma-max")

    @classmethod
    def specialized(cls):
        return cls("sigma-specialized")

    @classmethod
    def clamped(cls, alpha: float):
        return cls("clamped", float(alpha))

    @classmethod
    def floored(cls):
        return cls("floored")

    @classmethod
    def parse(cls, text: str) -> "StepPolicy":
        """Parse ``unit``, ``sigma-max``, ``clamped:0.3`` and so on."""
        name, sep, arg = text.strip().partition(":")
        if name == "clamped":
            try:
                return cls.clamped(float(arg))
            except ValueError:
                raise UsageError(f"bad clamped policy {text!r}; use clamped:<alpha>") from None
        if sep:
            raise UsageError(f"policy {name!r} takes no argument")
        return cls(name)

    def __str__(self):
        return f"clamped:{self.alpha:g}" if self.kind == "clamped" else self.kind


def apply_policy(policy: StepPolicy, trace: SweepTrace, fix_tol: float = FIX_TOL) -> float:
    """Step size chosen by ``policy`` for the sweep ``trace``; 1 at fixed points."""
    if policy.kind == "sigma-specialized" and _kind_or_none(trace) is None:
        raise UsageError("specialized step size needs a homogeneous operator list")
    if trace.is_fixed(fix_tol) or trace.displacement_sq == 0.0:
        return 1.0
    kind = policy.kind
    if kind == "unit":
        return 1.0
    if kind == "sigma-max":
        return sigma_max_generic(trace, fix_tol)
    if kind == "sigma-specialized":
        return sigma_specialized(trace, fix_tol)
    if kind == "clamped":
        return policy.alpha * trace.increment_sq_sum / trace.displacement_sq
    return floored_sigma(sigma_max_generic(trace, fix_tol), trace.m)


def _kind_or_none(trace: SweepTrace):
    kinds = set(trace.kinds)
    if len(kinds) == 1 and "custom" not in kinds:
        return kinds.pop()
    return None


def extrapolated_step(U: CyclicOperator, policy: StepPolicy, lam: float, x,
                      fix_tol: float = FIX_TOL):
    """One step ``x + lam * sigma(x) * (Ux - x)``.

    Returns
    -------
    x_next : ndarray
    trace : SweepTrace
        The sweep from ``x``.
    sigma : float
        The step size used; 1 when ``x`` is fixed, and then ``x_next`` is ``x``.
    """
    if not 0.0 < lam < 2.0:
        raise UsageError(f"relaxation parameter must lie in (0, 2), got {lam}")
    trace = sweep(U, x)
    sigma = apply_policy(policy, trace, fix_tol)
    if trace.is_fixed(fix_tol):
        return trace.x.copy(), trace, 1.0
    x_next = generalized_relaxation(lambda _: trace.image, sigma, lam, trace.x)
    return x_next, trace, sigma
