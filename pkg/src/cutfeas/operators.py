"""Cutter operators on R^n and their relaxations.

A cutter ``T`` satisfies, for every ``x`` and every fixed point ``q``,

.. math:: \\langle Tx - x, q - x \\rangle \\geq \\|Tx - x\\|^2 .

Built-in cutters are the metric projections onto hyperplanes and half-spaces
and the subgradient projector of a convex functional.  Each built-in carries
an exact membership test for its fixed-point set, so the defining inequality
can be checked at runtime with :func:`cutter_gap`.

All operator objects are immutable after construction; applying them is a
pure function of the input point.
"""

from __future__ import annotations

from typing import Callable, Union

import numpy as np

__all__ = [
    "UsageError",
    "as_vector",
    "Hyperplane",
    "HalfSpace",
    "ConvexFunctional",
    "AffineFunctional",
    "BallFunctional",
    "SubgradientProjector",
    "CustomCutter",
    "CutterSpec",
    "project_hyperplane",
    "project_halfspace",
    "subgradient_project",
    "relax",
    "generalized_relaxation",
    "cutter_gap",
]


class UsageError(ValueError):
    """Invalid argument: wrong dimension, bad parameter range, bad call order."""


def as_vector(x, dim: int | None = None, name: str = "x") -> np.ndarray:
    """Return ``x`` as a finite 1-D float64 array, optionally of length ``dim``."""
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise UsageError(f"{name} must be a non-empty 1-D vector, got shape {v.shape}")
    if dim is not None and v.size != dim:
        raise UsageError(f"dimension mismatch: {name} has {v.size} coordinates, expected {dim}")
    if not np.all(np.isfinite(v)):
        raise UsageError(f"{name} has non-finite coordinates")
    return v


def _frozen(v: np.ndarray) -> np.ndarray:
    v = np.array(v, dtype=np.float64)
    v.setflags(write=False)
    return v


def _normal(a, name: str = "a") -> tuple[np.ndarray, float]:
    a = _frozen(as_vector(a, name=name))
    normsq = float(a @ a)
    if normsq == 0.0:
        raise UsageError(f"{name} must be a nonzero normal vector")
    return a, normsq


class _LinearConstraint:
    def __init__(self, a, b: float):
        self.a, self.normsq = _normal(a)
        self.b = float(b)
        if not np.isfinite(self.b):
            raise UsageError("b must be finite")

    @property
    def dim(self) -> int:
        return self.a.size

    def residual(self, x: np.ndarray) -> float:
        """``<a, x> - b``."""
        return float(self.a @ x) - self.b

    def __eq__(self, other):
        return (type(other) is type(self) and self.b == other.b
                and np.array_equal(self.a, other.a))

    __hash__ = None

    def __repr__(self):
        return f"{type(self).__name__}(a={self.a.tolist()}, b={self.b!r})"


class Hyperplane(_LinearConstraint):
    """The hyperplane ``{x : <a, x> = b}``."""

    def __call__(self, x) -> np.ndarray:
        return project_hyperplane(self, x)

    def contains(self, q, tol: float = 1e-9) -> bool:
        q = as_vector(q, self.dim, "q")
        return abs(self.residual(q)) <= tol * (1.0 + abs(self.b))


class HalfSpace(_LinearConstraint):
    """The half-space ``{x : <a, x> <= b}``."""

    def __call__(self, x) -> np.ndarray:
        return project_halfspace(self, x)

    def contains(self, q, tol: float = 1e-12) -> bool:
        q = as_vector(q, self.dim, "q")
        return self.residual(q) <= tol


class ConvexFunctional:
    """A convex function ``c`` on R^n together with a subgradient selector.

    Parameters
    ----------
    value : callable
        ``x -> c(x)``.
    subgrad : callable
        ``x -> g(x)``, one element of the subdifferential of ``c`` at ``x``.
    dim : int
        Dimension of the domain.
    """

    def __init__(self, value: Callable[[np.ndarray], float],
                 subgrad: Callable[[np.ndarray], np.ndarray], dim: int):
        if int(dim) < 1:
            raise UsageError("dim must be >= 1")
        self._value = value
        self._subgrad = subgrad
        self.dim = int(dim)

    def __call__(self, x) -> float:
        return float(self._value(x))

    def subgradient(self, x) -> np.ndarray:
        return np.asarray(self._subgrad(x), dtype=np.float64)


class AffineFunctional(ConvexFunctional):
    """``c(x) = <a, x> - b``; its sublevel set is a half-space."""

    def __init__(self, a, b: float):
        self.a, self.normsq = _normal(a)
        self.b = float(b)
        self.dim = self.a.size

    def __call__(self, x) -> float:
        return float(self.a @ x) - self.b

    def subgradient(self, x) -> np.ndarray:
        return self.a

    def __eq__(self, other):
        return (type(other) is type(self) and self.b == other.b
                and np.array_equal(self.a, other.a))

    __hash__ = None

    def __repr__(self):
        return f"AffineFunctional(a={self.a.tolist()}, b={self.b!r})"


class BallFunctional(ConvexFunctional):
    """``c(x) = ||x - center||^2 - radius^2``; its sublevel set is a closed ball."""

    def __init__(self, center, radius: float):
        self.center = _frozen(as_vector(center, name="center"))
        self.radius = float(radius)
        if not (np.isfinite(self.radius) and self.radius >= 0.0):
            raise UsageError("radius must be finite and non-negative")
        self.dim = self.center.size

    def __call__(self, x) -> float:
        d = x - self.center
        return float(d @ d) - self.radius ** 2

    def subgradient(self, x) -> np.ndarray:
        return 2.0 * (x - self.center)

    def __eq__(self, other):
        return (type(other) is type(self) and self.radius == other.radius
                and np.array_equal(self.center, other.center))

    __hash__ = None

    def __repr__(self):
        return f"BallFunctional(center={self.center.tolist()}, radius={self.radius!r})"


class SubgradientProjector:
    """Subgradient projector onto the sublevel set ``{x : c(x) <= 0}``."""

    def __init__(self, f: ConvexFunctional):
        self.f = f

    @property
    def dim(self) -> int:
        return self.f.dim

    def __call__(self, x) -> np.ndarray:
        return subgradient_project(self.f, x)

    def contains(self, q, tol: float = 1e-12) -> bool:
        q = as_vector(q, self.dim, "q")
        return self.f(q) <= tol

    def __eq__(self, other):
        return type(other) is type(self) and self.f == other.f

    __hash__ = None

    def __repr__(self):
        return f"SubgradientProjector({self.f!r})"


class CustomCutter:
    """A user-supplied cutter.

    The caller is responsible for ``project`` actually being a cutter whose
    fixed-point set is described by ``contains``.
    """

    def __init__(self, project: Callable[[np.ndarray], np.ndarray],
                 contains: Callable[[np.ndarray], bool], dim: int):
        if int(dim) < 1:
            raise UsageError("dim must be >= 1")
        self._project = project
        self._contains = contains
        self.dim = int(dim)

    def __call__(self, x) -> np.ndarray:
        x = as_vector(x, self.dim)
        return as_vector(self._project(x), self.dim, "project(x)")

    def contains(self, q, tol: float | None = None) -> bool:
        return bool(self._contains(as_vector(q, self.dim, "q")))


CutterSpec = Union[Hyperplane, HalfSpace, SubgradientProjector, CustomCutter]


# Step helpers return the new point and the scalar computed on the way, so a
# sweep can record it without re-evaluating anything.

def _hyperplane_step(h: Hyperplane, x: np.ndarray) -> tuple[np.ndarray, float]:
    r = h.residual(x)
    return x - (r / h.normsq) * h.a, r


def _halfspace_step(h: HalfSpace, x: np.ndarray) -> tuple[np.ndarray, float]:
    r = h.residual(x)
    if r <= 0.0:
        return x.copy(), r
    return x - (r / h.normsq) * h.a, r


def _subgradient_step(f: ConvexFunctional, x: np.ndarray):
    """Return ``(new_point, c(x), g(x), ||g(x)||^2)``."""
    c = f(x)
    g = as_vector(f.subgradient(x), x.size, "subgradient")
    gsq = float(g @ g)
    if c <= 0.0 or gsq == 0.0:
        return x.copy(), c, g, gsq
    return x - (c / gsq) * g, c, g, gsq


def project_hyperplane(h: Hyperplane, x) -> np.ndarray:
    """Orthogonal projection of ``x`` onto the hyperplane ``h``."""
    return _hyperplane_step(h, as_vector(x, h.dim))[0]


def project_halfspace(h: HalfSpace, x) -> np.ndarray:
    """Metric projection of ``x`` onto the half-space ``h``; identity inside."""
    return _halfspace_step(h, as_vector(x, h.dim))[0]


def subgradient_project(f: ConvexFunctional, x) -> np.ndarray:
    """Subgradient projection of ``x`` onto ``{c <= 0}``.

    Returns ``x - c(x)_+ / ||g(x)||^2 * g(x)``, or ``x`` itself when the
    subgradient vanishes.  A vanishing subgradient with ``c(x) > 0`` means
    ``x`` minimizes ``c`` while the sublevel set is empty; the step is the
    identity and a sweep flags the stage as stalled.
    """
    return _subgradient_step(f, as_vector(x, f.dim))[0]


def relax(T: CutterSpec, lam: float, x) -> np.ndarray:
    """Relaxation ``x + lam * (Tx - x)`` for ``lam`` in (0, 2)."""
    if not 0.0 < lam < 2.0:
        raise UsageError(f"relaxation parameter must lie in (0, 2), got {lam}")
    x = as_vector(x, T.dim)
    return x + lam * (T(x) - x)


def generalized_relaxation(U: Callable[[np.ndarray], np.ndarray], sigma: float,
                           lam: float, x) -> np.ndarray:
    """Generalized relaxation ``x + lam * sigma * (Ux - x)``.

    ``lam`` may equal 2.  When ``lam * sigma == 1`` the image ``Ux`` is
    returned unchanged, so the unit step is bit-for-bit the plain operator.
    """
    if not sigma > 0.0:
        raise UsageError(f"step size must be positive, got {sigma}")
    if not 0.0 < lam <= 2.0:
        raise UsageError(f"relaxation parameter must lie in (0, 2], got {lam}")
    x = as_vector(x)
    ux = np.asarray(U(x), dtype=np.float64)
    step = lam * sigma
    if step == 1.0:
        return ux.copy()
    return x + step * (ux - x)


def cutter_gap(T: CutterSpec, x, q) -> float:
    """``<Tx - x, q - x> - ||Tx - x||^2``; non-negative for a cutter and ``q in Fix T``."""
    x = as_vector(x, T.dim)
    q = as_vector(q, T.dim, "q")
    d = T(x) - x
    return float(d @ (q - x)) - float(d @ d)
