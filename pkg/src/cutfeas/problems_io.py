"""Feasibility problems: text format, validation and seeded generation.

File format (UTF-8, line oriented, ``#`` starts a comment)::

    dim <n>
    eq     a1 ... an b      # hyperplane        <a, x> = b
    ineq   a1 ... an b      # half-space        <a, x> <= b
    affine a1 ... an b      # functional        <a, x> - b <= 0
    ball   c1 ... cn r      # functional        ||x - c||^2 - r^2 <= 0
    witness z1 ... zn       # optional, at most once

Constraint lines are applied in file order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cyclic import CyclicOperator
from .operators import (
    AffineFunctional,
    BallFunctional,
    HalfSpace,
    Hyperplane,
    SubgradientProjector,
    UsageError,
    as_vector,
)

__all__ = [
    "ParseError",
    "ValidationError",
    "Problem",
    "GeneratorSpec",
    "parse_problem",
    "serialize_problem",
    "load_problem",
    "generate",
    "WITNESS_TOL",
]

WITNESS_TOL = 1e-9

KINDS = ("eq", "ineq", "convex", "mixed")


class ParseError(ValueError):
    """Malformed problem text; ``lineno`` is 1-based."""

    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


class ValidationError(ValueError):
    """Well-formed but invalid problem (zero row, infeasible witness, ...)."""


def _constraint_kind(c) -> str:
    if isinstance(c, Hyperplane):
        return "eq"
    if isinstance(c, HalfSpace):
        return "ineq"
    if isinstance(c, SubgradientProjector) and isinstance(c.f, (AffineFunctional, BallFunctional)):
        return "convex"
    raise ValidationError(f"unsupported constraint {c!r}")


def satisfies(c, z, tol: float = WITNESS_TOL) -> bool:
    """Witness-level membership test for one constraint."""
    if isinstance(c, Hyperplane):
        return abs(c.residual(z)) <= tol * (1.0 + abs(c.b))
    if isinstance(c, HalfSpace):
        return c.residual(z) <= tol
    return c.f(z) <= tol


@dataclass(eq=False)
class Problem:
    """A consistent feasibility problem and optionally a known solution."""

    dim: int
    constraints: list
    witness: np.ndarray | None = None

    @property
    def kind(self) -> str:
        """``eq``, ``ineq``, ``convex`` or ``mixed``."""
        kinds = {_constraint_kind(c) for c in self.constraints}
        return kinds.pop() if len(kinds) == 1 else "mixed"

    @property
    def m(self) -> int:
        return len(self.constraints)

    def operator(self) -> CyclicOperator:
        return CyclicOperator(self.constraints)

    def validate(self) -> None:
        if self.dim < 1:
            raise ValidationError(f"dim must be >= 1, got {self.dim}")
        if not self.constraints:
            raise ValidationError("a problem needs at least one constraint")
        for i, c in enumerate(self.constraints):
            _constraint_kind(c)
            if c.dim != self.dim:
                raise ValidationError(f"constraint {i} has dimension {c.dim}, expected {self.dim}")
        if self.witness is not None:
            if self.witness.shape != (self.dim,):
                raise ValidationError("witness has the wrong dimension")
            for i, c in enumerate(self.constraints):
                if not satisfies(c, self.witness):
                    raise ValidationError(f"witness violates constraint {i}")

    def __eq__(self, other):
        if not isinstance(other, Problem):
            return NotImplemented
        if self.dim != other.dim or self.constraints != other.constraints:
            return False
        if (self.witness is None) != (other.witness is None):
            return False
        return self.witness is None or np.array_equal(self.witness, other.witness)


def parse_problem(text: str) -> Problem:
    """Parse the line-oriented problem format.

    Raises
    ------
    ParseError
        Malformed line, with its line number.
    ValidationError
        Zero normal, empty problem or infeasible witness.
    """
    dim = None
    constraints = []
    witness = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        word, *fields = line.split()
        try:
            nums = [float(f) for f in fields]
        except ValueError:
            raise ParseError(lineno, f"non-numeric field in {line!r}") from None
        if not all(np.isfinite(nums)):
            raise ParseError(lineno, "non-finite number")
        if dim is None:
            if word != "dim":
                raise ParseError(lineno, "first statement must be 'dim <n>'")
            if len(fields) != 1 or not fields[0].isdigit() or int(fields[0]) < 1:
                raise ParseError(lineno, "'dim' takes one positive integer")
            dim = int(fields[0])
            continue
        if word == "dim":
            raise ParseError(lineno, "duplicate 'dim'")
        if word == "witness":
            if len(nums) != dim:
                raise ParseError(lineno, f"'witness' needs {dim} numbers, got {len(nums)}")
            if witness is not None:
                raise ParseError(lineno, "more than one 'witness' line")
            witness = np.array(nums)
            continue
        if word not in ("eq", "ineq", "affine", "ball"):
            raise ParseError(lineno, f"unknown statement {word!r}")
        if len(nums) != dim + 1:
            raise ParseError(lineno, f"{word!r} needs {dim + 1} numbers, got {len(nums)}")
        vec, last = nums[:dim], nums[dim]
        try:
            if word == "eq":
                constraints.append(Hyperplane(vec, last))
            elif word == "ineq":
                constraints.append(HalfSpace(vec, last))
            elif word == "affine":
                constraints.append(SubgradientProjector(AffineFunctional(vec, last)))
            else:
                constraints.append(SubgradientProjector(BallFunctional(vec, last)))
        except UsageError as exc:
            raise ValidationError(f"line {lineno}: {exc}") from None
    if dim is None:
        raise ParseError(1, "missing 'dim' statement")
    problem = Problem(dim, constraints, witness)
    problem.validate()
    return problem


def load_problem(path) -> Problem:
    with open(path, encoding="utf-8") as fh:
        return parse_problem(fh.read())


def _fmt(values) -> str:
    return " ".join(f"{float(v):.17g}" for v in values)


def serialize_problem(p: Problem) -> str:
    """Emit the text format; scalars carry 17 significant digits."""
    p.validate()
    lines = [f"dim {p.dim}"]
    for c in p.constraints:
        if isinstance(c, Hyperplane):
            lines.append(f"eq {_fmt(c.a)} {_fmt([c.b])}")
        elif isinstance(c, HalfSpace):
            lines.append(f"ineq {_fmt(c.a)} {_fmt([c.b])}")
        elif isinstance(c.f, AffineFunctional):
            lines.append(f"affine {_fmt(c.f.a)} {_fmt([c.f.b])}")
        else:
            lines.append(f"ball {_fmt(c.f.center)} {_fmt([c.f.radius])}")
    if p.witness is not None:
        lines.append(f"witness {_fmt(p.witness)}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters of a seeded random consistent problem.

    ``conditioning`` in [0, 1) blends each row toward one shared direction:
    0 gives orthogonal rows (as far as ``m <= dim`` allows), values near 1
    give nearly parallel rows.
    """

    seed: int = 0
    dim: int = 2
    m: int = 2
    kind: str = "eq"
    conditioning: float = 0.0

    def validate(self) -> None:
        if self.dim < 1 or self.m < 1:
            raise ValidationError("dim and m must be >= 1")
        if self.kind not in KINDS:
            raise ValidationError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not 0.0 <= self.conditioning < 1.0:
            raise ValidationError("conditioning must lie in [0, 1)")


def _rows(rng: np.random.Generator, dim: int, m: int, conditioning: float) -> np.ndarray:
    base = np.empty((m, dim))
    done = 0
    while done < m:
        k = min(dim, m - done)
        q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
        base[done:done + k] = q[:, :k].T
        done += k
    shared = rng.standard_normal(dim)
    shared /= np.linalg.norm(shared)
    rows = (1.0 - conditioning) * base + conditioning * shared
    norms = np.linalg.norm(rows, axis=1, keepdims=True)
    # A row can only vanish for conditioning 0.5 and an antipodal draw.
    bad = norms[:, 0] < 1e-8
    rows[bad] = shared
    norms[bad] = 1.0
    return rows / norms * rng.uniform(0.5, 2.0, size=(m, 1))


def _ball(rng, z):
    direction = rng.standard_normal(z.size)
    direction /= np.linalg.norm(direction)
    center = z + rng.uniform(0.5, 2.0) * direction
    radius = np.linalg.norm(z - center) + rng.uniform(0.05, 0.5)
    return SubgradientProjector(BallFunctional(center, radius))


def generate(spec: GeneratorSpec) -> Problem:
    """Draw a problem whose intersection contains a known witness.

    The witness ``z`` is uniform on ``[-1, 1]^dim``.  Equations pass through
    ``z``; inequalities keep ``z`` inside with a slack in ``[0, 0.5)``; balls
    contain ``z`` with a margin in ``[0.05, 0.5)``.  ``mixed`` cycles
    through equations, inequalities, balls and affine functionals.
    """
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    z = rng.uniform(-1.0, 1.0, spec.dim)
    rows = _rows(rng, spec.dim, spec.m, spec.conditioning)
    constraints = []
    for i, a in enumerate(rows):
        kind = spec.kind
        if kind == "mixed":
            kind = ("eq", "ineq", "convex", "affine")[i % 4]
        if kind == "eq":
            constraints.append(Hyperplane(a, float(a @ z)))
        elif kind == "ineq":
            constraints.append(HalfSpace(a, float(a @ z) + rng.uniform(0.0, 0.5)))
        elif kind == "affine":
            constraints.append(SubgradientProjector(
                AffineFunctional(a, float(a @ z) + rng.uniform(0.0, 0.5))))
        else:
            constraints.append(_ball(rng, z))
    problem = Problem(spec.dim, constraints, z)
    problem.validate()
    return problem
