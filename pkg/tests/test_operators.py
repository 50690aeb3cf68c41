import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cutfeas import (
    BallFunctional,
    ConvexFunctional,
    CustomCutter,
    HalfSpace,
    Hyperplane,
    SubgradientProjector,
    UsageError,
    cutter_gap,
    generalized_relaxation,
    project_halfspace,
    project_hyperplane,
    relax,
    subgradient_project,
)
from cutfeas.oracles import projection_oracle

from instances import BUILTIN_KINDS, diagonal, random_cutter

coords = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
vec2 = st.lists(coords, min_size=2, max_size=2)
nonzero2 = vec2.filter(lambda v: abs(v[0]) + abs(v[1]) > 1e-3)


def ball_oracle(center, radius, x):
    # Written out longhand, independent of the production step helper.
    x = np.asarray(x, float)
    c = sum((xi - ci) ** 2 for xi, ci in zip(x, center)) - radius ** 2
    g = [2 * (xi - ci) for xi, ci in zip(x, center)]
    gsq = sum(gi * gi for gi in g)
    if c <= 0 or gsq == 0:
        return x
    return np.array([xi - c / gsq * gi for xi, gi in zip(x, g)])


# -- projections ------------------------------------------------------------

def test_hyperplane_point_on_plane_is_fixed():
    np.testing.assert_array_equal(project_hyperplane(Hyperplane([1, 0], 0), [0, 5]), [0, 5])


def test_hyperplane_axis_drop():
    np.testing.assert_array_equal(project_hyperplane(Hyperplane([1, 0], 0), [2, 1]), [0, 1])


def test_hyperplane_diagonal_against_oracle():
    h = Hyperplane([1, 1], 2)
    y = project_hyperplane(h, [2, 2])
    np.testing.assert_allclose(y, projection_oracle(h, [2, 2]), atol=1e-12)
    np.testing.assert_allclose(y, [1, 1], atol=1e-12)
    assert abs(h.a @ y - 2) <= 1e-10 * 3


def test_halfspace_examples():
    h = HalfSpace([1, 0], 0)
    np.testing.assert_array_equal(project_halfspace(h, [-1, 3]), [-1, 3])
    np.testing.assert_allclose(project_halfspace(h, [2, 1]), projection_oracle(h, [2, 1]), atol=1e-12)
    np.testing.assert_allclose(project_halfspace(h, [2, 1]), [0, 1])
    h = HalfSpace([3, 4], 0)
    np.testing.assert_allclose(project_halfspace(h, [3, 4]), projection_oracle(h, [3, 4]), atol=1e-12)
    np.testing.assert_allclose(project_halfspace(h, [3, 4]), [0, 0], atol=1e-15)


def test_subgradient_projector_examples():
    f = BallFunctional([0, 0], 1)
    np.testing.assert_array_equal(subgradient_project(f, [0.5, 0]), [0.5, 0])
    np.testing.assert_array_equal(subgradient_project(f, [0, 0]), [0, 0])
    np.testing.assert_allclose(subgradient_project(f, [2, 0]), ball_oracle([0, 0], 1, [2, 0]))
    np.testing.assert_allclose(subgradient_project(f, [2, 0]), [1.25, 0])


def test_zero_subgradient_with_positive_value_is_identity():
    f = ConvexFunctional(lambda x: float(x @ x) + 1.0, lambda x: 2 * x, dim=2)
    np.testing.assert_array_equal(subgradient_project(f, [0, 0]), [0, 0])


@pytest.mark.parametrize("bad", [[0, 0], [0.0], []])
def test_zero_or_empty_normal_rejected(bad):
    with pytest.raises(UsageError):
        Hyperplane(bad, 1.0)
    with pytest.raises(UsageError):
        HalfSpace(bad, 1.0)


def test_dimension_mismatch_is_usage_error():
    with pytest.raises(UsageError, match="dimension"):
        project_hyperplane(Hyperplane([1, 0], 0), [1, 2, 3])
    with pytest.raises(UsageError):
        subgradient_project(BallFunctional([0, 0], 1), [1.0])


def test_non_finite_input_rejected():
    with pytest.raises(UsageError):
        project_hyperplane(Hyperplane([1, 0], 0), [np.nan, 0])


def test_operators_are_immutable():
    h = Hyperplane([1, 2], 3)
    with pytest.raises(ValueError):
        h.a[0] = 5.0


# -- relaxations ------------------------------------------------------------

def test_relax_examples():
    P = Hyperplane([1, 0], 0)
    x = np.array([2.0, 1.0])
    np.testing.assert_array_equal(relax(P, 1.0, x), P(x))
    np.testing.assert_allclose(relax(P, 0.5, x), [1, 1])


@pytest.mark.parametrize("lam", [0.0, 2.0, -0.1, 2.5])
def test_relax_rejects_out_of_range(lam):
    with pytest.raises(UsageError):
        relax(Hyperplane([1, 0], 0), lam, [1.0, 1.0])


def test_reflection_via_generalized_relaxation():
    # relax() keeps lam strictly below 2; the reflection goes through the
    # generalized form, which admits lam = 2.
    P = Hyperplane([1, 0], 0)
    np.testing.assert_allclose(generalized_relaxation(P, 1.0, 2.0, [2, 1]), [-2, 1])


def test_generalized_relaxation_examples():
    P = Hyperplane([1, 0], 0)
    np.testing.assert_array_equal(generalized_relaxation(P, 1.0, 1.0, [2, 1]), P([2, 1]))
    np.testing.assert_array_equal(generalized_relaxation(P, 3.7, 0.4, [0, 9]), [0, 9])
    U = diagonal()
    np.testing.assert_allclose(generalized_relaxation(U, 1.4, 1.0, [2, 1]), [-0.1, 0.3], atol=1e-15)


def test_generalized_relaxation_factorizes():
    U = diagonal()
    x = np.array([2.0, 1.0])
    u_sigma = generalized_relaxation(U, 1.4, 1.0, x)
    np.testing.assert_allclose(generalized_relaxation(U, 1.4, 0.7, x), x + 0.7 * (u_sigma - x),
                               atol=1e-15)


def test_generalized_relaxation_rejects_nonpositive_sigma():
    with pytest.raises(UsageError):
        generalized_relaxation(Hyperplane([1, 0], 0), 0.0, 1.0, [1, 1])


# -- cutter gap ---------------------------------------------------------------

def test_cutter_gap_examples():
    assert cutter_gap(Hyperplane([1, 0], 0), [2, 1], [0, 7]) == pytest.approx(0, abs=1e-15)
    assert cutter_gap(Hyperplane([1, 0], 0), [0, 3], [0, -4]) == 0
    assert cutter_gap(HalfSpace([1, 0], 0), [2, 1], [-3, 0]) == pytest.approx(6.0)


def test_custom_cutter_roundtrip():
    box = CustomCutter(lambda x: np.clip(x, -1, 1), lambda q: bool(np.all(np.abs(q) <= 1)), dim=3)
    x = np.array([3.0, 0.5, -2.0])
    np.testing.assert_array_equal(box(x), [1, 0.5, -1])
    assert box.contains([0, 0, 1]) and not box.contains([0, 0, 1.1])
    assert cutter_gap(box, x, [0.2, -0.3, 0.9]) >= 0


def test_membership_tolerances():
    assert Hyperplane([1, 0], 1).contains([1 + 1e-10, 0])
    assert not Hyperplane([1, 0], 1).contains([1 + 1e-7, 0])
    assert HalfSpace([1, 0], 1).contains([1 + 1e-13, 5])
    assert not HalfSpace([1, 0], 1).contains([1 + 1e-11, 5])
    assert SubgradientProjector(BallFunctional([0, 0], 1)).contains([1, 0])


# -- properties ---------------------------------------------------------------

@settings(max_examples=200, deadline=None)
@given(a=nonzero2, b=coords, x=vec2, y=vec2, half=st.booleans())
def test_projection_firmly_nonexpansive(a, b, x, y, half):
    P = (HalfSpace if half else Hyperplane)(a, b)
    px, py = P(x), P(y)
    dp = px - py
    assert dp @ dp <= dp @ (np.subtract(x, y)) + 1e-10


@settings(max_examples=200, deadline=None)
@given(a=nonzero2, b=coords, x=vec2, half=st.booleans())
def test_projection_idempotent(a, b, x, half):
    P = (HalfSpace if half else Hyperplane)(a, b)
    px = P(x)
    np.testing.assert_allclose(P(px), px, rtol=0, atol=1e-12 * (1 + np.abs(px).max()))


@settings(max_examples=200, deadline=None)
@given(a=nonzero2, b=coords, x=vec2)
def test_hyperplane_projection_lands_on_plane(a, b, x):
    h = Hyperplane(a, b)
    y = h(x)
    scale = 1 + abs(b) + np.abs(h.a).max() * np.abs(x).max()
    assert abs(h.a @ y - b) <= 1e-10 * scale
    d = y - np.asarray(x)
    assert abs(d[0] * h.a[1] - d[1] * h.a[0]) <= 1e-10 * (1 + np.abs(d).max()) * np.abs(h.a).max()


@settings(max_examples=200, deadline=None)
@given(center=vec2, radius=st.floats(0, 5), x=vec2, y=vec2)
def test_ball_subgradient_inequality(center, radius, x, y):
    f = BallFunctional(center, radius)
    x, y = np.asarray(x), np.asarray(y)
    # c(y) >= c(x) + <g(x), y - x>
    assert f(y) >= f(x) + f.subgradient(x) @ (y - x) - 1e-9 * (1 + abs(f(y)) + abs(f(x)))


@pytest.mark.parametrize("kind", BUILTIN_KINDS)
def test_cutter_inequality_random(kind):
    rng = np.random.default_rng(11)
    for _ in range(300):
        dim = int(rng.integers(1, 7))
        T, q = random_cutter(rng, kind, dim)
        assert T.contains(q)
        x = rng.uniform(-4, 4, dim)
        assert cutter_gap(T, x, q) >= -1e-10 * (1 + np.sum((x - q) ** 2))


@pytest.mark.parametrize("kind", BUILTIN_KINDS)
@pytest.mark.parametrize("lam", [0.25, 1.0, 1.75])
def test_relaxed_cutter_is_strongly_quasi_nonexpansive(kind, lam):
    rng = np.random.default_rng(12)
    for _ in range(200):
        dim = int(rng.integers(1, 7))
        T, z = random_cutter(rng, kind, dim)
        x = rng.uniform(-4, 4, dim)
        tx = relax(T, lam, x)
        lhs = np.sum((tx - z) ** 2)
        rhs = np.sum((x - z) ** 2) - (2 - lam) / lam * np.sum((tx - x) ** 2)
        assert lhs <= rhs + 1e-9


def test_hyperplane_gap_is_zero():
    rng = np.random.default_rng(13)
    for _ in range(200):
        dim = int(rng.integers(1, 7))
        T, q = random_cutter(rng, "hyperplane", dim)
        x = rng.uniform(-4, 4, dim)
        assert abs(cutter_gap(T, x, q)) <= 1e-9 * (1 + np.sum((x - q) ** 2))
