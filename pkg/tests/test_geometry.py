import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nonspreading import (EuclideanSpace, GeometryError, HyperbolicSpace, Pair, Point, SpaceTag,
                          TreeSpace, cauchy_schwarz_slack, combine, convexity_slacks, dist,
                          quasi_identity_residuals, quasi_inner)

from conftest import SPACE_IDS, all_spaces, sample

E2 = EuclideanSpace(2)
coord = st.floats(-50, 50, allow_nan=False)
vec2 = st.tuples(coord, coord)


def test_point_equality_and_hash():
    a = E2.point([1.0, 2.0])
    assert a == E2.point((1, 2))
    assert len({a, E2.point([1.0, 2.0])}) == 1


def test_pair_rejects_mixed_spaces():
    H = HyperbolicSpace(2)
    with pytest.raises(GeometryError):
        Pair(E2.origin(), H.origin())


def test_tag_mismatch_is_domain_error():
    H = HyperbolicSpace(2)
    with pytest.raises(GeometryError):
        dist(E2, E2.origin(), H.origin())
    with pytest.raises(GeometryError):
        E2.dist(E2.origin(), EuclideanSpace(3).origin())


def test_dist_examples(star):
    assert dist(E2, E2.point([0, 0]), E2.point([3, 4])) == 5.0
    H = HyperbolicSpace(2)
    assert dist(H, H.origin(), H.origin()) == 0.0
    assert dist(star, star.vertex_point(1), star.vertex_point(2)) == 2.0


def test_combine_examples(star):
    m = combine(E2, E2.point([0, 0]), E2.point([2, 0]), 0.5)
    assert m == E2.point([1, 0])
    x, y = star.vertex_point(1), star.vertex_point(2)
    m = combine(star, x, y, 0.75)
    assert m.coords == (1, 0.5)   # edge 1 joins the hub to leaf 2
    assert star.dist(m, y) == pytest.approx(0.5, abs=1e-15)


@pytest.mark.parametrize("space", all_spaces(), ids=SPACE_IDS)
def test_combine_endpoints_and_range(space, rng):
    x, y = sample(space, rng, 2)
    assert space.combine(x, y, 0.0) == x
    assert space.combine(x, y, 1.0) == y
    for bad in (-0.1, 1.5, math.nan):
        with pytest.raises(GeometryError):
            space.combine(x, y, bad)


@pytest.mark.parametrize("space", all_spaces(), ids=SPACE_IDS)
def test_combine_is_arc_length(space, rng):
    for _ in range(50):
        x, y = sample(space, rng, 2)
        L = space.dist(x, y)
        s, t = sorted(rng.uniform(0, 1, 2))
        a = space.combine(x, y, s)
        b = space.combine(x, y, t)
        assert space.dist(x, a) == pytest.approx(s * L, rel=1e-9, abs=1e-12)
        assert space.dist(a, b) == pytest.approx((t - s) * L, rel=1e-9, abs=1e-12)
        assert space.dist(b, y) == pytest.approx((1 - t) * L, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("space", all_spaces(), ids=SPACE_IDS)
def test_metric_axioms(space, rng):
    for _ in range(100):
        x, y, z = sample(space, rng, 3)
        assert space.dist(x, y) == space.dist(y, x)
        assert space.dist(x, x) == 0.0
        assert space.dist(x, z) <= space.dist(x, y) + space.dist(y, z) + 1e-9


def test_quasi_inner_examples():
    p = E2.point
    assert quasi_inner(E2, Pair(p([0, 0]), p([2, 0])), Pair(p([1, 1]), p([3, 0]))) \
        == pytest.approx(4.0, abs=1e-12)
    assert quasi_inner(E2, Pair(p([0, 0]), p([1, 0])), Pair(p([0, 0]), p([0, 1]))) == 0.0


@given(vec2, vec2, vec2, vec2)
def test_quasi_inner_is_hilbert_inner_product(x, y, z, w):
    xs, ys, zs, ws = (np.array(v) for v in (x, y, z, w))
    expected = float((xs - ys) @ (zs - ws))
    got = quasi_inner(E2, Pair(E2.point(x), E2.point(y)), Pair(E2.point(z), E2.point(w)))
    scale = 1.0 + sum(float(v @ v) for v in (xs, ys, zs, ws))
    assert abs(got - expected) <= 1e-12 * scale


@pytest.mark.parametrize("space", all_spaces(), ids=SPACE_IDS)
def test_identity_residuals_vanish(space, rng):
    for _ in range(100):
        pts = sample(space, rng, 5)
        assert quasi_identity_residuals(space, *pts).worst() < 1e-9


def test_identity_residuals_degenerate():
    x = E2.point([0.3, 0.4])
    assert quasi_identity_residuals(E2, x, x, x, x, x) == (0.0, 0.0, 0.0, 0.0)


@pytest.mark.parametrize("space", all_spaces(), ids=SPACE_IDS)
def test_cauchy_schwarz(space, rng):
    for _ in range(300):
        x, y, z, w = sample(space, rng, 4)
        assert cauchy_schwarz_slack(space, Pair(x, y), Pair(z, w)) >= -1e-9


def test_cauchy_schwarz_equality_cases():
    p = E2.point
    s = cauchy_schwarz_slack(E2, Pair(p([0, 0]), p([1, 0])), Pair(p([2, 0]), p([5, 0])))
    assert abs(s) < 1e-12
    x = p([1, 2])
    assert cauchy_schwarz_slack(E2, Pair(x, x), Pair(p([0, 0]), p([3, 3]))) == 0.0


@given(vec2, vec2, vec2, st.floats(0, 1))
def test_euclidean_parallelogram_equality(x, y, z, a):
    s1, s2 = convexity_slacks(E2, E2.point(x), E2.point(y), E2.point(z), a)
    scale = 1.0 + sum(v * v for v in x + y + z)
    assert s1 >= -1e-9 * scale
    assert abs(s2) <= 1e-9 * scale


@pytest.mark.parametrize("space", all_spaces(), ids=SPACE_IDS)
def test_convexity_slacks_nonnegative(space, rng):
    for a in (0.0, 0.25, 0.5, 0.75, 1.0, *rng.uniform(0, 1, 5)):
        for _ in range(20):
            x, y, z = sample(space, rng, 3)
            s1, s2 = convexity_slacks(space, x, y, z, a)
            assert s1 >= -1e-9 and s2 >= -1e-9
            if a == 0.0:
                assert s1 == 0.0 and s2 == 0.0


def test_tree_is_thinner_than_the_plane(star):
    leaf = star.vertex_point
    _, s2 = convexity_slacks(star, leaf(1), leaf(2), leaf(3), 0.5)
    # midpoint is the hub: 0.5*4 + 0.5*4 - 0.25*4 - 1 = 2
    assert s2 == pytest.approx(2.0)


def test_convexity_alpha_out_of_range():
    with pytest.raises(GeometryError):
        convexity_slacks(E2, E2.origin(), E2.origin(), E2.origin(), 1.2)


def test_space_tag_values():
    assert {t.value for t in SpaceTag} == {"euclidean", "hyperbolic", "tree"}
    assert isinstance(TreeSpace.star().vertex_point(0), Point)
