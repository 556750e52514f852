import math

import numpy as np
import pytest

from nonspreading import (AffineEuclidean, Ball, DistTo, EuclideanSpace, GeodesicSegment,
                          GeometryError, HalfSqDistTo, HalfspaceEuclidean, HyperbolicSpace,
                          IndicatorOf, Subtree, WeightedFrechet, convexity_gap, eval_function,
                          membership_slack, project, prox)

from conftest import sample

E2 = EuclideanSpace(2)
H2 = HyperbolicSpace(2)
p = E2.point


def test_function_values(star):
    assert eval_function(HalfSqDistTo(E2, p([0, 0]), 1.0), p([2, 0])) == 2.0
    ind = IndicatorOf(Ball(E2, p([0, 0]), 1.0))
    assert eval_function(ind, p([0.5, 0])) == 0.0
    assert eval_function(ind, p([1.5, 0])) == math.inf
    # convention: sum of w d^2 without a factor one half
    fr = WeightedFrechet(star, ((star.vertex_point(1), 1.0), (star.vertex_point(2), 1.0)))
    assert eval_function(fr, star.vertex_point(0)) == 2.0


def test_membership_examples(star):
    assert membership_slack(Ball(E2, p([0, 0]), 1.0), p([2, 0])) == 1.0
    seg = GeodesicSegment(H2, H2.from_poincare([-0.5, 0]), H2.from_poincare([0.5, 0.1]))
    assert membership_slack(seg, seg.a) == 0.0
    sub = Subtree(star, {0, 1})
    assert membership_slack(sub, star.point(1, 0.3)) == pytest.approx(0.3)
    assert membership_slack(sub, star.point(0, 0.3)) == 0.0


def test_constructor_validation(star):
    with pytest.raises(GeometryError):
        Ball(E2, E2.origin(), 0.0)
    with pytest.raises(GeometryError):
        Subtree(star, {1, 2})              # not connected without the hub
    with pytest.raises(GeometryError):
        Subtree(E2, {0})
    with pytest.raises(GeometryError):
        HalfspaceEuclidean(E2, (0.0, 0.0), 1.0)
    with pytest.raises(GeometryError):
        WeightedFrechet(E2, ((E2.origin(), -1.0),))
    with pytest.raises(GeometryError):
        AffineEuclidean(H2, (1.0, 0.0))


def test_projection_examples(star):
    ball = Ball(E2, p([0, 0]), 1.0)
    assert project(ball, p([0.5, 0])) == p([0.5, 0])
    assert project(ball, p([2, 0])) == p([1, 0])
    assert project(Subtree(star, {0, 1}), star.vertex_point(2)) == star.vertex_point(0)


def test_euclidean_halfspace_closed_form(rng):
    E5 = EuclideanSpace(5)
    n = np.array([1.0, 2.0, 0.0, -1.0, 0.5])
    half = HalfspaceEuclidean(E5, tuple(n), 1.0)
    for _ in range(200):
        x = rng.normal(size=5) * 3
        expected = x - max(0.0, x @ n - 1.0) / (n @ n) * n
        assert np.allclose(project(half, E5.point(x)).coords, expected, atol=1e-12)


def _sets(star, branched):
    return [
        Ball(E2, p([1.0, -0.5]), 1.5),
        GeodesicSegment(E2, p([-1, 0]), p([2, 1])),
        HalfspaceEuclidean(E2, (1.0, 1.0), 0.5),
        Ball(H2, H2.from_poincare([0.3, 0.1]), 0.8),
        GeodesicSegment(H2, H2.from_poincare([-0.5, 0]), H2.from_poincare([0.5, 0])),
        GeodesicSegment(H2, H2.from_poincare([0.1, -0.6]), H2.from_poincare([0.4, 0.5])),
        Ball(branched, branched.point(2, 0.3), 1.7),
        GeodesicSegment(branched, branched.vertex_point(3), branched.vertex_point(7)),
        Subtree(branched, {0, 1, 4, 5}),
        Subtree(star, {0}),
    ]


def _members(C, rng, k):
    """Sampled points of C, built from projections of random points."""
    return [C.project(x) for x in sample(C.space, rng, k, radius=4.0)]


def test_projection_is_nearest_point(star, branched, rng):
    for C in _sets(star, branched):
        inside = _members(C, rng, 300)
        for x in sample(C.space, rng, 20, radius=4.0):
            px = project(C, x)
            assert membership_slack(C, px) <= 1e-9
            d = C.space.dist(px, x)
            assert all(d <= C.space.dist(y, x) + 1e-9 for y in inside)
            assert project(C, px) == px or C.space.dist(project(C, px), px) < 1e-12


def test_hyperbolic_segment_projection_dense_oracle(rng):
    seg = GeodesicSegment(H2, H2.from_poincare([-0.5, 0]), H2.from_poincare([0.5, 0]))
    ys = [H2.combine(seg.a, seg.b, s) for s in np.linspace(0, 1, 1001)]
    for _ in range(20):
        x = H2.random_point(rng, None, 2.0)
        px = project(seg, x)
        assert H2.dist(px, x) <= min(H2.dist(y, x) for y in ys) + 1e-9


def test_sets_are_geodesically_convex(star, branched, rng):
    for C in _sets(star, branched):
        pts = _members(C, rng, 40)
        for x, y in zip(pts, pts[1:]):
            m = C.space.combine(x, y, float(rng.uniform()))
            assert membership_slack(C, m) <= 1e-9


def test_prox_examples(star):
    assert prox(HalfSqDistTo(E2, p([0, 0]), 1.0), p([8, 0])) == p([4, 0])
    assert prox(HalfSqDistTo(E2, p([0, 0]), 1.0), p([2, 0])) == p([1, 0])
    # (lam a + x) / (1 + lam)
    got = prox(HalfSqDistTo(E2, p([0.5, 1.0]), 2.0), p([3.0, -2.0]))
    assert np.allclose(got.coords, [(2 * 0.5 + 3) / 3, (2 * 1 - 2) / 3], atol=1e-15)
    # one leaf anchor: minimize (2 - s)^2 + s^2 / 2 from leaf2, so s = 4/3
    y = prox(WeightedFrechet(star, ((star.vertex_point(1), 1.0),)), star.vertex_point(2))
    assert y.coords[0] == 0 and y.coords[1] == pytest.approx(1.0 / 3.0, abs=1e-12)


def test_prox_of_indicator_is_projection(star, branched, rng):
    for C in _sets(star, branched):
        f = IndicatorOf(C)
        for x in sample(C.space, rng, 10, radius=4.0):
            assert prox(f, x) == project(C, x)


def test_euclidean_frechet_and_affine_closed_forms(rng):
    anchors = ((p([1, 0]), 0.5), (p([0, 2]), 1.5))
    f = WeightedFrechet(E2, anchors)
    for _ in range(50):
        x = rng.normal(size=2) * 4
        expected = (2 * (0.5 * np.array([1, 0]) + 1.5 * np.array([0, 2])) + x) / (2 * 2.0 + 1)
        assert np.allclose(prox(f, E2.point(x)).coords, expected, atol=1e-12)
    g = AffineEuclidean(E2, (1.0, 0.5), 3.0)
    assert prox(g, p([0, 0])) == p([-1.0, -0.5])
    assert g.minimizer() is None
    assert AffineEuclidean(E2, (0.0, 0.0)).minimizer() == E2.origin()


def test_dist_prox_moves_by_weight(branched):
    f = DistTo(branched, branched.vertex_point(7), 0.6)
    x = branched.vertex_point(2)
    y = prox(f, x)
    assert branched.dist(x, y) == pytest.approx(0.6, abs=1e-12)
    assert branched.dist(y, f.anchor) == pytest.approx(branched.dist(x, f.anchor) - 0.6, abs=1e-12)
    assert prox(f, branched.point(6, 0.5)) == f.anchor


def _functions(star, branched):
    tri = tuple((H2.from_poincare([0.5 * math.cos(a), 0.5 * math.sin(a)]), 0.5)
                for a in (0, 2, 4))
    return [
        HalfSqDistTo(E2, p([0.5, 1.0]), 2.0),
        WeightedFrechet(E2, ((p([1, 0]), 1.0), (p([-1, 1]), 0.3))),
        DistTo(E2, p([0, 0]), 0.7),
        AffineEuclidean(E2, (1.0, -0.5), 0.2),
        HalfSqDistTo(H2, H2.from_poincare([0.2, -0.3]), 0.5),
        WeightedFrechet(H2, tri),
        DistTo(H2, H2.from_poincare([0.1, 0.1]), 0.4),
        HalfSqDistTo(branched, branched.vertex_point(5), 1.3),
        WeightedFrechet(star, tuple((star.vertex_point(i), float(i)) for i in (1, 2, 3))),
        WeightedFrechet(branched, ((branched.vertex_point(3), 1.0), (branched.vertex_point(9), 2.0))),
        DistTo(branched, branched.vertex_point(7), 0.6),
    ]


def test_prox_optimality_certificate(star, branched, rng):
    for f in _functions(star, branched):
        sp = f.space
        for x in sample(sp, rng, 8, radius=3.0):
            z = prox(f, x)
            fz = f.value(z) + 0.5 * sp.dist(z, x) ** 2
            for y in sample(sp, rng, 150, radius=4.0) + [sp.combine(z, x, 0.01)]:
                assert fz <= f.value(y) + 0.5 * sp.dist(y, x) ** 2 + 1e-7


def test_functions_are_convex(star, branched, rng):
    for f in _functions(star, branched):
        for _ in range(40):
            x, y = sample(f.space, rng, 2, radius=3.0)
            assert convexity_gap(f, x, y, float(rng.uniform())) >= -1e-9
