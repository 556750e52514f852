"""Closed convex sets and convex functions on the model spaces.

Every set knows its nearest-point projection and every function its
proximity mapping ``argmin_y f(y) + d(y, x)^2 / 2``; both are closed form
except the multi-anchor Frechet objective off Euclidean space, which goes
through :func:`nonspreading.minimize.mean_square_minimizer`.

Convention: ``WeightedFrechet`` is ``f(y) = sum_i w_i d(y, a_i)^2`` with no
factor one half, while ``HalfSqDistTo`` is ``f(y) = (lam / 2) d(y, a)^2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import GeometryError, Point, Space, SpaceTag
from .minimize import mean_square_minimizer
from .spaces import minkowski

MEMBERSHIP_TOL = 1e-9


# ---------------------------------------------------------------- sets

@dataclass(frozen=True, eq=False)
class Ball:
    space: Space
    center: Point
    radius: float

    def __post_init__(self):
        self.space.check(self.center)
        if not self.radius > 0:
            raise GeometryError("ball radius must be positive")

    def membership_slack(self, x):
        return self.space.dist(self.center, x) - self.radius

    def project(self, x):
        d = self.space.dist(self.center, x)
        if d <= self.radius:
            return x
        return self.space.combine(self.center, x, self.radius / d)

    def some_point(self):
        return self.center


@dataclass(frozen=True, eq=False)
class GeodesicSegment:
    """The geodesic segment [a, b]; a == b gives the singleton {a}."""

    space: Space
    a: Point
    b: Point

    def __post_init__(self):
        self.space.check(self.a, self.b)

    def membership_slack(self, x):
        return self.space.dist(x, self.project(x))

    def _param(self, x):
        sp = self.space
        length = sp.dist(self.a, self.b)
        if length == 0.0:
            return 0.0
        if sp.tag is SpaceTag.EUCLIDEAN:
            a, b, p = (np.asarray(q.coords) for q in (self.a, self.b, x))
            return float((p - a) @ (b - a)) / length ** 2
        if sp.tag is SpaceTag.TREE:
            # branch point of x off [a, b], via the Gromov product
            return 0.5 * (sp.dist(self.a, x) + length - sp.dist(self.b, x)) / length
        # hyperbolic: foot of the perpendicular from x to the full geodesic through a, b
        a, b, p = (np.asarray(q.coords) for q in (self.a, self.b, x))
        u = (b + minkowski(a, b) * a) / math.sinh(length)
        ratio = float(minkowski(p, u) / -minkowski(p, a))
        return math.atanh(min(max(ratio, -1.0 + 1e-16), 1.0 - 1e-16)) / length

    def project(self, x):
        if x == self.a or x == self.b:
            return x
        s = min(max(self._param(x), 0.0), 1.0)
        # rounding in the foot-point formula should not move an endpoint
        if s < 1e-14:
            return self.a
        if s > 1.0 - 1e-14:
            return self.b
        return self.space.combine(self.a, self.b, s)

    def some_point(self):
        return self.a


@dataclass(frozen=True, eq=False)
class Subtree:
    """The subtree spanned by a path-closed set of vertices."""

    space: Space
    vertices: frozenset

    def __post_init__(self):
        sp = self.space
        if sp.tag is not SpaceTag.TREE:
            raise GeometryError("subtrees live in tree spaces")
        vs = frozenset(int(v) for v in self.vertices)
        object.__setattr__(self, "vertices", vs)
        if not vs or not all(0 <= v < sp.n_vertices for v in vs):
            raise GeometryError("subtree needs existing vertices")
        inner = sum(1 for u, v, _ in sp.edges if u in vs and v in vs)
        if inner != len(vs) - 1:
            raise GeometryError("subtree vertex set is not connected")
        object.__setattr__(self, "_sorted", sorted(vs))

    def _inside(self, x):
        e, _ = x.coords
        u, v, _ = self.space.edges[e]
        vert = self.space.vertex_of(x)
        if vert is not None:
            return vert in self.vertices
        return u in self.vertices and v in self.vertices

    def membership_slack(self, x):
        if self._inside(x):
            return 0.0
        dv = self.space.distances_from(x)
        return float(min(dv[v] for v in self._sorted))

    def project(self, x):
        if self._inside(x):
            return x
        dv = self.space.distances_from(x)
        best = min(self._sorted, key=lambda v: dv[v])
        return self.space.vertex_point(best)

    def some_point(self):
        return self.space.vertex_point(self._sorted[0])


@dataclass(frozen=True, eq=False)
class HalfspaceEuclidean:
    """``{y : <normal, y> <= offset}``."""

    space: Space
    normal: tuple
    offset: float

    def __post_init__(self):
        if self.space.tag is not SpaceTag.EUCLIDEAN:
            raise GeometryError("halfspaces live in Euclidean space")
        n = np.asarray(self.normal, dtype=float)
        if n.shape != (self.space.dim,) or not np.linalg.norm(n) > 0:
            raise GeometryError("halfspace normal must be a nonzero vector")
        object.__setattr__(self, "normal", tuple(float(v) for v in n))

    def membership_slack(self, x):
        n = np.asarray(self.normal)
        return (float(n @ np.asarray(x.coords)) - self.offset) / float(np.linalg.norm(n))

    def project(self, x):
        n = np.asarray(self.normal)
        p = np.asarray(x.coords)
        excess = float(n @ p) - self.offset
        if excess <= 0.0:
            return x
        return self.space.point(p - excess / float(n @ n) * n)

    def some_point(self):
        n = np.asarray(self.normal)
        return self.space.point(self.offset / float(n @ n) * n)


ConvexSet = (Ball, GeodesicSegment, Subtree, HalfspaceEuclidean)


def membership_slack(C, x: Point) -> float:
    """Nonpositive exactly when x belongs to C."""
    C.space.check(x)
    return C.membership_slack(x)


# ---------------------------------------------------------------- functions

@dataclass(frozen=True, eq=False)
class HalfSqDistTo:
    """``f(y) = (weight / 2) d(y, anchor)^2``."""

    space: Space
    anchor: Point
    weight: float = 1.0

    def __post_init__(self):
        self.space.check(self.anchor)
        if not self.weight > 0:
            raise GeometryError("weight must be positive")

    def value(self, y):
        return 0.5 * self.weight * self.space.dist(y, self.anchor) ** 2

    def prox(self, x):
        # the minimizer sits on [x, anchor] at fraction lam / (1 + lam)
        lam = self.weight
        return self.space.combine(x, self.anchor, lam / (1.0 + lam))

    def minimizer(self):
        return self.anchor


@dataclass(frozen=True, eq=False)
class WeightedFrechet:
    """``f(y) = sum_i w_i d(y, a_i)^2``; ``anchors`` is a tuple of (point, weight)."""

    space: Space
    anchors: tuple

    def __post_init__(self):
        anchors = tuple((p, float(w)) for p, w in self.anchors)
        if not anchors:
            raise GeometryError("Frechet objective needs at least one anchor")
        for p, w in anchors:
            self.space.check(p)
            if not w > 0:
                raise GeometryError("Frechet weights must be positive")
        object.__setattr__(self, "anchors", anchors)

    def value(self, y):
        return math.fsum(w * self.space.dist(y, p) ** 2 for p, w in self.anchors)

    def prox(self, x):
        pts = [p for p, _ in self.anchors] + [x]
        wts = [2.0 * w for _, w in self.anchors] + [1.0]
        return mean_square_minimizer(self.space, pts, wts)

    def minimizer(self):
        return mean_square_minimizer(self.space, [p for p, _ in self.anchors],
                                     [w for _, w in self.anchors])


@dataclass(frozen=True, eq=False)
class IndicatorOf:
    set: object

    @property
    def space(self):
        return self.set.space

    def value(self, y):
        return 0.0 if self.set.membership_slack(y) <= MEMBERSHIP_TOL else math.inf

    def prox(self, x):
        return self.set.project(x)

    def minimizer(self):
        return self.set.some_point()


@dataclass(frozen=True, eq=False)
class DistTo:
    """``f(y) = weight * d(y, anchor)``."""

    space: Space
    anchor: Point
    weight: float = 1.0

    def __post_init__(self):
        self.space.check(self.anchor)
        if not self.weight > 0:
            raise GeometryError("weight must be positive")

    def value(self, y):
        return self.weight * self.space.dist(y, self.anchor)

    def prox(self, x):
        # move from x towards the anchor by `weight`, never past it
        d = self.space.dist(x, self.anchor)
        if d <= self.weight:
            return self.anchor
        return self.space.combine(x, self.anchor, self.weight / d)

    def minimizer(self):
        return self.anchor


@dataclass(frozen=True, eq=False)
class AffineEuclidean:
    """``f(y) = <gradient, y> + constant``; its prox is translation by -gradient."""

    space: Space
    gradient: tuple
    constant: float = 0.0

    def __post_init__(self):
        if self.space.tag is not SpaceTag.EUCLIDEAN:
            raise GeometryError("affine functions live in Euclidean space")
        g = tuple(float(v) for v in self.gradient)
        if len(g) != self.space.dim:
            raise GeometryError("gradient has the wrong dimension")
        object.__setattr__(self, "gradient", g)

    def value(self, y):
        return math.fsum(g * v for g, v in zip(self.gradient, y.coords)) + self.constant

    def prox(self, x):
        return self.space.point([v - g for v, g in zip(x.coords, self.gradient)])

    def minimizer(self):
        if any(self.gradient):
            return None
        return self.space.origin()


ConvexFunction = (HalfSqDistTo, WeightedFrechet, IndicatorOf, DistTo, AffineEuclidean)


def eval_function(f, x: Point) -> float:
    f.space.check(x)
    return f.value(x)


def convexity_gap(f, x: Point, y: Point, alpha: float) -> float:
    """``(1-a) f(x) + a f(y) - f((1-a)x (+) a y)``; nonnegative for convex f."""
    m = f.space.combine(x, y, alpha)
    return (1.0 - alpha) * f.value(x) + alpha * f.value(y) - f.value(m)
