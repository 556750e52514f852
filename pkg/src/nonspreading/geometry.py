"""Geodesic-space primitives.

Points, point pairs, the quasilinearization bracket and the numerical
checks of the CAT(0) inequalities.  Concrete model spaces live in
:mod:`nonspreading.spaces`; everything here only talks to a space through
``dist`` and ``combine``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

# algebraic identities must vanish to this absolute level
IDENTITY_TOL = 1e-9
# inequalities may be violated by at most this much (floating point)
INEQUALITY_SLACK = -1e-9


class GeometryError(ValueError):
    """Raised for domain errors: mismatched spaces, parameters out of range."""


class SpaceTag(str, enum.Enum):
    EUCLIDEAN = "euclidean"
    HYPERBOLIC = "hyperbolic"
    TREE = "tree"


@dataclass(frozen=True)
class Point:
    """A point of one of the model spaces.

    ``coords`` is a tuple: the Euclidean coordinates, the hyperboloid
    coordinates ``(s_1, ..., s_n, t)`` with ``t > 0``, or ``(edge_id, offset)``
    for a metric tree.  Two points compare equal iff they are canonically
    the same point.
    """

    tag: SpaceTag
    coords: tuple

    def __repr__(self):
        return f"Point({self.tag.value}, {self.coords})"


@dataclass(frozen=True)
class Pair:
    """The ordered pair (tail, head), written xy with an arrow in the literature."""

    tail: Point
    head: Point

    def __post_init__(self):
        if self.tail.tag is not self.head.tag:
            raise GeometryError(
                f"pair mixes {self.tail.tag.value} and {self.head.tag.value} points")

    def reversed(self) -> "Pair":
        return Pair(self.head, self.tail)


class Space:
    """Base class of the uniquely geodesic model spaces.

    Subclasses implement ``_dist`` and ``_combine`` on already validated
    points; the public ``dist``/``combine`` check membership first.
    """

    tag: SpaceTag

    def check(self, *points: Point) -> None:
        for p in points:
            if not isinstance(p, Point) or p.tag is not self.tag:
                got = p.tag.value if isinstance(p, Point) else type(p).__name__
                raise GeometryError(f"point of type {got} used in {self.tag.value} space")
            if not self._fits(p):
                raise GeometryError(f"point {p!r} does not belong to {self!r}")

    def _fits(self, p: Point) -> bool:
        return True

    def dist(self, x: Point, y: Point) -> float:
        self.check(x, y)
        return self._dist(x, y)

    def sqdist(self, x: Point, y: Point) -> float:
        """Squared distance; exact sum of squares in Euclidean space."""
        return self.dist(x, y) ** 2

    def combine(self, x: Point, y: Point, alpha: float) -> Point:
        """The point ``(1 - alpha) x (+) alpha y`` on the geodesic from x to y."""
        self.check(x, y)
        if not 0.0 <= alpha <= 1.0 or math.isnan(alpha):
            raise GeometryError(f"alpha={alpha!r} outside [0, 1]")
        if alpha == 0.0:
            return x
        if alpha == 1.0:
            return y
        return self._combine(x, y, alpha)

    def _dist(self, x, y):
        raise NotImplementedError

    def _combine(self, x, y, alpha):
        raise NotImplementedError

    # sampling and I/O hooks, overridden by the model spaces
    def random_point(self, rng, center=None, radius=1.0) -> Point:
        raise NotImplementedError

    def random_on_sphere(self, rng, center: Point, radius: float):
        raise NotImplementedError

    def to_native(self, x: Point):
        raise NotImplementedError

    def from_native(self, obj) -> Point:
        raise NotImplementedError

    def native_columns(self) -> list[str]:
        raise NotImplementedError


def dist(space: Space, x: Point, y: Point) -> float:
    return space.dist(x, y)


def combine(space: Space, x: Point, y: Point, alpha: float) -> Point:
    return space.combine(x, y, alpha)


def quasi_inner(space: Space, xy: Pair, zw: Pair) -> float:
    """Quasilinearization of two pairs.

    ``0.5 * (d(x,w)^2 + d(y,z)^2 - d(x,z)^2 - d(y,w)^2)``; in a Hilbert space
    this is the inner product of ``x - y`` and ``z - w``.
    """
    x, y = xy.tail, xy.head
    z, w = zw.tail, zw.head
    d2 = space.sqdist
    return 0.5 * (d2(x, w) + d2(y, z) - d2(x, z) - d2(y, w))


class IdentityResiduals(NamedTuple):
    self_pairing: float
    symmetry: float
    splitting: float
    cosine_law: float

    def worst(self) -> float:
        return max(abs(v) for v in self)


def quasi_identity_residuals(space: Space, x, y, z, w, p) -> IdentityResiduals:
    """Residuals of the four elementary identities of the bracket.

    * ``<xy, xy> = d(x,y)^2``
    * ``<xy, zw> = <zw, xy> = -<yx, zw>`` (the larger of the two gaps)
    * ``<xp, zw> + <py, zw> = <xy, zw>``
    * ``d(x,y)^2 = d(x,z)^2 + d(z,y)^2 + 2 <xz, zy>``
    """
    xy, zw = Pair(x, y), Pair(z, w)
    q = quasi_inner(space, xy, zw)
    r_self = quasi_inner(space, xy, xy) - space.sqdist(x, y)
    r_sym = max(abs(q - quasi_inner(space, zw, xy)),
                abs(q + quasi_inner(space, xy.reversed(), zw)))
    r_split = (quasi_inner(space, Pair(x, p), zw)
               + quasi_inner(space, Pair(p, y), zw) - q)
    r_cos = (space.sqdist(x, y)
             - space.sqdist(x, z) - space.sqdist(z, y)
             - 2.0 * quasi_inner(space, Pair(x, z), Pair(z, y)))
    return IdentityResiduals(r_self, r_sym, r_split, r_cos)


def cauchy_schwarz_slack(space: Space, xy: Pair, zw: Pair) -> float:
    """``d(x,y) d(z,w) - |<xy, zw>|``, nonnegative exactly in CAT(0) spaces."""
    lhs = space.dist(xy.tail, xy.head) * space.dist(zw.tail, zw.head)
    return lhs - abs(quasi_inner(space, xy, zw))


def convexity_slacks(space: Space, x: Point, y: Point, z: Point,
                     alpha: float) -> tuple[float, float]:
    """Slacks of the two convexity inequalities for ``m = (1-alpha)x (+) alpha y``.

    Returns ``(s1, s2)`` with

    ``s1 = (1-a) d(z,x) + a d(z,y) - d(z,m)``

    ``s2 = (1-a) d(z,x)^2 + a d(z,y)^2 - a(1-a) d(x,y)^2 - d(z,m)^2``
    """
    m = space.combine(x, y, alpha)
    dzx, dzy, dzm = space.dist(z, x), space.dist(z, y), space.dist(z, m)
    dxy = space.dist(x, y)
    s1 = (1.0 - alpha) * dzx + alpha * dzy - dzm
    s2 = ((1.0 - alpha) * dzx ** 2 + alpha * dzy ** 2
          - alpha * (1.0 - alpha) * dxy ** 2 - dzm ** 2)
    return s1, s2
