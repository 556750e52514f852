"""Named mapping instances used by the test suites and the CLI examples."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .convex import (AffineEuclidean, Ball, DistTo, GeodesicSegment, HalfSqDistTo,
                     HalfspaceEuclidean, Subtree, WeightedFrechet)
from .geometry import Point, Space
from .mappings import Projection, Prox, glued_standard
from .spaces import EuclideanSpace, HyperbolicSpace, TreeSpace

# a ten-vertex tree with unequal edge lengths
BRANCHED_TREE = {
    "vertices": 10,
    "edges": [[0, 1, 1.0], [1, 2, 0.5], [1, 3, 2.0], [0, 4, 1.5], [4, 5, 0.7],
              [4, 6, 1.2], [6, 7, 0.9], [0, 8, 2.5], [8, 9, 0.4]],
}


@dataclass
class Instance:
    name: str
    space: Space
    mapping: object
    fixed_point: Optional[Point]
    center: Optional[Point]
    radius: Optional[float]
    expected: dict = field(default_factory=dict)


def spaces() -> dict:
    return {
        "euclid2": EuclideanSpace(2),
        "euclid5": EuclideanSpace(5),
        "hyper2": HyperbolicSpace(2),
        "star3": TreeSpace.star(3),
        "branched": TreeSpace.from_json(BRANCHED_TREE),
    }


def _polar_poincare(H, r, angle):
    return H.from_poincare([r * math.cos(angle), r * math.sin(angle)])


def fmns_instances() -> list:
    """Projections and proximity mappings on all three model spaces."""
    sp = spaces()
    E2, E5, H2 = sp["euclid2"], sp["euclid5"], sp["hyper2"]
    star, tree = sp["star3"], sp["branched"]
    fmns = {"fmns": "pass", "mns": "pass", "nonexpansive": "pass"}
    out = []

    ball = Ball(E2, E2.point([1.0, -0.5]), 1.5)
    out.append(Instance("euclid2-ball-projection", E2, Projection(ball),
                        ball.center, E2.origin(), 5.0, dict(fmns)))

    half = HalfspaceEuclidean(E5, (1.0, 2.0, 0.0, -1.0, 0.5), 1.0)
    out.append(Instance("euclid5-halfspace-projection", E5, Projection(half),
                        half.some_point(), E5.origin(), 4.0, dict(fmns)))

    quad = HalfSqDistTo(E2, E2.point([0.5, 1.0]), 2.0)
    out.append(Instance("euclid2-quadratic-prox", E2, Prox(quad),
                        quad.anchor, E2.origin(), 5.0, dict(fmns)))

    hball = Ball(H2, H2.from_poincare([0.3, 0.1]), 0.8)
    out.append(Instance("hyper2-ball-projection", H2, Projection(hball),
                        hball.center, H2.origin(), 2.5, dict(fmns)))

    seg = GeodesicSegment(H2, H2.from_poincare([-0.5, 0.0]), H2.from_poincare([0.5, 0.0]))
    out.append(Instance("hyper2-segment-projection", H2, Projection(seg),
                        H2.origin(), H2.origin(), 2.5, dict(fmns)))

    # three anchors in rotational symmetry: the minimizer is the origin
    anchors = tuple((_polar_poincare(H2, 0.5, 2 * math.pi * k / 3), 0.5) for k in range(3))
    out.append(Instance("hyper2-frechet-prox", H2, Prox(WeightedFrechet(H2, anchors)),
                        H2.origin(), H2.origin(), 2.5, dict(fmns)))

    sub = Subtree(tree, {0, 1, 4, 5})
    out.append(Instance("tree-subtree-projection", tree, Projection(sub),
                        tree.vertex_point(0), None, None, dict(fmns)))

    leaves = tuple((star.vertex_point(i), 1.0) for i in (1, 2, 3))
    out.append(Instance("tree-frechet-prox", star, Prox(WeightedFrechet(star, leaves)),
                        star.vertex_point(0), None, None, dict(fmns)))

    dist_to = DistTo(tree, tree.vertex_point(7), 0.6)
    out.append(Instance("tree-distance-prox", tree, Prox(dist_to),
                        dist_to.anchor, None, None, dict(fmns)))
    return out


def glued_instances() -> list:
    sp = spaces()
    E2, H2, tree = sp["euclid2"], sp["hyper2"], sp["branched"]
    expected = {"mns": "pass", "fmns": "fail", "nonexpansive": "fail"}
    out = [
        Instance("euclid2-glued", E2, glued_standard(E2, E2.origin(), 1.0),
                 E2.origin(), E2.origin(), 8.0, dict(expected)),
        Instance("hyper2-glued", H2, glued_standard(H2, H2.origin(), 0.5),
                 H2.origin(), H2.origin(), 3.5, dict(expected)),
        # r = 0.5, delta = 1.92: the tree reaches beyond the delta-sphere around vertex 0
        Instance("tree-glued", tree, glued_standard(tree, tree.vertex_point(0), 0.5),
                 tree.vertex_point(0), None, None, dict(expected)),
    ]
    return out


def affine_instance() -> Instance:
    """Translation by a constant vector: firmly mns, fixed-point free."""
    E2 = EuclideanSpace(2)
    f = AffineEuclidean(E2, (1.0, 0.5))
    return Instance("euclid2-affine-prox", E2, Prox(f), None, E2.origin(), 5.0,
                    {"fmns": "pass", "mns": "pass", "nonexpansive": "pass"})


def by_name(name: str) -> Instance:
    for inst in fmns_instances() + glued_instances() + [affine_instance()]:
        if inst.name == name:
            return inst
    raise KeyError(name)
