"""Self-mappings of a model space and their classification.

A mapping is one of ``Projection``, ``Prox``, ``Glued``, ``Composition`` or
``Identity``.  :func:`classify` samples point pairs and reports the worst
slack of each defining inequality:

* metrically nonspreading (mns): ``2 d(Tx,Ty)^2 <= d(Tx,y)^2 + d(Ty,x)^2``
* firmly mns (fmns): the same with ``d(Tx,x)^2 + d(Ty,y)^2`` added on the left
* nonexpansive: ``d(Tx,Ty) <= d(x,y)``
* quasinonexpansive, given a fixed point u: ``d(u,Tx) <= d(u,x)``
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .geometry import GeometryError, Pair, Point, Space, quasi_inner

CLASSIFY_TOL = -1e-7
GLUED_RATIO = 1.0 + 2.0 * math.sqrt(2.0)
PROPERTIES = ("mns", "fmns", "nonexpansive", "quasi")


@dataclass(frozen=True, eq=False)
class Projection:
    set: object

    @property
    def space(self):
        return self.set.space

    def apply(self, x):
        return self.set.project(x)

    def fixed_point(self):
        return self.set.some_point()


@dataclass(frozen=True, eq=False)
class Prox:
    function: object

    @property
    def space(self):
        return self.function.space

    def apply(self, x):
        return self.function.prox(x)

    def fixed_point(self):
        return self.function.minimizer()


@dataclass(frozen=True, eq=False)
class Glued:
    """``U x = S x`` on the closed ball of radius ``delta`` about ``center``, else ``T x``.

    Needs ``delta >= (1 + 2 sqrt 2) r`` and both S and T mapping into the
    closed ball of radius r about the center; U is then metrically
    nonspreading but discontinuous across the delta-sphere.
    """

    S: object
    T: object
    center: Point
    r: float
    delta: float

    def __post_init__(self):
        self.S.space.check(self.center)
        if self.T.space is not self.S.space:
            raise GeometryError("glued branches must act on the same space")
        if not self.r > 0:
            raise GeometryError("glued mapping needs r > 0")
        if self.delta < GLUED_RATIO * self.r * (1.0 - 1e-12):
            raise GeometryError(
                f"glued mapping needs delta >= (1 + 2 sqrt 2) r = {GLUED_RATIO * self.r:.12g}")

    @property
    def space(self):
        return self.S.space

    def apply(self, x):
        if self.space.dist(x, self.center) <= self.delta:
            return self.S.apply(x)
        return self.T.apply(x)

    def fixed_point(self):
        p = self.S.fixed_point()
        if p is not None and self.apply(p) == p:
            return p
        return None


@dataclass(frozen=True, eq=False)
class Composition:
    """Apply ``maps[0]`` first, then ``maps[1]``, and so on."""

    maps: tuple

    def __post_init__(self):
        maps = tuple(self.maps)
        if not maps:
            raise GeometryError("empty composition")
        if any(m.space is not maps[0].space for m in maps):
            raise GeometryError("composed mappings must share a space")
        object.__setattr__(self, "maps", maps)

    @property
    def space(self):
        return self.maps[0].space

    def apply(self, x):
        for m in self.maps:
            x = m.apply(x)
        return x

    def fixed_point(self):
        return None


@dataclass(frozen=True, eq=False)
class Identity:
    space: Space

    def apply(self, x):
        return x

    def fixed_point(self):
        return None


def apply(T, x: Point) -> Point:
    T.space.check(x)
    return T.apply(x)


def project(C, x: Point) -> Point:
    """Nearest point of the closed convex set C to x."""
    C.space.check(x)
    return C.project(x)


def prox(f, x: Point) -> Point:
    """Proximity mapping ``argmin_y f(y) + d(y, x)^2 / 2``."""
    f.space.check(x)
    return f.prox(x)


def glued_apply(U: Glued, x: Point) -> Point:
    return apply(U, x)


def glued_range_excess(U: Glued, points) -> float:
    """Largest ``d(Sx, a) - r`` or ``d(Tx, a) - r`` over the sampled points."""
    sp = U.space
    worst = -math.inf
    for x in points:
        for branch in (U.S, U.T):
            worst = max(worst, sp.dist(branch.apply(x), U.center) - U.r)
    return worst


def glued_standard(space, center: Point, r: float, delta: Optional[float] = None) -> Glued:
    """The standard counterexample: S projects onto {center}, T onto the r-ball."""
    from .convex import Ball, GeodesicSegment

    if delta is None:
        delta = GLUED_RATIO * r
    return Glued(Projection(GeodesicSegment(space, center, center)),
                 Projection(Ball(space, center, r)), center, r, delta)


def resolvent_inclusion_slack(f, x: Point, z: Point, samples) -> float:
    """``min_y f(y) - f(z) - <zx, zy>`` over the sampled y.

    Nonnegative (up to rounding) iff the dual vector ``[zx]`` acts as a
    subgradient of f at z on the sample, i.e. z is the resolvent of the
    subdifferential at x.
    """
    sp = f.space
    sp.check(x, z)
    fz = f.value(z)
    if not math.isfinite(fz):
        return -math.inf
    zx = Pair(z, x)
    best = math.inf
    for y in samples:
        fy = f.value(y)
        if not math.isfinite(fy):
            continue
        best = min(best, fy - fz - quasi_inner(sp, zx, Pair(z, y)))
    return best


# ---------------------------------------------------------------- sampling

@dataclass
class PairSampler:
    """Seeded source of points and point pairs in a ball of the space."""

    space: Space
    center: Optional[Point] = None
    radius: Optional[float] = 1.0
    seed: int = 0
    rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        self.rng = np.random.default_rng(self.seed)

    def point(self):
        return self.space.random_point(self.rng, self.center, self.radius)

    def points(self, n):
        return [self.point() for _ in range(n)]

    def pairs(self, n):
        return [(self.point(), self.point()) for _ in range(n)]


def _glued_parts(T):
    if isinstance(T, Glued):
        return [T] + _glued_parts(T.S) + _glued_parts(T.T)
    if isinstance(T, Composition):
        return [g for m in T.maps for g in _glued_parts(m)]
    return []


def straddling_pairs(U: Glued, rng, count: int):
    """Pairs on a common ray from the center, one at distance <= delta and one beyond."""
    sp, a, delta = U.space, U.center, U.delta
    out = []
    for i in range(count):
        eps_out = U.r * 10.0 ** rng.uniform(-6.0, 0.0)
        eps_in = U.r * 10.0 ** rng.uniform(-6.0, 0.0)
        q = sp.random_on_sphere(rng, a, delta + eps_out)
        if q is None:
            continue
        inner = delta if i % 2 == 0 else delta - eps_in
        frac = inner / (delta + eps_out)
        x = sp.combine(a, q, frac)
        # rounding may put the "on the sphere" point just outside; step it back in
        for _ in range(64):
            if sp.dist(x, a) <= delta:
                break
            frac = math.nextafter(frac, 0.0)
            x = sp.combine(a, q, frac)
        else:
            continue
        out.append((x, q))
    return out


# ---------------------------------------------------------------- classify

@dataclass
class ClassificationReport:
    n_samples: int
    worst_slack_mns: float
    worst_slack_fmns: float
    worst_slack_nonexp: float
    worst_slack_quasi: Optional[float]
    worst_bracket_slack: float
    max_bracket_residual: float
    max_equivalence_residual: float
    witnesses: dict
    verdicts: dict
    tolerance: float = CLASSIFY_TOL

    def to_dict(self, space) -> dict:
        wit = {k: [space.to_native(p) for p in v] for k, v in self.witnesses.items()}
        return {
            "n_samples": self.n_samples,
            "tolerance": self.tolerance,
            "worst_slack": {
                "mns": self.worst_slack_mns,
                "fmns": self.worst_slack_fmns,
                "nonexpansive": self.worst_slack_nonexp,
                "quasi": self.worst_slack_quasi,
            },
            "worst_bracket_slack": self.worst_bracket_slack,
            "max_bracket_residual": self.max_bracket_residual,
            "max_equivalence_residual": self.max_equivalence_residual,
            "verdicts": dict(self.verdicts),
            "witnesses": wit,
        }


def pair_slacks(space, x, y, tx, ty):
    """Per-pair slacks ``(mns, fmns, nonexp, bracket, bracket_res, equiv_res)``.

    ``bracket`` is ``<(Tx)(Ty), xy> - d(Tx,Ty)^2``, which equals half the
    fmns slack identically; ``bracket_res`` is that discrepancy.
    ``equiv_res`` is the discrepancy in the rewriting of the mns slack as
    ``d(Ty,y)^2 + 2 <(Tx)(Ty), (Ty)y> + d(Ty,x)^2 - d(Tx,Ty)^2``.
    """
    d = space.dist
    a = d(tx, y) ** 2
    b = d(ty, x) ** 2
    dtt = d(tx, ty)
    c = dtt * dtt
    ex = d(tx, x) ** 2
    ey = d(ty, y) ** 2
    mns = a + b - 2.0 * c
    fmns = mns - ex - ey
    nonexp = d(x, y) - dtt
    txty = Pair(tx, ty)
    bracket = quasi_inner(space, txty, Pair(x, y)) - c
    equiv = ey + 2.0 * quasi_inner(space, txty, Pair(ty, y)) + b - c
    return mns, fmns, nonexp, bracket, bracket - 0.5 * fmns, mns - equiv


def _evaluate_chunk(T, pairs):
    space = T.space
    cache = {}

    def img(p):
        v = cache.get(p)
        if v is None:
            v = cache[p] = T.apply(p)
        return v

    return np.array([pair_slacks(space, x, y, img(x), img(y)) for x, y in pairs]).reshape(-1, 6)


def evaluate_pairs(T, pairs, jobs: int = 1) -> np.ndarray:
    """Slack table (one row per pair, columns as in :func:`pair_slacks`).

    Rows come back in input order whatever the worker count.
    """
    if jobs <= 1 or len(pairs) < 2 * jobs:
        return _evaluate_chunk(T, pairs)
    size = math.ceil(len(pairs) / jobs)
    chunks = [pairs[i:i + size] for i in range(0, len(pairs), size)]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        parts = list(ex.map(_evaluate_chunk, [T] * len(chunks), chunks))
    return np.vstack(parts)


def classify(T, sampler: PairSampler, n: int, fixed_point: Optional[Point] = None,
             jobs: int = 1, tol: float = CLASSIFY_TOL) -> ClassificationReport:
    """Sample-based verdicts for the four mapping classes.

    All properties are evaluated on one pair set: ``n`` random pairs,
    straddling pairs for every glued component, and, when a fixed point u is
    given, the pairs ``(x, u)`` for the sampled x.  On ``(x, u)`` the mns
    slack is ``d(u,x)^2 - d(u,Tx)^2``, the squared-form quasinonexpansive slack,
    so the implications fmns => mns => quasi hold verdict-wise.
    """
    if n < 1:
        raise GeometryError("need at least one sample")
    space = T.space
    pairs = sampler.pairs(n)
    for g in _glued_parts(T):
        pairs += straddling_pairs(g, sampler.rng, max(64, n // 10))
    n_base = len(pairs)
    if fixed_point is not None:
        space.check(fixed_point)
        pairs += [(x, fixed_point) for x, _ in pairs[:n]]
    table = evaluate_pairs(T, pairs, jobs)

    def worst(col, rows=slice(None)):
        values = table[rows, col]
        i = int(np.argmin(values))
        return float(values[i]), i

    mns, i_mns = worst(0)
    fmns, i_fmns = worst(1)
    nonexp, i_nonexp = worst(2)
    bracket, _ = worst(3)
    witnesses = {
        "mns": list(pairs[i_mns]),
        "fmns": list(pairs[i_fmns]),
        "nonexpansive": list(pairs[i_nonexp]),
    }
    quasi = None
    if fixed_point is not None:
        quasi, iq = worst(0, slice(n_base, None))
        witnesses["quasi"] = list(pairs[n_base + iq])

    def verdict(v):
        if v is None:
            return "n/a"
        return "pass" if v >= tol else "fail"

    return ClassificationReport(
        n_samples=len(pairs),
        worst_slack_mns=mns,
        worst_slack_fmns=fmns,
        worst_slack_nonexp=nonexp,
        worst_slack_quasi=quasi,
        worst_bracket_slack=bracket,
        max_bracket_residual=float(np.abs(table[:, 4]).max()),
        max_equivalence_residual=float(np.abs(table[:, 5]).max()),
        witnesses=witnesses,
        verdicts={"mns": verdict(mns), "fmns": verdict(fmns),
                  "nonexpansive": verdict(nonexp), "quasi": verdict(quasi)},
        tolerance=tol,
    )


# ---------------------------------------------------------------- bounded on bounded

@dataclass
class ImageBound:
    n_samples: int
    image_radius: float
    diameter_estimate: float
    bound: float
    passed: bool


def image_bound_check(T, center: Point, radius: float, points) -> ImageBound:
    """Check that a mns mapping sends the ball B(center, radius) into a bounded set.

    With ``e = d(center, T center)`` every image of the ball lies within
    ``e + sqrt(2 e^2 + (e + radius)^2)`` of ``T center``; this follows from
    the mns inequality at ``(x, center)`` and Cauchy-Schwarz for the bracket.
    """
    sp = T.space
    tc = T.apply(center)
    e = sp.dist(center, tc)
    bound = e + math.sqrt(2.0 * e * e + (e + radius) ** 2)
    images = [T.apply(x) for x in points]
    rad = max((sp.dist(tc, y) for y in images), default=0.0)
    diam = 0.0
    if images:
        a = max(images, key=lambda p: sp.dist(images[0], p))
        diam = max(sp.dist(a, p) for p in images)
    return ImageBound(len(images), rad, diam, bound, rad <= bound * (1.0 + 1e-12) + 1e-12)
