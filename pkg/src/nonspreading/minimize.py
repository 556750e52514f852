"""Minimizers shared by the proximity mappings and the diagnostics.

Two problems, each solved per model space:

* ``mean_square_minimizer``: argmin of ``sum_k c_k d(y, p_k)^2``.  Weighted
  mean in Euclidean space, exact per-edge quadratics on trees, Riemannian
  Newton iteration on the hyperboloid.
* ``minimax_center``: argmin of ``max_k d(y, p_k)`` (Chebyshev center).
  Exact diameter midpoint on trees, a scaled SLSQP program in Euclidean and
  hyperbolic space, followed by a golden-section polish along geodesics.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .geometry import GeometryError, Point, SpaceTag
from .spaces import _chordal_sq, minkowski


class SolverError(ArithmeticError):
    """An inner minimization missed its tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


def _check_inputs(points, weights):
    if len(points) == 0:
        raise GeometryError("need at least one point")
    c = np.asarray(weights, dtype=float)
    if c.shape != (len(points),):
        raise GeometryError("one weight per point required")
    if not np.all(c > 0):
        raise GeometryError("weights must be positive")
    return c


def mean_square_objective(space, y, points, weights) -> float:
    return math.fsum(w * space.dist(y, p) ** 2 for p, w in zip(points, weights))


def mean_square_minimizer(space, points, weights) -> Point:
    """Unique minimizer of ``y -> sum_k weights[k] * d(y, points[k])^2``."""
    c = _check_inputs(points, weights)
    space.check(*points)
    if len(points) == 1 or all(p == points[0] for p in points):
        return points[0]
    if space.tag is SpaceTag.EUCLIDEAN:
        P = np.array([p.coords for p in points])
        return space.point(c @ P / c.sum())
    if space.tag is SpaceTag.TREE:
        return _tree_mean_square(space, points, c)
    return _hyperbolic_mean_square(space, points, c)


def _tree_mean_square(space, points, c):
    # On a fixed edge every d(y, p)^2 is (t - s_p)^2 for a constant s_p, so the
    # objective restricted to the edge is an explicit quadratic in the offset t.
    U = np.array([e[0] for e in space.edges])
    V = np.array([e[1] for e in space.edges])
    L = space.lengths
    dv = np.array([space.distances_from(p) for p in points])
    du, dw = dv[:, U], dv[:, V]
    s = np.where(du < dw, -du, L[None, :] + dw)
    for i, p in enumerate(points):
        e, t = p.coords
        s[i, e] = t
    t_opt = np.clip(c @ s / c.sum(), 0.0, L)
    obj = (c[:, None] * (t_opt[None, :] - s) ** 2).sum(axis=0)
    e = int(np.argmin(obj))
    return space._canonical(e, float(t_opt[e]))


def _tangent_basis(y):
    """Minkowski-orthonormal basis of the tangent space at hyperboloid point y."""
    n = len(y) - 1
    basis = []
    for k in range(n):
        w = np.zeros(n + 1)
        w[k] = 1.0
        w = w + y[k] * y
        for b in basis:
            w = w - minkowski(w, b) * b
        w = w / math.sqrt(minkowski(w, w))
        basis.append(w)
    return np.array(basis)


def _hyperbolic_mean_square(space, points, c, max_iter=100):
    P = np.array([p.coords for p in points])
    total = c.sum()
    v = c @ P
    y = space.from_spatial(v[:-1] / math.sqrt(-minkowski(v, v)))

    def dists(qa):
        q = _chordal_sq(P[:, :-1], qa[:-1], P[:, -1], qa[-1])
        return 2.0 * np.arcsinh(0.5 * np.sqrt(q))

    ya = np.asarray(y.coords)
    d = dists(ya)
    f = 0.5 * float(c @ d ** 2)
    gnorm = math.inf
    eye = np.eye(space.dim)
    for _ in range(max_iter):
        logs = space.log(ya, P)
        E = _tangent_basis(ya)
        coords = minkowski(logs[:, None, :], E[None, :, :])   # (k, n)
        g = -(c[:, None] * coords).sum(axis=0)
        gnorm = float(np.linalg.norm(g))
        if gnorm <= 1e-15 * total * (1.0 + d.max()):
            break
        H = np.zeros((space.dim, space.dim))
        for ci, di, vi in zip(c, d, coords):
            if di < 1e-12:
                H += ci * eye
                continue
            u = vi / di
            uu = np.outer(u, u)
            H += ci * (uu + (di / math.tanh(di)) * (eye - uu))
        step = -np.linalg.solve(H, g)
        size = float(np.linalg.norm(step))
        if size <= 1e-6 * (1.0 + d.max()):
            # inside the quadratic-convergence region full steps are safe, and
            # a line search would only be comparing rounding noise in f
            y = space.exp(ya, step @ E)
            ya = np.asarray(y.coords)
            d = dists(ya)
            f = 0.5 * float(c @ d ** 2)
            if size <= 1e-12 * (1.0 + d.max()):
                break
            continue
        slope = float(g @ step)
        t = 1.0
        while True:
            cand = space.exp(ya, t * (step @ E))
            ca = np.asarray(cand.coords)
            dc = dists(ca)
            fc = 0.5 * float(c @ dc ** 2)
            if fc <= f + 1e-4 * t * slope or t < 1e-10:
                break
            t *= 0.5
        if fc > f:
            break
        y, ya, d, f = cand, ca, dc, fc
    if gnorm > 1e-8 * total * (1.0 + f):
        raise SolverError(f"hyperbolic mean-square solve stalled, |grad|={gnorm:.3e}", gnorm)
    return y


def _double_sweep(space, points):
    """Farthest pair found by two farthest-point sweeps (exact on trees)."""
    a = max(points, key=lambda p: space.dist(points[0], p))
    b = max(points, key=lambda p: space.dist(a, p))
    return a, b


def minimax_center(space, points, refine=True):
    """Chebyshev center of a finite point set.

    Returns ``(center, radius, refinement)`` where ``refinement`` is how much
    the golden-section polish lowered the radius (zero when the primary
    solver was already optimal).
    """
    if len(points) == 0:
        raise GeometryError("need at least one point")
    space.check(*points)
    unique = list(dict.fromkeys(points))
    if len(unique) == 1:
        return unique[0], 0.0, 0.0
    a, b = _double_sweep(space, unique)
    if space.tag is SpaceTag.TREE:
        center = space.combine(a, b, 0.5)
        return center, max(space.dist(center, p) for p in unique), 0.0
    center = _slsqp_center(space, unique, space.combine(a, b, 0.5), space.dist(a, b))
    radius = max(space.dist(center, p) for p in unique)
    if not refine:
        return center, radius, 0.0
    center, new_radius = _geodesic_polish(space, unique, center, radius)
    return center, new_radius, radius - new_radius


def _slsqp_center(space, points, ref, scale):
    n = space.dim
    if space.tag is SpaceTag.EUCLIDEAN:
        r = np.asarray(ref.coords)
        X = (np.array([p.coords for p in points]) - r) / scale

        def q(z):
            diff = z[None, :] - X
            return (diff ** 2).sum(axis=1), 2.0 * diff

        def back(z):
            return space.point(r + scale * z)
    else:
        # move ref to the origin, then work in spatial coordinates scaled by
        # the set diameter; q = <y-x, y-x> = 4 sinh^2(d/2) is monotone in d
        inv = Point(ref.tag, tuple(-v for v in ref.coords[:-1]) + (ref.coords[-1],))
        X = np.array([space.boost(inv, np.asarray(p.coords)).coords for p in points])
        Xs, Xt = X[:, :-1], X[:, -1]

        def q(z):
            s = scale * z
            tau = math.sqrt(1.0 + s @ s)
            ds = s[None, :] - Xs
            cross = (ds * (s[None, :] + Xs)).sum(axis=1)
            dt = cross / (tau + Xt)
            val = (ds ** 2).sum(axis=1) - dt ** 2
            grad = 2.0 * (ds - dt[:, None] * (s[None, :] / tau))
            return val / scale ** 2, grad / scale

        def back(z):
            y = space.from_spatial(scale * z)
            return space.boost(ref, np.asarray(y.coords))

    z0 = np.zeros(n)
    t0 = float(q(z0)[0].max())
    x0 = np.append(z0, t0)
    cons = {
        "type": "ineq",
        "fun": lambda v: v[-1] - q(v[:-1])[0],
        "jac": lambda v: np.hstack([-q(v[:-1])[1], np.ones((len(points), 1))]),
    }
    res = minimize(lambda v: v[-1], x0, jac=lambda v: np.append(np.zeros(n), 1.0),
                   constraints=[cons], method="SLSQP",
                   options={"ftol": 1e-15, "maxiter": 500})
    cand = back(res.x[:-1])
    # SLSQP may return a slightly infeasible or worse point; keep the better one
    if max(space.dist(cand, p) for p in points) <= max(space.dist(ref, p) for p in points):
        return cand
    return ref


def _geodesic_polish(space, points, center, radius):
    def radius_at(c):
        return max(space.dist(c, p) for p in points)

    for _ in range(3):
        far = sorted(points, key=lambda p: -space.dist(center, p))[:3]
        targets = list(far)
        for i in range(len(far)):
            for j in range(i + 1, len(far)):
                targets.append(space.combine(far[i], far[j], 0.5))
        improved = False
        for target in targets:
            if space.dist(center, target) == 0.0:
                continue
            res = minimize_scalar(lambda s: radius_at(space.combine(center, target, s)),
                                  bounds=(0.0, 1.0), method="bounded",
                                  options={"xatol": 1e-12})
            if res.fun < radius - 1e-15 * max(1.0, radius):
                center = space.combine(center, target, float(res.x))
                radius = radius_at(center)
                improved = True
        if not improved:
            break
    return center, radius
