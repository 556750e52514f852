"""Finite-window surrogates for asymptotic objects.

Asymptotic centers, Delta-limits and the weighted limsup minimizer are all
defined through limits; here they are estimated on explicit windows of a
finite trace.  The outputs are estimates and are labelled as such.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .geometry import GeometryError, Point
from .minimize import mean_square_minimizer, minimax_center
from .solvers import IterationTrace


@dataclass
class AsymptoticCenterEstimate:
    center: Point
    radius: float
    window: tuple
    refinement_residual: float


def default_window(n: int) -> tuple:
    """The last quarter of ``n`` items (at least one), as ``(start, end)``."""
    w = max(1, n // 4)
    return (n - w, n)


def default_windows(n: int) -> list:
    """The last quarter and the quarter before it."""
    w = max(1, n // 4)
    if n < 2:
        raise GeometryError("need at least two points for two windows")
    return [(max(0, n - 2 * w), n - w), (n - w, n)]


def _points_of(obj):
    return obj.iterates if isinstance(obj, IterationTrace) else list(obj)


def asymptotic_center(space, points, window: Optional[tuple] = None) -> AsymptoticCenterEstimate:
    """Minimizer of ``y -> max_{k in window} d(y, x_k)`` and the attained radius."""
    points = _points_of(points)
    start, end = default_window(len(points)) if window is None else window
    chunk = points[start:end]
    if not chunk:
        raise GeometryError(f"empty window {(start, end)}")
    center, radius, refinement = minimax_center(space, chunk)
    return AsymptoticCenterEstimate(center, radius, (start, end), refinement)


def delta_limit_estimate(space, trace, windows=None):
    """Centers of several windows; returns ``(last center, max pairwise gap)``.

    A small gap is necessary-only evidence of Delta-convergence: the estimate
    is the center of the final window.
    """
    points = _points_of(trace)
    if windows is None:
        windows = default_windows(len(points))
    if len(windows) < 2:
        raise GeometryError("need at least two windows")
    centers = [asymptotic_center(space, points, w).center for w in windows]
    gap = 0.0
    for i in range(len(centers)):
        for j in range(i + 1, len(centers)):
            gap = max(gap, space.dist(centers[i], centers[j]))
    return centers[-1], gap


@dataclass
class DoubleSequenceReport:
    values: list                # A(n, n+1) = d(x_n, x_{n+1})^2
    min_hypothesis_slack: float  # min of A(n+1,m) + A(n,m+1) - 2A(n+1,m+1)
    hypothesis_ok: bool
    trend_ok: bool


def double_sequence_residual(orbit, space, max_base: int = 150,
                             tol: float = 1e-7) -> DoubleSequenceReport:
    """Consecutive squared steps of an orbit plus a check of the double-sequence hypothesis.

    For an orbit of a metrically nonspreading map, ``A(n,m) = d(x_n, x_m)^2``
    satisfies ``2A(n+1,m+1) <= A(n+1,m) + A(n,m+1)``; the check runs over all
    base index pairs of a deterministic grid of at most ``max_base`` indices.
    """
    orbit = _points_of(orbit)
    if len(orbit) < 3:
        raise GeometryError("orbit needs at least three points")
    values = [space.dist(a, b) ** 2 for a, b in zip(orbit, orbit[1:])]
    stride = max(1, math.ceil((len(orbit) - 1) / max_base))
    base = list(range(0, len(orbit) - 1, stride))
    cache = {}

    def A(i, j):
        if i == j:
            return 0.0
        key = (i, j) if i < j else (j, i)
        v = cache.get(key)
        if v is None:
            v = cache[key] = space.dist(orbit[key[0]], orbit[key[1]]) ** 2
        return v

    slack = math.inf
    for n in base:
        for m in base:
            slack = min(slack, A(n + 1, m) + A(n, m + 1) - 2.0 * A(n + 1, m + 1))
    trend = values[-1] < values[0] or values[-1] < 1e-6
    return DoubleSequenceReport(values, slack, slack >= -tol, trend)


def g_minimizer(space, images, weights) -> Point:
    """Minimizer of ``(1 / sum w) * sum_k w_k d(y, z_k)^2``."""
    if len(images) == 0:
        raise GeometryError("no images")
    w = [float(v) for v in weights]
    total = math.fsum(w)
    return mean_square_minimizer(space, list(images), [v / total for v in w])


@dataclass
class DemiclosednessReport:
    precondition_ok: bool
    message: str
    center: Optional[Point]
    fixed_point_residual: Optional[float]
    passed: bool


def demiclosedness_probe(T, trace: IterationTrace, window: Optional[tuple] = None,
                         residual_tol: float = 1e-4,
                         pass_tol: float = 1e-3) -> DemiclosednessReport:
    """If the window's residuals are small, its asymptotic center should be fixed by T."""
    space = T.space
    start, end = default_window(len(trace.iterates)) if window is None else window
    res = list(trace.residuals[start:min(end, len(trace.residuals))])
    if end >= len(trace.iterates):
        # the trace stores no residual for its final iterate
        res.append(space.dist(trace.final, T.apply(trace.final)))
    worst = max(res)
    if worst >= residual_tol:
        return DemiclosednessReport(False, f"window residuals too large ({worst:.3e})",
                                    None, None, False)
    est = asymptotic_center(space, trace.iterates, (start, end))
    r = space.dist(est.center, T.apply(est.center))
    return DemiclosednessReport(True, "ok", est.center, r, r < pass_tol)
