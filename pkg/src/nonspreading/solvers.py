"""Picard, Mann and cyclic fixed-point iterations with full trace capture."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .geometry import GeometryError, Point

# d(x1, x_n) > DIVERGENCE_FACTOR * (1 + d(x1, T x1)) stops a run as unbounded
DIVERGENCE_FACTOR = 100.0


@dataclass(frozen=True)
class StepSchedule:
    """Mann step sizes alpha_n, n = 1, 2, ...

    Build with :meth:`constant`, :meth:`harmonic` (``1 / (n + 1)``) or
    :meth:`custom`.
    """

    kind: str
    alpha: Optional[float] = None
    values: tuple = ()

    def __post_init__(self):
        if self.kind == "constant":
            if self.alpha is None or not 0.0 < self.alpha <= 1.0:
                raise GeometryError("constant step must lie in (0, 1]")
        elif self.kind == "custom":
            vals = tuple(float(a) for a in self.values)
            if not vals or not all(0.0 < a <= 1.0 for a in vals):
                raise GeometryError("custom steps must be a nonempty list in (0, 1]")
            object.__setattr__(self, "values", vals)
        elif self.kind != "harmonic":
            raise GeometryError(f"unknown schedule {self.kind!r}")

    @classmethod
    def constant(cls, alpha: float) -> "StepSchedule":
        return cls("constant", alpha=float(alpha))

    @classmethod
    def harmonic(cls) -> "StepSchedule":
        return cls("harmonic")

    @classmethod
    def custom(cls, values) -> "StepSchedule":
        return cls("custom", values=tuple(values))

    def __call__(self, n: int) -> float:
        if self.kind == "constant":
            return self.alpha
        if self.kind == "harmonic":
            return 1.0 / (n + 1)
        return self.values[n - 1]

    def length(self) -> Optional[int]:
        return len(self.values) if self.kind == "custom" else None

    @property
    def sum_diverges(self) -> bool:
        # a finite custom prefix has a finite sum; see `caveat`
        return self.kind != "custom"

    @property
    def inf_alpha_one_minus_alpha(self) -> float:
        if self.kind == "constant":
            return self.alpha * (1.0 - self.alpha)
        if self.kind == "harmonic":
            return 0.0
        return min(a * (1.0 - a) for a in self.values)

    @property
    def caveat(self) -> Optional[str]:
        if self.kind == "custom":
            return f"flags computed from a finite prefix of {len(self.values)} steps"
        return None

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "sum_diverges": self.sum_diverges,
               "inf_alpha_one_minus_alpha": self.inf_alpha_one_minus_alpha}
        if self.alpha is not None:
            out["alpha"] = self.alpha
        if self.kind == "custom":
            out["n_values"] = len(self.values)
            out["caveat"] = self.caveat
        return out


@dataclass
class IterationTrace:
    """Iterates ``x_1 .. x_{m+1}`` with per-step data for ``n = 1 .. m``.

    ``residuals[n-1] = d(x_n, T x_n)`` and ``steps[n-1] = d(x_{n+1}, x_n)``;
    ``ref_dists`` (when a reference point u was given) has one entry per
    iterate.
    """

    method: str
    iterates: list
    residuals: list = field(default_factory=list)
    steps: list = field(default_factory=list)
    ref_dists: Optional[list] = None
    schedule: Optional[StepSchedule] = None
    termination: str = "max_iter"
    component_residuals: Optional[list] = None

    def __post_init__(self):
        self.check()

    def check(self):
        m = len(self.steps)
        if len(self.residuals) != m or len(self.iterates) != m + 1:
            raise GeometryError("inconsistent trace lengths")
        if self.ref_dists is not None and len(self.ref_dists) != m + 1:
            raise GeometryError("inconsistent reference-distance length")
        if any(r < 0 for r in self.residuals):
            raise GeometryError("negative residual")

    @property
    def n_iter(self) -> int:
        return len(self.steps)

    @property
    def final(self) -> Point:
        return self.iterates[-1]


def _run(method, T_step, space, x1, max_iter, tol, reference,
         schedule=None, divergence_factor=DIVERGENCE_FACTOR):
    if max_iter < 1:
        raise GeometryError("max_iter must be at least 1")
    if not tol > 0:
        raise GeometryError("tol must be positive")
    space.check(x1)
    if reference is not None:
        space.check(reference)
    trace = IterationTrace(method, [x1], schedule=schedule,
                           ref_dists=None if reference is None else [space.dist(reference, x1)])
    x = x1
    threshold = None
    limit = schedule.length() if schedule is not None else None
    for n in range(1, max_iter + 1):
        if limit is not None and n > limit:
            trace.termination = "schedule_exhausted"
            break
        x_next, r = T_step(x, n)
        if threshold is None:
            threshold = divergence_factor * (1.0 + r)
        step = space.dist(x_next, x)
        trace.iterates.append(x_next)
        trace.residuals.append(r)
        trace.steps.append(step)
        if reference is not None:
            trace.ref_dists.append(space.dist(reference, x_next))
        x = x_next
        if step < tol:
            trace.termination = "converged"
            break
        if space.dist(x1, x) > threshold:
            trace.termination = "unbounded"
            break
    trace.check()
    return trace


def picard(T, x1: Point, max_iter: int = 1000, tol: float = 1e-12,
           reference: Optional[Point] = None,
           divergence_factor: float = DIVERGENCE_FACTOR) -> IterationTrace:
    """Iterate ``x_{n+1} = T x_n``; stop when the step drops below ``tol``."""
    space = T.space

    def step(x, n):
        tx = T.apply(x)
        return tx, space.dist(x, tx)

    return _run("picard", step, space, x1, max_iter, tol, reference,
                divergence_factor=divergence_factor)


def mann(T, x1: Point, schedule: StepSchedule, max_iter: int = 1000, tol: float = 1e-12,
         reference: Optional[Point] = None,
         divergence_factor: float = DIVERGENCE_FACTOR) -> IterationTrace:
    """Iterate ``x_{n+1} = (1 - a_n) x_n (+) a_n T x_n`` along geodesics."""
    space = T.space

    def step(x, n):
        tx = T.apply(x)
        return space.combine(x, tx, schedule(n)), space.dist(x, tx)

    return _run("mann", step, space, x1, max_iter, tol, reference,
                schedule=schedule, divergence_factor=divergence_factor)


def cyclic_picard(family, x1: Point, max_iter: int = 1000, tol: float = 1e-12,
                  reference: Optional[Point] = None,
                  divergence_factor: float = DIVERGENCE_FACTOR) -> IterationTrace:
    """Apply the family in cyclic order; one trace step is one full sweep.

    ``component_residuals`` holds ``d(x, T_k x)`` at the final iterate.  For
    families without a common fixed point these stay positive; that is
    reported, not raised.
    """
    family = list(family)
    if not family:
        raise GeometryError("empty family")
    space = family[0].space
    if any(T.space is not space for T in family):
        raise GeometryError("family members must share a space")

    def step(x, n):
        y = x
        for T in family:
            y = T.apply(y)
        return y, space.dist(x, y)

    trace = _run("cyclic", step, space, x1, max_iter, tol, reference,
                 divergence_factor=divergence_factor)
    trace.component_residuals = [space.dist(trace.final, T.apply(trace.final)) for T in family]
    return trace


def fejer_slack(trace: IterationTrace) -> float:
    """``min_n ref_dists[n] - ref_dists[n+1]``; nonnegative for a Fejer run."""
    r = trace.ref_dists
    if r is None:
        raise GeometryError("trace has no reference distances")
    if len(r) < 2:
        return math.inf
    return min(a - b for a, b in zip(r, r[1:]))


def telescoping_excess(trace: IterationTrace, reference_dist: float) -> float:
    """``sum_n step_n^2 - d(u, x_1)^2``; nonpositive for a firmly mns Picard run."""
    return math.fsum(s * s for s in trace.steps) - reference_dist ** 2


def mann_residual_excess(trace: IterationTrace, reference_dist: float) -> float:
    """``alpha (1 - alpha) sum_n residual_n^2 - d(u, x_1)^2`` for a constant-step run."""
    sch = trace.schedule
    if sch is None or sch.kind != "constant":
        raise GeometryError("needs a constant-step Mann trace")
    return sch.inf_alpha_one_minus_alpha * math.fsum(r * r for r in trace.residuals) \
        - reference_dist ** 2
