"""Randomized invariant suites over the geometric primitives.

Samples are drawn in the calling process from one seeded generator, then
evaluated in ordered chunks, so results do not depend on the worker count.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .geometry import (IDENTITY_TOL, INEQUALITY_SLACK, Pair, cauchy_schwarz_slack,
                       convexity_slacks, quasi_identity_residuals)


@dataclass
class SuiteResult:
    name: str
    n_samples: int
    worst: float
    witness: list
    passed: bool
    tolerance: float
    detail: dict

    def to_dict(self, space) -> dict:
        return {
            "n_samples": self.n_samples,
            "worst": self.worst,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "witness": [space.to_native(p) if hasattr(p, "coords") else p
                        for p in self.witness],
            **self.detail,
        }


def _cs_rows(space, rows):
    return [cauchy_schwarz_slack(space, Pair(x, y), Pair(z, w)) for x, y, z, w in rows]


def _identity_rows(space, rows):
    return [list(quasi_identity_residuals(space, *r)) for r in rows]


def _convexity_rows(space, rows):
    return [list(convexity_slacks(space, x, y, z, a)) for x, y, z, a in rows]


def _map_chunks(fn, space, rows, jobs):
    if jobs <= 1 or len(rows) < 2 * jobs:
        return fn(space, rows)
    size = math.ceil(len(rows) / jobs)
    chunks = [rows[i:i + size] for i in range(0, len(rows), size)]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        parts = ex.map(fn, [space] * len(chunks), chunks)
        return [v for part in parts for v in part]


def cauchy_schwarz_suite(space, sampler, n: int, jobs: int = 1,
                         tol: float = INEQUALITY_SLACK) -> SuiteResult:
    """Worst ``d(x,y) d(z,w) - |<xy, zw>|`` over ``n`` random quadruples."""
    rows = [tuple(sampler.points(4)) for _ in range(n)]
    vals = np.asarray(_map_chunks(_cs_rows, space, rows, jobs))
    i = int(np.argmin(vals))
    return SuiteResult("cauchy_schwarz", n, float(vals[i]), list(rows[i]),
                       bool(vals[i] >= tol), tol, {})


def identity_suite(space, sampler, n: int, jobs: int = 1,
                   tol: float = IDENTITY_TOL) -> SuiteResult:
    """Largest absolute residual of the four bracket identities over ``n`` quintuples."""
    rows = [tuple(sampler.points(5)) for _ in range(n)]
    vals = np.abs(np.asarray(_map_chunks(_identity_rows, space, rows, jobs))).reshape(-1, 4)
    per_row = vals.max(axis=1)
    i = int(np.argmax(per_row))
    names = ("self_pairing", "symmetry", "splitting", "cosine_law")
    detail = {"max_residual": {k: float(v) for k, v in zip(names, vals.max(axis=0))}}
    return SuiteResult("identities", n, float(per_row[i]), list(rows[i]),
                       bool(per_row[i] < tol), tol, detail)


def convexity_suite(space, sampler, n: int, jobs: int = 1,
                    tol: float = INEQUALITY_SLACK) -> SuiteResult:
    """Worst slack of the distance and squared-distance convexity inequalities."""
    rows = []
    for _ in range(n):
        x, y, z = sampler.points(3)
        rows.append((x, y, z, float(sampler.rng.uniform())))
    vals = np.asarray(_map_chunks(_convexity_rows, space, rows, jobs)).reshape(-1, 2)
    per_row = vals.min(axis=1)
    i = int(np.argmin(per_row))
    x, y, z, a = rows[i]
    detail = {"worst_linear": float(vals[:, 0].min()), "worst_squared": float(vals[:, 1].min()),
              "witness_alpha": a}
    return SuiteResult("convexity", n, float(per_row[i]), [x, y, z],
                       bool(per_row[i] >= tol), tol, detail)
