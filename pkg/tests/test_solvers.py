import math

import numpy as np
import pytest

from nonspreading import (Ball, EuclideanSpace, GeometryError, HalfSqDistTo, Identity,
                          IterationTrace, Projection, Prox, StepSchedule, cyclic_picard,
                          fejer_slack, mann, mann_residual_excess, picard, telescoping_excess)
from nonspreading.instances import affine_instance, fmns_instances

E2 = EuclideanSpace(2)
p = E2.point
HALVING = Prox(HalfSqDistTo(E2, p([0, 0]), 1.0))


def test_schedules():
    c = StepSchedule.constant(0.3)
    assert c(1) == c(50) == 0.3
    assert c.sum_diverges and c.inf_alpha_one_minus_alpha == pytest.approx(0.21)
    h = StepSchedule.harmonic()
    assert h(1) == 0.5 and h(9) == 0.1
    assert h.sum_diverges and h.inf_alpha_one_minus_alpha == 0.0
    u = StepSchedule.custom([0.5, 0.25])
    assert u(2) == 0.25 and u.length() == 2
    assert not u.sum_diverges and "prefix" in u.caveat
    assert u.to_dict()["caveat"] == u.caveat
    for bad in (lambda: StepSchedule.constant(0.0), lambda: StepSchedule.constant(1.5),
                lambda: StepSchedule.custom([]), lambda: StepSchedule.custom([0.5, 0.0]),
                lambda: StepSchedule("weird")):
        with pytest.raises(GeometryError):
            bad()


def test_picard_halving_closed_form():
    tr = picard(HALVING, p([8, 0]), max_iter=60, tol=1e-300)
    for n, x in enumerate(tr.iterates):
        assert x.coords == pytest.approx((8.0 * 2.0 ** -n, 0.0), abs=1e-12)
    assert [x.coords[0] for x in tr.iterates[:5]] == [8, 4, 2, 1, 0.5]
    assert tr.termination == "max_iter" and tr.n_iter == 60
    assert tr.steps[0] == tr.residuals[0] == 4.0


def test_picard_stopping_rules():
    tr = picard(Identity(E2), p([1, 2]))
    assert tr.n_iter == 1 and tr.residuals == [0.0] and tr.termination == "converged"
    proj = Projection(Ball(E2, p([0, 0]), 1.0))
    tr = picard(proj, p([5, 5]))
    assert tr.n_iter == 2 and tr.termination == "converged"   # one move, then a zero step
    with pytest.raises(GeometryError):
        picard(HALVING, p([1, 0]), max_iter=0)
    with pytest.raises(GeometryError):
        picard(HALVING, p([1, 0]), tol=0.0)


def test_mann_closed_forms():
    tr = mann(HALVING, p([8, 0]), StepSchedule.constant(0.5), max_iter=3)
    assert tr.iterates[3].coords == pytest.approx((3.375, 0.0), abs=1e-15)
    a = mann(HALVING, p([8, 1]), StepSchedule.constant(1.0), max_iter=30)
    b = picard(HALVING, p([8, 1]), max_iter=30)
    assert a.iterates == b.iterates


def test_mann_custom_schedule_exhausts():
    tr = mann(HALVING, p([8, 0]), StepSchedule.custom([0.5, 0.5, 0.5]), max_iter=10)
    assert tr.n_iter == 3 and tr.termination == "schedule_exhausted"


def test_translation_is_flagged_unbounded():
    inst = affine_instance()
    for run in (lambda x: picard(inst.mapping, x),
                lambda x: mann(inst.mapping, x, StepSchedule.constant(0.5))):
        tr = run(p([0, 0]))
        assert tr.termination == "unbounded" and tr.n_iter < 1000


def test_reference_distances_are_fejer():
    for inst in fmns_instances():
        x1 = inst.space.random_point(np.random.default_rng(3), inst.center, inst.radius)
        for tr in (picard(inst.mapping, x1, max_iter=200, reference=inst.fixed_point),
                   mann(inst.mapping, x1, StepSchedule.constant(0.5), max_iter=200,
                        reference=inst.fixed_point)):
            assert fejer_slack(tr) >= -1e-9
        tr = picard(inst.mapping, x1, max_iter=200, reference=inst.fixed_point)
        assert telescoping_excess(tr, tr.ref_dists[0]) <= 1e-6
        tm = mann(inst.mapping, x1, StepSchedule.constant(0.3), max_iter=200,
                  reference=inst.fixed_point)
        assert mann_residual_excess(tm, tm.ref_dists[0]) <= 1e-6


def test_fejer_needs_reference():
    tr = picard(HALVING, p([1, 0]), max_iter=3)
    with pytest.raises(GeometryError):
        fejer_slack(tr)
    with pytest.raises(GeometryError):
        mann_residual_excess(tr, 1.0)


def test_trace_consistency_check():
    with pytest.raises(GeometryError):
        IterationTrace("picard", [p([0, 0])], residuals=[0.0], steps=[])
    with pytest.raises(GeometryError):
        IterationTrace("picard", [p([0, 0]), p([0, 0])], residuals=[-1.0], steps=[0.0])


def test_cyclic_intersecting_balls():
    A = Projection(Ball(E2, p([0, 0]), 1.0))
    B = Projection(Ball(E2, p([1.5, 0]), 1.0))
    tr = cyclic_picard([A, B], p([0.75, 5.0]), max_iter=5000, tol=1e-13)
    assert tr.termination == "converged"
    assert max(tr.component_residuals) < 1e-6
    x = tr.final
    assert E2.dist(x, p([0, 0])) <= 1 + 1e-6 and E2.dist(x, p([1.5, 0])) <= 1 + 1e-6


def test_cyclic_disjoint_balls_stall_at_the_gap():
    A = Projection(Ball(E2, p([0, 0]), 1.0))
    B = Projection(Ball(E2, p([3, 0]), 1.0))
    tr = cyclic_picard([A, B], p([0, 4]), max_iter=500, tol=1e-14)
    assert max(tr.component_residuals) == pytest.approx(1.0, abs=1e-6)   # distance between the balls


def test_cyclic_identity_family_stops_immediately():
    tr = cyclic_picard([Identity(E2)], p([1, 1]))
    assert tr.n_iter == 1 and tr.component_residuals == [0.0]
    with pytest.raises(GeometryError):
        cyclic_picard([], p([1, 1]))
