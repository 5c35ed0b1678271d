from __future__ import annotations

import pytest

from prolong36.models import build_example_family
from prolong36.scalar import Scalar
from prolong36.towers import (
    DUAL_TO_F13,
    PROJECTIVE_TO_F23,
    fiber_to_f123,
    model_coherence,
    reversed_base,
    round_trip_dual,
    round_trip_fiber_line,
    round_trip_projective,
    routes_coincide,
    tower_report,
)


@pytest.fixture(scope="module")
def coherence():
    return {r.target: r for r in model_coherence()}


@pytest.mark.parametrize("target", ["F23", "F123", "F13"])
def test_prolongations_of_base_model_are_the_flag_models(coherence, target):
    report = coherence[target]
    assert report.frame_equal, target
    assert report.parts_equal and all(report.parts_equal.values()), report.to_dict()


@pytest.mark.parametrize("ident", [PROJECTIVE_TO_F23, DUAL_TO_F13, fiber_to_f123("v")])
def test_identifications_are_inverse(ident):
    for name, expr in ident.forward.items():
        assert expr.subs(ident.inverse) == Scalar.var(name)
    for name, expr in ident.inverse.items():
        assert expr.subs(ident.forward) == Scalar.var(name)


def test_fiber_coordinate_sign():
    assert fiber_to_f123("v").forward["v"] == -Scalar.var("w21")


def test_reversed_base_is_the_model_span(models):
    D = reversed_base(models["F3"])
    assert D.same_span(models["F3"].distribution)
    assert D.frame[0] == models["F3"].frame[2]


@pytest.mark.parametrize("which", ["example_tower", "model_tower"])
def test_round_trips(request, which):
    tower = request.getfixturevalue(which)
    assert round_trip_projective(tower.projective).passed
    fib = round_trip_fiber_line(tower.fiber_line)
    assert fib.passed, fib.detail
    assert "growth (3, 5, 7, 8)" in fib.detail
    assert round_trip_dual(tower.dual).passed


@pytest.mark.parametrize("which", ["example_tower", "model_tower"])
def test_routes_coincide(request, which):
    tower = request.getfixturevalue(which)
    routes = routes_coincide(tower.fiber_line, tower.cone)
    assert routes.coincide
    assert routes.growth_fiber == routes.growth_cone == [3, 5, 7, 8, 9]


def test_routes_differ_on_mismatched_inputs(example_tower, model_tower):
    routes = routes_coincide(example_tower.fiber_line, model_tower.cone)
    assert not routes.coincide


def test_tower_report_on_polynomial_family():
    report = tower_report(build_example_family("x6^2"))
    assert report.passed
    assert report.projective.solved_coefficients["b"] == report.projective.chart.parse("-2*x6*z3")
