from __future__ import annotations

from fractions import Fraction

import pytest

from prolong36.chart import Chart, VectorField, lie_bracket
from prolong36.errors import ConstantM, UnknownModel
from prolong36.flags import Distribution, derived_flag
from prolong36.models import (
    METRIC,
    MODEL_NAMES,
    BracketRelation,
    build_example_family,
    build_model,
    check_bracket_table,
    gradation_algebra,
)
from prolong36.scalar import Scalar

EXPECTED_GROWTH = {"F123": (3, 5, 7, 8, 9), "F23": (3, 5, 7, 8), "F13": (4, 6, 8), "F3": (3, 6)}
EXPECTED_DIM = {"F123": 9, "F23": 8, "F13": 8, "F3": 6}


def relation(model, i: int, j: int) -> BracketRelation:
    table = model.corrected_table or model.table
    return next(r for r in table if (r.i, r.j) == (i, j))


def holds(model, rel: BracketRelation) -> bool:
    named = model.corrected_named or model.named
    return check_bracket_table(named, [rel])[0].passed


def test_metric_signature():
    assert METRIC.is_symmetric()
    assert METRIC.signature() == (3, 4)


def test_model_names():
    assert MODEL_NAMES == ("F123", "F23", "F13", "F3")
    with pytest.raises(UnknownModel):
        build_model("bogus")


@pytest.mark.parametrize("name", MODEL_NAMES)
def test_nullity_constraints_vanish(models, name):
    m = models[name]
    assert all(r.is_zero() for r in m.nullity_residues().values())
    assert m.constraints == m.printed_constraints


@pytest.mark.parametrize("name", MODEL_NAMES)
def test_pfaff_system_and_frame(models, name):
    m = models[name]
    assert m.pfaff_matches_printed()
    assert m.frame_matches_printed()
    assert m.chart.dim == EXPECTED_DIM[name]
    assert len(m.pfaff) == m.chart.dim - len(m.frame)


@pytest.mark.parametrize("name", MODEL_NAMES)
def test_growth(models, name):
    m = models[name]
    assert tuple(derived_flag(m.distribution).growth) == EXPECTED_GROWTH[name] == m.growth


@pytest.mark.parametrize("name", ["F123", "F13", "F3"])
def test_printed_tables(models, name):
    m = models[name]
    failed = [str(c.relation) for c in check_bracket_table(m.named, m.table) if not c.passed]
    assert failed == []


def test_second_model_printed_sign(models):
    # the printed [zeta2, zeta7] = zeta8 with zeta8 = -d/dz61 is off by a sign
    m = models["F23"]
    checks = check_bracket_table(m.named, m.table)
    failed = [c for c in checks if not c.passed]
    assert [str(c.relation) for c in failed] == ["[2,7] = v8"]
    residue = failed[0].residue
    assert residue == Scalar.const(2) * VectorField.coordinate(m.chart, "z61")
    assert all(c.passed for c in check_bracket_table(m.corrected_named, m.corrected_table))


def test_base_model_brackets(models):
    m = models["F3"]
    x1, x2 = m.frame[:2]
    assert lie_bracket(x1, x2) == -VectorField.coordinate(m.chart, "x61")
    for i in range(3):
        for j in range(3, 6):
            assert lie_bracket(m.named[i], m.named[j]).is_zero()


def test_full_flag_model_relations(models):
    m = models["F123"]
    assert str(relation(m, 1, 3)) == "[1,3] = 0" and holds(m, relation(m, 1, 3))
    assert str(relation(m, 3, 4)) == "[3,4] = -v6" and holds(m, relation(m, 3, 4))
    assert str(relation(m, 3, 5)) == "[3,5] = v7" and holds(m, relation(m, 3, 5))
    assert len(m.table) == 18


def test_dual_model_relations(models):
    m = models["F13"]
    assert str(relation(m, 1, 4)) == "[1,4] = 0" and holds(m, relation(m, 1, 4))
    assert str(relation(m, 4, 5)) == "[4,5] = -v7" and holds(m, relation(m, 4, 5))


def test_gradation_full_flag(models):
    m = models["F123"]
    g = gradation_algebra(m)
    assert g.is_constant()
    assert g.relation(3, 5).value == ((7, Fraction(1)),)
    assert g.relation(2, 8).value == ((9, Fraction(1)),)
    assert g.dims() == [3, 2, 2, 1, 1]
    assert g.agrees_with(m.table) == []


def test_gradation_second_model(models):
    m = models["F23"]
    g = gradation_algebra(m)
    assert str(g.relation(2, 7)) == "[2,7] = v8"
    assert str(g.relation(3, 6)) == "[3,6] = -v8"
    assert g.agrees_with(m.corrected_table) == []


@pytest.mark.parametrize("name", ["F13", "F3"])
def test_gradation_matches_table(models, name):
    m = models[name]
    g = gradation_algebra(m)
    assert g.is_constant() and g.agrees_with(m.table) == []


def test_gradation_of_involutive_distribution():
    chart = Chart(("x1", "x2", "x3"))
    D = Distribution(chart, [VectorField.coordinate(chart, c) for c in chart.coordinates])
    g = gradation_algebra(D)
    assert g.brackets == {} and g.dims() == [3]


def test_gradation_from_flag_generators(models):
    g = gradation_algebra(models["F3"].distribution)
    assert g.dims() == [3, 3] and g.is_constant()


def test_relation_rendering():
    assert str(BracketRelation.of(1, 2, 4)) == "[1,2] = v4"
    assert str(BracketRelation.of(3, 6, -8)) == "[3,6] = -v8"
    assert str(BracketRelation.of(1, 3)) == "[1,3] = 0"
    assert str(BracketRelation.of(1, 2, {4: 1, 5: Fraction(-1, 2)})) == "[1,2] = v4 - 1/2*v5"


# ---------------------------------------------------------------------------
# example family


def test_example_formal():
    D = build_example_family()
    assert derived_flag(D).growth == [3, 6]
    assert D.chart.symbols() == {"m": "x6"}


def test_example_polynomial():
    D = build_example_family("x6^2")
    assert derived_flag(D).growth == [3, 6]
    assert D.frame[0]["x6"] == D.chart.parse("x2 + x6^2")


def test_example_rejects_constant_and_foreign_names():
    with pytest.raises(ConstantM):
        build_example_family("3")
    with pytest.raises(ValueError):
        build_example_family("x1 + x6")
    with pytest.raises(ValueError):
        build_example_family("1/x6")
