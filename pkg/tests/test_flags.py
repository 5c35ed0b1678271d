from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from prolong36.chart import Chart, Echelon, VectorField, lie_bracket
from prolong36.errors import DependentFrame, NotBasic, NotCoordinateAligned, NotInvariant
from prolong36.flags import (
    Distribution,
    Splitting,
    cauchy_characteristic,
    derived_flag,
    growth_at_point,
    project_fields,
    reduce_by_integrable,
    structure_coefficients,
)
from prolong36.models import check_bracket_table
from prolong36.scalar import Scalar
from prolong36.structures import random_polynomial

R6 = Chart(("x1", "x2", "x3", "x4", "x5", "x6"))


def d(chart: Chart, name: str) -> VectorField:
    return VectorField.coordinate(chart, name)


def involutive() -> Distribution:
    return Distribution(R6, [d(R6, "x1"), d(R6, "x2"), d(R6, "x3")])


def canonical(fields) -> list[VectorField]:
    return Echelon.of(list(fields), track=False).frame()


def test_involutive_growth():
    report = derived_flag(involutive())
    assert report.growth == [3, 3] and report.stabilized


def test_model_growth(models):
    report = derived_flag(models["F3"].distribution)
    assert report.growth == [3, 6] and report.stabilized


def test_prolonged_growth(example_tower):
    assert derived_flag(example_tower.projective.distribution).growth == [3, 5, 7, 8]


def test_growth_nondecreasing_and_levels_nested(example_tower):
    report = derived_flag(example_tower.fiber_line.distribution)
    assert report.growth == sorted(report.growth)
    for k in range(1, len(report.growth)):
        outer = Echelon.of(report.level(k + 1), track=False)
        assert all(outer.contains(v) for v in report.level(k))


def test_max_depth_truncates(models):
    assert derived_flag(models["F123"].distribution, max_depth=3).growth == [3, 5, 7]
    with pytest.raises(ValueError):
        derived_flag(involutive(), max_depth=0)


def test_dependent_frame_rejected():
    with pytest.raises(DependentFrame):
        Distribution(R6, [d(R6, "x1"), R6.parse("x2") * d(R6, "x1")])


def test_growth_at_origin(models):
    m = models["F3"]
    origin = {c: 0 for c in m.chart.coordinates}
    assert growth_at_point(m.distribution, origin) == [3, 6]


def test_growth_at_point_involutive():
    assert growth_at_point(involutive(), {c: 3 for c in R6.coordinates}) == [3, 3]


def test_iterated_prolongation_at_point(example_tower):
    F = example_tower.fiber_line
    rng = random.Random(11)
    point = {c: Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for c in F.chart.coordinates}
    jets = {"m": 2, "m'": 1, "m''": 3, "m'''": -1}
    assert growth_at_point(F.distribution, point, jets) == [3, 5, 7, 8, 9]


def test_structure_coefficients_commuting_frame():
    table = structure_coefficients([d(R6, "x1"), d(R6, "x2"), d(R6, "x3")])
    assert all(e.closed and not e.combination for e in table.values())


def test_structure_coefficients_full_flag_model(models):
    m = models["F123"]
    table = structure_coefficients(m.named)
    entry = table[(2, 4)]  # [theta3, theta5]
    assert entry.closed and entry.combination == {6: Scalar.const(1)}


def test_full_flag_printed_table(models):
    m = models["F123"]
    assert len(m.table) >= 18
    assert all(c.passed for c in check_bracket_table(m.named, m.table))


def test_second_model_corrected_table(models):
    m = models["F23"]
    checks = {str(c.relation): c.passed for c in check_bracket_table(m.corrected_named, m.corrected_table)}
    assert checks["[2,7] = v8"] and all(checks.values())


def test_cauchy_characteristic_of_involutive():
    D = involutive()
    assert cauchy_characteristic(D).canonical_frame() == D.canonical_frame()


def test_cauchy_characteristics_of_prolongation(example_tower):
    P = example_tower.projective
    report = derived_flag(P.distribution)
    E2 = Distribution(P.chart, report.level(2))
    E3 = Distribution(P.chart, report.level(3))
    assert cauchy_characteristic(E2).canonical_frame() == canonical(P.splitting.part("E2"))
    assert cauchy_characteristic(E3).canonical_frame() == canonical(P.splitting.part("E1"))


def test_reduce_recovers_base(example_tower):
    P = example_tower.projective
    level2 = derived_flag(P.distribution).level(2)
    back = reduce_by_integrable(level2, P.splitting.part("E2"))
    assert back.canonical_frame() == P.base.canonical_frame()


def test_reduce_rejects_bad_subbundles(example_tower):
    P = example_tower.projective
    with pytest.raises(NotInvariant):
        reduce_by_integrable(P.distribution, P.splitting.part("E2"))
    chart = P.chart
    with pytest.raises(NotCoordinateAligned):
        reduce_by_integrable(P.distribution, [P.frame[0]])
    with pytest.raises(NotBasic):
        project_fields([chart.parse("z2") * d(chart, "x1")], [d(chart, "z2")])


def test_splitting_partition():
    D = involutive()
    split = Splitting(D, {"A": [0], "B": [1, 2]})
    assert split.names() == ["A", "B"] and split.part("B") == D.frame[1:]
    with pytest.raises(ValueError):
        Splitting(D, {"A": [0], "B": [1]})
    with pytest.raises(ValueError):
        Splitting(D, {"A": [0, 1, 2], "B": []})


# ---------------------------------------------------------------------------
# growth is a property of the span, not of the frame


def _frame_change(rng: random.Random, frame: list[VectorField]) -> list[VectorField]:
    chart = frame[0].chart
    out = []
    # triangular mixing with nonzero constant diagonal, then a shuffle
    for i, v in enumerate(frame):
        w = Scalar.const(rng.choice([1, 2, -1, Fraction(1, 3)])) * v
        for u in frame[:i]:
            if rng.random() < 0.6:
                w = w + random_polynomial(rng, chart.coordinates, degree=2, terms=2) * u
        out.append(w)
    rng.shuffle(out)
    return out


@given(st.integers(0, 10**6))
def test_growth_invariant_under_frame_change(models, seed):
    rng = random.Random(seed)
    D = models["F3"].distribution
    changed = Distribution(D.chart, _frame_change(rng, list(D.frame)))
    assert derived_flag(changed).growth == [3, 6]


@given(st.integers(0, 10**6))
def test_growth_invariant_on_prolongation(example_tower, seed):
    rng = random.Random(seed)
    E = example_tower.projective.distribution
    changed = Distribution(E.chart, _frame_change(rng, list(E.frame)))
    assert derived_flag(changed).growth == [3, 5, 7, 8]


def test_bracket_with_lower_levels_stays(example_tower):
    E = example_tower.projective.distribution
    report = derived_flag(E)
    level3 = Echelon.of(report.level(3), track=False)
    for x in E.frame:
        for y in report.level(2):
            assert level3.contains(lie_bracket(x, y))
