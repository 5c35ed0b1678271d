from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from prolong36.chart import Chart, VectorField
from prolong36.flags import Distribution, Splitting
from prolong36.structures import (
    bracket_lemma_suite,
    check_b3_13,
    check_b3_23,
    check_b3_123,
    congruence_defects,
    constrained_triple,
    random_polynomial_field,
    triple_identity_correction,
    triple_identity_defect,
)

R3 = Chart(("x1", "x2", "x3"))
R6 = Chart(("x1", "x2", "x3", "x4", "x5", "x6"))


def flatten_m(result) -> tuple[Distribution, Splitting]:
    """The same frame with m constant, so m' and every higher jet vanish."""
    D = result.distribution
    jets = {"m(x6)": 0, "m'(x6)": 0, "m''(x6)": 0}
    frame = [v.subs(jets) for v in D.frame]
    flat = Distribution(D.chart, frame)
    return flat, Splitting(flat, result.splitting.as_dict())


def test_b3_23_on_model(models):
    m = models["F23"]
    cert = check_b3_23(m.distribution, m.splitting)
    assert cert.overall, cert.first_failure


def test_b3_23_on_prolongations(example_tower, model_tower):
    for P in (example_tower.projective, model_tower.projective):
        assert check_b3_23(P.distribution, P.splitting).overall


def test_b3_23_fails_on_involutive():
    D = Distribution(R6, [VectorField.coordinate(R6, c) for c in ("x1", "x2", "x3")])
    cert = check_b3_23(D, Splitting(D, {"E1": [0], "E2": [1, 2]}))
    assert not cert.overall
    assert cert.first_failure.condition == "[E1,E2] = E^(2)"
    assert cert.first_failure.witness == "rank 3, expected 5"


def test_b3_123_on_model(models):
    m = models["F123"]
    assert check_b3_123(m.distribution, m.splitting).overall


def test_b3_123_on_prolongations(example_tower, model_tower):
    for tower in (example_tower, model_tower):
        for result in (tower.fiber_line, tower.cone):
            cert = check_b3_123(result.distribution, result.splitting)
            assert cert.overall, (result.kind, cert.first_failure)


def test_b3_123_retry_is_recorded(example_tower):
    F = example_tower.fiber_line
    cert = check_b3_123(F.distribution, F.splitting)
    assert cert.notes and "theta3 replaced" in cert.notes[0]
    assert not check_b3_123(F.distribution, F.splitting, retry=False).overall


def test_b3_123_with_swapped_parts(models):
    m = models["F123"]
    D = m.distribution
    swapped = Splitting(D, {"F1": [0], "F2": [2], "F3": [1]})
    cert = check_b3_123(D, swapped)
    assert not cert.overall and cert.first_failure is not None
    assert cert.first_failure.witness


def test_b3_13_on_model(models):
    m = models["F13"]
    assert check_b3_13(m.distribution, m.splitting, "generalized").overall
    assert check_b3_13(m.distribution, m.splitting, "strict").overall


def test_b3_13_on_dual_prolongation(example_tower):
    S = example_tower.dual
    assert check_b3_13(S.distribution, S.splitting, "generalized").overall
    strict = check_b3_13(S.distribution, S.splitting, "strict")
    assert not strict.overall
    assert strict.first_failure.condition == "[l1,l5] in <l1,l2,l5>"
    assert strict.first_failure.witness


def test_b3_13_strict_after_flattening(example_tower):
    flat, split = flatten_m(example_tower.dual)
    assert check_b3_13(flat, split, "strict").overall


def test_b3_13_unknown_mode(models):
    m = models["F13"]
    with pytest.raises(ValueError):
        check_b3_13(m.distribution, m.splitting, "loose")


def test_certificate_serializes(models):
    m = models["F13"]
    data = check_b3_13(m.distribution, m.splitting, "strict").to_dict()
    assert data["overall"] is True
    assert all(set(c) >= {"condition", "passed"} for c in data["conditions"])


# ---------------------------------------------------------------------------
# triple-bracket identity and congruences


def test_identity_on_commuting_fields():
    z = [VectorField.coordinate(R3, c) for c in R3.coordinates]
    assert triple_identity_defect(*z).is_zero()
    assert triple_identity_correction(*z).is_zero()


@given(st.integers(0, 10**6))
def test_corrected_identity(seed):
    rng = random.Random(seed)
    z = [random_polynomial_field(rng, R3) for _ in range(3)]
    assert triple_identity_defect(*z) == triple_identity_correction(*z)


@pytest.mark.xfail(strict=True, reason="the identity without the 2[[z1,z3],[z1,z2]] term is false")
def test_bare_identity():
    rng = random.Random(0)
    failures = 0
    for _ in range(20):
        z = [random_polynomial_field(rng, R3) for _ in range(3)]
        failures += not triple_identity_defect(*z).is_zero()
    assert failures == 0


@given(st.integers(0, 10**6))
def test_congruences_on_constrained_triples(seed):
    triple = constrained_triple(random.Random(seed), R6)
    assert all(ok for _, ok in congruence_defects(*triple))


def test_congruences_on_prolongation_frame(example_tower):
    t = example_tower.fiber_line.frame
    report = bracket_lemma_suite(trials=3, seed=1, extra_triples=[tuple(t)])
    assert report.ok and report.congruences.trials == 4
    assert not report.bare_identity.ok
