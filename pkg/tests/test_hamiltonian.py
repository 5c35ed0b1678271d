from __future__ import annotations

import pytest

from prolong36.chart import Chart, VectorField, lie_bracket
from prolong36.errors import ClaimFailed, DependentGenerators, UnknownClaim
from prolong36.flags import Distribution, Splitting
from prolong36.hamiltonian import (
    FiberPolynomial,
    apply_characteristic,
    control_kernel_check,
    cotangent,
    hamiltonian_field,
    hamiltonian_of,
    ideal_membership,
    poisson_bracket,
    verify_tangency_claim,
)
from prolong36.prolongation import base_fields
from prolong36.scalar import Scalar

XY = Chart(("x1", "x2"))


def test_hamiltonian_of_coordinate_field():
    cc = cotangent(XY)
    assert hamiltonian_of(VectorField.coordinate(XY, "x1")) == cc.p("x1")
    assert hamiltonian_of(VectorField.zero(XY)).is_zero()


def test_hamiltonian_of_model_field(models):
    m = models["F3"]
    cc = cotangent(m.chart)
    x43, x42 = m.chart.parse("x43"), m.chart.parse("x42")
    expected = cc.p("x41") + cc.p("x51") * x43 + cc.p("x61") * x42
    assert hamiltonian_of(m.frame[0]) == expected
    assert cc.fiber[:3] == ("p41", "p51", "p61")


def test_canonical_pair():
    cc = cotangent(XY)
    x1 = FiberPolynomial.constant(cc, Scalar.var("x1"))
    assert poisson_bracket(cc.p("x1"), x1) == FiberPolynomial.constant(cc, 1)


def test_self_bracket_vanishes(models):
    H = hamiltonian_of(models["F3"].frame[0])
    assert poisson_bracket(H, H).is_zero()


def test_bracket_of_hamiltonians(example):
    x1, x2, _ = example.frame
    lhs = poisson_bracket(hamiltonian_of(x1), hamiltonian_of(x2))
    assert lhs == hamiltonian_of(lie_bracket(x1, x2))


def test_characteristic_field_on_constraints(models):
    # Xi(H_xi1) = H_xi5 H_xi4 - H_xi4 H_xi5 = 0 after expansion
    D = models["F3"].distribution
    xi = base_fields(D)
    H = [hamiltonian_of(v) for v in xi]
    Xi = hamiltonian_field(xi[0], H[5]) + hamiltonian_field(xi[1], -H[4]) + hamiltonian_field(xi[2], H[3])
    assert apply_characteristic(Xi, H[0]).is_zero()
    for i in range(3):
        assert ideal_membership(apply_characteristic(Xi, H[i]), H[:3]).member


def test_zero_field_acts_trivially():
    cc = cotangent(XY)
    theta = hamiltonian_field(VectorField.zero(XY))
    assert apply_characteristic(theta, cc.p("x2") * Scalar.var("x1")).is_zero()


def test_membership_basic_cases():
    cc = cotangent(XY)
    g1, g2 = cc.p("x1") * Scalar.var("x2"), cc.p("x2") + cc.p("x1")
    result = ideal_membership(g1 * g2, [g1])
    assert result.member and result.certificate[0] == g2
    assert not ideal_membership(cc.p("x1"), [cc.p("x2")]).member


def test_membership_certificate_reconstructs():
    cc = cotangent(XY)
    g = [cc.p("x1") + cc.p("x2") * Scalar.var("x1"), cc.p("x2") * Scalar.var("x2")]
    q = g[0] * g[1] + g[1] * Scalar.var("x1")
    result = ideal_membership(q, g)
    total = FiberPolynomial.zero(cc)
    for c, gen in zip(result.certificate, g):
        total = total + c * gen
    assert result.member and total == q


def test_membership_rejects_dependent_generators():
    cc = cotangent(XY)
    with pytest.raises(DependentGenerators):
        ideal_membership(cc.p("x1"), [cc.p("x1"), cc.p("x1") * Scalar.var("x2")])


def test_theta_on_prolongation_is_in_ideal(example_tower):
    report = verify_tangency_claim("svc-e-split", example_tower.projective)
    assert report.passed and report.strata == ["Theta", "fiber"]
    assert any(c.label.startswith("Theta(") for c in report.checks)


def test_claim_full_on_model(models):
    report = verify_tangency_claim("svc-d-full", models["F3"].distribution)
    assert report.passed and report.strata == ["Xi"]


def test_claim_full_on_example(example):
    assert verify_tangency_claim("svc-d-full", example).passed


def test_claim_strata(example_tower, model_tower):
    for tower in (example_tower, model_tower):
        for result in (tower.fiber_line, tower.cone):
            report = verify_tangency_claim("svc-f-strata", result)
            assert report.passed
            assert report.strata == ["Theta", "Theta'", "Theta''", "Theta'''", "Theta''''"]


def test_claim_quadric(example_tower, model_tower):
    for tower in (example_tower, model_tower):
        report = verify_tangency_claim("svc-l-quadric", tower.dual)
        assert report.passed and report.strata == ["V", "V~"]


def test_unknown_claim(example):
    with pytest.raises(UnknownClaim):
        verify_tangency_claim("svc-nothing", example)


def test_claim_on_wrong_shape():
    chart = Chart(("x1", "x2", "x3", "x4", "x5", "x6"))
    D = Distribution(chart, [VectorField.coordinate(chart, c) for c in ("x1", "x2", "x3")])
    with pytest.raises(ClaimFailed):
        verify_tangency_claim("svc-d-full", D)
    with pytest.raises(ClaimFailed):
        verify_tangency_claim("svc-e-split", Splitting(D, {"E1": [0], "E2": [1, 2]}))


def test_control_kernel():
    check = control_kernel_check()
    assert check.rank == 2 and check.kernel_matches and check.residuals_zero and check.passed
