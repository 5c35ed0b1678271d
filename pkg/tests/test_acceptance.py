"""The seven acceptance criteria, each exact-symbolic, each reported as one PASS/FAIL line.

Run under pytest the lines appear in the terminal summary; run as a script
(``python tests/test_acceptance.py``) they are printed directly.
"""

from __future__ import annotations

import random
import sys
import time
from dataclasses import dataclass
from fractions import Fraction

import pytest

from prolong36.chart import Chart, VectorField, lie_bracket
from prolong36.flags import Distribution, Splitting, derived_flag
from prolong36.hamiltonian import FiberPolynomial, control_kernel_check, cotangent, hamiltonian_of, poisson_bracket, verify_tangency_claim
from prolong36.models import MODEL_NAMES, build_example_family, build_model, check_bracket_table, gradation_algebra
from prolong36.prolongation import prolong_dual, prolong_fiber_line, prolong_projective, prolong_svc_cone
from prolong36.scalar import Scalar
from prolong36.structures import (
    check_b3_13,
    check_b3_23,
    check_b3_123,
    random_polynomial,
    random_polynomial_field,
    triple_identity_defect,
)
from prolong36.towers import round_trip_dual, round_trip_fiber_line, round_trip_projective, routes_coincide

SEEDS = range(100)
R3 = Chart(("x1", "x2", "x3"))


@dataclass
class Outcome:
    number: int
    title: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"criterion {self.number} ({self.title}): {'PASS' if self.passed else 'FAIL'} - {self.detail}"


class Towers:
    def __init__(self, D: Distribution):
        self.base = D
        self.projective = prolong_projective(D)
        self.fiber_line = prolong_fiber_line(self.projective)
        self.dual = prolong_dual(D)
        self.cone = prolong_svc_cone(self.dual)


# ---------------------------------------------------------------------------
# criteria


def criterion_models() -> Outcome:
    start = time.perf_counter()
    problems: list[str] = []
    notes: list[str] = []
    for name in MODEL_NAMES:
        m = build_model(name)
        if not all(r.is_zero() for r in m.nullity_residues().values()):
            problems.append(f"{name}: nullity constraints")
        if not (m.frame_matches_printed() and m.pfaff_matches_printed()):
            problems.append(f"{name}: frame from Pfaff system")
        if m.pfaff_errata:
            notes.append(f"{name}: {len(m.pfaff_errata)} Pfaff erratum applied")
        mismatches = [str(c.relation) for c in check_bracket_table(m.named, m.table) if not c.passed]
        problems.extend(f"{name}: printed {r} does not hold" for r in mismatches)
    base = build_model("F3")
    if lie_bracket(base.frame[0], base.frame[1]) != -VectorField.coordinate(base.chart, "x61"):
        problems.append("F3: [xi1,xi2] = -d/dx61")
    full = build_model("F123")
    if len(full.table) != 18 or gradation_algebra(full).agrees_with(full.table):
        problems.append("F123: 18-relation gradation table")
    elapsed = time.perf_counter() - start
    if elapsed >= 5.0:
        problems.append(f"runtime {elapsed:.1f} s")
    detail = "; ".join(problems) if problems else "all four models reproduced"
    if notes:
        detail += f" ({', '.join(notes)})"
    return Outcome(1, "model reproduction", not problems, f"{detail}; {elapsed:.2f} s")


def criterion_growth(example: Towers, model: Towers) -> Outcome:
    expected = {
        "base": [3, 6], "projective": [3, 5, 7, 8], "fiber_line": [3, 5, 7, 8, 9],
        "cone": [3, 5, 7, 8, 9], "dual": [4, 6, 8],
    }
    bad = []
    for label, tower in (("example", example), ("model", model)):
        for stage, growth in expected.items():
            obj = getattr(tower, stage)
            D = obj if isinstance(obj, Distribution) else obj.distribution
            got = derived_flag(D).growth
            if got != growth:
                bad.append(f"{label}.{stage} {got}")
    return Outcome(2, "growth tower", not bad, "; ".join(bad) or "all ten growth vectors match")


def criterion_coefficients(example: Towers) -> Outcome:
    chart_of = {
        "projective": example.projective, "fiber_line": example.fiber_line,
        "dual": example.dual, "cone": example.cone,
    }
    expected = {
        "projective": {"a": "0", "b": "-z3*m'(x6)"},
        "fiber_line": {"c": "-w*m'(x6)"},
        "dual": {"alpha": "-y1*m'(x6)", "beta": "-2/3*y2*m'(x6)", "gamma": "-1/3*y2*m'(x6)", "delta": "0"},
        "cone": {"A": "0", "B": "-z3*m'(x6)", "C": "-w*m'(x6)"},
    }
    bad = []
    for stage, values in expected.items():
        result = chart_of[stage]
        for key, text in values.items():
            got = result.solved_coefficients.get(key)
            if got != result.chart.parse(text):
                bad.append(f"{stage}.{key} = {got}")
    criterion = example.cone.criterion
    if criterion is None or not (criterion.a_w_zero and criterion.holds):
        bad.append("cone criterion with A_w = 0")
    return Outcome(3, "solved coefficients", not bad, "; ".join(bad) or "a,b,c,alpha..delta,A,B,C and A_w = 0 match")


def _flatten(result) -> tuple[Distribution, Splitting]:
    jets = {"m(x6)": 0, "m'(x6)": 0, "m''(x6)": 0}
    D = result.distribution
    flat = Distribution(D.chart, [v.subs(jets) for v in D.frame])
    return flat, Splitting(flat, result.splitting.as_dict())


def criterion_structures(example: Towers, model: Towers) -> Outcome:
    F23, F123, F13 = (build_model(n) for n in ("F23", "F123", "F13"))
    checks = {
        "B3(2,3) on F23": check_b3_23(F23.distribution, F23.splitting).overall,
        "B3(1,2,3) on F123": check_b3_123(F123.distribution, F123.splitting).overall,
        "generalized B3(1,3) on F13": check_b3_13(F13.distribution, F13.splitting).overall,
        "strict B3(1,3) on F13": check_b3_13(F13.distribution, F13.splitting, "strict").overall,
    }
    for label, tower in (("example", example), ("model", model)):
        P, F, K = tower.projective, tower.fiber_line, tower.cone
        checks[f"B3(2,3) on {label} projective"] = check_b3_23(P.distribution, P.splitting).overall
        checks[f"B3(1,2,3) on {label} fiber-line"] = check_b3_123(F.distribution, F.splitting).overall
        checks[f"B3(1,2,3) on {label} cone"] = check_b3_123(K.distribution, K.splitting).overall
    S = example.dual
    checks["generalized B3(1,3) on example dual"] = check_b3_13(S.distribution, S.splitting).overall
    strict = check_b3_13(S.distribution, S.splitting, "strict")
    failure = strict.first_failure
    checks["strict B3(1,3) fails on example dual with witness"] = (
        not strict.overall and failure is not None and bool(failure.witness)
    )
    checks["strict B3(1,3) on example dual with m' = 0"] = check_b3_13(*_flatten(S), "strict").overall
    bad = [k for k, ok in checks.items() if not ok]
    return Outcome(4, "structure certificates", not bad, "; ".join(bad) or f"{len(checks)} certificate checks as expected")


def criterion_tangency(example: Towers, model: Towers) -> Outcome:
    bad = []
    for label, tower in (("example", example), ("model", model)):
        claims = [
            ("svc-d-full", tower.base),
            ("svc-e-split", tower.projective),
            ("svc-f-strata", tower.fiber_line),
            ("svc-f-strata", tower.cone),
            ("svc-l-quadric", tower.dual),
        ]
        for claim, obj in claims:
            if not verify_tangency_claim(claim, obj).passed:
                bad.append(f"{claim} on {label}")
    kernel = control_kernel_check()
    if not kernel.passed:
        bad.append(f"control kernel rank {kernel.rank}")
    return Outcome(5, "tangency suite", not bad, "; ".join(bad) or "all claims hold and the kernel matrix has rank 2")


def criterion_round_trips(example: Towers, model: Towers) -> Outcome:
    bad = []
    for label, tower in (("example", example), ("model", model)):
        trips = {
            "projective": round_trip_projective(tower.projective),
            "fiber-line": round_trip_fiber_line(tower.fiber_line),
            "dual": round_trip_dual(tower.dual),
        }
        bad.extend(f"{label} {k}" for k, t in trips.items() if not t.passed)
        if not routes_coincide(tower.fiber_line, tower.cone).coincide:
            bad.append(f"{label} routes")
    return Outcome(6, "round trips", not bad, "; ".join(bad) or "three round trips and route coincidence on both towers")


def _frame_change(rng: random.Random, frame: list[VectorField]) -> list[VectorField]:
    chart = frame[0].chart
    out = []
    for i, v in enumerate(frame):
        w = Scalar.const(rng.choice([1, 2, -1, Fraction(1, 3)])) * v
        for u in frame[:i]:
            if rng.random() < 0.6:
                w = w + random_polynomial(rng, chart.coordinates, degree=2, terms=2) * u
        out.append(w)
    rng.shuffle(out)
    return out


def _random_fiber(rng: random.Random, cc) -> FiberPolynomial:
    out = FiberPolynomial.constant(cc, random_polynomial(rng, R3.coordinates, 2, 2))
    for _ in range(3):
        mono = FiberPolynomial.constant(cc, random_polynomial(rng, R3.coordinates, 2, 2))
        for _ in range(rng.randint(1, 2)):
            mono = mono * cc.p(rng.choice(R3.coordinates))
        out = out + mono
    return out


def criterion_properties(model: Towers) -> Outcome:
    cc = cotangent(R3)
    base = build_model("F3").distribution
    projective = model.projective.distribution
    F123 = build_model("F123")
    t1, t2, t3 = F123.frame
    failures: dict[str, int] = {}

    def count(name: str, ok: bool) -> None:
        failures[name] = failures.get(name, 0) + (not ok)

    for seed in SEEDS:
        rng = random.Random(seed)
        x, y, z = (random_polynomial_field(rng, R3, 2, 3) for _ in range(3))
        jac = lie_bracket(x, lie_bracket(y, z)) + lie_bracket(y, lie_bracket(z, x)) + lie_bracket(z, lie_bracket(x, y))
        count("vector-field Jacobi", jac.is_zero())
        f, g, h = (_random_fiber(rng, cc) for _ in range(3))
        pb = poisson_bracket
        count("Poisson Jacobi", (pb(f, pb(g, h)) + pb(g, pb(h, f)) + pb(h, pb(f, g))).is_zero())
        count("{H_x,H_y} = H_[x,y]", pb(hamiltonian_of(x), hamiltonian_of(y)) == hamiltonian_of(lie_bracket(x, y)))
        count("triple-bracket identity", triple_identity_defect(x, y, z).is_zero())
        changed = Distribution(base.chart, _frame_change(rng, list(base.frame)))
        count("growth under frame change (base)", derived_flag(changed).growth == [3, 6])
        changed = Distribution(projective.chart, _frame_change(rng, list(projective.frame)))
        count("growth under frame change (projective)", derived_flag(changed).growth == [3, 5, 7, 8])
        shift = random_polynomial(rng, F123.chart.coordinates, 2, 3)
        E = Distribution(F123.chart, [t1, t2, t3 + shift * t1])
        count("theta3 replacement", check_b3_123(E, Splitting(E, F123.splitting.as_dict())).overall)
    bad = [f"{name} failed {n}/{len(SEEDS)}" for name, n in failures.items() if n]
    return Outcome(7, "property suites", not bad, "; ".join(bad) or f"{len(failures)} suites x {len(SEEDS)} seeds clean")


# ---------------------------------------------------------------------------
# pytest wiring


@pytest.fixture(scope="module")
def models_outcome() -> Outcome:
    return criterion_models()


@pytest.fixture(scope="module")
def properties_outcome(model_tower) -> Outcome:
    return criterion_properties(model_tower)


@pytest.fixture
def record(acceptance_log):
    def _record(outcome: Outcome) -> Outcome:
        acceptance_log[outcome.number] = outcome.line()
        return outcome

    return _record


@pytest.mark.xfail(strict=True, reason="one printed bracket relation of the F23 table has the wrong sign")
def test_criterion_1_model_reproduction(record, models_outcome):
    outcome = record(models_outcome)
    assert outcome.passed, outcome.detail


def test_criterion_1_only_misprint_is_the_f23_sign(models_outcome):
    problems = models_outcome.detail.split(" (")[0]
    assert problems == "F23: printed [2,7] = v8 does not hold"


def test_criterion_2_growth_tower(record, example_tower, model_tower):
    outcome = record(criterion_growth(example_tower, model_tower))
    assert outcome.passed, outcome.detail


def test_criterion_3_solved_coefficients(record, example_tower):
    outcome = record(criterion_coefficients(example_tower))
    assert outcome.passed, outcome.detail


def test_criterion_4_structure_certificates(record, example_tower, model_tower):
    outcome = record(criterion_structures(example_tower, model_tower))
    assert outcome.passed, outcome.detail


def test_criterion_5_tangency_suite(record, example_tower, model_tower):
    outcome = record(criterion_tangency(example_tower, model_tower))
    assert outcome.passed, outcome.detail


def test_criterion_6_round_trips(record, example_tower, model_tower):
    outcome = record(criterion_round_trips(example_tower, model_tower))
    assert outcome.passed, outcome.detail


@pytest.mark.xfail(strict=True, reason="the triple-bracket identity without its correction term is false")
def test_criterion_7_property_suites(record, properties_outcome):
    outcome = record(properties_outcome)
    assert outcome.passed, outcome.detail


def test_criterion_7_only_the_bare_identity_fails(properties_outcome):
    assert properties_outcome.detail.startswith("triple-bracket identity failed")
    assert ";" not in properties_outcome.detail


def main() -> int:
    example, model = Towers(build_example_family()), Towers(build_model("F3").distribution)
    outcomes = [
        criterion_models(),
        criterion_growth(example, model),
        criterion_coefficients(example),
        criterion_structures(example, model),
        criterion_tangency(example, model),
        criterion_round_trips(example, model),
        criterion_properties(model),
    ]
    for o in outcomes:
        print(o.line())
    return 0 if all(o.passed for o in outcomes) else 1


if __name__ == "__main__":
    sys.exit(main())
