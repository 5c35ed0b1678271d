"""Prolongation towers: model identifications, round trips and route comparison."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .chart import Chart, Echelon, VectorField, lie_bracket, parse_scalar, substitute_chart
from .flags import Distribution, Splitting, derived_flag, project_fields, reduce_by_integrable
from .models import ModelSpec, build_model
from .prolongation import (
    ProlongationResult,
    prolong_dual,
    prolong_fiber_line,
    prolong_projective,
    prolong_svc_cone,
)
from .scalar import Scalar
from .structures import check_b3_23

__all__ = [
    "Identification",
    "IdentificationReport",
    "RoundTrip",
    "TowerReport",
    "PROJECTIVE_TO_F23",
    "DUAL_TO_F13",
    "fiber_to_f123",
    "reversed_base",
    "identify",
    "model_coherence",
    "round_trip_projective",
    "round_trip_fiber_line",
    "round_trip_dual",
    "routes_coincide",
    "tower_report",
]


def _parsed(d: Mapping[str, str | Scalar]) -> dict[str, Scalar]:
    return {k: parse_scalar(v) if isinstance(v, str) else v for k, v in d.items()}


@dataclass(frozen=True)
class Identification:
    """Coordinate change from a prolongation chart onto a model chart.

    ``forward`` writes the prolongation coordinates in model coordinates,
    ``inverse`` the model coordinates in prolongation coordinates.
    """

    target: str
    forward: dict[str, Scalar]
    inverse: dict[str, Scalar]

    def push(self, v: VectorField, chart: Chart) -> VectorField:
        return substitute_chart(v, self.forward, self.inverse, chart)


# (V2, V3) in F23 read off from V3 = <k1, k2, k3> and the line through
# k3 + y2 k2 + y3 k1; base frame taken in the order (xi3, xi2, xi1)
PROJECTIVE_TO_F23 = Identification(
    "F23",
    _parsed({
        "x41": "z41 - z31*z43",
        "x51": "z51 - 1/2*z31*z43^2",
        "x61": "z61 - z31*(-1/2*z32*z43^2 + z42*z43 - z52)",
        "x42": "z42 - z32*z43",
        "x52": "z52 - 1/2*z32*z43^2",
        "x43": "z43",
        "y2": "-z32",
        "y3": "-z31",
    }),
    _parsed({
        "z31": "-y3",
        "z41": "x41 - y3*x43",
        "z51": "x51 - 1/2*y3*x43^2",
        "z61": "x61 - y3*(x42*x43 - x52)",
        "z32": "-y2",
        "z42": "x42 - y2*x43",
        "z52": "x52 - 1/2*y2*x43^2",
        "z43": "x43",
    }),
)

DUAL_TO_F13 = Identification(
    "F13",
    _parsed({
        "x41": "s41 - s21*s42 - s31*s43",
        "x51": "s51 - s21*s52 - 1/2*s31*s43^2",
        "x61": "s61 - 1/2*s21*s42^2 - s31*(s42*s43 - s52)",
        "x42": "s42",
        "x52": "s52",
        "x43": "s43",
        "y1": "-s31",
        "y2": "-s21",
    }),
    _parsed({
        "s21": "-y2",
        "s31": "-y1",
        "s41": "x41 - y2*x42 - y1*x43",
        "s51": "x51 - y2*x52 - 1/2*y1*x43^2",
        "s61": "x61 - 1/2*y2*x42^2 - y1*(x42*x43 - x52)",
        "s42": "x42",
        "s52": "x52",
        "s43": "x43",
    }),
)

# forgetting V1: (V2, V3) of a complete flag in w coordinates
_F123_TO_F23 = _parsed({
    "z31": "w31 - w21*w32",
    "z41": "w41 - w21*w42",
    "z51": "w51 - w21*w52",
    "z61": "w61 - w21*(1/2*w42^2 - w32*w52)",
    "z32": "w32",
    "z42": "w42",
    "z52": "w52",
    "z43": "w43",
})
_F23_TO_F123 = _parsed({
    "w31": "z31 + w21*z32",
    "w41": "z41 + w21*z42",
    "w51": "z51 + w21*z52",
    "w61": "z61 + w21*(1/2*z42^2 - z32*z52)",
    "w32": "z32",
    "w42": "z42",
    "w52": "z52",
    "w43": "z43",
})


def fiber_to_f123(fiber: str = "v") -> Identification:
    """Composite of PROJECTIVE_TO_F23 with the fiber coordinate -w21."""
    forward = {k: e.subs(_F123_TO_F23) for k, e in PROJECTIVE_TO_F23.forward.items()}
    forward[fiber] = -Scalar.var("w21")
    w21 = -Scalar.var(fiber)
    inverse = {k: e.subs({"w21": w21}).subs(PROJECTIVE_TO_F23.inverse) for k, e in _F23_TO_F123.items()}
    inverse["w21"] = w21
    return Identification("F123", forward, inverse)


def reversed_base(model: ModelSpec | None = None) -> Distribution:
    """The F3 model with its frame in the order (xi3, xi2, xi1)."""
    model = model or build_model("F3")
    x1, x2, x3 = model.frame
    return Distribution(model.chart, [x3, x2, x1])


def _canonical(fields) -> list[VectorField]:
    return Echelon.of(list(fields), track=False).frame()


@dataclass
class IdentificationReport:
    target: str
    frame_equal: bool
    parts_equal: dict[str, bool]

    @property
    def passed(self) -> bool:
        return self.frame_equal and all(self.parts_equal.values())

    def to_dict(self) -> dict:
        return {"target": self.target, "frame_equal": self.frame_equal, "parts_equal": dict(self.parts_equal)}


def identify(result: ProlongationResult, model: ModelSpec, ident: Identification) -> IdentificationReport:
    """Push a prolongation onto a model chart and compare frames and splitting parts."""
    chart = model.chart
    pushed = [ident.push(v, chart) for v in result.frame]
    frame_equal = _canonical(pushed) == model.distribution.canonical_frame()
    parts = {}
    split = model.splitting
    for name in result.splitting.names():
        a = [ident.push(v, chart) for v in result.splitting.part(name)]
        parts[name] = split is not None and _canonical(a) == _canonical(split.part(name))
    return IdentificationReport(model.which, frame_equal, parts)


def model_coherence() -> list[IdentificationReport]:
    """P(F3) = F23, its fiber-line prolongation = F123, P(F3 dual) = F13."""
    base = reversed_base()
    proj = prolong_projective(base, names=("y2", "y3"))
    fib = prolong_fiber_line(proj, name="v")
    dual = prolong_dual(base, names=("y1", "y2"))
    return [
        identify(proj, build_model("F23"), PROJECTIVE_TO_F23),
        identify(fib, build_model("F123"), fiber_to_f123("v")),
        identify(dual, build_model("F13"), DUAL_TO_F13),
    ]


# ---------------------------------------------------------------------------
# round trips


@dataclass
class RoundTrip:
    name: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


def round_trip_projective(P: ProlongationResult) -> RoundTrip:
    """E^(2) modulo the fiber directions is the base distribution."""
    E = P.distribution
    level2 = derived_flag(E).level(2)
    K = [VectorField.coordinate(E.chart, n) for n in P.chart_extension]
    back = reduce_by_integrable(level2, K)
    ok = back.canonical_frame() == P.base.canonical_frame()
    return RoundTrip("projective", ok, "" if ok else f"got {back.canonical_frame()}")


def round_trip_fiber_line(F: ProlongationResult) -> RoundTrip:
    """<theta1..theta4> modulo d/dw is the projective prolongation with its B3(2,3) structure."""
    proj: ProlongationResult = F.extras["projective"]
    t1, t2, t3 = F.frame
    fields = [t1, t2, t3, lie_bracket(t1, t2)]
    back = reduce_by_integrable(fields, [t1])
    same = back.canonical_frame() == proj.distribution.canonical_frame()
    growth = derived_flag(back).growth
    # E1 is the image of theta3, E2 the image of <theta2, theta4>
    e1 = project_fields([t3], [t1], back.chart)
    e2 = project_fields(_canonical([t2, fields[3]]), [t1], back.chart)
    E = Distribution(back.chart, e1 + e2)
    cert = check_b3_23(E, Splitting(E, {"E1": [0], "E2": [1, 2]}))
    ok = same and growth == [3, 5, 7, 8] and cert.overall
    return RoundTrip("fiber-line", ok, f"growth {tuple(growth)}, certificate {cert.overall}")


def round_trip_dual(S: ProlongationResult) -> RoundTrip:
    """L + [L1, L2] modulo the fiber directions is the base distribution."""
    L = S.distribution
    l1, l2, d1, d2 = L.frame
    fields = list(L.frame) + [lie_bracket(a, b) for a in (l1, l2) for b in (d1, d2)]
    K = [VectorField.coordinate(L.chart, n) for n in S.chart_extension]
    back = reduce_by_integrable(fields, K)
    ok = back.canonical_frame() == S.base.canonical_frame()
    return RoundTrip("dual", ok, "" if ok else f"got {back.canonical_frame()}")


@dataclass
class RouteComparison:
    frames_equal: bool
    parts_equal: bool
    growth_fiber: list[int]
    growth_cone: list[int]

    @property
    def coincide(self) -> bool:
        return self.frames_equal and self.parts_equal

    def to_dict(self) -> dict:
        return {
            "frames_equal": self.frames_equal,
            "parts_equal": self.parts_equal,
            "growth_fiber_line": self.growth_fiber,
            "growth_svc_cone": self.growth_cone,
            "coincide": self.coincide,
        }


def routes_coincide(fiber: ProlongationResult, cone: ProlongationResult) -> RouteComparison:
    """projective -> fiber-line against dual -> svc-cone, as framed distributions."""
    same_chart = fiber.chart == cone.chart
    frames_equal = same_chart and fiber.distribution.canonical_frame() == cone.distribution.canonical_frame()
    parts_equal = same_chart and all(
        _canonical(fiber.splitting.part(a)) == _canonical(cone.splitting.part(b))
        for a, b in zip(fiber.splitting.names(), cone.splitting.names())
    )
    return RouteComparison(frames_equal, parts_equal, list(fiber.growth), list(cone.growth))


@dataclass
class TowerReport:
    projective: ProlongationResult
    fiber_line: ProlongationResult
    dual: ProlongationResult
    cone: ProlongationResult
    round_trips: list[RoundTrip] = field(default_factory=list)
    routes: RouteComparison | None = None

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.round_trips) and self.routes is not None and self.routes.coincide


def tower_report(D: Distribution) -> TowerReport:
    """All four prolongations of a (3,6) distribution with round trips and the route check."""
    P = prolong_projective(D)
    F = prolong_fiber_line(P)
    S = prolong_dual(D)
    C = prolong_svc_cone(S)
    trips = [round_trip_projective(P), round_trip_fiber_line(F), round_trip_dual(S)]
    return TowerReport(P, F, S, C, trips, routes_coincide(F, C))
