"""The four prolongations of a (3,6) distribution.

Each construction writes down a frame template with unknown coefficient
functions, solves the defining bracket conditions linearly, and re-checks
the conditions with the verbatim intermediate fields after substitution.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .chart import (
    Chart,
    Echelon,
    VectorField,
    lie_bracket,
    solve_linear_coefficients,
    solve_residue_system,
    substitute_chart,
)
from .errors import ChartMismatch, GrowthMismatch, Inconsistent
from .flags import Distribution, Splitting, derived_flag
from .scalar import ZERO, Scalar
from .structures import StructureCertificate, check_b3_13, check_b3_23, check_b3_123

__all__ = [
    "ProlongationResult",
    "ConeCriterion",
    "base_fields",
    "prolong_projective",
    "prolong_fiber_line",
    "prolong_dual",
    "prolong_svc_cone",
    "legendre_maps",
]


@dataclass
class ConeCriterion:
    """Outcome of the cone-prolongation criterion."""

    a_w_zero: bool
    membership: bool
    membership_residue: str | None
    certificate_passes: bool

    @property
    def holds(self) -> bool:
        return self.a_w_zero and self.membership

    @property
    def consistent(self) -> bool:
        """The criterion and the certificate agree."""
        return self.holds == self.certificate_passes

    def to_dict(self) -> dict:
        return {
            "A_w = 0": self.a_w_zero,
            "membership": self.membership,
            "membership_residue": self.membership_residue,
            "certificate": self.certificate_passes,
            "holds": self.holds,
        }


@dataclass
class ProlongationResult:
    kind: str
    distribution: Distribution
    splitting: Splitting
    solved_coefficients: dict[str, Scalar]
    chart_extension: list[str]
    templates: list[VectorField] = field(repr=False)
    base: Distribution = field(repr=False)
    xi: list[VectorField] = field(repr=False)
    growth: list[int] = field(default_factory=list)
    certificate: StructureCertificate | None = field(default=None, repr=False)
    criterion: ConeCriterion | None = None
    extras: dict[str, object] = field(default_factory=dict, repr=False)

    @property
    def chart(self) -> Chart:
        return self.distribution.chart

    @property
    def frame(self) -> list[VectorField]:
        return self.distribution.frame

    def templates_reproduce_frame(self) -> bool:
        subs = {k: v for k, v in self.solved_coefficients.items() if k in _TEMPLATE_UNKNOWNS}
        return [t.subs(subs) for t in self.templates] == list(self.frame)


_TEMPLATE_UNKNOWNS = {"a", "b", "c", "alpha", "beta", "gamma", "delta", "eps", "eta"}


# ---------------------------------------------------------------------------
# shared helpers


def base_fields(D: Distribution) -> list[VectorField]:
    """xi1..xi6: the frame and the brackets [xi1,xi2], [xi1,xi3], [xi2,xi3]."""
    x1, x2, x3 = D.frame
    return [x1, x2, x3, lie_bracket(x1, x2), lie_bracket(x1, x3), lie_bracket(x2, x3)]


def _check_36(D: Distribution) -> None:
    if D.rank != 3 or D.dim != 6:
        raise GrowthMismatch(f"expected a rank-3 distribution on 6 coordinates, got rank {D.rank} on {D.dim}")
    growth = derived_flag(D).growth
    if growth != [3, 6]:
        raise GrowthMismatch(f"expected growth (3,6), got {tuple(growth)}")


def _fresh(chart: Chart, names: Sequence[str]) -> None:
    for n in names:
        if n in chart:
            raise ChartMismatch(f"coordinate {n!r} already exists in the chart")


def _lift(fields: Sequence[VectorField], chart: Chart) -> list[VectorField]:
    return [v.on_chart(chart) for v in fields]


def _span(fields: Sequence[VectorField]) -> Echelon:
    return Echelon.of(list(fields), track=False)


def _verify(pairs: Sequence[tuple[VectorField, VectorField]], modulus: Sequence[VectorField], what: str) -> None:
    ech = _span(modulus)
    for x, y in pairs:
        residue, _ = ech.reduce(lie_bracket(x, y))
        if not residue.is_zero():
            raise Inconsistent(f"{what}: residue {residue} survives after solving")


def _same_span(a: Sequence[VectorField], b: Sequence[VectorField]) -> bool:
    ea, eb = _span(a), _span(b)
    return ea.rank == eb.rank and all(ea.contains(v) for v in eb.frame())


# ---------------------------------------------------------------------------
# projective prolongation


def prolong_projective(D: Distribution, names: tuple[str, str] = ("z2", "z3"), *, verify: bool = True) -> ProlongationResult:
    """Z = P(D) on the piece where the first frame component is nonzero.

    zeta1 = xi1 + z2 xi2 + z3 xi3 + a d/dz2 + b d/dz3 with a, b fixed by
    [zeta1, zeta6] = [zeta1, zeta7] = 0 mod E^(3).
    """
    _check_36(D)
    _fresh(D.chart, names)
    n2, n3 = names
    Z = D.chart.extend(list(names))
    xi = _lift(base_fields(D), Z)
    x1, x2, x3, x4, x5, x6 = xi
    z2, z3 = Scalar.var(n2), Scalar.var(n3)
    a, b = Scalar.var("a"), Scalar.var("b")
    d2, d3 = VectorField.coordinate(Z, n2), VectorField.coordinate(Z, n3)
    horizontal = x1 + z2 * x2 + z3 * x3
    zeta1 = horizontal + a * d2 + b * d3
    zeta6 = -x4 + z3 * x6
    zeta7 = -x5 - z2 * x6
    # same span as <zeta1..zeta7>, written without the unknowns
    modulus = [horizontal, d2, d3, x2, x3, zeta6, zeta7]
    report = solve_linear_coefficients(zeta1, ["a", "b"], [zeta6, zeta7], modulus)
    sol = report.solution
    frame = [zeta1.subs(sol), d2, d3]
    E = Distribution(Z, frame)
    verbatim = frame + [-x2, -x3, zeta6, zeta7]
    _verify([(frame[0], zeta6), (frame[0], zeta7)], verbatim, "projective prolongation")
    growth = derived_flag(E).growth
    split = Splitting(E, {"E1": [0], "E2": [1, 2]})
    result = ProlongationResult(
        "projective", E, split, dict(sol), [n2, n3], [zeta1, d2, d3], D, xi, growth,
        extras={"zeta": verbatim + [-x6]},
    )
    if verify:
        if growth != [3, 5, 7, 8]:
            raise GrowthMismatch(f"prolongation has growth {tuple(growth)}")
        result.certificate = check_b3_23(E, split)
    return result


# ---------------------------------------------------------------------------
# fiber-line prolongation


def prolong_fiber_line(Z_E: ProlongationResult, name: str = "w", *, verify: bool = True) -> ProlongationResult:
    """W = P(0 + E2): theta1 = d/dw, theta2 = zeta2 + w zeta3, theta3 = zeta1 + c d/dw."""
    if Z_E.kind != "projective":
        raise ValueError("prolong_fiber_line needs the result of prolong_projective")
    _fresh(Z_E.chart, [name])
    n2, n3 = Z_E.chart_extension
    W = Z_E.chart.extend([name])
    xi = _lift(Z_E.xi, W)
    x1, x2, x3, x4, x5, x6 = xi
    zeta1, zeta2, zeta3 = _lift(Z_E.frame, W)
    w, z2, z3 = Scalar.var(name), Scalar.var(n2), Scalar.var(n3)
    a = Z_E.solved_coefficients["a"]
    b = Z_E.solved_coefficients["b"]
    c = Scalar.var("c")
    dw = VectorField.coordinate(W, name)
    theta1 = dw
    theta2 = zeta2 + w * zeta3
    theta3 = zeta1 + c * dw
    ta, tb = theta2(a), theta2(b)
    base7 = x4 - z3 * x6 + w * (x5 + z2 * x6)
    theta7 = base7 - ta * x2 - tb * x3 + c * x3
    # F^(3) contains d/dw, d/dz2, d/dz3, xi1, xi2, xi3; add the base part of theta7
    modulus = [dw, zeta2, zeta3, x1, x2, x3, base7]
    report = solve_linear_coefficients(theta3, ["c"], [theta7], modulus)
    sol = report.solution
    t3 = theta3.subs(sol)
    t7 = theta7.subs(sol)
    cs = sol["c"]
    theta4 = zeta3
    theta5 = x2 + w * x3 + ta * zeta2 + tb * zeta3 - cs * zeta3
    theta6 = x3
    verbatim = [theta1, theta2, t3, theta4, theta5, theta6, t7]
    if not _same_span(verbatim, modulus):
        raise Inconsistent("unknown-free modulus does not match <theta1..theta7>")
    _verify([(t3, t7)], verbatim, "fiber-line prolongation")
    theta8 = x5 + z2 * x6
    theta9 = x6
    frame = [theta1, theta2, t3]
    F = Distribution(W, frame)
    growth = derived_flag(F).growth
    split = Splitting(F, {"F1": [0], "F2": [1], "F3": [2]})
    result = ProlongationResult(
        "fiber_line", F, split, dict(sol), [name], [theta1, theta2, theta3], Z_E.base, xi, growth,
        extras={"theta": verbatim + [theta8, theta9], "projective": Z_E},
    )
    if verify:
        if growth != [3, 5, 7, 8, 9]:
            raise GrowthMismatch(f"prolongation has growth {tuple(growth)}")
        result.certificate = check_b3_123(F, split)
    return result


# ---------------------------------------------------------------------------
# dual prolongation


def prolong_dual(D: Distribution, names: tuple[str, str] = ("y1", "y2"), *, verify: bool = True) -> ProlongationResult:
    """S = P(D*) on the piece where the hyperplane projects onto <xi1, xi2>.

    l1 = xi1 + y1 xi3 + alpha d/dy1 + beta d/dy2,
    l2 = xi2 + y2 xi3 + gamma d/dy1 + delta d/dy2,
    with [l1, l5] = [l2, l5] = 0 mod L^(2).
    """
    _check_36(D)
    _fresh(D.chart, names)
    m1, m2 = names
    S = D.chart.extend(list(names))
    xi = _lift(base_fields(D), S)
    x1, x2, x3, x4, x5, x6 = xi
    y1, y2 = Scalar.var(m1), Scalar.var(m2)
    al, be, ga, de = (Scalar.var(n) for n in ("alpha", "beta", "gamma", "delta"))
    d1, d2 = VectorField.coordinate(S, m1), VectorField.coordinate(S, m2)
    h1 = x1 + y1 * x3
    h2 = x2 + y2 * x3
    l1 = h1 + al * d1 + be * d2
    l2 = h2 + ga * d1 + de * d2
    base5 = x4 + y2 * x5 - y1 * x6
    l5 = base5 + (be - ga) * x3
    modulus = [h1, h2, d1, d2, base5, x3]
    unknowns = ["alpha", "beta", "gamma", "delta"]

    def residues() -> list[VectorField]:
        ech = _span(modulus)
        return [ech.reduce(lie_bracket(l1, l5))[0], ech.reduce(lie_bracket(l2, l5))[0]]

    report = solve_residue_system(residues, unknowns, S.coordinates)
    sol = report.solution
    f1, f2 = l1.subs(sol), l2.subs(sol)
    f5 = l5.subs(sol)
    verbatim = [f1, f2, d1, d2, f5, -x3]
    if not _same_span(verbatim, modulus):
        raise Inconsistent("unknown-free modulus does not match <l1..l6>")
    _verify([(f1, f5), (f2, f5)], verbatim, "dual prolongation")
    frame = [f1, f2, d1, d2]
    L = Distribution(S, frame)
    growth = derived_flag(L).growth
    split = Splitting(L, {"L1": [0, 1], "L2": [2, 3]})
    result = ProlongationResult(
        "dual", L, split, dict(sol), [m1, m2], [l1, l2, d1, d2], D, xi, growth,
        extras={"ell": verbatim + [-x5, -x6]},
    )
    if verify:
        if growth != [4, 6, 8]:
            raise GrowthMismatch(f"prolongation has growth {tuple(growth)}")
        result.certificate = check_b3_13(L, split, "generalized")
    return result


# ---------------------------------------------------------------------------
# cone prolongation with the generalised Legendre transformation


def legendre_maps(
    dual_names: tuple[str, str] = ("y1", "y2"),
    fiber: str = "u",
    new_names: tuple[str, str, str] = ("z2", "z3", "w"),
) -> tuple[dict[str, Scalar], dict[str, Scalar]]:
    """y1 = z3 - w z2, y2 = w, u = z2 and its inverse z2 = u, z3 = y1 + u y2, w = y2."""
    y1, y2 = dual_names
    z2, z3, w = (Scalar.var(n) for n in new_names)
    forward = {y1: z3 - w * z2, y2: w, fiber: z2}
    u = Scalar.var(fiber)
    inverse = {new_names[0]: u, new_names[1]: Scalar.var(y1) + u * Scalar.var(y2), new_names[2]: Scalar.var(y2)}
    return forward, inverse


def prolong_svc_cone(
    S_L: ProlongationResult,
    fiber: str = "u",
    new_names: tuple[str, str, str] = ("z2", "z3", "w"),
    *,
    verify: bool = True,
) -> ProlongationResult:
    """Prolongation along the rank-2 cone lambda1 (l1 + l4) + lambda2 (l2 - l3).

    tau1 = l4 - u l3, tau2 = d/du, tau3 = l1 + u l2 + eta (l4 - u l3) + eps d/du,
    rewritten in (z2, z3, w).  eps and eta come from closed forms and are
    re-derived by a linear solve as an independent route.
    """
    if S_L.kind != "dual":
        raise ValueError("prolong_svc_cone needs the result of prolong_dual")
    m1, m2 = S_L.chart_extension
    _fresh(S_L.chart, [fiber])
    base_chart = S_L.base.chart
    for n in new_names:
        if n in base_chart:
            raise ChartMismatch(f"coordinate {n!r} already exists in the chart")
    n2, n3, nw = new_names
    old = S_L.chart.extend([fiber])
    new = base_chart.extend(list(new_names))
    forward, inverse = legendre_maps((m1, m2), fiber, new_names)
    sol = S_L.solved_coefficients
    al, be, ga, de = (sol[k].subs(forward) for k in ("alpha", "beta", "gamma", "delta"))
    z2, z3, w = (Scalar.var(n) for n in new_names)
    dz2, dz3, dw = (VectorField.coordinate(new, n) for n in new_names)
    xi = _lift(S_L.xi, new)
    x1, x2, x3, x4, x5, x6 = xi
    tau2 = dz2 + w * dz3
    poly = al + z2 * (be + ga) + z2 ** 2 * de
    eps = -poly.diff(nw)
    A = eps
    B = poly + w * eps
    eta = tau2(B) - w * tau2(A) - be - z2 * de
    C = eta + be + z2 * de
    # tau3 built in the old chart and pushed forward
    u = Scalar.var(fiber)
    l1, l2, l3, l4 = _lift(S_L.frame, old)
    du = VectorField.coordinate(old, fiber)
    eta_old, eps_old = eta.subs(inverse), eps.subs(inverse)
    tau1_old = l4 - u * l3
    tau3_old = l1 + u * l2 + eta_old * tau1_old + eps_old * du
    push = [substitute_chart(v, forward, inverse, new) for v in (tau1_old, du, tau3_old)]
    horizontal = x1 + z2 * x2 + z3 * x3
    expected3 = horizontal + A * dz2 + B * dz3 + C * dw
    if push[0] != dw or push[1] != tau2 or push[2] != expected3:
        raise Inconsistent("pushed-forward cone frame differs from its (z2, z3, w) form")
    tau1, tau3 = dw, expected3
    frame = [tau1, tau2, tau3]
    # independent route: solve eps, then eta, with the bracket conditions
    t_eps = Scalar.var("eps")
    template_eps = horizontal + t_eps * dz2 + (poly + w * t_eps) * dz3 + C * dw
    solved_eps = solve_linear_coefficients(template_eps, ["eps"], [tau1], [dw, tau2, template_eps]).solution["eps"]
    t_eta = Scalar.var("eta")
    c_eta = t_eta + be + z2 * de
    template_eta = horizontal + A * dz2 + B * dz3 + c_eta * dw
    base7 = x4 - z3 * x6 + w * (x5 + z2 * x6)
    tau7_eta = base7 - tau2(A) * x2 - tau2(B) * x3 + c_eta * x3
    modulus = [dw, dz2, dz3, x1, x2, x3, base7]
    solved_eta = solve_linear_coefficients(template_eta, ["eta"], [tau7_eta], modulus).solution["eta"]
    if solved_eps != eps or solved_eta != eta:
        raise Inconsistent("closed-form eps/eta disagree with the bracket solve")
    tau4 = dz3
    tau5 = x2 + w * x3 + tau2(A) * dz2 + (tau2(B) - C) * dz3
    tau6 = x3
    tau7 = base7 - tau2(A) * x2 - tau2(B) * x3 + C * x3
    tau8 = x5 + z2 * x6
    tau9 = x6
    verbatim = [tau1, tau2, tau3, tau4, tau5, tau6, tau7]
    if not _same_span(verbatim, modulus):
        raise Inconsistent("unknown-free modulus does not match <tau1..tau7>")
    _verify([(tau3, tau7)], verbatim, "cone prolongation")
    Ft = Distribution(new, frame)
    report = derived_flag(Ft)
    split = Splitting(Ft, {"F1": [0], "F2": [1], "F3": [2]})
    coefficients = {
        "alpha": al, "beta": be, "gamma": ga, "delta": de,
        "eps": eps, "eta": eta, "A": A, "B": B, "C": C,
    }
    template3 = horizontal + t_eps * dz2 + (poly + w * t_eps) * dz3 + (t_eta + be + z2 * de) * dw
    result = ProlongationResult(
        "svc_cone", Ft, split, coefficients, [fiber], [tau1, tau2, template3], S_L.base, xi, report.growth,
        extras={"tau": verbatim + [tau8, tau9], "dual": S_L, "legendre": (forward, inverse)},
    )
    if verify:
        if report.growth != [3, 5, 7, 8, 9]:
            raise GrowthMismatch(f"prolongation has growth {tuple(report.growth)}")
        cert = check_b3_123(Ft, split)
        result.certificate = cert
        level4 = Echelon.of(report.level(4), track=False)
        residue, _ = level4.reduce(lie_bracket(horizontal, tau8) + A * x6)
        result.criterion = ConeCriterion(
            a_w_zero=A.diff(nw).is_zero(),
            membership=residue.is_zero(),
            membership_residue=None if residue.is_zero() else str(residue),
            certificate_passes=cert.overall,
        )
    return result
