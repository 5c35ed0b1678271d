"""Fiber-polynomial calculus on the cotangent bundle and singular-velocity-cone claims.

A point of T*X has base coordinates x and fiber coordinates p.  Functions
polynomial in p with Scalar coefficients are enough here: every Hamiltonian
H_v = <p, v> is fiber-linear, and the characteristic fields only multiply
such Hamiltonians together.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

from .chart import Chart, Echelon, OneForm, VectorField, lie_bracket
from .errors import ChartMismatch, ClaimFailed, DependentGenerators, UnknownClaim
from .flags import Distribution, Splitting, derived_flag
from .scalar import ONE, ZERO, Scalar

__all__ = [
    "CotangentChart",
    "cotangent",
    "FiberPolynomial",
    "hamiltonian_of",
    "poisson_bracket",
    "CharacteristicField",
    "apply_characteristic",
    "MembershipResult",
    "ideal_membership",
    "TangencyCheck",
    "TangencyReport",
    "CLAIMS",
    "verify_tangency_claim",
    "KernelCheck",
    "control_kernel_check",
]

Monomial = tuple[int, ...]


# ---------------------------------------------------------------------------
# cotangent charts


@dataclass(frozen=True)
class CotangentChart:
    """Base chart plus one fiber coordinate per base coordinate, in the same order."""

    base: Chart
    fiber: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.fiber) != self.base.dim:
            raise ChartMismatch("need exactly one fiber coordinate per base coordinate")
        if len(set(self.fiber)) != len(self.fiber):
            raise ChartMismatch("fiber coordinates must be distinct")
        for f in self.fiber:
            if f in self.base:
                raise ChartMismatch(f"fiber coordinate {f!r} clashes with a base coordinate")

    @property
    def dim(self) -> int:
        return self.base.dim

    def fiber_index(self, name: str) -> int:
        return self.fiber.index(name)

    def p(self, which: int | str) -> "FiberPolynomial":
        """The fiber coordinate paired with a base coordinate (or its index)."""
        i = which if isinstance(which, int) else self.base.index(which)
        mono = tuple(1 if k == i else 0 for k in range(self.dim))
        return FiberPolynomial(self, {mono: ONE})


def _default_fiber(base: Chart) -> tuple[str, ...]:
    # x41 -> p41 when that stays unambiguous, otherwise p_<coordinate>
    short = []
    for c in base.coordinates:
        m = re.fullmatch(r"[A-Za-z]+(\d+)", c)
        short.append("p" + m.group(1) if m else None)
    if None not in short and len(set(short)) == len(short) and not any(s in base for s in short):
        return tuple(short)  # type: ignore[arg-type]
    return tuple(f"p_{c}" for c in base.coordinates)


@functools.lru_cache(maxsize=None)
def cotangent(base: Chart) -> CotangentChart:
    return CotangentChart(base, _default_fiber(base))


# ---------------------------------------------------------------------------
# fiber polynomials


ScalarLike = Union[Scalar, int]


class FiberPolynomial:
    """Sparse polynomial in the fiber coordinates with Scalar coefficients."""

    __slots__ = ("chart", "terms")

    def __init__(self, chart: CotangentChart, terms: Mapping[Monomial, Scalar] | None = None):
        self.chart = chart
        self.terms: dict[Monomial, Scalar] = {}
        for mono, c in (terms or {}).items():
            c = Scalar.coerce(c)
            if len(mono) != chart.dim:
                raise ValueError("monomial length does not match the fiber dimension")
            if not c.is_zero():
                self.terms[tuple(mono)] = c

    @classmethod
    def constant(cls, chart: CotangentChart, c: ScalarLike) -> "FiberPolynomial":
        return cls(chart, {(0,) * chart.dim: Scalar.coerce(c)})

    @classmethod
    def zero(cls, chart: CotangentChart) -> "FiberPolynomial":
        return cls(chart)

    def _check(self, other: "FiberPolynomial") -> None:
        if other.chart != self.chart:
            raise ChartMismatch("fiber polynomials live on different cotangent charts")

    def _lift(self, other) -> "FiberPolynomial":
        if isinstance(other, FiberPolynomial):
            self._check(other)
            return other
        return FiberPolynomial.constant(self.chart, other)

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def coefficient(self, mono: Monomial) -> Scalar:
        return self.terms.get(tuple(mono), ZERO)

    def __add__(self, other) -> "FiberPolynomial":
        other = self._lift(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, ZERO) + c
        return FiberPolynomial(self.chart, out)

    __radd__ = __add__

    def __neg__(self) -> "FiberPolynomial":
        return FiberPolynomial(self.chart, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "FiberPolynomial":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "FiberPolynomial":
        return self._lift(other) - self

    def __mul__(self, other) -> "FiberPolynomial":
        if not isinstance(other, FiberPolynomial):
            c = Scalar.coerce(other)
            return FiberPolynomial(self.chart, {m: a * c for m, a in self.terms.items()})
        self._check(other)
        out: dict[Monomial, Scalar] = {}
        for m1, a in self.terms.items():
            for m2, b in other.terms.items():
                m = tuple(i + j for i, j in zip(m1, m2))
                out[m] = out.get(m, ZERO) + a * b
        return FiberPolynomial(self.chart, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "FiberPolynomial":
        out = FiberPolynomial.constant(self.chart, 1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Scalar)):
            other = FiberPolynomial.constant(self.chart, other)
        if not isinstance(other, FiberPolynomial):
            return NotImplemented
        return self.chart == other.chart and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def diff_base(self, coord: str) -> "FiberPolynomial":
        return FiberPolynomial(self.chart, {m: c.diff(coord) for m, c in self.terms.items()})

    def diff_fiber(self, i: int) -> "FiberPolynomial":
        out: dict[Monomial, Scalar] = {}
        for m, c in self.terms.items():
            if m[i]:
                lowered = m[:i] + (m[i] - 1,) + m[i + 1:]
                out[lowered] = c * m[i]
        return FiberPolynomial(self.chart, out)

    def map_coefficients(self, fn) -> "FiberPolynomial":
        return FiberPolynomial(self.chart, {m: fn(c) for m, c in self.terms.items()})

    def subs(self, mapping: Mapping[str, ScalarLike]) -> "FiberPolynomial":
        return self.map_coefficients(lambda c: c.subs(mapping))

    def _mono_str(self, m: Monomial) -> str:
        parts = []
        for name, e in zip(self.chart.fiber, m):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for m in sorted(self.terms, reverse=True):
            c, ms = self.terms[m], self._mono_str(m)
            if not ms:
                out.append(str(c))
            elif c == ONE:
                out.append(ms)
            elif c == -ONE:
                out.append("-" + ms)
            else:
                out.append(f"({c})*{ms}")
        return " + ".join(out).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"FiberPolynomial({self})"


def hamiltonian_of(v: VectorField, chart: CotangentChart | None = None) -> FiberPolynomial:
    """H_v(x, p) = <p, v(x)>."""
    cc = chart or cotangent(v.chart)
    if cc.base != v.chart:
        raise ChartMismatch("vector field and cotangent chart have different bases")
    out = FiberPolynomial.zero(cc)
    for coord, c in v.items():
        out = out + cc.p(coord) * c
    return out


def poisson_bracket(f: FiberPolynomial, g: FiberPolynomial) -> FiberPolynomial:
    """{f, g} = sum_i (f_{p_i} g_{x_i} - f_{x_i} g_{p_i})."""
    f._check(g)
    out = FiberPolynomial.zero(f.chart)
    for i, coord in enumerate(f.chart.base.coordinates):
        fp, gp = f.diff_fiber(i), g.diff_fiber(i)
        if not fp.is_zero():
            gx = g.diff_base(coord)
            if not gx.is_zero():
                out = out + fp * gx
        if not gp.is_zero():
            fx = f.diff_base(coord)
            if not fx.is_zero():
                out = out - fx * gp
    return out


# ---------------------------------------------------------------------------
# characteristic fields


@dataclass
class CharacteristicField:
    """sum_k coefficient_k * (Hamiltonian vector field of v_k)."""

    chart: CotangentChart
    terms: list[tuple[FiberPolynomial, VectorField]] = field(default_factory=list)

    def __post_init__(self) -> None:
        for c, v in self.terms:
            if c.chart != self.chart or v.chart != self.chart.base:
                raise ChartMismatch("characteristic field terms must share the cotangent chart")

    def __add__(self, other: "CharacteristicField") -> "CharacteristicField":
        if other.chart != self.chart:
            raise ChartMismatch("characteristic fields on different charts")
        return CharacteristicField(self.chart, self.terms + other.terms)

    def scaled(self, c) -> "CharacteristicField":
        return CharacteristicField(self.chart, [(k * c, v) for k, v in self.terms])


def hamiltonian_field(v: VectorField, coefficient=None, chart: CotangentChart | None = None) -> CharacteristicField:
    cc = chart or cotangent(v.chart)
    if coefficient is None:
        coefficient = FiberPolynomial.constant(cc, 1)
    elif not isinstance(coefficient, FiberPolynomial):
        coefficient = FiberPolynomial.constant(cc, coefficient)
    return CharacteristicField(cc, [(coefficient, v)])


def apply_characteristic(theta: CharacteristicField, f: FiberPolynomial) -> FiberPolynomial:
    """Theta(f) = sum_k coefficient_k * {H_{v_k}, f}."""
    if f.chart != theta.chart:
        raise ChartMismatch("function and field on different cotangent charts")
    out = FiberPolynomial.zero(theta.chart)
    for coef, v in theta.terms:
        out = out + coef * poisson_bracket(hamiltonian_of(v, theta.chart), f)
    return out


# ---------------------------------------------------------------------------
# ideal membership for fiber-linear generators


@dataclass
class MembershipResult:
    member: bool
    remainder: FiberPolynomial
    certificate: list[FiberPolynomial] | None = None

    def __bool__(self) -> bool:
        return self.member


def _fiber_chart(cc: CotangentChart) -> Chart:
    return Chart(cc.fiber)


def ideal_membership(q: FiberPolynomial, generators: Sequence[FiberPolynomial]) -> MembershipResult:
    """Decide q in (g_1, ..., g_r) for fiber-linear g_j over the Scalar field.

    The generators are brought to reduced echelon form in the fiber
    coordinates; each pivot coordinate is eliminated from q by division,
    which leaves a remainder in the free fiber coordinates only.  The
    remainder vanishes exactly when q lies in the ideal.
    """
    cc = q.chart
    fchart = _fiber_chart(cc)
    ech = Echelon(fchart, track=True)
    for g in generators:
        g._check(q)
        row: dict[str, Scalar] = {}
        for m, c in g.terms.items():
            if sum(m) != 1:
                raise ValueError(f"generator {g} is not homogeneous of degree one")
            row[cc.fiber[m.index(1)]] = c
        if not ech.add(OneForm._raw(fchart, row)):
            raise DependentGenerators(f"generator {g} depends on the previous ones")
    rows = []
    for pivot, row, combo in ech.rows:
        poly = FiberPolynomial(cc, {tuple(1 if n == k else 0 for n in cc.fiber): c for k, c in row.items()})
        rows.append((cc.fiber.index(pivot), poly, combo))
    quotients = [FiberPolynomial.zero(cc) for _ in rows]
    rem = q
    while True:
        hit = None
        for m, c in rem.terms.items():
            for j, (pi, _, _) in enumerate(rows):
                if m[pi]:
                    hit = (m, c, j, pi)
                    break
            if hit:
                break
        if hit is None:
            break
        m, c, j, pi = hit
        lowered = FiberPolynomial(cc, {m[:pi] + (m[pi] - 1,) + m[pi + 1:]: c})
        quotients[j] = quotients[j] + lowered
        rem = rem - lowered * rows[j][1]
    if not rem.is_zero():
        return MembershipResult(False, rem, None)
    cert = [FiberPolynomial.zero(cc) for _ in generators]
    for (_, _, combo), h in zip(rows, quotients):
        for i, a in combo.items():
            cert[i] = cert[i] + h * a
    return MembershipResult(True, rem, cert)


# ---------------------------------------------------------------------------
# tangency claims


@dataclass(frozen=True)
class TangencyCheck:
    label: str
    passed: bool
    residue: str | None = None

    def to_dict(self) -> dict:
        return {"check": self.label, "passed": self.passed, "residue": self.residue}


@dataclass
class TangencyReport:
    claim: str
    checks: list[TangencyCheck]
    strata: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def first_failure(self) -> TangencyCheck | None:
        return next((c for c in self.checks if not c.passed), None)

    def to_dict(self) -> dict:
        return {
            "claim": self.claim,
            "passed": self.passed,
            "strata": list(self.strata),
            "checks": [c.to_dict() for c in self.checks],
        }


class _Claim:
    """Collects membership checks for one claim."""

    def __init__(self, cc: CotangentChart):
        self.cc = cc
        self.checks: list[TangencyCheck] = []
        self.strata: list[str] = []

    def H(self, v: VectorField) -> FiberPolynomial:
        return hamiltonian_of(v, self.cc)

    def member(self, label: str, q: FiberPolynomial, ideal: Sequence[FiberPolynomial]) -> None:
        res = ideal_membership(q, ideal)
        self.checks.append(TangencyCheck(label, res.member, None if res.member else str(res.remainder)))

    def tangent(self, name: str, theta: CharacteristicField, targets: Sequence[tuple[str, FiberPolynomial]],
                ideal: Sequence[FiberPolynomial]) -> None:
        self.strata.append(name)
        for label, f in targets:
            self.member(f"{name}({label}) in ideal", apply_characteristic(theta, f), ideal)

    def identity(self, label: str, lhs: FiberPolynomial, rhs: FiberPolynomial, ideal: Sequence[FiberPolynomial]) -> None:
        self.member(label, lhs - rhs, ideal)

    def flag(self, label: str, ok: bool, residue: str | None = None) -> None:
        self.checks.append(TangencyCheck(label, ok, residue))


def _controls(chart: Chart, names: Sequence[str]) -> list[Scalar]:
    for n in names:
        if n in chart:
            raise ChartMismatch(f"control symbol {n!r} clashes with a coordinate")
    return [Scalar.var(n) for n in names]


def _as_distribution(obj) -> tuple[Distribution, Splitting | None]:
    from .prolongation import ProlongationResult

    if isinstance(obj, ProlongationResult):
        return obj.distribution, obj.splitting
    if isinstance(obj, Splitting):
        return obj.distribution, obj
    if isinstance(obj, Distribution):
        return obj, None
    raise TypeError(f"cannot read a distribution from {type(obj).__name__}")


def _claim_d_full(obj) -> _Claim:
    """Xi = H6 vec(H1) - H5 vec(H2) + H4 vec(H3) is tangent to the annihilator of D."""
    D, _ = _as_distribution(obj)
    if D.rank != 3 or D.dim != 6 or derived_flag(D).growth != [3, 6]:
        raise ClaimFailed("svc-d-full needs a (3,6)-distribution")
    x1, x2, x3 = D.frame
    xi = [x1, x2, x3, lie_bracket(x1, x2), lie_bracket(x1, x3), lie_bracket(x2, x3)]
    cl = _Claim(cotangent(D.chart))
    H = [cl.H(v) for v in xi]
    Xi = (hamiltonian_field(x1, H[5], cl.cc) + hamiltonian_field(x2, -H[4], cl.cc)
          + hamiltonian_field(x3, H[3], cl.cc))
    ideal = H[:3]
    cl.tangent("Xi", Xi, [(f"H_xi{i + 1}", H[i]) for i in range(3)], ideal)
    # along the constrained flow: {H_xi_i, H} with H = u1 H1 + u2 H2 + u3 H3
    u1, u2, u3 = _controls(D.chart, ("u1", "u2", "u3"))
    Ham = H[0] * u1 + H[1] * u2 + H[2] * u3
    expected = [H[3] * u2 + H[4] * u3, -H[3] * u1 + H[5] * u3, -H[4] * u1 - H[5] * u2]
    for i in range(3):
        cl.identity(f"{{H_xi{i + 1}, H}} = ({expected[i]})", poisson_bracket(H[i], Ham), expected[i], [])
    return cl


def _claim_e_split(obj) -> _Claim:
    """Theta = vec(H_zeta1) is tangent to E^(3)-perp; fiber directions are singular on E^(2)-perp."""
    from .prolongation import ProlongationResult

    E, split = _as_distribution(obj)
    if split is None or [len(split.part(n)) for n in split.names()] != [1, 2]:
        raise ClaimFailed("svc-e-split needs a splitting E1 (rank 1) + E2 (rank 2)")
    report = derived_flag(E)
    if report.growth != [3, 5, 7, 8]:
        raise ClaimFailed(f"svc-e-split needs growth (3,5,7,8), got {tuple(report.growth)}")
    (z1,) = split.part(split.names()[0])
    z2, z3 = split.part(split.names()[1])
    cl = _Claim(cotangent(E.chart))
    if isinstance(obj, ProlongationResult) and obj.kind == "projective":
        x1, x2, x3, x4, x5, x6 = obj.xi
        n2, n3 = obj.chart_extension
        w2, w3 = Scalar.var(n2), Scalar.var(n3)
        gens3 = [z2, z3, x1, x2, x3, x4 - w3 * x6, x5 + w2 * x6]
        gens2 = [z2, z3, x1, x2, x3]
        horizontal = x1 + w2 * x2 + w3 * x3
        # the constraint H_xi1 + z2 H_xi2 + z3 H_xi3 = 0 is affine in the fiber coordinates z
        affine = all(c.degree_in(n) <= 1 for _, c in cl.H(horizontal).terms.items() for n in (n2, n3))
        cl.flag("constraint on the fiber is affine in (z2, z3)", affine)
        mu, l2, l3 = _controls(E.chart, ("mu", "lambda2", "lambda3"))
        Ham = cl.H(z1) * mu + cl.H(z2) * l2 + cl.H(z3) * l3
        rz = [cl.H(z2), cl.H(z3)]
        cl.identity("{H_xi2, H} = -mu H_(xi4 - z3 xi6) mod (H_zeta2, H_zeta3)",
                    poisson_bracket(cl.H(x2), Ham), -cl.H(x4 - w3 * x6) * mu, rz)
        cl.identity("{H_xi3, H} = -mu H_(xi5 + z2 xi6) mod (H_zeta2, H_zeta3)",
                    poisson_bracket(cl.H(x3), Ham), -cl.H(x5 + w2 * x6) * mu, rz)
        ideal1 = [cl.H(v) for v in gens3]
        cl.member("H_zeta1 in I", cl.H(z1), ideal1)
    else:
        gens3 = Echelon.of(report.level(3), track=False).frame()
        gens2 = Echelon.of(report.level(2), track=False).frame()
    I3 = [cl.H(v) for v in gens3]
    I2 = [cl.H(v) for v in gens2]
    cl.tangent("Theta", hamiltonian_field(z1, chart=cl.cc),
               [(f"H_g{i + 1}", f) for i, f in enumerate(I3)], I3)
    l2, l3 = _controls(E.chart, ("lambda2", "lambda3"))
    fiber = hamiltonian_field(z2, l2, cl.cc) + hamiltonian_field(z3, l3, cl.cc)
    cl.tangent("fiber", fiber, [(f"H_g{i + 1}", f) for i, f in enumerate(I2)], I2)
    return cl


def _theta_frame(obj) -> list[VectorField]:
    from .structures import check_b3_123

    F, split = _as_distribution(obj)
    if split is None or [len(split.part(n)) for n in split.names()] != [1, 1, 1]:
        raise ClaimFailed("svc-f-strata needs a splitting into three lines")
    cert = check_b3_123(F, split)
    if not cert.overall:
        fail = cert.first_failure
        raise ClaimFailed(f"not a B3(1,2,3) structure: {fail.condition}", fail.witness)
    t = list(cert.frame[:3])
    t.append(lie_bracket(t[0], t[1]))
    t.append(lie_bracket(t[1], t[2]))
    t.append(lie_bracket(t[0], t[4]))
    t.append(lie_bracket(t[2], t[4]))
    t.append(lie_bracket(t[0], t[6]))
    t.append(lie_bracket(t[1], t[7]))
    return t


def _claim_f_strata(obj) -> _Claim:
    """The five stratum fields Theta, Theta', Theta'', Theta''', Theta''''."""
    t = _theta_frame(obj)
    chart = t[0].chart
    cl = _Claim(cotangent(chart))
    H = [cl.H(v) for v in t]
    A, B = _controls(chart, ("A", "B"))
    l1, l2, l3 = _controls(chart, ("lambda1", "lambda2", "lambda3"))
    Ham = H[0] * l1 + H[1] * l2 + H[2] * l3

    def targets(n: int):
        return [(f"H_theta{i + 1}", H[i]) for i in range(n)]

    # d/dt H_theta_k = {H, H_theta_k}, modulo the constraints of the stratum
    derivative = [
        (1, -H[3] * l2, 3), (2, H[3] * l1 - H[4] * l3, 3), (3, H[4] * l2, 3),
        (4, -H[5] * l3, 5), (5, H[5] * l1 + H[6] * l3, 5), (6, H[7] * l3, 7),
        (7, H[7] * l1, 7), (8, H[8] * l2, 8),
    ]
    for k, rhs, depth in derivative:
        cl.identity(f"d/dt H_theta{k} = {rhs} mod (H_theta1..{depth})",
                    poisson_bracket(Ham, H[k - 1]), rhs, H[:depth])
    field_ = lambda i, c=None: hamiltonian_field(t[i], c, cl.cc)  # noqa: E731
    cl.tangent("Theta", field_(0, H[4]) + field_(2, H[3]), targets(3), H[:3])
    cl.tangent("Theta'", field_(1), targets(5), H[:5])
    cl.tangent("Theta''", field_(0, A) + field_(1, B), targets(6), H[:6])
    cl.tangent("Theta'''", field_(1), targets(7), H[:7])
    cl.tangent("Theta''''", field_(0, A) + field_(2, B), targets(8), H[:8])
    return cl


def _ell_frame(obj) -> list[VectorField]:
    L, split = _as_distribution(obj)
    if split is None or [len(split.part(n)) for n in split.names()] != [2, 2]:
        raise ClaimFailed("svc-l-quadric needs a splitting L1 (rank 2) + L2 (rank 2)")
    l1, l2 = split.part(split.names()[0])
    l3, l4 = split.part(split.names()[1])
    l5, l6 = lie_bracket(l1, l2), lie_bracket(l1, l3)
    return [l1, l2, l3, l4, l5, l6, lie_bracket(l1, l6), lie_bracket(l2, l6)]


def _claim_l_quadric(obj) -> _Claim:
    """V = A vec(H3) + B vec(H4) and the quadric-cone field V-tilde."""
    ell = _ell_frame(obj)
    chart = ell[0].chart
    cl = _Claim(cotangent(chart))
    H = [cl.H(v) for v in ell]
    A, B, At, Bt = _controls(chart, ("A", "B", "Atilde", "Btilde"))
    lam = _controls(chart, ("lambda1", "lambda2", "lambda3", "lambda4"))
    Ham = sum((H[i] * lam[i] for i in range(1, 4)), H[0] * lam[0])
    l1, l2, l3, l4 = lam
    derivative = [
        (1, -H[4] * l2 - H[5] * l3, 4), (2, H[4] * l1 - H[5] * l4, 4),
        (3, H[5] * l1, 4), (4, H[5] * l2, 4),
        (5, H[7] * l3 - H[6] * l4, 6), (6, H[6] * l1 + H[7] * l2, 6),
    ]
    for k, rhs, depth in derivative:
        cl.identity(f"d/dt H_l{k} = {rhs} mod (H_l1..{depth})", poisson_bracket(Ham, H[k - 1]), rhs, H[:depth])
    f = lambda i, c=None: hamiltonian_field(ell[i], c, cl.cc)  # noqa: E731
    low = [0, 1, 2, 3, 5]
    cl.tangent("V", f(2, A) + f(3, B), [(f"H_l{i + 1}", H[i]) for i in low], [H[i] for i in low])
    Vt = (f(0, -H[7] * At) + f(1, H[6] * At) + f(2, H[6] * Bt) + f(3, H[7] * Bt))
    cl.tangent("V~", Vt, [(f"H_l{i + 1}", H[i]) for i in range(6)], H[:6])
    return cl


CLAIMS = {
    "svc-d-full": _claim_d_full,
    "svc-e-split": _claim_e_split,
    "svc-f-strata": _claim_f_strata,
    "svc-l-quadric": _claim_l_quadric,
}


def verify_tangency_claim(claim: str, obj, *, strict: bool = True) -> TangencyReport:
    """Run the membership checks of a named claim.

    ``obj`` is a Distribution, a Splitting or a ProlongationResult of the
    shape the claim needs.  With ``strict`` the first failing check raises
    ClaimFailed carrying its residue.
    """
    if claim not in CLAIMS:
        raise UnknownClaim(f"unknown claim {claim!r}; known: {', '.join(CLAIMS)}")
    cl = CLAIMS[claim](obj)
    report = TangencyReport(claim, cl.checks, cl.strata)
    if strict and not report.passed:
        fail = report.first_failure
        raise ClaimFailed(f"{claim}: {fail.label}", fail.residue)
    return report


# ---------------------------------------------------------------------------
# the control kernel matrix


@dataclass
class KernelCheck:
    rank: int
    kernel: list[dict[str, Scalar]]
    expected_kernel: dict[str, Scalar]
    kernel_matches: bool
    residuals_zero: bool

    @property
    def passed(self) -> bool:
        return self.rank == 2 and self.kernel_matches and self.residuals_zero


def control_kernel_check() -> KernelCheck:
    """The constraint matrix acting on (u1, u2, u3) has rank 2 and kernel (phi6, -phi5, phi4).

    Rows [[0, phi4, phi5], [phi4, 0, -phi6], [phi5, phi6, 0]] with the phi
    as independent indeterminates.
    """
    from .chart import nullspace

    f4, f5, f6 = (Scalar.var(n) for n in ("phi4", "phi5", "phi6"))
    cols = ("u1", "u2", "u3")
    rows = [
        {"u1": ZERO, "u2": f4, "u3": f5},
        {"u1": f4, "u2": ZERO, "u3": -f6},
        {"u1": f5, "u2": f6, "u3": ZERO},
    ]
    chart = Chart(cols)
    ech = Echelon(chart, track=False)
    for r in rows:
        ech.add(OneForm._raw(chart, {k: v for k, v in r.items() if not v.is_zero()}))
    kernel = nullspace(rows, cols)
    expected = {"u1": f6, "u2": -f5, "u3": f4}
    residuals = all(sum((r[c] * expected[c] for c in cols), ZERO).is_zero() for r in rows)
    matches = len(kernel) == 1 and _proportional(kernel[0], expected, cols)
    return KernelCheck(ech.rank, kernel, expected, matches, residuals)


def _proportional(a: Mapping[str, Scalar], b: Mapping[str, Scalar], cols: Iterable[str]) -> bool:
    cols = list(cols)
    ref = next(c for c in cols if not b[c].is_zero())
    if a.get(ref, ZERO).is_zero():
        return False
    k = a[ref] / b[ref]
    return all((a.get(c, ZERO) - k * b[c]).is_zero() for c in cols)
