"""Homogeneous null-flag models in R^{3,4} and the m(x6) example family.

Each model is built from scratch: flag rows in the standard basis, nullity
equations solved for the dependent entries, a Pfaff system read off from the
infinitesimal incidence conditions, and a frame from its common kernel.  The
printed frames, named brackets and bracket tables ship as golden data and are
compared against what the engine derives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .chart import Chart, Echelon, OneForm, SymbolDecl, VectorField, kernel_frame, lie_bracket, parse_scalar
from .errors import ConstantM, ConstraintResidue, Prolong36Error, UnknownModel
from .flags import Distribution, Splitting, derived_flag
from .scalar import ONE, ZERO, Scalar

__all__ = [
    "MetricTable",
    "METRIC",
    "ModelSpec",
    "BracketRelation",
    "BracketCheck",
    "GradationAlgebra",
    "MODEL_NAMES",
    "build_model",
    "check_bracket_table",
    "gradation_algebra",
    "build_example_family",
    "example_chart",
]

MODEL_NAMES = ("F123", "F23", "F13", "F3")


# ---------------------------------------------------------------------------
# the inner product of signature (3,4)


@dataclass(frozen=True)
class MetricTable:
    """Symmetric 7x7 table of (e_i | e_j), stored 0-based."""

    entries: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def standard(cls) -> "MetricTable":
        half = Fraction(1, 2)
        rows = []
        for i in range(1, 8):
            row = []
            for j in range(1, 8):
                if i + j == 8 and i != j:
                    row.append(half)
                elif i == j == 4:
                    row.append(-half)
                else:
                    row.append(Fraction(0))
            rows.append(tuple(row))
        return cls(tuple(rows))

    def __call__(self, i: int, j: int) -> Fraction:
        """(e_i | e_j) with 1-based indices."""
        return self.entries[i - 1][j - 1]

    def is_symmetric(self) -> bool:
        n = len(self.entries)
        return all(self.entries[i][j] == self.entries[j][i] for i in range(n) for j in range(n))

    def signature(self) -> tuple[int, int]:
        """(positive, negative) counts by congruence diagonalization over QQ."""
        a = [list(r) for r in self.entries]
        n = len(a)
        pos = neg = 0
        for k in range(n):
            if a[k][k] == 0:
                swap = next((j for j in range(k + 1, n) if a[j][j] != 0), None)
                if swap is not None:
                    a[k], a[swap] = a[swap], a[k]
                    for r in a:
                        r[k], r[swap] = r[swap], r[k]
                else:
                    j = next((j for j in range(k + 1, n) if a[k][j] != 0), None)
                    if j is None:
                        continue
                    # e_k <- e_k + e_j makes the diagonal entry 2 a_kj
                    for c in range(n):
                        a[k][c] += a[j][c]
                    for r in range(n):
                        a[r][k] += a[r][j]
            p = a[k][k]
            if p > 0:
                pos += 1
            else:
                neg += 1
            for r in range(k + 1, n):
                f = a[r][k] / p
                if f:
                    for c in range(n):
                        a[r][c] -= f * a[k][c]
                    for c in range(n):
                        a[c][r] -= f * a[c][k]
        return pos, neg

    def inner(self, u: Mapping[int, Scalar], v: Mapping[int, Scalar]) -> Scalar:
        total = ZERO
        for i, a in u.items():
            for j, b in v.items():
                g = self(i, j)
                if g:
                    total = total + Scalar.const(g) * a * b
        return total

    def inner_forms(self, u: Mapping[int, OneForm], v: Mapping[int, Scalar], chart: Chart) -> OneForm:
        """(u' | v) where u holds the differentials of a row."""
        total = OneForm._raw(chart, {})
        for i, a in u.items():
            for j, b in v.items():
                g = self(i, j)
                if g:
                    total = total + (Scalar.const(g) * b) * a
        return total


METRIC = MetricTable.standard()


# ---------------------------------------------------------------------------
# golden data


@dataclass(frozen=True)
class BracketRelation:
    """[v_i, v_j] = sum_k c_k v_k on named fields (1-based)."""

    i: int
    j: int
    value: tuple[tuple[int, Fraction], ...] = ()

    @classmethod
    def of(cls, i: int, j: int, value: Mapping[int, int | Fraction] | int = 0) -> "BracketRelation":
        if isinstance(value, int):
            items = () if value == 0 else ((abs(value), Fraction(1 if value > 0 else -1)),)
        else:
            items = tuple(sorted((k, Fraction(c)) for k, c in value.items() if c))
        return cls(i, j, items)

    @property
    def label(self) -> str:
        return f"[{self.i},{self.j}]"

    def rhs(self) -> str:
        if not self.value:
            return "0"
        parts = []
        for k, c in self.value:
            coeff = "" if c == 1 else "-" if c == -1 else f"{c}*"
            parts.append(f"{coeff}v{k}")
        return " + ".join(parts).replace("+ -", "- ")

    def __str__(self) -> str:
        return f"{self.label} = {self.rhs()}"


def _table(*entries: tuple[int, int, int]) -> tuple[BracketRelation, ...]:
    return tuple(BracketRelation.of(i, j, v) for i, j, v in entries)


@dataclass(frozen=True)
class _Layout:
    prefix: str
    zeros: frozenset[tuple[int, int]]  # (row, e-index) entries that vanish
    conditions: tuple[tuple[str, int, int], ...]
    constraints: dict[tuple[int, int], str]
    pfaff: tuple[dict[str, str], ...]
    pfaff_errata: dict[int, dict[str, str]]
    frame: tuple[dict[str, str], ...]
    named: tuple[dict[str, str], ...]
    table: tuple[BracketRelation, ...]
    growth: tuple[int, ...]
    weights: tuple[int, ...]
    splitting: dict[str, list[int]] | None
    corrected_named: dict[int, dict[str, str]] = field(default_factory=dict)
    corrected_table: tuple[BracketRelation, ...] | None = None


_F123 = _Layout(
    prefix="w",
    zeros=frozenset(),
    conditions=(("span", 1, 2), ("span", 2, 3)),
    constraints={
        (1, 1): "w71 + w21*w61 + w31*w51 - 1/2*w41^2",
        (1, 2): "1/2*w72 + 1/2*w21*w62 + 1/2*w31*w52 - 1/2*w41*w42 + 1/2*w51*w32 + 1/2*w61",
        (1, 3): "1/2*w73 + 1/2*w21*w63 + 1/2*w31*w53 - 1/2*w41*w43 + 1/2*w51",
        (2, 2): "w62 + w32*w52 - 1/2*w42^2",
        (2, 3): "1/2*w63 + 1/2*w32*w53 - 1/2*w42*w43 + 1/2*w52",
        (3, 3): "w53 - 1/2*w43^2",
    },
    pfaff=(
        {"w31": "1", "w21": "-w32"},
        {"w41": "1", "w21": "-w42"},
        {"w51": "1", "w21": "-w52"},
        {"w61": "1", "w21": "w32*w52 - 1/2*w42^2"},
        {"w42": "1", "w32": "-w43"},
        {"w52": "1", "w32": "-1/4*w43^2"},
    ),
    pfaff_errata={5: {"w52": "1", "w32": "-1/2*w43^2"}},
    frame=(
        {"w21": "1", "w31": "w32", "w41": "w42", "w51": "w52", "w61": "-w32*w52 + 1/2*w42^2"},
        {"w32": "1", "w42": "w43", "w52": "1/2*w43^2"},
        {"w43": "1"},
    ),
    named=(
        {"w31": "-1", "w41": "-w43", "w51": "-1/2*w43^2", "w61": "w52 - w42*w43 + 1/2*w32*w43^2"},
        {"w42": "-1", "w52": "-w43"},
        {"w41": "1", "w51": "w43", "w61": "w42 - w32*w43"},
        {"w52": "-1"},
        {"w51": "1", "w61": "-w32"},
        {"w61": "-1"},
    ),
    table=_table(
        (1, 2, 4), (1, 3, 0), (2, 3, 5),
        (1, 4, 0), (1, 5, 6), (2, 4, 0), (2, 5, 0), (3, 4, -6), (3, 5, 7),
        (1, 6, 0), (1, 7, 8), (2, 6, 0), (2, 7, 0), (3, 6, 8), (3, 7, 0),
        (1, 8, 0), (2, 8, 9), (3, 8, 0),
    ),
    growth=(3, 5, 7, 8, 9),
    weights=(1, 1, 1, 2, 2, 3, 3, 4, 5),
    splitting={"F1": [0], "F2": [1], "F3": [2]},
)

_F23 = _Layout(
    prefix="z",
    zeros=frozenset({(1, 2)}),
    conditions=(("span", 1, 3), ("span", 2, 3)),
    constraints={
        (1, 1): "z71 + z31*z51 - 1/2*z41^2",
        (1, 2): "1/2*z72 + 1/2*z31*z52 - 1/2*z41*z42 + 1/2*z32*z51 + 1/2*z61",
        (1, 3): "1/2*z73 + 1/2*z31*z53 - 1/2*z41*z43 + 1/2*z51",
        (2, 2): "z62 + z32*z52 - 1/2*z42^2",
        (2, 3): "1/2*z63 + 1/2*z32*z53 - 1/2*z42*z43 + 1/2*z52",
        (3, 3): "z53 - 1/2*z43^2",
    },
    pfaff=(
        {"z41": "1", "z31": "-z43"},
        {"z51": "1", "z31": "-1/2*z43^2"},
        {"z61": "1", "z31": "1/2*z32*z43^2 - z42*z43 + z52"},
        {"z42": "1", "z32": "-z43"},
        {"z52": "1", "z32": "-1/2*z43^2"},
    ),
    pfaff_errata={},
    frame=(
        {"z43": "1"},
        {"z31": "1", "z41": "z43", "z51": "1/2*z43^2", "z61": "-(1/2*z32*z43^2 - z42*z43 + z52)"},
        {"z32": "1", "z42": "z43", "z52": "1/2*z43^2"},
    ),
    named=(
        {"z41": "1", "z51": "z43", "z61": "-(z32*z43 - z42)"},
        {"z42": "1", "z52": "z43"},
        {"z51": "1", "z61": "-z32"},
        {"z52": "1"},
        {"z61": "-1"},
    ),
    table=_table(
        (1, 2, 4), (1, 3, 5), (2, 3, 0),
        (1, 4, 6), (1, 5, 7), (2, 4, 0), (2, 5, 0), (3, 4, 0), (3, 5, 0),
        (1, 6, 0), (1, 7, 0), (2, 6, 0), (2, 7, 8), (3, 6, 8), (3, 7, 0),
    ),
    growth=(3, 5, 7, 8),
    weights=(1, 1, 1, 2, 2, 3, 3, 4),
    splitting={"E1": [0], "E2": [1, 2]},
    # v8 := [v2, v7] is +d/dz61; [v3, v6] = -v8
    corrected_named={8: {"z61": "1"}},
    corrected_table=_table(
        (1, 2, 4), (1, 3, 5), (2, 3, 0),
        (1, 4, 6), (1, 5, 7), (2, 4, 0), (2, 5, 0), (3, 4, 0), (3, 5, 0),
        (1, 6, 0), (1, 7, 0), (2, 6, 0), (2, 7, 8), (3, 6, -8), (3, 7, 0),
    ),
)

_F13 = _Layout(
    prefix="s",
    zeros=frozenset({(2, 3)}),
    conditions=(("span", 1, 3), ("pair", 2, 3)),
    constraints={
        (1, 1): "s71 + s21*s61 + s31*s51 - 1/2*s41^2",
        (1, 2): "1/2*s72 + 1/2*s21*s62 + 1/2*s31*s52 - 1/2*s41*s42 + 1/2*s61",
        (1, 3): "1/2*s73 + 1/2*s21*s63 + 1/2*s31*s53 - 1/2*s41*s43 + 1/2*s51",
        (2, 2): "s62 - 1/2*s42^2",
        (2, 3): "1/2*s63 - 1/2*s42*s43 + 1/2*s52",
        (3, 3): "s53 - 1/2*s43^2",
    },
    pfaff=(
        {"s41": "1", "s21": "-s42", "s31": "-s43"},
        {"s51": "1", "s21": "-s52", "s31": "-1/2*s43^2"},
        {"s61": "1", "s21": "-1/2*s42^2", "s31": "s52 - s42*s43"},
        {"s52": "1", "s42": "-s43"},
    ),
    pfaff_errata={},
    frame=(
        {"s42": "1", "s52": "s43"},
        {"s43": "1"},
        {"s21": "1", "s41": "s42", "s51": "s52", "s61": "1/2*s42^2"},
        {"s31": "1", "s41": "s43", "s51": "1/2*s43^2", "s61": "-(s52 - s42*s43)"},
    ),
    named=(
        {"s52": "-1"},
        {"s41": "1", "s51": "s43", "s61": "s42"},
        {"s61": "1"},
        {"s51": "1"},
    ),
    table=_table(
        (1, 2, 5), (1, 3, 6), (1, 4, 0), (2, 3, 0), (2, 4, 6), (3, 4, 0),
        (1, 5, 0), (1, 6, 7), (2, 5, 0), (2, 6, 8), (3, 5, 8), (3, 6, 0), (4, 5, -7), (4, 6, 0),
    ),
    growth=(4, 6, 8),
    weights=(1, 1, 1, 1, 2, 2, 3, 3),
    splitting={"L1": [0, 1], "L2": [2, 3]},
)

_F3 = _Layout(
    prefix="x",
    zeros=frozenset({(1, 2), (1, 3), (2, 3)}),
    conditions=(("pair", 1, 2), ("pair", 1, 3), ("pair", 2, 3)),
    constraints={
        (1, 1): "x71 - 1/2*x41^2",
        (1, 2): "1/2*x72 - 1/2*x41*x42 + 1/2*x61",
        (1, 3): "1/2*x73 - 1/2*x41*x43 + 1/2*x51",
        (2, 2): "x62 - 1/2*x42^2",
        (2, 3): "1/2*x63 - 1/2*x42*x43 + 1/2*x52",
        (3, 3): "x53 - 1/2*x43^2",
    },
    pfaff=(
        {"x61": "1", "x41": "-x42"},
        {"x51": "1", "x41": "-x43"},
        {"x52": "1", "x42": "-x43"},
    ),
    pfaff_errata={},
    frame=(
        {"x41": "1", "x51": "x43", "x61": "x42"},
        {"x42": "1", "x52": "x43"},
        {"x43": "1"},
    ),
    named=(
        {"x61": "-1"},
        {"x51": "-1"},
        {"x52": "-1"},
    ),
    table=_table(
        (1, 2, 4), (1, 3, 5), (2, 3, 6),
        *[(i, j, 0) for i in (1, 2, 3) for j in (4, 5, 6)],
    ),
    growth=(3, 6),
    weights=(1, 1, 1, 2, 2, 2),
    splitting=None,
)

_LAYOUTS = {"F123": _F123, "F23": _F23, "F13": _F13, "F3": _F3}

# pair order of the triangular solve and the entry each pair determines
_SOLVE_ORDER = ((3, 3), (2, 3), (2, 2), (1, 3), (1, 2), (1, 1))


# ---------------------------------------------------------------------------
# model construction


@dataclass
class ModelSpec:
    which: str
    chart: Chart
    rows: list[dict[int, Scalar]] = field(repr=False)
    solved: dict[str, Scalar] = field(repr=False)
    constraints: dict[tuple[int, int], Scalar] = field(repr=False)
    printed_constraints: dict[tuple[int, int], Scalar] = field(repr=False)
    pfaff: list[OneForm] = field(repr=False)
    printed_pfaff: list[OneForm] = field(repr=False)
    pfaff_errata: dict[int, OneForm] = field(repr=False)
    frame: list[VectorField] = field(repr=False)
    derived_frame: list[VectorField] = field(repr=False)
    named: list[VectorField] = field(repr=False)
    table: tuple[BracketRelation, ...] = field(repr=False)
    growth: tuple[int, ...] = ()
    weights: tuple[int, ...] = ()
    splitting_parts: dict[str, list[int]] | None = None
    corrected_named: list[VectorField] | None = field(default=None, repr=False)
    corrected_table: tuple[BracketRelation, ...] | None = field(default=None, repr=False)

    @property
    def free(self) -> tuple[str, ...]:
        return self.chart.coordinates

    @property
    def distribution(self) -> Distribution:
        return Distribution(self.chart, self.frame)

    @property
    def splitting(self) -> Splitting | None:
        if self.splitting_parts is None:
            return None
        return Splitting(self.distribution, self.splitting_parts)

    def substituted_rows(self) -> list[dict[int, Scalar]]:
        return [{k: v.subs(self.solved) for k, v in row.items()} for row in self.rows]

    def nullity_residues(self) -> dict[tuple[int, int], Scalar]:
        """(row_i | row_j) after substituting the solved entries; all zero on success."""
        rows = self.substituted_rows()
        return {(i, j): METRIC.inner(rows[i - 1], rows[j - 1]) for i in range(1, 4) for j in range(i, 4)}

    def frame_matches_printed(self) -> bool:
        return self.derived_frame == Echelon.of(self.frame, self.chart, track=False).frame()

    def pfaff_matches_printed(self) -> bool:
        """Derived Pfaff system spans the printed one, after the listed errata."""
        printed = [self.pfaff_errata.get(i, f) for i, f in enumerate(self.printed_pfaff)]
        a = Echelon.of(self.pfaff, self.chart, track=False)
        b = Echelon.of(printed, self.chart, track=False)
        return a.rank == b.rank and a.frame(OneForm) == b.frame(OneForm)


def _row_coordinate(prefix: str, row: int, k: int) -> str:
    return f"{prefix}{k}{row}"


def _raw_rows(layout: _Layout) -> tuple[list[dict[int, Scalar]], list[str], list[str]]:
    """Flag rows with symbolic entries, the free coordinates and the dependent ones."""
    dependents = {_row_coordinate(layout.prefix, j, 8 - i) for i, j in _SOLVE_ORDER}
    rows: list[dict[int, Scalar]] = []
    free: list[str] = []
    for r in (1, 2, 3):
        row = {r: ONE}
        for k in range(r + 1, 8):
            if (r, k) in layout.zeros:
                continue
            name = _row_coordinate(layout.prefix, r, k)
            row[k] = Scalar.var(name)
            if name not in dependents:
                free.append(name)
        rows.append(row)
    ordered = [_row_coordinate(layout.prefix, j, 8 - i) for i, j in _SOLVE_ORDER]
    return rows, free, ordered


def _solve_nullity(rows: list[dict[int, Scalar]], dependents: list[str]) -> dict[str, Scalar]:
    solved: dict[str, Scalar] = {}
    pending = set(dependents)
    for (i, j), dep in zip(_SOLVE_ORDER, dependents):
        eq = METRIC.inner(rows[i - 1], rows[j - 1]).subs(solved)
        unknown = eq.names() & pending
        if unknown != {dep}:
            raise ConstraintResidue(f"({i}|{j}) involves {sorted(unknown)}, expected only {dep}")
        if eq.degree_in(dep) != 1:
            raise ConstraintResidue(f"({i}|{j}) is not linear in {dep}")
        coeff = eq.diff_generator(dep)
        if not coeff.is_constant():
            raise ConstraintResidue(f"({i}|{j}) has a nonconstant coefficient on {dep}")
        solved[dep] = -eq.subs({dep: ZERO}) / coeff
        pending.discard(dep)
    return solved


def _differentials(chart: Chart, row: Mapping[int, Scalar]) -> dict[int, OneForm]:
    return {k: OneForm.differential(chart, v) for k, v in row.items()}


def _condition_forms(chart: Chart, rows: list[dict[int, Scalar]], cond: tuple[str, int, int]) -> list[OneForm]:
    kind, a, b = cond
    d = _differentials(chart, rows[a - 1])
    if kind == "pair":
        return [METRIC.inner_forms(d, rows[b - 1], chart)]
    # row_a' in <row_1..row_b>: rows are unit upper triangular, eliminate in order
    residue = {k: d.get(k, OneForm._raw(chart, {})) for k in range(1, 8)}
    for s in range(1, b + 1):
        c = residue[s]
        if c.is_zero():
            continue
        for k, entry in rows[s - 1].items():
            residue[k] = residue[k] - entry * c
    return [residue[k] for k in range(b + 1, 8) if not residue[k].is_zero()]


def _independent(forms: Sequence[OneForm], chart: Chart) -> list[OneForm]:
    ech = Echelon(chart, track=False)
    return [f for f in forms if ech.add(f)]


def _fields(chart: Chart, literals: Sequence[Mapping[str, str]]) -> list[VectorField]:
    return [VectorField(chart, lit) for lit in literals]


def _forms(chart: Chart, literals: Sequence[Mapping[str, str]]) -> list[OneForm]:
    return [OneForm(chart, lit) for lit in literals]


def build_model(which: str) -> ModelSpec:
    """Construct one of F123, F23, F13, F3 from the flag description."""
    if which not in _LAYOUTS:
        raise UnknownModel(f"unknown model {which!r}; choose from {', '.join(MODEL_NAMES)}")
    layout = _LAYOUTS[which]
    raw, free, dependents = _raw_rows(layout)
    chart = Chart(tuple(free))
    constraints = {(i, j): METRIC.inner(raw[i - 1], raw[j - 1]) for i in range(1, 4) for j in range(i, 4)}
    printed = {key: parse_scalar(text) for key, text in layout.constraints.items()}
    solved = _solve_nullity(raw, dependents)
    rows = [{k: v.subs(solved) for k, v in row.items()} for row in raw]
    for i in range(1, 4):
        for j in range(i, 4):
            res = METRIC.inner(rows[i - 1], rows[j - 1])
            if not res.is_zero():
                raise ConstraintResidue(f"({i}|{j}) = {res} after substitution")
    forms: list[OneForm] = []
    for cond in layout.conditions:
        forms.extend(_condition_forms(chart, rows, cond))
    pfaff = _independent(forms, chart)
    derived = kernel_frame(pfaff, chart)
    frame = _fields(chart, layout.frame)
    named = frame + _fields(chart, layout.named)
    corrected = None
    if layout.corrected_named:
        corrected = list(named)
        for k, lit in layout.corrected_named.items():
            corrected[k - 1] = VectorField(chart, lit)
    return ModelSpec(
        which=which,
        chart=chart,
        rows=raw,
        solved=solved,
        constraints=constraints,
        printed_constraints=printed,
        pfaff=pfaff,
        printed_pfaff=_forms(chart, layout.pfaff),
        pfaff_errata={i: OneForm(chart, lit) for i, lit in layout.pfaff_errata.items()},
        frame=frame,
        derived_frame=derived,
        named=named,
        table=layout.table,
        growth=layout.growth,
        weights=layout.weights,
        splitting_parts=layout.splitting,
        corrected_named=corrected,
        corrected_table=layout.corrected_table,
    )


# ---------------------------------------------------------------------------
# bracket tables


@dataclass(frozen=True)
class BracketCheck:
    relation: BracketRelation
    passed: bool
    residue: VectorField | None = None

    def to_dict(self) -> dict:
        return {
            "relation": str(self.relation),
            "passed": self.passed,
            "residue": None if self.residue is None else self.residue.to_literal(),
        }


def check_bracket_table(
    named: Sequence[VectorField], table: Sequence[BracketRelation]
) -> list[BracketCheck]:
    """Compare each [v_i, v_j] with its tabulated combination, exactly."""
    out = []
    chart = named[0].chart
    for rel in table:
        lhs = lie_bracket(named[rel.i - 1], named[rel.j - 1])
        rhs = VectorField._raw(chart, {})
        for k, c in rel.value:
            rhs = rhs + Scalar.const(c) * named[k - 1]
        diff = lhs - rhs
        out.append(BracketCheck(rel, diff.is_zero(), None if diff.is_zero() else diff))
    return out


# ---------------------------------------------------------------------------
# gradation algebra


@dataclass
class GradationAlgebra:
    """Structure constants [d_i, d_j] = sum_k c_k d_k on graded classes."""

    weights: tuple[int, ...]
    brackets: dict[tuple[int, int], dict[int, Scalar]]

    def bracket(self, i: int, j: int) -> dict[int, Scalar]:
        if i == j:
            return {}
        if i > j:
            return {k: -c for k, c in self.bracket(j, i).items()}
        return dict(self.brackets.get((i, j), {}))

    def relation(self, i: int, j: int) -> BracketRelation:
        value = {}
        for k, c in self.bracket(i, j).items():
            if not c.is_constant():
                raise Prolong36Error(f"[d{i},d{j}] has a nonconstant coefficient {c}")
            value[k] = c.to_fraction()
        return BracketRelation.of(i, j, value)

    def is_constant(self) -> bool:
        return all(c.is_constant() for row in self.brackets.values() for c in row.values())

    def dims(self) -> list[int]:
        top = max(self.weights)
        return [self.weights.count(w) for w in range(1, top + 1)]

    def agrees_with(self, table: Sequence[BracketRelation]) -> list[tuple[BracketRelation, BracketRelation]]:
        """Mismatches (expected, computed) against a tabulated set of relations."""
        bad = []
        for rel in table:
            got = self.relation(rel.i, rel.j)
            if got.value != rel.value:
                bad.append((rel, got))
        return bad


def gradation_algebra(
    model: ModelSpec | Distribution,
    representatives: Sequence[VectorField] | None = None,
    weights: Sequence[int] | None = None,
) -> GradationAlgebra:
    """Classes of representatives modulo lower flag levels, and their brackets.

    A ModelSpec uses its named fields and weights; a Distribution uses the
    flag generators, graded by the level at which they appear.
    """
    if isinstance(model, ModelSpec):
        reps = list(representatives or model.corrected_named or model.named)
        wts = tuple(weights or model.weights)
    elif representatives is not None and weights is not None:
        reps, wts = list(representatives), tuple(weights)
    else:
        report = derived_flag(model)
        reps, wl = [], []
        for level, gens in enumerate(report.generators, start=1):
            reps.extend(gens)
            wl.extend([level] * len(gens))
        wts = tuple(wl)
    if len(reps) != len(wts):
        raise ValueError("one weight per representative is required")
    top = max(wts)
    chart = reps[0].chart
    graded: dict[int, tuple[Echelon, dict[int, int], int]] = {}
    for s in range(2, top + 1):
        ech = Echelon(chart, track=True)
        for k, v in enumerate(reps):
            if wts[k] < s:
                ech.add(v)
        offset = ech.count
        index: dict[int, int] = {}
        for k, v in enumerate(reps):
            if wts[k] == s:
                index[ech.count] = k + 1
                ech.add(v)
        graded[s] = (ech, index, offset)
    brackets: dict[tuple[int, int], dict[int, Scalar]] = {}
    n = len(reps)
    for i in range(n):
        for j in range(i + 1, n):
            s = wts[i] + wts[j]
            if s > top:
                continue
            ech, index, _ = graded[s]
            residue, combo = ech.reduce(lie_bracket(reps[i], reps[j]))
            if not residue.is_zero():
                raise Prolong36Error(f"[v{i + 1},v{j + 1}] leaves level {s}: {residue}")
            value = {index[c]: a for c, a in combo.items() if c in index}
            if value:
                brackets[(i + 1, j + 1)] = value
    return GradationAlgebra(wts, brackets)


# ---------------------------------------------------------------------------
# the example family


def example_chart(polynomial: bool = False) -> Chart:
    coords = ("x1", "x2", "x3", "x4", "x5", "x6")
    return Chart(coords) if polynomial else Chart(coords, (SymbolDecl("m", "x6"),))


def build_example_family(m_mode: str | Scalar = "formal") -> Distribution:
    """<d/dx1 + x3 d/dx4 + (x2 + m) d/dx6, d/dx2 + x3 d/dx5, d/dx3>.

    ``m_mode`` is "formal" for a declared function m(x6), or a polynomial in
    x6 given as a literal or a Scalar.
    """
    if isinstance(m_mode, str) and m_mode == "formal":
        chart = example_chart()
        m = chart.parse("m(x6)")
    else:
        chart = example_chart(polynomial=True)
        m = chart.parse(m_mode) if isinstance(m_mode, str) else Scalar.coerce(m_mode)
        extra = m.names() - {"x6"}
        if extra:
            raise ValueError(f"m may only depend on x6, found {sorted(extra)}")
        if not m.is_polynomial():
            raise ValueError("polynomial mode needs a polynomial in x6")
        if not m.depends_on("x6"):
            raise ConstantM("m(x6) must not be constant")
    x2 = chart.coord("x2")
    x3 = chart.coord("x3")
    frame = [
        VectorField(chart, {"x1": ONE, "x4": x3, "x6": x2 + m}),
        VectorField(chart, {"x2": ONE, "x5": x3}),
        VectorField(chart, {"x3": ONE}),
    ]
    D = Distribution(chart, frame)
    growth = derived_flag(D).growth
    if growth != [3, 6]:
        raise Prolong36Error(f"example family has growth {tuple(growth)}")
    return D
