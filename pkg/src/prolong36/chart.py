"""Charts, vector fields, one-forms and fraction-field linear algebra.

Every elimination uses the same pivot rule: the pivot of a row is its first
nonzero entry scanning coordinates in the chart's declared order, and rows
are kept fully reduced.  Reduced row echelon form is unique for a given span
and column order, so echelon frames are canonical representatives.
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .errors import (
    ChartMismatch,
    DependentForms,
    DerivativeObstruction,
    Inconsistent,
    NotInverse,
    Prolong36Error,
    Underdetermined,
    UnknownCoordinate,
)
from .scalar import (
    ONE,
    ZERO,
    Scalar,
    ScalarLike,
    _functions,
    _jets,
    _lock,
    _STATE,
    declare_function,
    declare_symbol,
    jet_info,
    name_key,
    parse_scalar,
)

__all__ = [
    "SymbolDecl",
    "Chart",
    "VectorField",
    "OneForm",
    "Echelon",
    "LinearSolveReport",
    "NonlinearUnknowns",
    "lie_bracket",
    "generic_rank",
    "echelon",
    "reduce_mod_frame",
    "in_span",
    "span_contains",
    "same_span",
    "kernel_frame",
    "substitute_chart",
    "solve_linear_coefficients",
    "formal_functions",
    "nullspace",
]


@dataclass(frozen=True)
class SymbolDecl:
    """A formal one-argument function such as ``m`` with argument ``x6``."""

    name: str
    argument: str


@dataclass(frozen=True)
class Chart:
    """Ordered coordinates plus declared formal functions.

    ``constants`` lists extra plain names (formal constants) accepted in
    literals; they are not coordinates and cannot be differentiated along.
    """

    coordinates: tuple[str, ...]
    symbol_decls: tuple[SymbolDecl, ...] = ()
    constants: tuple[str, ...] = ()
    _index: dict = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self) -> None:
        coords = tuple(self.coordinates)
        object.__setattr__(self, "coordinates", coords)
        object.__setattr__(self, "symbol_decls", tuple(self.symbol_decls))
        object.__setattr__(self, "constants", tuple(self.constants))
        if len(set(coords)) != len(coords):
            raise ValueError(f"duplicate coordinates in {coords}")
        for decl in self.symbol_decls:
            if decl.argument not in coords:
                raise ValueError(f"symbol {decl.name} has argument {decl.argument!r} outside the chart")
            if decl.name in coords:
                raise ValueError(f"symbol {decl.name!r} clashes with a coordinate")
            declare_symbol(decl.name, decl.argument)
        object.__setattr__(self, "_index", {c: i for i, c in enumerate(coords)})
        _STATE.ensure(coords + self.constants)

    @property
    def dim(self) -> int:
        return len(self.coordinates)

    def index(self, coord: str) -> int:
        try:
            return self._index[coord]
        except KeyError:
            raise UnknownCoordinate(f"{coord!r} is not a coordinate of this chart") from None

    def __contains__(self, coord: str) -> bool:
        return coord in self._index

    def coord(self, name: str) -> Scalar:
        self.index(name)
        return Scalar.var(name)

    def symbols(self) -> dict[str, str]:
        return {d.name: d.argument for d in self.symbol_decls}

    def parse(self, text: str) -> Scalar:
        """Parse a literal, checking names against this chart."""
        return parse_scalar(text, self.coordinates, self.symbols(), self.constants)

    def extend(self, new: Sequence[str], after: str | None = None) -> "Chart":
        """Chart with fresh coordinates appended (or inserted after ``after``)."""
        for c in new:
            if c in self._index:
                raise ValueError(f"coordinate {c!r} is not fresh")
        if after is None:
            coords = self.coordinates + tuple(new)
        else:
            i = self.index(after) + 1
            coords = self.coordinates[:i] + tuple(new) + self.coordinates[i:]
        return Chart(coords, self.symbol_decls, self.constants)

    def with_coordinates(self, coords: Sequence[str]) -> "Chart":
        decls = tuple(d for d in self.symbol_decls if d.argument in coords)
        return Chart(tuple(coords), decls, self.constants)

    def with_constants(self, constants: Iterable[str]) -> "Chart":
        extra = tuple(c for c in constants if c not in self.constants)
        return Chart(self.coordinates, self.symbol_decls, self.constants + extra)

    def order_key(self, coord: str) -> int:
        return self.index(coord)


# ---------------------------------------------------------------------------
# vector fields and one-forms


class _CoordinateMap:
    """Sparse coordinate -> Scalar map shared by vector fields and one-forms."""

    __slots__ = ("chart", "_c")
    _kind = "map"

    def __init__(self, chart: Chart, coefficients: Mapping[str, ScalarLike | str] | None = None):
        self.chart = chart
        coeffs: dict[str, Scalar] = {}
        for k, v in (coefficients or {}).items():
            chart.index(k)
            s = chart.parse(v) if isinstance(v, str) else Scalar.coerce(v)
            if not s.is_zero():
                coeffs[k] = s
        self._c = coeffs

    @classmethod
    def _raw(cls, chart: Chart, coeffs: dict[str, Scalar]):
        obj = cls.__new__(cls)
        obj.chart = chart
        obj._c = {k: v for k, v in coeffs.items() if not v.is_zero()}
        return obj

    def __getitem__(self, coord: str) -> Scalar:
        return self._c.get(coord, ZERO)

    def items(self) -> list[tuple[str, Scalar]]:
        """Nonzero entries in chart order."""
        return sorted(self._c.items(), key=lambda kv: self.chart.index(kv[0]))

    def support(self) -> list[str]:
        return [k for k, _ in self.items()]

    def coefficients(self) -> dict[str, Scalar]:
        return dict(self.items())

    def is_zero(self) -> bool:
        return not self._c

    def leading(self) -> str | None:
        """First coordinate (chart order) with a nonzero coefficient."""
        if not self._c:
            return None
        return min(self._c, key=self.chart.index)

    def _check(self, other: "_CoordinateMap") -> None:
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.chart != self.chart:
            raise ChartMismatch("operands live on different charts")

    def __add__(self, other):
        if not isinstance(other, _CoordinateMap):
            return NotImplemented
        self._check(other)
        out = dict(self._c)
        for k, v in other._c.items():
            out[k] = out[k] + v if k in out else v
        return type(self)._raw(self.chart, out)

    def __sub__(self, other):
        if not isinstance(other, _CoordinateMap):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return type(self)._raw(self.chart, {k: -v for k, v in self._c.items()})

    def __rmul__(self, f: ScalarLike):
        if isinstance(f, _CoordinateMap):
            return NotImplemented
        f = Scalar.coerce(f)
        if f.is_zero():
            return type(self)._raw(self.chart, {})
        if f == ONE:
            return self
        return type(self)._raw(self.chart, {k: f * v for k, v in self._c.items()})

    __mul__ = __rmul__

    def __eq__(self, other: object) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return self.chart == other.chart and self._c == other._c

    def __hash__(self) -> int:
        return hash((type(self).__name__, tuple((k, str(v)) for k, v in self.items())))

    def map_coefficients(self, fn):
        return type(self)._raw(self.chart, {k: fn(v) for k, v in self._c.items()})

    def subs(self, mapping: Mapping[str, ScalarLike]):
        """Substitute generators inside the coefficients (the chart is unchanged)."""
        return self.map_coefficients(lambda s: s.subs(mapping))

    def on_chart(self, chart: Chart):
        """Same coefficients viewed on another chart containing every support coordinate."""
        for k in self._c:
            chart.index(k)
        return type(self)._raw(chart, dict(self._c))

    def to_literal(self) -> dict[str, str]:
        return {k: str(v) for k, v in self.items()}

    def names(self) -> frozenset[str]:
        out: set[str] = set()
        for v in self._c.values():
            out |= v.names()
        return frozenset(out)


class VectorField(_CoordinateMap):
    """A vector field sum_k c_k d/dx_k on a chart."""

    __slots__ = ()

    @classmethod
    def coordinate(cls, chart: Chart, coord: str) -> "VectorField":
        chart.index(coord)
        return cls._raw(chart, {coord: ONE})

    @classmethod
    def zero(cls, chart: Chart) -> "VectorField":
        return cls._raw(chart, {})

    def __call__(self, f: Scalar) -> Scalar:
        """Apply the field as a derivation."""
        f = Scalar.coerce(f)
        names = f.names()
        if not names:
            return ZERO
        total = ZERO
        for k, c in self._c.items():
            if k in names or any(
                (info := jet_info(n)) is not None and k in info.args for n in names
            ):
                d = f.diff(k)
                if not d.is_zero():
                    total = total + c * d
        return total

    def __str__(self) -> str:
        if not self._c:
            return "0"
        parts = []
        for k, v in self.items():
            s = str(v)
            if s == "1":
                parts.append(f"d/d{k}")
            elif s == "-1":
                parts.append(f"-d/d{k}")
            else:
                parts.append(f"({s})*d/d{k}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"VectorField({self.to_literal()!r})"


class OneForm(_CoordinateMap):
    """A one-form sum_k c_k dx_k on a chart."""

    __slots__ = ()

    @classmethod
    def differential(cls, chart: Chart, f: Scalar) -> "OneForm":
        """Exterior derivative of a Scalar on the chart."""
        return cls._raw(chart, {c: f.diff(c) for c in chart.coordinates})

    @classmethod
    def coordinate(cls, chart: Chart, coord: str) -> "OneForm":
        chart.index(coord)
        return cls._raw(chart, {coord: ONE})

    def pair(self, v: VectorField) -> Scalar:
        if v.chart != self.chart:
            raise ChartMismatch("form and field live on different charts")
        total = ZERO
        for k, c in self._c.items():
            if k in v._c:
                total = total + c * v._c[k]
        return total

    def __str__(self) -> str:
        if not self._c:
            return "0"
        return " + ".join(f"({v})*d{k}" for k, v in self.items())

    def __repr__(self) -> str:
        return f"OneForm({self.to_literal()!r})"


def lie_bracket(v: VectorField, w: VectorField) -> VectorField:
    """[v, w]^k = sum_j (v^j d_j w^k - w^j d_j v^k)."""
    if v.chart != w.chart:
        raise ChartMismatch("lie_bracket of fields on different charts")
    out: dict[str, Scalar] = {}
    for k in set(v._c) | set(w._c):
        term = ZERO
        if k in w._c:
            term = v(w._c[k])
        if k in v._c:
            term = term - w(v._c[k])
        if not term.is_zero():
            out[k] = term
    return VectorField._raw(v.chart, out)


# ---------------------------------------------------------------------------
# echelon engine


class Echelon:
    """Incrementally maintained reduced row echelon form of a list of fields.

    Rows are normalized (pivot coefficient 1) and fully reduced.  Each row
    carries its expression as a combination of the inserted fields.
    """

    def __init__(self, chart: Chart, track: bool = True):
        self.chart = chart
        self.track = track
        self.rows: list[tuple[str, dict[str, Scalar], dict[int, Scalar]]] = []
        self.count = 0

    @classmethod
    def of(cls, fields: Sequence[_CoordinateMap], chart: Chart | None = None, track: bool = True) -> "Echelon":
        if chart is None:
            if not fields:
                raise ValueError("empty frame needs an explicit chart")
            chart = fields[0].chart
        ech = cls(chart, track)
        for f in fields:
            ech.add(f)
        return ech

    @property
    def rank(self) -> int:
        return len(self.rows)

    def pivots(self) -> list[str]:
        return [p for p, _, _ in self.rows]

    def _reduce(self, vec: dict[str, Scalar], combo: dict[int, Scalar] | None):
        for p, row, rcombo in self.rows:
            c = vec.get(p)
            if c is None or c.is_zero():
                continue
            for k, a in row.items():
                new = vec.get(k, ZERO) - c * a
                if new.is_zero():
                    vec.pop(k, None)
                else:
                    vec[k] = new
            if combo is not None:
                for i, a in rcombo.items():
                    new = combo.get(i, ZERO) - c * a
                    if new.is_zero():
                        combo.pop(i, None)
                    else:
                        combo[i] = new
        return vec, combo

    def add(self, field: _CoordinateMap) -> bool:
        """Insert a field; returns ``False`` when it was already in the span."""
        if field.chart != self.chart:
            raise ChartMismatch("field chart differs from the echelon chart")
        idx = self.count
        self.count += 1
        vec = dict(field._c)
        combo = {idx: ONE} if self.track else None
        vec, combo = self._reduce(vec, combo)
        if not vec:
            return False
        pivot = min(vec, key=self.chart.index)
        inv = vec[pivot].inverse()
        if inv != ONE:
            vec = {k: a * inv for k, a in vec.items()}
            if combo is not None:
                combo = {i: a * inv for i, a in combo.items()}
        vec[pivot] = ONE
        # back-substitute into existing rows
        new_rows = []
        for p, row, rcombo in self.rows:
            c = row.get(pivot)
            if c is not None and not c.is_zero():
                row = dict(row)
                for k, a in vec.items():
                    val = row.get(k, ZERO) - c * a
                    if val.is_zero():
                        row.pop(k, None)
                    else:
                        row[k] = val
                if combo is not None:
                    rcombo = dict(rcombo)
                    for i, a in combo.items():
                        val = rcombo.get(i, ZERO) - c * a
                        if val.is_zero():
                            rcombo.pop(i, None)
                        else:
                            rcombo[i] = val
            new_rows.append((p, row, rcombo))
        new_rows.append((pivot, vec, combo or {}))
        new_rows.sort(key=lambda r: self.chart.index(r[0]))
        self.rows = new_rows
        return True

    def reduce(self, field: _CoordinateMap) -> tuple[_CoordinateMap, dict[int, Scalar]]:
        """Residue of ``field`` and its coefficients on the inserted fields."""
        if field.chart != self.chart:
            raise ChartMismatch("field chart differs from the echelon chart")
        vec = dict(field._c)
        combo: dict[int, Scalar] = {}
        for p, row, rcombo in self.rows:
            c = vec.get(p)
            if c is None or c.is_zero():
                continue
            for k, a in row.items():
                new = vec.get(k, ZERO) - c * a
                if new.is_zero():
                    vec.pop(k, None)
                else:
                    vec[k] = new
            for i, a in rcombo.items():
                new = combo.get(i, ZERO) + c * a
                if new.is_zero():
                    combo.pop(i, None)
                else:
                    combo[i] = new
        return type(field)._raw(self.chart, vec), combo

    def contains(self, field: _CoordinateMap) -> bool:
        return self.reduce(field)[0].is_zero()

    def frame(self, cls=VectorField) -> list:
        """The echelon rows as fields, in pivot order."""
        return [cls._raw(self.chart, dict(row)) for _, row, _ in self.rows]

    def copy(self) -> "Echelon":
        other = Echelon(self.chart, self.track)
        other.rows = list(self.rows)
        other.count = self.count
        return other


def echelon(fields: Sequence[_CoordinateMap], chart: Chart | None = None) -> Echelon:
    return Echelon.of(fields, chart)


def _as_echelon(frame) -> Echelon:
    if isinstance(frame, Echelon):
        return frame
    return Echelon.of(list(frame))


def generic_rank(fields: Sequence[VectorField]) -> int:
    """Rank over the fraction field of the coefficient matrix."""
    if not fields:
        raise ValueError("generic_rank needs a nonempty list")
    return Echelon.of(fields, track=False).rank


def reduce_mod_frame(v: VectorField, frame: Sequence[VectorField] | Echelon) -> tuple[VectorField, dict[int, Scalar]]:
    """Canonical residue of ``v`` modulo the span of ``frame`` and the coefficients used.

    ``v == sum(combination[i] * frame[i]) + residue`` holds exactly.
    """
    if not isinstance(frame, Echelon) and not frame:
        return v, {}
    return _as_echelon(frame).reduce(v)


def in_span(v: VectorField, frame: Sequence[VectorField] | Echelon) -> bool:
    return reduce_mod_frame(v, frame)[0].is_zero()


def span_contains(big: Sequence[VectorField] | Echelon, small: Iterable[VectorField]) -> bool:
    ech = _as_echelon(big)
    return all(ech.contains(v) for v in small)


def same_span(a: Sequence[VectorField], b: Sequence[VectorField]) -> bool:
    ea, eb = Echelon.of(a, track=False), Echelon.of(b, track=False)
    return ea.rank == eb.rank and [r[1] for r in ea.rows] == [r[1] for r in eb.rows]


def nullspace(rows: Sequence[Mapping[str, Scalar]], columns: Sequence[str]) -> list[dict[str, Scalar]]:
    """Basis of {x : sum_c row[c] x[c] = 0 for every row}, one vector per free column."""
    chart = Chart(tuple(columns))
    ech = Echelon(chart, track=False)
    for r in rows:
        ech.add(OneForm._raw(chart, {k: Scalar.coerce(v) for k, v in r.items()}))
    pivots = set(ech.pivots())
    basis = []
    for free in columns:
        if free in pivots:
            continue
        vec = {free: ONE}
        for p, row, _ in ech.rows:
            c = row.get(free)
            if c is not None and not c.is_zero():
                vec[p] = -c
        basis.append(vec)
    return basis


def kernel_frame(forms: Sequence[OneForm], chart: Chart | None = None) -> list[VectorField]:
    """Echelon frame of the common kernel of independent one-forms."""
    if not forms and chart is None:
        raise ValueError("kernel_frame of no forms needs a chart")
    chart = chart or forms[0].chart
    for f in forms:
        if f.chart != chart:
            raise ChartMismatch("forms live on different charts")
    rev = Chart(tuple(reversed(chart.coordinates)), chart.symbol_decls, chart.constants)
    ech = Echelon(rev, track=False)
    for f in forms:
        if not ech.add(OneForm._raw(rev, dict(f._c))):
            raise DependentForms("the Pfaff forms are linearly dependent")
    pivots = set(ech.pivots())
    basis = []
    for free in chart.coordinates:
        if free in pivots:
            continue
        vec = {free: ONE}
        for p, row, _ in ech.rows:
            c = row.get(free)
            if c is not None and not c.is_zero():
                vec[p] = -c
        basis.append(VectorField._raw(chart, vec))
    frame = Echelon.of(basis, chart, track=False).frame()
    for v in frame:
        for f in forms:
            if not f.pair(v).is_zero():
                raise Prolong36Error("kernel frame does not annihilate the forms")
    return frame


# ---------------------------------------------------------------------------
# coordinate changes


def substitute_chart(
    v: VectorField,
    substitution: Mapping[str, ScalarLike | str],
    inverse: Mapping[str, ScalarLike | str],
    new_chart: Chart | None = None,
) -> VectorField:
    """Push ``v`` forward along a coordinate change.

    ``substitution`` writes old coordinates in terms of new ones and
    ``inverse`` writes new coordinates in terms of old ones.  Old coordinates
    missing from ``substitution`` are kept and must belong to the new chart.
    """
    old = v.chart
    if new_chart is None:
        kept = [c for c in old.coordinates if c not in substitution]
        new_chart = old.with_coordinates(kept + [k for k in inverse if k not in kept])
    sub = {k: (parse_scalar(s) if isinstance(s, str) else Scalar.coerce(s)) for k, s in substitution.items()}
    inv = {k: (parse_scalar(s) if isinstance(s, str) else Scalar.coerce(s)) for k, s in inverse.items()}
    for k in sub:
        old.index(k)
    for decl in old.symbol_decls:
        if decl.argument in sub:
            raise NotInverse(f"substitution moves {decl.argument}, the argument of {decl.name}")
    full_sub = {c: sub.get(c, Scalar.var(c)) for c in old.coordinates}
    full_inv = {c: inv.get(c, Scalar.var(c)) for c in new_chart.coordinates}
    for c in old.coordinates:
        if c not in sub and c not in new_chart:
            raise NotInverse(f"old coordinate {c!r} is neither substituted nor kept")
    for c in new_chart.coordinates:
        if c not in inv and c not in old:
            raise NotInverse(f"new coordinate {c!r} has no expression in old coordinates")
    # old -> new -> old and new -> old -> new must both be the identity
    for c, expr in full_sub.items():
        if expr.subs(full_inv) != Scalar.var(c):
            raise NotInverse(f"composition fails on old coordinate {c!r}")
    for c, expr in full_inv.items():
        if expr.subs(full_sub) != Scalar.var(c):
            raise NotInverse(f"composition fails on new coordinate {c!r}")
    out: dict[str, Scalar] = {}
    for c in new_chart.coordinates:
        val = v(full_inv[c])
        if not val.is_zero():
            out[c] = val.subs(full_sub)
    return VectorField._raw(new_chart, out)


# ---------------------------------------------------------------------------
# linear coefficient solving


class NonlinearUnknowns(Prolong36Error):
    pass


@dataclass
class LinearSolveReport:
    """Outcome of :func:`solve_linear_coefficients`."""

    solution: dict[str, Scalar] | None
    residual_rank_defect: int = 0
    derivative_obstruction: str | None = None
    equations: int = 0

    @property
    def ok(self) -> bool:
        return self.solution is not None


@contextlib.contextmanager
def formal_functions(names: Sequence[str], args: Sequence[str]) -> Iterator[None]:
    """Temporarily declare ``names`` as formal functions of ``args``."""
    with _lock:
        saved = {n: _functions.get(n) for n in names}
        saved_jets = {n: _jets.get(n) for n in names}
        for n in names:
            declare_function(n, args)
    try:
        yield
    finally:
        with _lock:
            for n in names:
                if saved[n] is None:
                    _functions.pop(n, None)
                else:
                    _functions[n] = saved[n]
                if saved_jets[n] is None:
                    _jets.pop(n, None)
                else:
                    _jets[n] = saved_jets[n]


def _affine_parts(expr: Scalar, unknowns: Sequence[str]) -> tuple[list[Scalar], Scalar]:
    den = expr.denominator
    if any(den.depends_on(u) for u in unknowns):
        raise NonlinearUnknowns(f"unknown appears in a denominator: {expr}")
    num = expr.numerator
    coefs = []
    for u in unknowns:
        c = num.diff_generator(u)
        if any(c.depends_on(w) for w in unknowns):
            raise NonlinearUnknowns(f"equation is not linear in the unknowns: {expr}")
        coefs.append(c / den)
    const = num.subs({u: 0 for u in unknowns}) / den
    return coefs, const


def solve_residue_system(
    residues: Callable[[], Sequence[VectorField]],
    unknowns: Sequence[str],
    args: Sequence[str],
    *,
    strict: bool = True,
) -> LinearSolveReport:
    """Solve ``residues() = 0`` for formal functions ``unknowns`` of ``args``.

    ``residues`` is evaluated while the unknowns are declared, so it may
    bracket fields that carry them.  Every residue component must be affine
    in the unknowns and free of their derivatives.
    """
    unknowns = list(unknowns)
    with formal_functions(unknowns, args):
        equations: list[tuple[list[Scalar], Scalar]] = []
        for residue in residues():
            for coord, expr in residue.items():
                for name in expr.names():
                    info = jet_info(name)
                    if info is not None and info.symbol in unknowns and info.total_order > 0:
                        witness = f"{name} survives in the d/d{coord} component"
                        if strict:
                            raise DerivativeObstruction("derivative of an unknown survives reduction", witness)
                        return LinearSolveReport(None, 0, witness, len(equations))
                equations.append(_affine_parts(expr, unknowns))
    n = len(unknowns)
    cols = tuple(f"_u{i}" for i in range(n)) + ("_rhs",)
    system = Chart(cols)
    ech = Echelon(system, track=False)
    for coefs, const in equations:
        row = {cols[i]: c for i, c in enumerate(coefs)}
        row["_rhs"] = const
        ech.add(OneForm._raw(system, row))
    if "_rhs" in ech.pivots():
        if strict:
            raise Inconsistent("the bracket conditions have no solution")
        return LinearSolveReport(None, 0, None, len(equations))
    defect = n - ech.rank
    if defect:
        if strict:
            raise Underdetermined(f"solution space has dimension {defect}", defect)
        return LinearSolveReport(None, defect, None, len(equations))
    solution = {}
    for p, row, _ in ech.rows:
        solution[unknowns[cols.index(p)]] = -row.get("_rhs", ZERO)
    return LinearSolveReport(solution, 0, None, len(equations))


def solve_linear_coefficients(
    template: VectorField,
    unknowns: Sequence[str],
    bracket_partners: Sequence[VectorField],
    modulo: Sequence[VectorField],
    *,
    strict: bool = True,
) -> LinearSolveReport:
    """Solve ``[template, P] = 0 mod span(modulo)`` for every partner ``P``.

    The unknowns are treated as formal functions of every chart coordinate.
    They may appear linearly in the template, the partners and the modulus.
    With ``strict`` the failure modes raise; otherwise they are reported.
    """
    chart = template.chart

    def residues() -> list[VectorField]:
        return [reduce_mod_frame(lie_bracket(template, p), modulo)[0] for p in bracket_partners]

    report = solve_residue_system(residues, unknowns, chart.coordinates, strict=strict)
    if report.solution is None:
        return report
    solution = report.solution
    # re-verify with the solution substituted
    t = template.subs(solution)
    mod_ech = Echelon.of([m.subs(solution) for m in modulo], chart, track=False)
    for partner in bracket_partners:
        if not mod_ech.contains(lie_bracket(t, partner.subs(solution))):
            raise Inconsistent("solution fails re-verification")
    return report
