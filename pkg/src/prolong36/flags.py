"""Distributions, derived flags, Cauchy characteristics and reductions."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .chart import (
    Chart,
    Echelon,
    VectorField,
    lie_bracket,
    nullspace,
    reduce_mod_frame,
)
from .errors import (
    PoleAtPoint,
    ChartMismatch,
    DependentFrame,
    NotBasic,
    NotCoordinateAligned,
    NotInvariant,
    Prolong36Error,
)
from .scalar import ONE, ZERO, Scalar, evaluate

__all__ = [
    "Distribution",
    "FlagReport",
    "Splitting",
    "StructureEntry",
    "derived_flag",
    "growth_at_point",
    "structure_coefficients",
    "cauchy_characteristic",
    "reduce_by_integrable",
    "project_fields",
    "bracket_span",
    "rank_of_rows",
    "spans_tangent_space",
    "point_independent_subset",
    "span_contains_fast",
]


class Distribution:
    """A chart plus an independent frame of vector fields."""

    def __init__(self, chart: Chart, frame: Sequence[VectorField], *, check: bool = True):
        frame = list(frame)
        for v in frame:
            if v.chart != chart:
                raise ChartMismatch("frame field lives on another chart")
        self.chart = chart
        self.frame = frame
        self._echelon: Echelon | None = None
        self._flag: dict[int | None, FlagReport] = {}
        if check and self.echelon().rank != len(frame):
            raise DependentFrame("frame fields are dependent over the fraction field")

    @property
    def rank(self) -> int:
        return len(self.frame)

    @property
    def dim(self) -> int:
        return self.chart.dim

    def echelon(self) -> Echelon:
        if self._echelon is None:
            self._echelon = Echelon.of(self.frame, self.chart)
        return self._echelon

    def canonical_frame(self) -> list[VectorField]:
        """Reduced row echelon frame of the span."""
        return self.echelon().frame()

    def contains(self, v: VectorField) -> bool:
        return self.echelon().contains(v)

    def same_span(self, other: "Distribution") -> bool:
        return self.chart == other.chart and self.canonical_frame() == other.canonical_frame()

    def flag(self, max_depth: int | None = None) -> "FlagReport":
        if max_depth not in self._flag:
            self._flag[max_depth] = derived_flag(self, max_depth)
        return self._flag[max_depth]

    def __repr__(self) -> str:
        return f"Distribution(rank={self.rank}, chart={self.chart.coordinates})"


@dataclass
class FlagReport:
    """Ranks of D, D^(2), ... together with the spanning data of each level."""

    growth: list[int]
    flag_frames: list[list[VectorField]]
    stabilized: bool
    generators: list[list[VectorField]] = field(default_factory=list, repr=False)
    all_brackets: list[list[VectorField]] = field(default_factory=list, repr=False)

    def level(self, k: int) -> list[VectorField]:
        """Echelon frame of D^(k) (1-based); the last level is repeated past the end."""
        return self.flag_frames[min(k, len(self.flag_frames)) - 1]

    def spanning(self, k: int) -> list[VectorField]:
        """Raw generators (original frame and kept brackets) of D^(k)."""
        k = min(k, len(self.generators))
        return [v for level in self.generators[:k] for v in level]


@dataclass(frozen=True)
class Splitting:
    """Named ordered partition of a distribution's frame indices."""

    distribution: Distribution
    parts: tuple[tuple[str, tuple[int, ...]], ...]

    def __init__(self, distribution: Distribution, parts: Mapping[str, Sequence[int]]):
        object.__setattr__(self, "distribution", distribution)
        normalized = tuple((name, tuple(idx)) for name, idx in parts.items())
        object.__setattr__(self, "parts", normalized)
        seen: list[int] = []
        for name, idx in normalized:
            if not idx:
                raise ValueError(f"splitting part {name} is empty")
            seen.extend(idx)
        if sorted(seen) != list(range(distribution.rank)):
            raise ValueError("splitting parts must partition the frame indices")

    def part(self, name: str) -> list[VectorField]:
        for n, idx in self.parts:
            if n == name:
                return [self.distribution.frame[i] for i in idx]
        raise KeyError(name)

    def names(self) -> list[str]:
        return [n for n, _ in self.parts]

    def as_dict(self) -> dict[str, list[int]]:
        return {n: list(idx) for n, idx in self.parts}


def derived_flag(D: Distribution, max_depth: int | None = None) -> FlagReport:
    """Small flag D ⊂ D + [D,D] ⊂ D + [D, D^(2)] ⊂ ... with generic ranks.

    Only brackets of the original frame with the newest generators are
    formed; the Leibniz rule puts every other bracket in the current level.
    Growth stops at full rank, or repeats the rank once when a level adds
    nothing.
    """
    if max_depth is None:
        max_depth = D.dim
    if max_depth < 1:
        raise ValueError("max_depth must be at least 1")
    ech = Echelon.of(D.frame, D.chart, track=False)
    growth = [ech.rank]
    frames = [ech.frame()]
    generators = [list(D.frame)]
    all_brackets: list[list[VectorField]] = [list(D.frame)]
    newest = list(D.frame)
    stabilized = False
    first = True
    for _ in range(1, max_depth):
        if ech.rank == D.dim:
            stabilized = True
            break
        added: list[VectorField] = []
        tried: list[VectorField] = []
        for i, x in enumerate(D.frame):
            for j, y in enumerate(newest):
                if first and j <= i:
                    continue
                br = lie_bracket(x, y)
                tried.append(br)
                if ech.add(br):
                    added.append(br)
        first = False
        if not added:
            growth.append(ech.rank)
            frames.append(ech.frame())
            generators.append([])
            all_brackets.append(tried)
            stabilized = True
            break
        growth.append(ech.rank)
        frames.append(ech.frame())
        generators.append(added)
        all_brackets.append(tried)
        newest = added
    else:
        stabilized = ech.rank == D.dim
    return FlagReport(growth, frames, stabilized, generators, all_brackets)


def rank_of_rows(rows: Sequence[Sequence[Fraction]]) -> int:
    """Rank of a rational matrix by exact Gaussian elimination."""
    m = [list(r) for r in rows if any(r)]
    rank = 0
    ncols = len(m[0]) if m else 0
    for col in range(ncols):
        pivot = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        pv = m[rank][col]
        for i in range(len(m)):
            if i != rank and m[i][col] != 0:
                f = m[i][col] / pv
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


def _evaluate_field(v: VectorField, chart: Chart, point, jet_values) -> list[Fraction]:
    return [evaluate(v[c], point, jet_values) if not v[c].is_zero() else Fraction(0) for c in chart.coordinates]


_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71)


def spans_tangent_space(fields: Sequence[VectorField], chart: Chart, attempts: int = 3) -> bool:
    """Exact sufficient test that ``fields`` span the whole tangent space.

    Rank at a point never exceeds the generic rank, so full rank at one
    rational point proves full generic rank.  ``False`` means inconclusive.
    """
    names = sorted({n for v in fields for n in v.names()})
    for shift in range(attempts):
        values = _sample_point(names, shift)
        try:
            rows = [_evaluate_field(v, chart, values, values) for v in fields]
        except PoleAtPoint:
            continue
        if rank_of_rows(rows) == chart.dim:
            return True
    return False


def _sample_point(names: Sequence[str], shift: int) -> dict[str, Fraction]:
    return {n: Fraction(_PRIMES[(i + 3 * shift) % len(_PRIMES)], 1 + shift) for i, n in enumerate(names)}


def point_independent_subset(fields: Sequence[VectorField], chart: Chart, attempts: int = 3) -> list[VectorField]:
    """Greedy subset of ``fields`` independent at a rational sample point.

    Independence at a point implies generic independence.  Returns the
    whole list when no sample point avoids the poles.
    """
    names = sorted({n for v in fields for n in v.names()})
    for shift in range(attempts):
        values = _sample_point(names, shift)
        try:
            rows = [_evaluate_field(v, chart, values, values) for v in fields]
        except PoleAtPoint:
            continue
        chosen: list[VectorField] = []
        kept: list[list[Fraction]] = []
        for v, row in zip(fields, rows):
            if rank_of_rows(kept + [row]) > len(kept):
                kept.append(row)
                chosen.append(v)
        return chosen
    return list(fields)


def span_contains_fast(fields: Sequence[VectorField], v: VectorField) -> bool:
    """Exact ``v in span(fields)``, eliminating a point-independent subset first."""
    chart = v.chart
    subset = point_independent_subset(fields, chart)
    if len(subset) == chart.dim:
        return True
    if Echelon.of(subset, chart, track=False).contains(v):
        return True
    if len(subset) == len(fields):
        return False
    return Echelon.of(list(fields), chart, track=False).contains(v)


def growth_at_point(
    D: Distribution,
    point: Mapping[str, int | Fraction],
    jet_values: Mapping[str, int | Fraction] | None = None,
    max_depth: int | None = None,
) -> list[int]:
    """Ranks of the flag levels evaluated at a point.

    Every bracket formed while building the generic flag is evaluated, so
    directions that are only generically dependent still count.
    """
    report = D.flag(max_depth)
    rows: list[list[Fraction]] = []
    out = []
    for k, level in enumerate(report.all_brackets):
        rows.extend(_evaluate_field(v, D.chart, point, jet_values) for v in level)
        if k < len(report.growth):
            out.append(rank_of_rows(rows))
    return out


@dataclass
class StructureEntry:
    """[frame_i, frame_j] written in the frame, with the residue when not closed."""

    combination: dict[int, Scalar]
    residue: VectorField

    @property
    def closed(self) -> bool:
        return self.residue.is_zero()


def structure_coefficients(frame: Sequence[VectorField]) -> dict[tuple[int, int], StructureEntry]:
    """Express each bracket [frame_i, frame_j], i < j, in the frame."""
    ech = Echelon.of(list(frame))
    table = {}
    for i in range(len(frame)):
        for j in range(i + 1, len(frame)):
            residue, combo = ech.reduce(lie_bracket(frame[i], frame[j]))
            table[(i, j)] = StructureEntry(combo, residue)
    return table


def bracket_span(a: Sequence[VectorField], b: Sequence[VectorField]) -> Echelon:
    """Echelon form of span(a ∪ b ∪ {[x, y] : x ∈ a, y ∈ b})."""
    ech = Echelon.of(list(a) + list(b), (list(a) + list(b))[0].chart, track=False)
    for x in a:
        for y in b:
            ech.add(lie_bracket(x, y))
    return ech


def cauchy_characteristic(D: Distribution) -> Distribution:
    """Ch(D) = {v ∈ D : [v, D] ⊆ D}, returned with an echelon frame.

    Writing v = sum f_i d_i, the condition is sum_i f_i [d_i, d_j] ≡ 0 mod D
    for every j; derivative terms of the f_i already lie in D.
    """
    ech = D.echelon()
    n = D.rank
    residues = {}
    for i in range(n):
        for j in range(i + 1, n):
            residues[(i, j)] = ech.reduce(lie_bracket(D.frame[i], D.frame[j]))[0]
    cols = [f"f{i}" for i in range(n)]
    rows = []
    for j in range(n):
        for coord in D.chart.coordinates:
            row = {}
            for i in range(n):
                if i == j:
                    continue
                r = residues[(i, j)] if i < j else -residues[(j, i)]
                c = r[coord]
                if not c.is_zero():
                    row[cols[i]] = c
            if row:
                rows.append(row)
    basis = nullspace(rows, cols)
    fields = []
    for vec in basis:
        v = VectorField.zero(D.chart)
        for i, c in enumerate(cols):
            if c in vec:
                v = v + vec[c] * D.frame[i]
        fields.append(v)
    if not fields:
        return Distribution(D.chart, [], check=False)
    result = Distribution(D.chart, Echelon.of(fields, D.chart, track=False).frame())
    for x in result.frame:
        for y in result.frame:
            if not result.contains(lie_bracket(x, y)):
                raise Prolong36Error("Cauchy characteristic is not involutive")
    return result


def _aligned_coordinates(K: Sequence[VectorField]) -> list[str]:
    chart = K[0].chart
    ech = Echelon.of(list(K), chart, track=False)
    if ech.rank != len(K):
        raise NotCoordinateAligned("the subbundle frame is dependent")
    coords = []
    for v in ech.frame():
        items = v.items()
        if len(items) != 1 or items[0][1] != ONE:
            raise NotCoordinateAligned(f"{v} is not a coordinate field")
        coords.append(items[0][0])
    return coords


def project_fields(fields: Sequence[VectorField], K: Sequence[VectorField], new_chart: Chart | None = None) -> list[VectorField]:
    """Drop the K-coordinate components and check basicness of what remains."""
    coords = _aligned_coordinates(K)
    chart = fields[0].chart
    if new_chart is None:
        new_chart = chart.with_coordinates([c for c in chart.coordinates if c not in coords])
    out = []
    for v in fields:
        kept = {k: c for k, c in v.items() if k not in coords}
        for k, c in kept.items():
            bad = [w for w in coords if c.depends_on(w)]
            if bad:
                raise NotBasic(f"coefficient of d/d{k} depends on {bad[0]}")
        out.append(VectorField._raw(new_chart, kept))
    return out


def reduce_by_integrable(D: Distribution | Sequence[VectorField], K: Sequence[VectorField]) -> Distribution:
    """Quotient of D by a coordinate-aligned integrable subbundle K ⊆ D."""
    if not isinstance(D, Distribution):
        fields = list(D)
        D = Distribution(fields[0].chart, Echelon.of(fields, fields[0].chart, track=False).frame())
    K = list(K)
    if not K:
        return D
    coords = _aligned_coordinates(K)
    for k in K:
        if not D.contains(k):
            raise NotInvariant(f"{k} is not contained in the distribution")
    for k in K:
        for v in D.frame:
            if not D.contains(lie_bracket(k, v)):
                raise NotInvariant(f"[{k}, {v}] leaves D + K")
    quotient = Echelon(D.chart, track=False)
    for kv in K:
        quotient.add(kv)
    base_rank = quotient.rank
    for v in D.frame:
        quotient.add(v)
    rows = [row for p, row, _ in quotient.rows if p not in coords]
    if len(rows) != quotient.rank - base_rank:
        raise NotCoordinateAligned("echelon rows mix quotient coordinates")
    new_chart = D.chart.with_coordinates([c for c in D.chart.coordinates if c not in coords])
    frame = project_fields([VectorField._raw(D.chart, r) for r in rows], K, new_chart)
    return Distribution(new_chart, frame)
