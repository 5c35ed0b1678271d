"""JSON distribution documents: parsing, canonical emission and model export."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping, Sequence

from .chart import Chart, SymbolDecl, VectorField
from .errors import DocumentError, Prolong36Error, ScalarParseError
from .flags import Distribution, Splitting

__all__ = [
    "DistributionDocument",
    "parse_document",
    "load_document",
    "document_from",
    "dump_json",
]

_KEYS = ("chart", "symbols", "constants", "frame", "splitting", "points", "expect")


@dataclass
class DistributionDocument:
    chart: Chart
    frame: list[VectorField]
    splitting: dict[str, list[int]] | None = None
    points: dict[str, Fraction] | None = None
    expect: dict[str, Any] = field(default_factory=dict)

    @property
    def distribution(self) -> Distribution:
        return Distribution(self.chart, self.frame)

    def split(self) -> Splitting | None:
        if self.splitting is None:
            return None
        return Splitting(self.distribution, self.splitting)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"chart": list(self.chart.coordinates)}
        out["symbols"] = [{"name": d.name, "arg": d.argument} for d in self.chart.symbol_decls]
        if self.chart.constants:
            out["constants"] = list(self.chart.constants)
        out["frame"] = [v.to_literal() for v in self.frame]
        if self.splitting is not None:
            out["splitting"] = {k: list(v) for k, v in self.splitting.items()}
        if self.points is not None:
            out["points"] = {k: _fraction_literal(v) for k, v in self.points.items()}
        if self.expect:
            out["expect"] = self.expect
        return out

    def dumps(self) -> str:
        return dump_json(self.to_dict())


def dump_json(obj: Any) -> str:
    """Byte-stable JSON rendering."""
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _fraction_literal(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _locate(text: str, needle: str, start: int) -> tuple[int | None, int | None, int]:
    pos = text.find(needle, start)
    if pos < 0:
        return None, None, start
    line = text.count("\n", 0, pos) + 1
    column = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, column, pos + len(needle)


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise DocumentError(message)


def parse_document(text: str) -> DistributionDocument:
    """Parse a JSON document; errors carry line and column where possible."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    _require(isinstance(raw, dict), "document must be a JSON object")
    unknown = sorted(set(raw) - set(_KEYS) - {"results", "command", "passed"})
    _require(not unknown, f"unknown keys {unknown}")
    coords = raw.get("chart")
    _require(isinstance(coords, list) and coords and all(isinstance(c, str) for c in coords),
             "'chart' must be a non-empty list of coordinate names")
    symbols = raw.get("symbols", [])
    _require(isinstance(symbols, list), "'symbols' must be a list")
    decls = []
    for s in symbols:
        _require(isinstance(s, dict) and set(s) == {"name", "arg"}, "each symbol needs 'name' and 'arg'")
        decls.append(SymbolDecl(s["name"], s["arg"]))
    constants = raw.get("constants", [])
    _require(isinstance(constants, list), "'constants' must be a list")
    try:
        chart = Chart(tuple(coords), tuple(decls), tuple(constants))
    except ValueError as exc:
        raise DocumentError(str(exc)) from None
    frame_raw = raw.get("frame")
    _require(isinstance(frame_raw, list) and frame_raw, "'frame' must be a non-empty list")
    cursor = max(text.find('"frame"'), 0)
    frame = []
    for entry in frame_raw:
        _require(isinstance(entry, dict), "frame entries must be objects")
        coeffs = {}
        for coord, literal in entry.items():
            if not isinstance(literal, (str, int)):
                raise DocumentError(f"coefficient of {coord} must be a string literal")
            line, column, cursor = _locate(text, json.dumps(str(literal)) if isinstance(literal, str) else str(literal), cursor)
            if coord not in chart:
                raise DocumentError(f"frame uses unknown coordinate {coord!r}", line, column)
            try:
                coeffs[coord] = chart.parse(str(literal))
            except ScalarParseError as exc:
                col = None if column is None else column + 1 + exc.position
                raise DocumentError(f"bad literal {literal!r}: {exc}", line, col) from None
            except Prolong36Error as exc:
                raise DocumentError(f"bad literal {literal!r}: {exc}", line, column) from None
        frame.append(VectorField(chart, coeffs))
    splitting = raw.get("splitting")
    if splitting is not None:
        _require(isinstance(splitting, dict) and all(
            isinstance(v, list) and all(isinstance(i, int) for i in v) for v in splitting.values()
        ), "'splitting' maps names to lists of frame indices")
        splitting = {k: list(v) for k, v in splitting.items()}
    points = raw.get("points")
    if points is not None:
        _require(isinstance(points, dict), "'points' must map names to rational literals")
        try:
            points = {k: Fraction(str(v)) for k, v in points.items()}
        except (ValueError, ZeroDivisionError) as exc:
            raise DocumentError(f"bad point value: {exc}") from None
    expect = raw.get("expect", {})
    _require(isinstance(expect, dict), "'expect' must be an object")
    doc = DistributionDocument(chart, frame, splitting, points, expect)
    try:
        D = doc.distribution
        if splitting is not None:
            Splitting(D, splitting)
    except (Prolong36Error, ValueError) as exc:
        raise DocumentError(str(exc)) from None
    return doc


def load_document(path: str) -> DistributionDocument:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc.strerror}") from None
    return parse_document(text)


def document_from(
    D: Distribution,
    splitting: Splitting | Mapping[str, Sequence[int]] | None = None,
    expect: Mapping[str, Any] | None = None,
) -> DistributionDocument:
    parts = None
    if isinstance(splitting, Splitting):
        parts = splitting.as_dict()
    elif splitting is not None:
        parts = {k: list(v) for k, v in splitting.items()}
    return DistributionDocument(D.chart, list(D.frame), parts, None, dict(expect or {}))
