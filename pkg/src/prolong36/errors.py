"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class Prolong36Error(Exception):
    """Base class for all package errors."""


class DivisionByZero(Prolong36Error, ZeroDivisionError):
    pass


class UnknownCoordinate(Prolong36Error, KeyError):
    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return str(self.args[0]) if self.args else ""


class PoleAtPoint(Prolong36Error):
    pass


class IncompleteValuation(Prolong36Error):
    pass


class ScalarParseError(Prolong36Error, ValueError):
    """Malformed scalar literal; ``position`` is the 0-based offset of the problem."""

    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at offset {position} in {text!r}")
        self.text = text
        self.position = position


class ChartMismatch(Prolong36Error):
    pass


class DependentForms(Prolong36Error):
    pass


class NotInverse(Prolong36Error):
    pass


class DerivativeObstruction(Prolong36Error):
    def __init__(self, message: str, witness: str | None = None):
        super().__init__(message)
        self.witness = witness


class Inconsistent(Prolong36Error):
    pass


class Underdetermined(Prolong36Error):
    def __init__(self, message: str, rank_defect: int = 0):
        super().__init__(message)
        self.rank_defect = rank_defect


class DependentFrame(Prolong36Error):
    pass


class NotCoordinateAligned(Prolong36Error):
    pass


class NotBasic(Prolong36Error):
    pass


class NotInvariant(Prolong36Error):
    pass


class GrowthMismatch(Prolong36Error):
    pass


class DependentGenerators(Prolong36Error):
    pass


class ClaimFailed(Prolong36Error):
    def __init__(self, message: str, residue: str | None = None):
        super().__init__(message)
        self.residue = residue


class UnknownClaim(Prolong36Error):
    pass


class RankMismatch(Prolong36Error):
    pass


class ConstraintResidue(Prolong36Error):
    pass


class ConstantM(Prolong36Error):
    pass


class UnknownModel(Prolong36Error):
    pass


class DocumentError(Prolong36Error):
    """Invalid distribution document; ``line``/``column`` locate the problem when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.column = column
