"""Exception types raised across the package.

Every domain error derives from :class:`EvDemandError` so callers (the CLI
in particular) can separate domain failures from genuine bugs.
"""

from __future__ import annotations


class EvDemandError(Exception):
    """Base class for all errors raised by this package."""


# --- quantities ---------------------------------------------------------

class UnknownUnit(EvDemandError):
    """Unit name is not in the unit catalog."""


class DimensionMismatch(EvDemandError):
    """Operation mixed quantities of incompatible dimensions."""


class ParseError(EvDemandError):
    """Malformed quantity literal or scenario text.

    ``offset`` is the byte offset into a quantity literal; ``line`` and
    ``column`` locate errors in scenario files (1-based).
    """

    def __init__(self, message: str, *, offset: int | None = None,
                 line: int | None = None, column: int | None = None):
        self.offset = offset
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        elif offset is not None:
            where = f" (offset {offset})"
        super().__init__(message + where)


class NegativeWherePhysical(EvDemandError):
    """Negative magnitude for a physical quantity."""


class NonFiniteMagnitude(EvDemandError):
    """NaN or infinite magnitude."""


class FractionOutOfRange(EvDemandError):
    """Fraction outside [0, 1]."""


# --- reference data -----------------------------------------------------

class UnknownDataset(EvDemandError):
    """No built-in dataset with the requested id."""


class UnknownSource(EvDemandError):
    """Generation source name not present in the grid mix."""


class UnknownChemistry(EvDemandError):
    """No battery chemistry with the requested name."""


class EmptyField(EvDemandError):
    """Catalog statistics requested for a field no model provides."""


# --- engine -------------------------------------------------------------

class ZeroSpeed(EvDemandError):
    """Per-vehicle energy requires a positive reference speed."""


class ZeroPerEvEnergy(EvDemandError):
    """Fleet count requires a positive per-vehicle energy."""


class ZeroCapacity(EvDemandError):
    """Battery count requires a positive pack capacity."""


class ZeroGeneration(EvDemandError):
    """Emission intensity requires a positive generation total."""


class ZeroFleetEnergy(EvDemandError):
    """Conversion fraction requires a positive fleet energy."""


class ZeroBaseline(EvDemandError):
    """Capacity comparison requires a positive baseline generation."""


# --- scenarios ----------------------------------------------------------

class ValidationError(EvDemandError):
    """One or more scenario-level validation problems, aggregated."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class UnknownParameter(EvDemandError):
    """Sweep parameter path does not name an overridable scenario field."""


# --- reports ------------------------------------------------------------

class UnknownTarget(EvDemandError):
    """Reproduction target id is not registered."""
