"""Typed physical quantities with exact unit conversion, parsing and formatting.

Every value that flows through the engine is a :class:`Quantity`: a 64-bit
float magnitude tagged with a :class:`Dimension`. Each dimension has one
canonical unit (energy in Wh, power in W, speed in mi/h, distance in mi,
volume in US gal, mass in metric tons, intensity ratios in their natural
published units) and all constructors normalize to it, so engine arithmetic
never mixes scales. Cross-dimension arithmetic is rejected with
:class:`~evdemand.errors.DimensionMismatch`.

Two Btu-to-Wh factors coexist on purpose. The published accounting quotes
0.2929 Wh/Btu but its gasoline-fleet result is only reached with the exact
0.293071 Wh/Btu, so the exact factor is the default and the rounded one is
selectable per scenario.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum
from types import MappingProxyType
from typing import Mapping

from .errors import (
    DimensionMismatch,
    FractionOutOfRange,
    NegativeWherePhysical,
    NonFiniteMagnitude,
    ParseError,
    UnknownUnit,
)

__all__ = [
    "Dimension",
    "Quantity",
    "UnitCatalog",
    "CATALOG",
    "BTU_TO_WH_PAPER",
    "BTU_TO_WH_EXACT",
    "GASOLINE_HEAT_BTU_PER_GAL",
    "quantity",
    "convert",
    "parse_quantity",
    "format_quantity",
]

# Published rounded factor vs the exact one; see module docstring.
BTU_TO_WH_PAPER = 0.2929
BTU_TO_WH_EXACT = 0.293071

# Heat content of gasoline, Btu per US gallon.
GASOLINE_HEAT_BTU_PER_GAL = 114000.0


class Dimension(Enum):
    """Physical dimension of a quantity; fixes its canonical unit."""

    ENERGY = "energy"                    # Wh
    POWER = "power"                      # W
    SPEED = "speed"                      # mi/h
    DISTANCE = "distance"                # mi
    VOLUME = "volume"                    # US gal
    MASS = "mass"                        # metric ton
    COUNT = "count"                      # dimensionless count
    FRACTION = "fraction"                # dimensionless, in [0, 1]
    CARBON_INTENSITY = "carbon_intensity"  # Mt per TWh
    WATER_INTENSITY = "water_intensity"    # gal per MWh
    HEAT_CONTENT = "heat_content"          # Btu per gal
    BTU_CONVERSION = "btu_conversion"      # Wh per Btu
    ENERGY_DENSITY = "energy_density"      # Wh per kg


CANONICAL_UNIT: Mapping[Dimension, str] = MappingProxyType({
    Dimension.ENERGY: "Wh",
    Dimension.POWER: "W",
    Dimension.SPEED: "mph",
    Dimension.DISTANCE: "mi",
    Dimension.VOLUME: "gal",
    Dimension.MASS: "t",
    Dimension.COUNT: "count",
    Dimension.FRACTION: "frac",
    Dimension.CARBON_INTENSITY: "Mt/TWh",
    Dimension.WATER_INTENSITY: "gal/MWh",
    Dimension.HEAT_CONTENT: "Btu/gal",
    Dimension.BTU_CONVERSION: "Wh/Btu",
    Dimension.ENERGY_DENSITY: "Wh/kg",
})


@dataclass(frozen=True)
class UnitDef:
    """One named unit: dimension plus the factor to its canonical unit.

    ``inverse=True`` means the canonical magnitude is value / scale rather
    than value * scale. Sub-canonical units (kg, %) use it so that the
    inbound conversion is a single correctly rounded division.
    """

    name: str
    dimension: Dimension
    scale: float = 1.0
    inverse: bool = False

    def to_canonical(self, value: float) -> float:
        return value / self.scale if self.inverse else value * self.scale

    def from_canonical(self, value: float) -> float:
        return value * self.scale if self.inverse else value / self.scale


def _unit_table() -> dict[str, UnitDef]:
    d = Dimension
    defs = [
        UnitDef("Wh", d.ENERGY),
        UnitDef("kWh", d.ENERGY, 1e3),
        UnitDef("MWh", d.ENERGY, 1e6),
        UnitDef("TWh", d.ENERGY, 1e12),
        UnitDef("W", d.POWER),
        UnitDef("kW", d.POWER, 1e3),
        UnitDef("mph", d.SPEED),
        UnitDef("mi", d.DISTANCE),
        UnitDef("gal", d.VOLUME),
        UnitDef("t", d.MASS),
        UnitDef("Mt", d.MASS, 1e6),
        UnitDef("kg", d.MASS, 1e3, inverse=True),
        UnitDef("Btu/gal", d.HEAT_CONTENT),
        UnitDef("gal/MWh", d.WATER_INTENSITY),
        UnitDef("Mt/TWh", d.CARBON_INTENSITY),
        UnitDef("Wh/Btu", d.BTU_CONVERSION),
        UnitDef("Wh/kg", d.ENERGY_DENSITY),
        UnitDef("%", d.FRACTION, 100.0, inverse=True),
        UnitDef("frac", d.FRACTION),
        UnitDef("count", d.COUNT),
    ]
    return {u.name: u for u in defs}


@dataclass(frozen=True)
class UnitCatalog:
    """Immutable unit table plus the named conversion constants."""

    units: Mapping[str, UnitDef]
    btu_to_wh_paper: float = BTU_TO_WH_PAPER
    btu_to_wh_exact: float = BTU_TO_WH_EXACT
    gasoline_heat_btu_per_gal: float = GASOLINE_HEAT_BTU_PER_GAL

    def lookup(self, name: str) -> UnitDef:
        try:
            return self.units[name]
        except KeyError:
            raise UnknownUnit(f"unknown unit {name!r}") from None


CATALOG = UnitCatalog(units=MappingProxyType(_unit_table()))

# "Btu" is constructible/convertible but deliberately not part of the
# literal grammar: its Wh factor is a per-scenario choice.
_BTU_NAME = "Btu"


@dataclass(frozen=True)
class Quantity:
    """A magnitude expressed in ``unit``, tagged with its dimension.

    Constructors normalize to the canonical unit; only :func:`convert`
    produces quantities expressed in another unit of the same dimension.
    Magnitudes must be finite and non-negative, and fractions must lie in
    [0, 1].
    """

    magnitude: float
    dimension: Dimension
    unit: str = ""

    def __post_init__(self):
        if not self.unit:
            object.__setattr__(self, "unit", CANONICAL_UNIT[self.dimension])
        m = float(self.magnitude)
        if math.isnan(m) or math.isinf(m):
            raise NonFiniteMagnitude(f"non-finite magnitude {m!r} for {self.dimension.value}")
        if m == 0.0:
            m = 0.0  # normalize -0.0
        if m < 0.0:
            raise NegativeWherePhysical(
                f"negative magnitude {m!r} for physical {self.dimension.value}")
        object.__setattr__(self, "magnitude", m)
        if self.dimension is Dimension.FRACTION and self._canonical_magnitude() > 1.0:
            raise FractionOutOfRange(f"fraction {self._canonical_magnitude()!r} exceeds 1")

    def _unit_def(self) -> UnitDef:
        return CATALOG.lookup(self.unit)

    def _canonical_magnitude(self) -> float:
        return self._unit_def().to_canonical(self.magnitude)

    @property
    def canonical(self) -> float:
        """Magnitude in the dimension's canonical unit."""
        return self._canonical_magnitude()

    def in_unit(self, unit: str) -> float:
        """Magnitude expressed in ``unit`` (must share the dimension)."""
        u = CATALOG.lookup(unit)
        if u.dimension is not self.dimension:
            raise DimensionMismatch(
                f"unit {unit!r} is {u.dimension.value}, quantity is {self.dimension.value}")
        return u.from_canonical(self.canonical)

    def __str__(self) -> str:
        return f"{self.magnitude!r} {self.unit}"


def quantity(value: float, unit: str, *, btu_to_wh: float = BTU_TO_WH_EXACT) -> Quantity:
    """Build a canonical Quantity from a magnitude in ``unit``.

    ``btu_to_wh`` selects the Wh factor when ``unit`` is ``"Btu"``.
    """
    if unit == _BTU_NAME:
        return Quantity(value * btu_to_wh, Dimension.ENERGY)
    u = CATALOG.lookup(unit)
    return Quantity(u.to_canonical(value), u.dimension)


def convert(q: Quantity, target_unit: str) -> Quantity:
    """Re-express ``q`` in ``target_unit`` of the same dimension.

    The returned magnitude is the single correctly rounded scaling of the
    canonical magnitude, so power-of-ten conversions are exactly linear.
    Btu is construction-only (its Wh factor is a scenario choice), so it is
    not a valid target here.
    """
    canonical = q.canonical
    u = CATALOG.lookup(target_unit)
    if u.dimension is not q.dimension:
        raise DimensionMismatch(
            f"cannot convert {q.dimension.value} to {target_unit!r} ({u.dimension.value})")
    return Quantity(u.from_canonical(canonical), q.dimension, target_unit)


# Literal grammar: NUMBER WS? UNIT, decimal number with optional exponent.
_NUMBER_RE = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")

#: Unit spellings accepted in quantity literals (scenario files and CLI).
PARSE_UNITS = (
    "Wh", "kWh", "MWh", "TWh", "W", "kW", "mph", "mi", "gal", "t", "Mt",
    "Btu/gal", "gal/MWh", "Mt/TWh", "Wh/Btu", "Wh/kg", "kg", "%", "frac",
)


def parse_quantity(text: str) -> Quantity:
    """Parse a quantity literal such as ``"29000 TWh"`` or ``"61 %"``.

    ``%`` divides by 100 into a fraction; every other unit maps to its
    canonical unit. Raises :class:`ParseError` with the byte offset of the
    failure, :class:`UnknownUnit` for an unrecognized unit token, and
    :class:`NegativeWherePhysical` for negative magnitudes.
    """
    stripped = text.strip()
    lead = len(text) - len(text.lstrip())
    if not stripped:
        raise ParseError("empty quantity literal", offset=0)
    m = _NUMBER_RE.match(stripped)
    if m is None:
        raise ParseError(f"expected a number in {text!r}", offset=lead)
    unit_token = stripped[m.end():].strip()
    if not unit_token:
        raise ParseError(f"missing unit in {text!r}", offset=lead + m.end())
    if unit_token not in PARSE_UNITS:
        raise UnknownUnit(f"unknown unit {unit_token!r} in {text!r}")
    value = float(m.group())
    return quantity(value, unit_token)


def _format_sig(value: float, sig_digits: int) -> str:
    """Round to significant digits (ties to even) and render plainly.

    Falls back to scientific notation outside 1e-4 .. 1e16 so output stays
    unambiguous for extreme magnitudes.
    """
    if value == 0.0:
        return "0"
    s = f"{value:.{sig_digits - 1}e}"
    mantissa, _, exp_s = s.partition("e")
    exp = int(exp_s)
    sign = "-" if mantissa.startswith("-") else ""
    digits = mantissa.lstrip("-").replace(".", "")
    if -4 <= exp <= 15:
        if exp >= len(digits) - 1:
            out = digits + "0" * (exp - len(digits) + 1)
        elif exp >= 0:
            out = digits[: exp + 1] + "." + digits[exp + 1:]
        else:
            out = "0." + "0" * (-exp - 1) + digits
        if "." in out:
            out = out.rstrip("0").rstrip(".")
        return sign + out
    mantissa = mantissa.rstrip("0").rstrip(".") if "." in mantissa else mantissa
    return f"{mantissa}e{exp:+03d}"


def format_quantity(q: Quantity, unit: str, sig_digits: int) -> str:
    """Render ``q`` in ``unit`` with ``sig_digits`` significant digits.

    Deterministic across runs and platforms; round-trips through
    :func:`parse_quantity` at 17 significant digits.
    """
    if sig_digits < 1:
        raise ValueError(f"sig_digits must be >= 1, got {sig_digits}")
    value = q.in_unit(unit)
    return f"{_format_sig(value, sig_digits)} {unit}"
