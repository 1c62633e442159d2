"""Fleet-conversion accounting: the energy, battery, emission and water
arithmetic behind a full gasoline-to-EV conversion scenario.

Every operation is a pure function over immutable quantities. Division by
zero is always a typed error, never an infinity.

Two published accounting conventions are reproduced deliberately rather
than silently corrected:

* Battery production tables print the unit-consistent production energy
  divided by 10^3 (``PRODUCTION_TABLE_DIVISOR``). The engine always computes
  the consistent value; the printed-style figure is derived from it by an
  explicit labeled division.
* Freshwater totals were published with 10^9 MWh per TWh
  (``PUBLISHED_MWH_PER_TWH``) where the strict conversion is 10^6, so the
  published volumes exceed strict unit algebra by the same 10^3.
  :func:`water_use` follows the published convention so the reproduction
  report can match the printed figures; the discrepancy is carried as an
  erratum note wherever the values surface.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    DimensionMismatch,
    ZeroBaseline,
    ZeroCapacity,
    ZeroFleetEnergy,
    ZeroGeneration,
    ZeroPerEvEnergy,
    ZeroSpeed,
)
from .quantities import Dimension, Quantity
from .refdata import BatteryChemistry

__all__ = [
    "SharesBasis",
    "GallonsBasis",
    "BatteryDemand",
    "ProductionRow",
    "CapacityDeficit",
    "PRODUCTION_TABLE_DIVISOR",
    "PUBLISHED_MWH_PER_TWH",
    "PRODUCTION_TABLE_NOTE",
    "WATER_CONVENTION_NOTE",
    "fleet_energy_from_shares",
    "fleet_energy_from_gallons",
    "fleet_energy",
    "per_ev_energy",
    "battery_demand_method_a",
    "battery_demand_method_b",
    "production_energy_table",
    "carbon_intensity",
    "additional_co2",
    "water_use",
    "sustainable_conversion_fraction",
    "capacity_deficit",
]

#: Printed battery-production figures equal the consistent energy / 10^3.
PRODUCTION_TABLE_DIVISOR = 1e3

#: MWh per TWh as used by the published freshwater accounting (strictly 1e6).
PUBLISHED_MWH_PER_TWH = 1e9

PRODUCTION_TABLE_NOTE = (
    "printed-table convention: published production energies equal the "
    "unit-consistent values divided by 10^3"
)
WATER_CONVENTION_NOTE = (
    "published water accounting treats 1 TWh as 10^9 MWh (strictly 10^6), "
    "so volumes exceed strict unit algebra by 10^3"
)

_WH_PER_TWH = 1e12
_T_PER_MT = 1e6


def _expect(q: Quantity, dim: Dimension, what: str) -> float:
    if q.dimension is not dim:
        raise DimensionMismatch(f"{what} must be {dim.value}, got {q.dimension.value}")
    return q.canonical


@dataclass(frozen=True)
class SharesBasis:
    """Fleet energy from national totals: energy x transport share x fuel share."""

    total_energy: Quantity
    transport_share: Quantity
    fuel_share: Quantity


@dataclass(frozen=True)
class GallonsBasis:
    """Fleet energy from fuel volume: gallons x heat content x Wh-per-Btu."""

    gallons: Quantity
    heat_content: Quantity
    btu_to_wh: Quantity


@dataclass(frozen=True)
class BatteryDemand:
    """Battery count and production energy for one method and chemistry.

    ``production_energy`` is always the unit-consistent value,
    battery_count x manufacture energy. ``ev_count`` is present for the
    per-vehicle method only.
    """

    method: str
    battery_count: Quantity
    chemistry: BatteryChemistry
    production_energy: Quantity
    ev_count: Quantity | None = None


@dataclass(frozen=True)
class ProductionRow:
    """One production-energy table cell: consistent and printed-style values."""

    method: str
    chemistry: str
    consistent: Quantity
    printed_style: Quantity
    note: str = PRODUCTION_TABLE_NOTE


@dataclass(frozen=True)
class CapacityDeficit:
    total_required: Quantity
    ratio_to_baseline: float
    deficit: Quantity


def fleet_energy_from_shares(basis: SharesBasis) -> Quantity:
    """Fleet energy as total consumption x transport share x fuel share."""
    total = _expect(basis.total_energy, Dimension.ENERGY, "total energy")
    transport = _expect(basis.transport_share, Dimension.FRACTION, "transport share")
    fuel = _expect(basis.fuel_share, Dimension.FRACTION, "fuel share")
    return Quantity(total * transport * fuel, Dimension.ENERGY)


def fleet_energy_from_gallons(basis: GallonsBasis) -> Quantity:
    """Fleet energy as gallons x Btu per gallon x Wh per Btu."""
    gallons = _expect(basis.gallons, Dimension.VOLUME, "gasoline volume")
    heat = _expect(basis.heat_content, Dimension.HEAT_CONTENT, "heat content")
    factor = _expect(basis.btu_to_wh, Dimension.BTU_CONVERSION, "Btu conversion")
    return Quantity(gallons * heat * factor, Dimension.ENERGY)


def fleet_energy(basis: SharesBasis | GallonsBasis) -> Quantity:
    if isinstance(basis, SharesBasis):
        return fleet_energy_from_shares(basis)
    return fleet_energy_from_gallons(basis)


def per_ev_energy(power: Quantity, travel_range: Quantity, speed: Quantity) -> Quantity:
    """Energy for one vehicle to cover ``travel_range`` at ``speed``.

    With canonical units (W, mi, mi/h) this is W x h = Wh directly.
    """
    p = _expect(power, Dimension.POWER, "power")
    r = _expect(travel_range, Dimension.DISTANCE, "range")
    v = _expect(speed, Dimension.SPEED, "speed")
    if v == 0.0:
        raise ZeroSpeed("reference speed must be positive")
    return Quantity(p * (r / v), Dimension.ENERGY)


def _count(value: float) -> Quantity:
    return Quantity(value, Dimension.COUNT)


def battery_demand_method_a(fleet: Quantity, per_ev: Quantity,
                            batteries_per_ev: float,
                            chem: BatteryChemistry) -> BatteryDemand:
    """Battery demand from an equivalent vehicle count.

    EV count = fleet energy / per-vehicle energy; batteries = EVs x packs
    per vehicle.
    """
    fleet_wh = _expect(fleet, Dimension.ENERGY, "fleet energy")
    per_ev_wh = _expect(per_ev, Dimension.ENERGY, "per-EV energy")
    if per_ev_wh == 0.0:
        raise ZeroPerEvEnergy("per-EV energy must be positive")
    if batteries_per_ev < 1:
        raise ValueError(f"batteries per EV must be >= 1, got {batteries_per_ev!r}")
    ev_count = fleet_wh / per_ev_wh
    battery_count = ev_count * batteries_per_ev
    production = battery_count * chem.manufacture_energy.canonical
    return BatteryDemand(
        method="A",
        ev_count=_count(ev_count),
        battery_count=_count(battery_count),
        chemistry=chem,
        production_energy=Quantity(production, Dimension.ENERGY),
    )


def battery_demand_method_b(fleet: Quantity, chem: BatteryChemistry) -> BatteryDemand:
    """Battery demand straight from pack capacity: fleet energy / pack energy."""
    fleet_wh = _expect(fleet, Dimension.ENERGY, "fleet energy")
    capacity_wh = chem.pack_capacity.canonical
    if capacity_wh == 0.0:
        raise ZeroCapacity("pack capacity must be positive")
    battery_count = fleet_wh / capacity_wh
    production = battery_count * chem.manufacture_energy.canonical
    return BatteryDemand(
        method="B",
        battery_count=_count(battery_count),
        chemistry=chem,
        production_energy=Quantity(production, Dimension.ENERGY),
    )


def production_energy_table(demands: list[BatteryDemand]) -> list[ProductionRow]:
    """Production energies with both the consistent and printed-style values."""
    rows = []
    for d in demands:
        consistent = d.production_energy
        printed = Quantity(consistent.canonical / PRODUCTION_TABLE_DIVISOR, Dimension.ENERGY)
        rows.append(ProductionRow(
            method=d.method,
            chemistry=d.chemistry.display_name,
            consistent=consistent,
            printed_style=printed,
        ))
    return rows


def carbon_intensity(total_emissions: Quantity, total_generation: Quantity) -> Quantity:
    """CO2 intensity of generation, in Mt per TWh."""
    emissions_t = _expect(total_emissions, Dimension.MASS, "emissions")
    generation_wh = _expect(total_generation, Dimension.ENERGY, "generation")
    if generation_wh == 0.0:
        raise ZeroGeneration("total generation must be positive")
    mt = emissions_t / _T_PER_MT
    twh = generation_wh / _WH_PER_TWH
    return Quantity(mt / twh, Dimension.CARBON_INTENSITY)


def additional_co2(additional_energy: Quantity, intensity: Quantity) -> Quantity:
    """CO2 mass from generating ``additional_energy`` at ``intensity``."""
    energy_wh = _expect(additional_energy, Dimension.ENERGY, "additional energy")
    i = _expect(intensity, Dimension.CARBON_INTENSITY, "carbon intensity")
    mt = (energy_wh / _WH_PER_TWH) * i
    return Quantity(mt * _T_PER_MT, Dimension.MASS)


def water_use(additional_energy: Quantity, fuel_share: Quantity,
              intensity: Quantity) -> Quantity:
    """Freshwater volume for one fuel's slice of ``additional_energy``.

    Follows the published accounting convention (``PUBLISHED_MWH_PER_TWH``,
    see module docstring): volume = TWh x 10^9 x share x gal/MWh.
    """
    energy_wh = _expect(additional_energy, Dimension.ENERGY, "additional energy")
    share = _expect(fuel_share, Dimension.FRACTION, "fuel share")
    gal_per_mwh = _expect(intensity, Dimension.WATER_INTENSITY, "water intensity")
    twh = energy_wh / _WH_PER_TWH
    return Quantity(twh * PUBLISHED_MWH_PER_TWH * share * gal_per_mwh, Dimension.VOLUME)


def sustainable_conversion_fraction(baseline_generation: Quantity,
                                    renewable_share: Quantity,
                                    fleet: Quantity) -> float:
    """Fraction of the fleet convertible on renewable build-out alone.

    Returns the raw ratio (baseline x share) / fleet energy; values above 1
    mean full conversion and are clamped at display time, not here.
    """
    baseline_wh = _expect(baseline_generation, Dimension.ENERGY, "baseline generation")
    share = _expect(renewable_share, Dimension.FRACTION, "renewable share")
    fleet_wh = _expect(fleet, Dimension.ENERGY, "fleet energy")
    if fleet_wh == 0.0:
        raise ZeroFleetEnergy("fleet energy must be positive")
    return (baseline_wh * share) / fleet_wh


def capacity_deficit(fleet: Quantity, battery_energy: Quantity,
                     baseline_generation: Quantity) -> CapacityDeficit:
    """Total additional generation vs the baseline capacity.

    deficit = max(0, fleet + battery - baseline).
    """
    fleet_wh = _expect(fleet, Dimension.ENERGY, "fleet energy")
    battery_wh = _expect(battery_energy, Dimension.ENERGY, "battery energy")
    baseline_wh = _expect(baseline_generation, Dimension.ENERGY, "baseline generation")
    if baseline_wh == 0.0:
        raise ZeroBaseline("baseline generation must be positive")
    total = fleet_wh + battery_wh
    return CapacityDeficit(
        total_required=Quantity(total, Dimension.ENERGY),
        ratio_to_baseline=total / baseline_wh,
        deficit=Quantity(max(0.0, total - baseline_wh), Dimension.ENERGY),
    )
