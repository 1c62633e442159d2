"""Built-in reference data: US grid mix, national energy figures, battery
pack properties, and the emerging-EV performance catalog.

All values are the published study's inputs, normalized to canonical units.
The 2005 per-source generation shares are a documented reconstruction: the
study states only the fossil total (71.4%) and the nuclear share (19.3%).
The coal share is backed out of the published coal freshwater total against
the 480 gal/MWh intensity, oil is fixed at the period's reported 3.0%, gas
takes the remainder of the fossil total, and hydro and other renewables
split the non-fossil, non-nuclear residual.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping

from .errors import EmptyField, UnknownChemistry, UnknownDataset, UnknownSource
from .quantities import Dimension, Quantity, quantity

__all__ = [
    "GridMix",
    "BatteryChemistry",
    "EvModel",
    "EvCatalog",
    "ReferenceDataset",
    "FieldStats",
    "builtin_dataset",
    "builtin_chemistry",
    "builtin_ev_catalog",
    "dataset_ids",
    "chemistry_names",
    "validate_mix",
    "source_group_energy",
    "catalog_stats",
]

# Pack capacity must agree with density x mass to within this relative slack
# (the NiMH pack: 75 Wh/kg x 330 kg = 24.75 kWh vs the 25 kWh nominal).
_CAPACITY_SLACK = 0.02

_SHARE_SUM_TOL = 1e-9


@dataclass(frozen=True)
class GridMix:
    """Named generation sources with fractional shares of an annual total."""

    year: str
    entries: tuple[tuple[str, float], ...]
    total_generation: Quantity

    def sources(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.entries)

    def share(self, source: str) -> float:
        for name, share in self.entries:
            if name == source:
                return share
        raise UnknownSource(f"source {source!r} not in {self.year} mix")


@dataclass(frozen=True)
class BatteryChemistry:
    """One battery pack option: capacity, mass, and manufacturing energy."""

    name: str
    display_name: str
    energy_density: Quantity      # Wh/kg
    pack_mass: Quantity           # stored in metric tons
    pack_capacity: Quantity       # Wh
    manufacture_energy: Quantity  # Wh per pack
    emissions_note: str
    recycling_note: str

    def __post_init__(self):
        implied_wh = self.energy_density.canonical * self.pack_mass.in_unit("kg")
        nominal_wh = self.pack_capacity.canonical
        if nominal_wh <= 0 or abs(implied_wh - nominal_wh) / nominal_wh > _CAPACITY_SLACK:
            raise ValueError(
                f"{self.name}: pack capacity {nominal_wh} Wh disagrees with "
                f"density x mass = {implied_wh} Wh beyond {_CAPACITY_SLACK:.0%}")
        if self.manufacture_energy.canonical <= 0:
            raise ValueError(f"{self.name}: manufacture energy must be positive")


@dataclass(frozen=True)
class EvModel:
    """One catalog row; missing entries stay None, ranges are closed intervals."""

    name: str
    power: Quantity | None = None
    max_speed: Quantity | None = None
    range_mi: tuple[float, float] | None = None

    def __post_init__(self):
        if self.range_mi is not None:
            lo, hi = self.range_mi
            if not (0 < lo <= hi):
                raise ValueError(f"{self.name}: bad range interval {self.range_mi}")


@dataclass(frozen=True)
class EvCatalog:
    models: tuple[EvModel, ...]


@dataclass(frozen=True)
class ReferenceDataset:
    """One year of national figures driving a conversion scenario."""

    id: str
    year: str
    mix: GridMix
    total_energy_consumption: Quantity
    transport_share: Quantity
    gasoline_share: Quantity
    household_gasoline: Quantity
    co2_total: Quantity
    water_intensity: Mapping[str, Quantity]


@dataclass(frozen=True)
class FieldStats:
    mean: Quantity
    median: Quantity
    count_used: int


def _q(value: float, unit: str) -> Quantity:
    return quantity(value, unit)


def _mix_2005() -> GridMix:
    return GridMix(
        year="2005",
        entries=(
            ("coal", 0.497),             # backed out of the coal freshwater total
            ("natural_gas", 0.188),      # remainder of the 71.4% fossil total
            ("oil", 0.030),              # period-reported oil share
            ("nuclear", 0.193),          # published
            ("hydro", 0.065),            # residual split
            ("other_renewables", 0.027),  # residual split
        ),
        total_generation=_q(4055, "TWh"),
    )


_WATER_INTENSITY_2005: Mapping[str, Quantity] = MappingProxyType({
    "coal": _q(480, "gal/MWh"),
    "natural_gas": _q(180, "gal/MWh"),
})


def _build_datasets() -> dict[str, ReferenceDataset]:
    mix = _mix_2005()
    common = dict(
        mix=mix,
        total_energy_consumption=_q(29000, "TWh"),
        transport_share=_q(0.28, "frac"),
        gasoline_share=_q(0.61, "frac"),
        # 2001 household survey figure; the latest the study had for either year
        household_gasoline=_q(113.1e9, "gal"),
        co2_total=_q(2480, "Mt"),
        water_intensity=_WATER_INTENSITY_2005,
    )
    return {
        "us2005": ReferenceDataset(id="us2005", year="2005", **common),
        # the 2001 gasoline figure is compared against 2005 grid data throughout
        "us2001": ReferenceDataset(id="us2001", year="2001", **common),
    }


def _build_chemistries() -> dict[str, BatteryChemistry]:
    return {
        "pb_acid": BatteryChemistry(
            name="pb_acid",
            display_name="Pb-acid",
            energy_density=_q(50, "Wh/kg"),
            pack_mass=_q(500, "kg"),
            pack_capacity=_q(25, "kWh"),
            manufacture_energy=_q(3430, "kWh"),
            emissions_note="lead particulates",
            recycling_note="short pack life; established recycling infrastructure",
        ),
        "nimh": BatteryChemistry(
            name="nimh",
            display_name="NiMH",
            energy_density=_q(75, "Wh/kg"),
            pack_mass=_q(330, "kg"),
            pack_capacity=_q(25, "kWh"),
            manufacture_energy=_q(7176, "kWh"),
            emissions_note="unknown",
            recycling_note="hydride recycling process unavailable",
        ),
    }


def _build_ev_catalog() -> EvCatalog:
    def ev(name, power_kw, speed_mph, rng):
        return EvModel(
            name=name,
            power=_q(power_kw, "kW") if power_kw is not None else None,
            max_speed=_q(speed_mph, "mph") if speed_mph is not None else None,
            range_mi=rng,
        )

    return EvCatalog(models=(
        ev("Chevrolet Volt", 112, 100, (40.0, 40.0)),
        ev("Fisker Karma", 300, 125, (50.0, 50.0)),
        ev("GM Opel Ampera", 112, 100, (37.0, 37.0)),
        ev("Mini E", 150, 95, (100.0, 120.0)),
        ev("Mitsubishi", 47, 80, (100.0, 100.0)),
        ev("Nissan E Car", 80, None, (100.0, 100.0)),
        ev("Tesla Roadster", 215, 125, (227.0, 227.0)),
        ev("Th!nk city", 30, 65, (112.0, 112.0)),
        ev("Toyota Prius PHEV", None, None, None),
        ev("ZENN", 22.4, 25, (30.0, 50.0)),
    ))


def validate_mix(mix: GridMix) -> list[str]:
    """Return mix violations (empty list means valid)."""
    problems: list[str] = []
    seen: set[str] = set()
    total = 0.0
    for name, share in mix.entries:
        if name in seen:
            problems.append(f"duplicate source {name!r}")
        seen.add(name)
        if not (0.0 <= share <= 1.0):
            problems.append(f"share for {name!r} out of range: {share!r}")
        total += share
    if abs(total - 1.0) > _SHARE_SUM_TOL:
        problems.append(f"shares sum to {total!r}, expected 1")
    return problems


def source_group_energy(mix: GridMix, group: Iterable[str]) -> Quantity:
    """Annual generation attributable to a group of sources."""
    names = list(group)
    shares = dict(mix.entries)
    for name in names:
        if name not in shares:
            raise UnknownSource(f"source {name!r} not in {mix.year} mix")
    group_share = sum(shares[name] for name in names)
    return Quantity(mix.total_generation.canonical * group_share, Dimension.ENERGY)


_STAT_FIELDS = ("power", "max_speed", "range")


def _field_values(catalog: EvCatalog, field: str) -> tuple[list[float], Dimension]:
    if field == "power":
        vals = [m.power.canonical for m in catalog.models if m.power is not None]
        return vals, Dimension.POWER
    if field == "max_speed":
        vals = [m.max_speed.canonical for m in catalog.models if m.max_speed is not None]
        return vals, Dimension.SPEED
    if field == "range":
        # midpoint rule: a printed interval contributes (lo + hi) / 2
        vals = [(m.range_mi[0] + m.range_mi[1]) / 2.0
                for m in catalog.models if m.range_mi is not None]
        return vals, Dimension.DISTANCE
    raise ValueError(f"unknown catalog field {field!r}; expected one of {_STAT_FIELDS}")


def catalog_stats(catalog: EvCatalog, field: str) -> FieldStats:
    """Mean and median over the models that provide ``field``.

    Missing entries are excluded, range intervals contribute their midpoint,
    and an even count takes the mean of the two central values.
    """
    values, dim = _field_values(catalog, field)
    if not values:
        raise EmptyField(f"no model provides {field!r}")
    mean = sum(values) / len(values)
    ordered = sorted(values)
    n = len(ordered)
    if n % 2:
        median = ordered[n // 2]
    else:
        median = (ordered[n // 2 - 1] + ordered[n // 2]) / 2.0
    return FieldStats(mean=Quantity(mean, dim), median=Quantity(median, dim),
                      count_used=n)


_DATASETS = _build_datasets()
_CHEMISTRIES = _build_chemistries()
_EV_CATALOG = _build_ev_catalog()


def _self_check() -> None:
    # every shipped dataset and chemistry must satisfy its own invariants
    for ds in _DATASETS.values():
        problems = validate_mix(ds.mix)
        if problems:
            raise AssertionError(f"builtin dataset {ds.id}: {problems}")
        for frac in (ds.transport_share, ds.gasoline_share):
            assert frac.dimension is Dimension.FRACTION
        for fuel in ds.water_intensity:
            if fuel not in ds.mix.sources():
                raise AssertionError(f"builtin dataset {ds.id}: water fuel {fuel!r} not in mix")
    # BatteryChemistry checks its invariants at construction; statistics must
    # be computable for every published field
    for field in _STAT_FIELDS:
        catalog_stats(_EV_CATALOG, field)
    # sanity: stdlib oracle agrees with the shipped medians
    assert statistics.median([m.power.canonical for m in _EV_CATALOG.models
                              if m.power is not None]) == 112e3


_self_check()


def dataset_ids() -> tuple[str, ...]:
    return tuple(sorted(_DATASETS))


def chemistry_names() -> tuple[str, ...]:
    return tuple(sorted(_CHEMISTRIES))


def builtin_dataset(dataset_id: str) -> ReferenceDataset:
    """Look up a built-in dataset by id (``us2005`` or ``us2001``)."""
    try:
        return _DATASETS[dataset_id]
    except KeyError:
        raise UnknownDataset(
            f"unknown dataset {dataset_id!r}; built-ins: {', '.join(dataset_ids())}") from None


def builtin_chemistry(name: str) -> BatteryChemistry:
    """Look up a built-in battery chemistry by name."""
    try:
        return _CHEMISTRIES[name]
    except KeyError:
        raise UnknownChemistry(
            f"unknown chemistry {name!r}; built-ins: {', '.join(chemistry_names())}") from None


def builtin_ev_catalog() -> EvCatalog:
    """The ten-vehicle performance catalog used for median statistics."""
    return _EV_CATALOG
