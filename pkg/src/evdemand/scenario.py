"""Scenario loading, what-if overrides, assessment, and parameter sweeps.

A scenario file selects a reference dataset (built-in by id, or inline),
chooses how fleet energy is derived (national shares or gasoline gallons),
fixes the per-vehicle energy reference and battery assumptions, and sets
the renewable-strategy parameters. Every omitted field falls back to the
referenced dataset so the resolved scenario is self-contained; the
assessment echoes all resolved inputs.

Sections and keys (unknown ones are errors):

* ``[meta]``: ``name``, ``dataset``
* ``[dataset]`` + ``[mix]``: an inline dataset (same shape ``export-dataset``
  writes)
* ``[fleet]``: ``basis = shares | gallons`` plus the basis fields
* ``[ev]``: ``per_ev_energy``, or ``power``/``range``/``speed``, or
  ``source = catalog-median``
* ``[battery]``: ``chemistry``, ``batteries_per_ev``, ``method``,
  ``convention``, plus pack fields for a non-built-in chemistry
* ``[strategy]``: ``renewable_share``, ``baseline_generation``
* ``[water]``: ``fuel = intensity`` pairs
* ``[sweep]``: ``path`` and either ``values`` or ``from``/``to``/``step``
"""

from __future__ import annotations

import dataclasses
import enum
from dataclasses import dataclass
from pathlib import Path

from . import engine
from .engine import (
    BatteryDemand,
    CapacityDeficit,
    GallonsBasis,
    ProductionRow,
    SharesBasis,
)
from .errors import (
    EvDemandError,
    UnknownChemistry,
    UnknownDataset,
    UnknownParameter,
    ValidationError,
)
from .quantities import (
    BTU_TO_WH_EXACT,
    BTU_TO_WH_PAPER,
    GASOLINE_HEAT_BTU_PER_GAL,
    Dimension,
    Quantity,
    quantity,
)
from .refdata import (
    BatteryChemistry,
    GridMix,
    ReferenceDataset,
    builtin_chemistry,
    builtin_dataset,
    builtin_ev_catalog,
    catalog_stats,
    chemistry_names,
    dataset_ids,
    validate_mix,
)
from .scnformat import Document, RawValue, Section, parse_document, write_document

__all__ = [
    "Method",
    "Convention",
    "ExplicitPerEv",
    "PowerRangeSpeed",
    "CatalogMedian",
    "SweepSpec",
    "Scenario",
    "Assessment",
    "SweepPoint",
    "load_scenario",
    "parse_scenario",
    "assess",
    "sweep",
    "apply_override",
    "render_scenario",
    "render_dataset",
    "parse_dataset_document",
    "OVERRIDE_PATHS",
]


class Method(enum.Enum):
    A = "A"
    B = "B"
    BOTH = "both"


class Convention(enum.Enum):
    """How battery production energy feeds scenario totals."""

    CONSISTENT = "consistent"
    PUBLISHED = "published"   # printed-table style: consistent / 10^3


# "paper-mantissa" is an accepted alias for the printed-style convention
_CONVENTION_TOKENS = {
    "consistent": Convention.CONSISTENT,
    "published": Convention.PUBLISHED,
    "paper-mantissa": Convention.PUBLISHED,
}

_BTU_TOKENS = {"exact": BTU_TO_WH_EXACT, "paper": BTU_TO_WH_PAPER}


@dataclass(frozen=True)
class ExplicitPerEv:
    per_ev: Quantity


@dataclass(frozen=True)
class PowerRangeSpeed:
    power: Quantity
    travel_range: Quantity
    speed: Quantity


@dataclass(frozen=True)
class CatalogMedian:
    """Derive per-EV energy from the catalog's median power, range, speed."""


EvReference = ExplicitPerEv | PowerRangeSpeed | CatalogMedian


@dataclass(frozen=True)
class SweepSpec:
    """One parameter path and the ordered values to evaluate it at."""

    path: str
    points: tuple[float | Quantity, ...]

    def __post_init__(self):
        if not self.points:
            raise ValueError("sweep needs at least one value")

    @classmethod
    def from_values(cls, path: str, values: list[float | Quantity]) -> "SweepSpec":
        return cls(path=path, points=tuple(values))

    @classmethod
    def from_progression(cls, path: str, start: float, stop: float,
                         step: float) -> "SweepSpec":
        """Arithmetic progression via an integer counter (no accumulation drift)."""
        if step == 0:
            raise ValueError("sweep step must be nonzero")
        span = (stop - start) / step
        if span < 0:
            raise ValueError(f"step {step!r} never reaches {stop!r} from {start!r}")
        n = int(span + 1e-9)
        return cls(path=path, points=tuple(start + k * step for k in range(n + 1)))


@dataclass(frozen=True)
class Scenario:
    """A fully resolved what-if run; every field is concrete."""

    name: str
    dataset: ReferenceDataset
    fleet_basis: SharesBasis | GallonsBasis
    ev_reference: EvReference
    batteries_per_ev: float
    chemistry: BatteryChemistry
    method: Method
    convention: Convention
    renewable_share: Quantity
    baseline_generation: Quantity
    water: tuple[tuple[str, Quantity], ...]
    sweep_spec: SweepSpec | None = None


@dataclass(frozen=True)
class Assessment:
    """Everything a single scenario evaluation produced, inputs echoed."""

    scenario: Scenario
    fleet_energy: Quantity
    per_ev_energy: Quantity
    demand_a: BatteryDemand | None
    demand_b: BatteryDemand | None
    production_rows: tuple[ProductionRow, ...]
    totals_method: str
    battery_energy_for_totals: Quantity
    total_additional_energy: Quantity
    carbon_intensity: Quantity
    additional_co2: Quantity
    water: tuple[tuple[str, Quantity], ...]
    renewable_supply: Quantity
    conversion_fraction: float
    full_conversion: bool
    deficit: CapacityDeficit
    notes: tuple[tuple[str, str], ...]

    @property
    def ev_count(self) -> Quantity | None:
        return self.demand_a.ev_count if self.demand_a is not None else None


@dataclass(frozen=True)
class SweepPoint:
    value: float | Quantity
    assessment: Assessment | None
    error: str | None = None


# --- loading --------------------------------------------------------------

_SCENARIO_SECTIONS = {"meta", "dataset", "mix", "fleet", "ev", "battery",
                      "strategy", "water", "sweep"}

_DATASET_KEYS = {
    "id", "year", "mix_year", "total_generation", "total_energy_consumption",
    "transport_share", "gasoline_share", "household_gasoline", "co2_total",
}

_CUSTOM_CHEM_KEYS = ("pack_capacity", "manufacture_energy", "energy_density", "pack_mass")


class _Problems:
    def __init__(self):
        self.items: list[str] = []

    def add(self, message: str, value: RawValue | None = None):
        if value is not None:
            message = f"line {value.line}: {message}"
        self.items.append(message)

    def raise_if_any(self):
        if self.items:
            raise ValidationError(self.items)


def _want_quantity(value: RawValue, dim: Dimension, key: str,
                   problems: _Problems) -> Quantity | None:
    if value.kind == "quantity":
        q = value.payload
        if q.dimension is not dim:
            problems.add(f"{key} must be {dim.value}, got {q.dimension.value}", value)
            return None
        return q
    if value.kind == "number" and dim is Dimension.FRACTION:
        try:
            return Quantity(float(value.payload), Dimension.FRACTION)
        except EvDemandError as exc:
            problems.add(f"{key}: {exc}", value)
            return None
    problems.add(f"{key} must be a {dim.value} quantity literal, got {value.text!r}", value)
    return None


def _want_ident(value: RawValue, key: str, problems: _Problems) -> str | None:
    if value.kind == "ident":
        return value.payload
    problems.add(f"{key} must be an identifier, got {value.text!r}", value)
    return None


def _want_text(value: RawValue, key: str, problems: _Problems) -> str | None:
    if value.kind in ("string", "ident"):
        return str(value.payload)
    problems.add(f"{key} must be a string, got {value.text!r}", value)
    return None


def _check_keys(section: Section, allowed: set[str], problems: _Problems):
    for entry in section.entries:
        if entry.key not in allowed:
            problems.add(f"line {entry.line}: unknown key {entry.key!r} "
                         f"in [{section.name}]")


def parse_dataset_document(doc: Document, problems: _Problems) -> ReferenceDataset | None:
    """Build a ReferenceDataset from inline [dataset], [mix] and [water]."""
    ds_sec = doc.section("dataset")
    mix_sec = doc.section("mix")
    if ds_sec is None:
        problems.add("inline dataset requires a [dataset] section")
        return None
    if mix_sec is None:
        problems.add("inline dataset requires a [mix] section")
        return None
    _check_keys(ds_sec, _DATASET_KEYS, problems)

    def field(key: str, dim: Dimension) -> Quantity | None:
        v = ds_sec.get(key)
        if v is None:
            problems.add(f"[dataset] missing required key {key!r}")
            return None
        return _want_quantity(v, dim, key, problems)

    ds_id = "custom"
    if (v := ds_sec.get("id")) is not None:
        ds_id = _want_text(v, "id", problems) or ds_id
    year = ds_id
    if (v := ds_sec.get("year")) is not None:
        year = _want_text(v, "year", problems) or year
    # the mix may be older than the dataset's nominal year (2001 datasets
    # reuse the 2005 generation data)
    mix_year = year
    if (v := ds_sec.get("mix_year")) is not None:
        mix_year = _want_text(v, "mix_year", problems) or mix_year

    total_generation = field("total_generation", Dimension.ENERGY)
    consumption = field("total_energy_consumption", Dimension.ENERGY)
    transport = field("transport_share", Dimension.FRACTION)
    gasoline = field("gasoline_share", Dimension.FRACTION)
    household = field("household_gasoline", Dimension.VOLUME)
    co2_total = field("co2_total", Dimension.MASS)

    entries: list[tuple[str, float]] = []
    for entry in mix_sec.entries:
        share = _want_quantity(entry.value, Dimension.FRACTION, entry.key, problems)
        if share is not None:
            entries.append((entry.key, share.canonical))

    water: dict[str, Quantity] = {}
    water_sec = doc.section("water")
    if water_sec is not None:
        for entry in water_sec.entries:
            wi = _want_quantity(entry.value, Dimension.WATER_INTENSITY,
                                entry.key, problems)
            if wi is not None:
                water[entry.key] = wi

    if total_generation is None or None in (consumption, transport, gasoline,
                                            household, co2_total):
        return None
    mix = GridMix(year=mix_year, entries=tuple(entries),
                  total_generation=total_generation)
    for violation in validate_mix(mix):
        problems.add(f"[mix] {violation}")
    return ReferenceDataset(
        id=ds_id, year=year, mix=mix,
        total_energy_consumption=consumption, transport_share=transport,
        gasoline_share=gasoline, household_gasoline=household,
        co2_total=co2_total, water_intensity=water,
    )


def _resolve_fleet(section: Section | None, ds: ReferenceDataset,
                   problems: _Problems) -> SharesBasis | GallonsBasis | None:
    basis_name = "shares"
    if section is not None and (v := section.get("basis")) is not None:
        token = _want_ident(v, "basis", problems)
        if token is not None:
            if token not in ("shares", "gallons"):
                problems.add(f"basis must be shares or gallons, got {token!r}", v)
            else:
                basis_name = token

    if basis_name == "shares":
        allowed = {"basis", "total_energy", "transport_share", "fuel_share"}
        total = ds.total_energy_consumption
        transport = ds.transport_share
        fuel = ds.gasoline_share
        if section is not None:
            _check_keys(section, allowed, problems)
            if (v := section.get("total_energy")) is not None:
                total = _want_quantity(v, Dimension.ENERGY, "total_energy", problems) or total
            if (v := section.get("transport_share")) is not None:
                transport = _want_quantity(v, Dimension.FRACTION, "transport_share",
                                           problems) or transport
            if (v := section.get("fuel_share")) is not None:
                fuel = _want_quantity(v, Dimension.FRACTION, "fuel_share", problems) or fuel
        return SharesBasis(total_energy=total, transport_share=transport, fuel_share=fuel)

    allowed = {"basis", "gallons", "heat_content", "btu_to_wh"}
    gallons = ds.household_gasoline
    heat = quantity(GASOLINE_HEAT_BTU_PER_GAL, "Btu/gal")
    btu = Quantity(BTU_TO_WH_EXACT, Dimension.BTU_CONVERSION)
    if section is not None:
        _check_keys(section, allowed, problems)
        if (v := section.get("gallons")) is not None:
            gallons = _want_quantity(v, Dimension.VOLUME, "gallons", problems) or gallons
        if (v := section.get("heat_content")) is not None:
            heat = _want_quantity(v, Dimension.HEAT_CONTENT, "heat_content", problems) or heat
        if (v := section.get("btu_to_wh")) is not None:
            if v.kind == "ident":
                if v.payload in _BTU_TOKENS:
                    btu = Quantity(_BTU_TOKENS[v.payload], Dimension.BTU_CONVERSION)
                else:
                    problems.add(f"btu_to_wh must be exact, paper, or a Wh/Btu "
                                 f"quantity, got {v.text!r}", v)
            else:
                btu = _want_quantity(v, Dimension.BTU_CONVERSION, "btu_to_wh",
                                     problems) or btu
    return GallonsBasis(gallons=gallons, heat_content=heat, btu_to_wh=btu)


def _resolve_ev(section: Section | None, problems: _Problems) -> EvReference:
    if section is None:
        return CatalogMedian()
    _check_keys(section, {"per_ev_energy", "power", "range", "speed", "source"}, problems)
    has_explicit = section.get("per_ev_energy") is not None
    prs_keys = [k for k in ("power", "range", "speed") if section.get(k) is not None]
    has_source = section.get("source") is not None
    chosen = sum([has_explicit, bool(prs_keys), has_source])
    if chosen > 1:
        problems.add("[ev] mixes per_ev_energy, power/range/speed and source; pick one")
        return CatalogMedian()
    if has_explicit:
        q = _want_quantity(section.get("per_ev_energy"), Dimension.ENERGY,
                           "per_ev_energy", problems)
        return ExplicitPerEv(per_ev=q) if q is not None else CatalogMedian()
    if prs_keys:
        if len(prs_keys) != 3:
            problems.add(f"[ev] needs power, range and speed together; got {prs_keys}")
            return CatalogMedian()
        p = _want_quantity(section.get("power"), Dimension.POWER, "power", problems)
        r = _want_quantity(section.get("range"), Dimension.DISTANCE, "range", problems)
        s = _want_quantity(section.get("speed"), Dimension.SPEED, "speed", problems)
        if None in (p, r, s):
            return CatalogMedian()
        return PowerRangeSpeed(power=p, travel_range=r, speed=s)
    if has_source:
        token = _want_ident(section.get("source"), "source", problems)
        if token is not None and token != "catalog-median":
            problems.add(f"unknown ev source {token!r}; expected catalog-median")
    return CatalogMedian()


def _resolve_chemistry(section: Section | None, problems: _Problems) -> BatteryChemistry:
    default = builtin_chemistry("nimh")
    if section is None:
        return default
    v = section.get("chemistry")
    if v is None:
        return default
    name = _want_ident(v, "chemistry", problems)
    if name is None:
        return default
    custom_present = [k for k in _CUSTOM_CHEM_KEYS if section.get(k) is not None]
    if name in chemistry_names():
        if custom_present:
            problems.add(f"pack fields {custom_present} are only for non-built-in "
                         f"chemistries; {name!r} is built-in")
        return builtin_chemistry(name)
    if not custom_present:
        raise UnknownChemistry(
            f"unknown chemistry {name!r}; built-ins: {', '.join(chemistry_names())} "
            f"(or supply {', '.join(_CUSTOM_CHEM_KEYS)})")
    missing = [k for k in _CUSTOM_CHEM_KEYS if section.get(k) is None]
    if missing:
        problems.add(f"custom chemistry {name!r} missing keys {missing}")
        return default
    capacity = _want_quantity(section.get("pack_capacity"), Dimension.ENERGY,
                              "pack_capacity", problems)
    manufacture = _want_quantity(section.get("manufacture_energy"), Dimension.ENERGY,
                                 "manufacture_energy", problems)
    density = _want_quantity(section.get("energy_density"), Dimension.ENERGY_DENSITY,
                             "energy_density", problems)
    mass = _want_quantity(section.get("pack_mass"), Dimension.MASS, "pack_mass", problems)
    if None in (capacity, manufacture, density, mass):
        return default
    try:
        return BatteryChemistry(
            name=name, display_name=name, energy_density=density, pack_mass=mass,
            pack_capacity=capacity, manufacture_energy=manufacture,
            emissions_note="user supplied", recycling_note="user supplied")
    except ValueError as exc:
        problems.add(str(exc))
        return default


def _resolve_sweep(section: Section | None, problems: _Problems) -> SweepSpec | None:
    if section is None:
        return None
    _check_keys(section, {"path", "values", "from", "to", "step"}, problems)
    path_v = section.get("path")
    if path_v is None:
        problems.add("[sweep] missing key 'path'")
        return None
    path = _want_ident(path_v, "path", problems)
    if path is None:
        return None
    values_v = section.get("values")
    prog_keys = [k for k in ("from", "to", "step") if section.get(k) is not None]
    if values_v is not None and prog_keys:
        problems.add("[sweep] has both values and from/to/step; pick one")
        return None
    if values_v is not None:
        items = values_v.payload if values_v.kind == "list" else [values_v]
        points: list[float | Quantity] = []
        for item in items:
            if item.kind == "number":
                points.append(float(item.payload))
            elif item.kind == "quantity":
                points.append(item.payload)
            else:
                problems.add(f"sweep value must be a number or quantity, "
                             f"got {item.text!r}", item)
        if not points:
            problems.add("[sweep] values list is empty")
            return None
        return SweepSpec.from_values(path, points)
    if len(prog_keys) == 3:
        nums = []
        for key in ("from", "to", "step"):
            v = section.get(key)
            if v.kind != "number":
                problems.add(f"sweep {key} must be a bare number, got {v.text!r}", v)
                return None
            nums.append(float(v.payload))
        try:
            return SweepSpec.from_progression(path, *nums)
        except ValueError as exc:
            problems.add(f"[sweep] {exc}")
            return None
    problems.add("[sweep] needs either values or all of from/to/step")
    return None


def parse_scenario(text: str, *, default_name: str | None = None) -> Scenario:
    """Parse and fully resolve scenario text.

    Raises ParseError for malformed syntax, UnknownDataset or
    UnknownChemistry for bad references, and ValidationError aggregating
    all other problems.
    """
    doc = parse_document(text)
    problems = _Problems()

    for name in doc.section_names():
        if name not in _SCENARIO_SECTIONS:
            problems.add(f"unknown section [{name}]")

    meta = doc.section("meta")
    dataset_ref: str | None = None
    scenario_name = default_name
    if meta is not None:
        _check_keys(meta, {"name", "dataset"}, problems)
        if (v := meta.get("name")) is not None:
            scenario_name = _want_text(v, "name", problems) or scenario_name
        if (v := meta.get("dataset")) is not None:
            dataset_ref = _want_ident(v, "dataset", problems)

    has_inline = doc.section("dataset") is not None or doc.section("mix") is not None
    ds: ReferenceDataset | None = None
    if dataset_ref is not None and has_inline:
        problems.add("scenario both references a dataset and defines one inline")
    if has_inline:
        ds = parse_dataset_document(doc, problems)
    elif dataset_ref is not None:
        ds = builtin_dataset(dataset_ref)   # raises UnknownDataset
    else:
        problems.add("scenario must reference a built-in dataset ([meta] dataset = ...) "
                     "or define one inline ([dataset] + [mix])")
    if ds is None:
        problems.raise_if_any()
        raise AssertionError("unreachable")

    if scenario_name is None:
        scenario_name = ds.id

    fleet_basis = _resolve_fleet(doc.section("fleet"), ds, problems)
    ev_reference = _resolve_ev(doc.section("ev"), problems)

    battery = doc.section("battery")
    batteries_per_ev = 4.0
    method = Method.BOTH
    convention = Convention.PUBLISHED
    if battery is not None:
        allowed = {"chemistry", "batteries_per_ev", "method", "convention",
                   *_CUSTOM_CHEM_KEYS}
        _check_keys(battery, allowed, problems)
        if (v := battery.get("batteries_per_ev")) is not None:
            if v.kind == "number":
                batteries_per_ev = float(v.payload)
            else:
                problems.add(f"batteries_per_ev must be a bare number, got {v.text!r}", v)
        if (v := battery.get("method")) is not None:
            token = _want_ident(v, "method", problems)
            if token is not None:
                try:
                    method = Method(token.upper()) if token.upper() in ("A", "B") \
                        else Method(token.lower())
                except ValueError:
                    problems.add(f"method must be A, B, or both, got {token!r}", v)
        if (v := battery.get("convention")) is not None:
            token = _want_ident(v, "convention", problems)
            if token is not None:
                if token in _CONVENTION_TOKENS:
                    convention = _CONVENTION_TOKENS[token]
                else:
                    problems.add(f"convention must be one of "
                                 f"{sorted(_CONVENTION_TOKENS)}, got {token!r}", v)
    chemistry = _resolve_chemistry(battery, problems)
    if batteries_per_ev < 1:
        problems.add(f"batteries_per_ev must be >= 1, got {batteries_per_ev!r}")

    strategy = doc.section("strategy")
    renewable_share = Quantity(0.30, Dimension.FRACTION)
    baseline = ds.mix.total_generation
    if strategy is not None:
        _check_keys(strategy, {"renewable_share", "baseline_generation"}, problems)
        if (v := strategy.get("renewable_share")) is not None:
            renewable_share = _want_quantity(v, Dimension.FRACTION, "renewable_share",
                                             problems) or renewable_share
        if (v := strategy.get("baseline_generation")) is not None:
            baseline = _want_quantity(v, Dimension.ENERGY, "baseline_generation",
                                      problems) or baseline

    water_pairs: tuple[tuple[str, Quantity], ...]
    water_sec = doc.section("water")
    if has_inline:
        # the inline [water] section already populated the dataset's map
        water_pairs = tuple(ds.water_intensity.items())
    elif water_sec is not None:
        pairs = []
        for entry in water_sec.entries:
            wi = _want_quantity(entry.value, Dimension.WATER_INTENSITY,
                                entry.key, problems)
            if wi is not None:
                pairs.append((entry.key, wi))
        water_pairs = tuple(pairs)
    else:
        water_pairs = tuple(ds.water_intensity.items())
    for fuel, _ in water_pairs:
        if fuel not in ds.mix.sources():
            problems.add(f"water fuel {fuel!r} is not a source in the grid mix")

    sweep_spec = _resolve_sweep(doc.section("sweep"), problems)

    problems.raise_if_any()
    return Scenario(
        name=scenario_name,
        dataset=ds,
        fleet_basis=fleet_basis,
        ev_reference=ev_reference,
        batteries_per_ev=batteries_per_ev,
        chemistry=chemistry,
        method=method,
        convention=convention,
        renewable_share=renewable_share,
        baseline_generation=baseline,
        water=water_pairs,
        sweep_spec=sweep_spec,
    )


def load_scenario(path: str | Path) -> Scenario:
    """Load and resolve a scenario file."""
    p = Path(path)
    text = p.read_text(encoding="utf-8")
    return parse_scenario(text, default_name=p.stem)


BUILTIN_SCENARIOS = ("paper-2005", "paper-2001", "bad-mix")


def builtin_scenario_text(name: str) -> str:
    """Text of a packaged scenario fixture."""
    if name not in BUILTIN_SCENARIOS:
        raise KeyError(f"unknown built-in scenario {name!r}; "
                       f"known: {', '.join(BUILTIN_SCENARIOS)}")
    from importlib import resources
    return resources.files("evdemand").joinpath("data", f"{name}.scn") \
        .read_text(encoding="utf-8")


def load_builtin_scenario(name: str) -> Scenario:
    return parse_scenario(builtin_scenario_text(name), default_name=name)


# --- assessment ------------------------------------------------------------

def _resolve_per_ev(ref: EvReference) -> Quantity:
    if isinstance(ref, ExplicitPerEv):
        return ref.per_ev
    if isinstance(ref, PowerRangeSpeed):
        return engine.per_ev_energy(ref.power, ref.travel_range, ref.speed)
    catalog = builtin_ev_catalog()
    return engine.per_ev_energy(
        catalog_stats(catalog, "power").median,
        catalog_stats(catalog, "range").median,
        catalog_stats(catalog, "max_speed").median,
    )


def assess(s: Scenario) -> Assessment:
    """Evaluate a scenario: fleet energy, demands, CO2, water, strategy, deficit.

    Deterministic and referentially transparent; the published total pairs
    the fleet demand with the pack-capacity (method B) battery energy, so
    that method feeds the totals whenever it is computed.
    """
    fleet = engine.fleet_energy(s.fleet_basis)
    per_ev = _resolve_per_ev(s.ev_reference)

    demand_a = demand_b = None
    if s.method in (Method.A, Method.BOTH):
        demand_a = engine.battery_demand_method_a(fleet, per_ev, s.batteries_per_ev,
                                                  s.chemistry)
    if s.method in (Method.B, Method.BOTH):
        demand_b = engine.battery_demand_method_b(fleet, s.chemistry)
    demands = [d for d in (demand_a, demand_b) if d is not None]
    production_rows = tuple(engine.production_energy_table(demands))

    selected = demand_b if demand_b is not None else demand_a
    totals_method = selected.method
    if s.convention is Convention.PUBLISHED:
        battery_energy = Quantity(
            selected.production_energy.canonical / engine.PRODUCTION_TABLE_DIVISOR,
            Dimension.ENERGY)
    else:
        battery_energy = selected.production_energy

    total = Quantity(fleet.canonical + battery_energy.canonical, Dimension.ENERGY)
    intensity = engine.carbon_intensity(s.dataset.co2_total,
                                        s.dataset.mix.total_generation)
    co2 = engine.additional_co2(total, intensity)

    water = tuple(
        (fuel, engine.water_use(fleet, Quantity(s.dataset.mix.share(fuel),
                                                Dimension.FRACTION), wi))
        for fuel, wi in s.water
    )

    renewable_supply = Quantity(
        s.baseline_generation.canonical * s.renewable_share.canonical,
        Dimension.ENERGY)
    if fleet.canonical == 0.0:
        conversion_fraction = 0.0
    else:
        conversion_fraction = engine.sustainable_conversion_fraction(
            s.baseline_generation, s.renewable_share, fleet)
    full_conversion = conversion_fraction >= 1.0

    deficit = engine.capacity_deficit(fleet, battery_energy, s.baseline_generation)

    notes: list[tuple[str, str]] = []
    if s.convention is Convention.PUBLISHED:
        notes.append(("battery_energy", engine.PRODUCTION_TABLE_NOTE))
    if water:
        notes.append(("water", engine.WATER_CONVENTION_NOTE))
    if full_conversion:
        notes.append(("conversion_fraction",
                      "full conversion: renewable supply covers the whole fleet"))
    if fleet.canonical == 0.0:
        notes.append(("fleet_energy", "zero fleet energy; downstream values are zero"))

    return Assessment(
        scenario=s,
        fleet_energy=fleet,
        per_ev_energy=per_ev,
        demand_a=demand_a,
        demand_b=demand_b,
        production_rows=production_rows,
        totals_method=totals_method,
        battery_energy_for_totals=battery_energy,
        total_additional_energy=total,
        carbon_intensity=intensity,
        additional_co2=co2,
        water=water,
        renewable_supply=renewable_supply,
        conversion_fraction=conversion_fraction,
        full_conversion=full_conversion,
        deficit=deficit,
        notes=tuple(notes),
    )


# --- sweeps ----------------------------------------------------------------

#: parameter path -> (expected dimension, None for a bare count)
OVERRIDE_PATHS: dict[str, Dimension | None] = {
    "fleet.total_energy": Dimension.ENERGY,
    "fleet.transport_share": Dimension.FRACTION,
    "fleet.fuel_share": Dimension.FRACTION,
    "fleet.gallons": Dimension.VOLUME,
    "fleet.heat_content": Dimension.HEAT_CONTENT,
    "fleet.btu_to_wh": Dimension.BTU_CONVERSION,
    "ev.per_ev_energy": Dimension.ENERGY,
    "battery.batteries_per_ev": None,
    "strategy.renewable_share": Dimension.FRACTION,
    "strategy.baseline_generation": Dimension.ENERGY,
}


def _coerce_override(path: str, value: float | Quantity) -> float | Quantity:
    dim = OVERRIDE_PATHS[path]
    if dim is None:
        if isinstance(value, Quantity):
            if value.dimension is not Dimension.COUNT:
                raise UnknownParameter(f"{path} takes a bare count, "
                                       f"got {value.dimension.value}")
            return value.canonical
        return float(value)
    if isinstance(value, Quantity):
        if value.dimension is not dim:
            raise UnknownParameter(f"{path} takes {dim.value}, got {value.dimension.value}")
        return value
    # bare numbers are canonical-unit magnitudes
    return Quantity(float(value), dim)


def apply_override(s: Scenario, path: str, value: float | Quantity) -> Scenario:
    """Return a copy of ``s`` with one parameter replaced."""
    if path not in OVERRIDE_PATHS:
        raise UnknownParameter(
            f"unknown parameter path {path!r}; known: {', '.join(sorted(OVERRIDE_PATHS))}")
    coerced = _coerce_override(path, value)
    section, _, field = path.partition(".")
    if section == "fleet":
        basis = s.fleet_basis
        shares_fields = {"total_energy", "transport_share", "fuel_share"}
        if field in shares_fields and not isinstance(basis, SharesBasis):
            raise UnknownParameter(f"{path} applies to the shares basis only")
        if field not in shares_fields and not isinstance(basis, GallonsBasis):
            raise UnknownParameter(f"{path} applies to the gallons basis only")
        return dataclasses.replace(s, fleet_basis=dataclasses.replace(
            basis, **{field: coerced}))
    if section == "ev":
        return dataclasses.replace(s, ev_reference=ExplicitPerEv(per_ev=coerced))
    if section == "battery":
        return dataclasses.replace(s, batteries_per_ev=coerced)
    if section == "strategy":
        return dataclasses.replace(s, **{field: coerced})
    raise UnknownParameter(f"unknown parameter path {path!r}")


def sweep(s: Scenario, spec: SweepSpec) -> list[SweepPoint]:
    """Evaluate ``s`` at every sweep point, recording per-point failures inline."""
    if spec.path not in OVERRIDE_PATHS:
        raise UnknownParameter(
            f"unknown parameter path {spec.path!r}; "
            f"known: {', '.join(sorted(OVERRIDE_PATHS))}")
    points: list[SweepPoint] = []
    for value in spec.points:
        try:
            overridden = apply_override(s, spec.path, value)
            points.append(SweepPoint(value=value, assessment=assess(overridden)))
        except EvDemandError as exc:
            points.append(SweepPoint(value=value, assessment=None, error=str(exc)))
    return points


# --- rendering ---------------------------------------------------------------

_PRETTY_UNITS: dict[Dimension, tuple[str, ...]] = {
    Dimension.ENERGY: ("TWh", "kWh", "Wh"),
    Dimension.POWER: ("kW", "W"),
    Dimension.SPEED: ("mph",),
    Dimension.DISTANCE: ("mi",),
    Dimension.VOLUME: ("gal",),
    Dimension.MASS: ("Mt", "kg", "t"),
    Dimension.FRACTION: ("frac",),
    Dimension.CARBON_INTENSITY: ("Mt/TWh",),
    Dimension.WATER_INTENSITY: ("gal/MWh",),
    Dimension.HEAT_CONTENT: ("Btu/gal",),
    Dimension.BTU_CONVERSION: ("Wh/Btu",),
    Dimension.ENERGY_DENSITY: ("Wh/kg",),
}


def _render_quantity_literal(q: Quantity) -> str:
    """Shortest literal that reparses to the bit-identical canonical value."""
    canonical = q.canonical
    if q.dimension is Dimension.VOLUME and canonical >= 1e9:
        mantissa = canonical / 1e9
        if float(f"{mantissa!r}e9") == canonical:
            return f"{mantissa!r}e9 gal"
    from .quantities import CATALOG
    for unit in _PRETTY_UNITS[q.dimension]:
        u = CATALOG.lookup(unit)
        value = u.from_canonical(canonical)
        if u.to_canonical(float(repr(value))) == canonical:
            return f"{value!r} {unit}"
    from .quantities import CANONICAL_UNIT
    return f"{canonical!r} {CANONICAL_UNIT[q.dimension]}"


def _render_value(value: float | Quantity) -> str:
    if isinstance(value, Quantity):
        return _render_quantity_literal(value)
    return repr(float(value))


def render_dataset(ds: ReferenceDataset, *, comments: list[str] | None = None) -> str:
    """Dataset in file syntax; loads back to identical data."""
    sections: list[tuple[str, list[tuple[str, str]]]] = [
        ("dataset", [
            ("id", ds.id),
            ("year", f'"{ds.year}"'),
            *([("mix_year", f'"{ds.mix.year}"')] if ds.mix.year != ds.year else []),
            ("total_generation", _render_quantity_literal(ds.mix.total_generation)),
            ("total_energy_consumption",
             _render_quantity_literal(ds.total_energy_consumption)),
            ("transport_share", _render_quantity_literal(ds.transport_share)),
            ("gasoline_share", _render_quantity_literal(ds.gasoline_share)),
            ("household_gasoline", _render_quantity_literal(ds.household_gasoline)),
            ("co2_total", _render_quantity_literal(ds.co2_total)),
        ]),
        ("mix", [(name, f"{share!r} frac") for name, share in ds.mix.entries]),
        ("water", [(fuel, _render_quantity_literal(wi))
                   for fuel, wi in ds.water_intensity.items()]),
    ]
    return write_document(sections, header_comments=comments)


def _is_builtin_dataset(ds: ReferenceDataset) -> bool:
    return ds.id in dataset_ids() and builtin_dataset(ds.id) == ds


def render_scenario(s: Scenario) -> str:
    """Scenario in file syntax; loads back to an equal Scenario."""
    sections: list[tuple[str, list[tuple[str, str]]]] = []
    meta: list[tuple[str, str]] = [("name", f'"{s.name}"')]
    if _is_builtin_dataset(s.dataset):
        meta.append(("dataset", s.dataset.id))
        sections.append(("meta", meta))
    else:
        sections.append(("meta", meta))
        inline = render_dataset(s.dataset)
        sections.extend(
            (sec.name, [(e.key, e.value.text) for e in sec.entries])
            for sec in parse_document(inline).sections)

    if isinstance(s.fleet_basis, SharesBasis):
        sections.append(("fleet", [
            ("basis", "shares"),
            ("total_energy", _render_quantity_literal(s.fleet_basis.total_energy)),
            ("transport_share", _render_quantity_literal(s.fleet_basis.transport_share)),
            ("fuel_share", _render_quantity_literal(s.fleet_basis.fuel_share)),
        ]))
    else:
        sections.append(("fleet", [
            ("basis", "gallons"),
            ("gallons", _render_quantity_literal(s.fleet_basis.gallons)),
            ("heat_content", _render_quantity_literal(s.fleet_basis.heat_content)),
            ("btu_to_wh", _render_quantity_literal(s.fleet_basis.btu_to_wh)),
        ]))

    if isinstance(s.ev_reference, ExplicitPerEv):
        ev_entries = [("per_ev_energy", _render_quantity_literal(s.ev_reference.per_ev))]
    elif isinstance(s.ev_reference, PowerRangeSpeed):
        ev_entries = [
            ("power", _render_quantity_literal(s.ev_reference.power)),
            ("range", _render_quantity_literal(s.ev_reference.travel_range)),
            ("speed", _render_quantity_literal(s.ev_reference.speed)),
        ]
    else:
        ev_entries = [("source", "catalog-median")]
    sections.append(("ev", ev_entries))

    battery_entries = [("chemistry", s.chemistry.name)]
    if s.chemistry.name not in chemistry_names():
        battery_entries += [
            ("pack_capacity", _render_quantity_literal(s.chemistry.pack_capacity)),
            ("manufacture_energy",
             _render_quantity_literal(s.chemistry.manufacture_energy)),
            ("energy_density", _render_quantity_literal(s.chemistry.energy_density)),
            ("pack_mass", _render_quantity_literal(s.chemistry.pack_mass)),
        ]
    battery_entries += [
        ("batteries_per_ev", repr(s.batteries_per_ev)),
        ("method", s.method.value),
        ("convention", s.convention.value),
    ]
    sections.append(("battery", battery_entries))

    sections.append(("strategy", [
        ("renewable_share", _render_quantity_literal(s.renewable_share)),
        ("baseline_generation", _render_quantity_literal(s.baseline_generation)),
    ]))

    if not _is_builtin_dataset(s.dataset):
        pass  # inline dataset already wrote its [water] section
    else:
        sections.append(("water", [(fuel, _render_quantity_literal(wi))
                                   for fuel, wi in s.water]))

    if s.sweep_spec is not None:
        sections.append(("sweep", [
            ("path", s.sweep_spec.path),
            ("values", ", ".join(_render_value(v) for v in s.sweep_spec.points)),
        ]))

    return write_document(sections)
