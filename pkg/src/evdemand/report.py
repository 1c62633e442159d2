"""Deterministic rendering of assessments, sweeps, and reproduction reports.

Text output is column-aligned; CSV is RFC-4180-style with minimal quoting
and LF line endings; JSON is two-space indented with sorted keys and
shortest round-trip numbers. Rendering the same inputs twice yields
identical bytes.

The reproduction report compares the pipeline's computed values against the
published study's printed figures, cell by cell, at fixed tolerances. One
cell (natural-gas freshwater) is a documented expected mismatch: the
printed figure cannot be derived from the study's own stated share and
intensity, so the cell passes by carrying the erratum flag rather than by
matching.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

from . import engine
from .errors import UnknownTarget
from .quantities import Quantity, format_quantity
from .quantities import _format_sig as _sig  # shared deterministic digit renderer
from .engine import SharesBasis
from .refdata import (
    builtin_chemistry,
    builtin_dataset,
    builtin_ev_catalog,
    catalog_stats,
    source_group_energy,
)
from .scenario import Assessment, SweepPoint, assess, load_builtin_scenario

__all__ = [
    "SigConfig",
    "DEFAULT_SIG",
    "CellResult",
    "ComparisonResult",
    "TARGET_IDS",
    "render",
    "render_sweep",
    "render_comparisons",
    "reproduce",
]

FORMATS = ("text", "csv", "json")


@dataclass(frozen=True)
class SigConfig:
    """Significant digits per value family; the defaults are the minimum
    that keep every published figure distinguishable."""

    energy: int = 5
    count: int = 4
    fraction: int = 3
    other: int = 5
    compare: int = 6

    @classmethod
    def uniform(cls, n: int) -> "SigConfig":
        return cls(energy=n, count=n, fraction=n, other=n, compare=n)


DEFAULT_SIG = SigConfig()


def _twh(q: Quantity, sig: SigConfig) -> str:
    return format_quantity(q, "TWh", sig.energy)


def _kwh(q: Quantity, sig: SigConfig) -> str:
    return format_quantity(q, "kWh", sig.energy)


def _count_e9(q: Quantity, sig: SigConfig) -> str:
    return f"{_sig(q.canonical / 1e9, sig.count)}e9"


def _gal_e12(q: Quantity, sig: SigConfig) -> str:
    return f"{_sig(q.canonical / 1e12, sig.other)}e12 gal"


def _frac(x: float, sig: SigConfig) -> str:
    return _sig(x, sig.fraction)


@dataclass(frozen=True)
class _Row:
    key: str
    label: str
    display: str
    value: float
    unit: str
    note: str = ""


def _assessment_rows(a: Assessment, sig: SigConfig) -> list[_Row]:
    notes = dict(a.notes)
    rows = [
        _Row("fleet_energy", "fleet energy", _twh(a.fleet_energy, sig),
             a.fleet_energy.in_unit("TWh"), "TWh", notes.get("fleet_energy", "")),
        _Row("per_ev_energy", "per-EV energy", _kwh(a.per_ev_energy, sig),
             a.per_ev_energy.in_unit("kWh"), "kWh"),
    ]
    for demand, tag in ((a.demand_a, "a"), (a.demand_b, "b")):
        if demand is None:
            continue
        label = f"method {demand.method}"
        if demand.ev_count is not None:
            rows.append(_Row(f"ev_count_{tag}", f"{label} EV count",
                             _count_e9(demand.ev_count, sig),
                             demand.ev_count.canonical / 1e9, "1e9"))
        rows.append(_Row(f"battery_count_{tag}", f"{label} battery count",
                         _count_e9(demand.battery_count, sig),
                         demand.battery_count.canonical / 1e9, "1e9"))
        printed = demand.production_energy.canonical / engine.PRODUCTION_TABLE_DIVISOR
        rows.append(_Row(f"production_consistent_{tag}", f"{label} production energy",
                         _twh(demand.production_energy, sig),
                         demand.production_energy.in_unit("TWh"), "TWh"))
        rows.append(_Row(f"production_published_{tag}", f"{label} published-style",
                         f"{_sig(printed / 1e12, sig.energy)} TWh",
                         printed / 1e12, "TWh", engine.PRODUCTION_TABLE_NOTE))
    rows.append(_Row(
        "battery_energy_for_totals", "battery energy for totals",
        _twh(a.battery_energy_for_totals, sig),
        a.battery_energy_for_totals.in_unit("TWh"), "TWh",
        f"method {a.totals_method}, {a.scenario.convention.value} convention"))
    rows.append(_Row("total_additional_energy", "total additional energy",
                     _twh(a.total_additional_energy, sig),
                     a.total_additional_energy.in_unit("TWh"), "TWh"))
    rows.append(_Row("carbon_intensity", "carbon intensity",
                     format_quantity(a.carbon_intensity, "Mt/TWh", sig.other),
                     a.carbon_intensity.canonical, "Mt/TWh"))
    rows.append(_Row("additional_co2", "additional CO2",
                     format_quantity(a.additional_co2, "Mt", sig.other),
                     a.additional_co2.in_unit("Mt"), "Mt"))
    for fuel, volume in a.water:
        rows.append(_Row(f"water_{fuel}", f"freshwater, {fuel}",
                         _gal_e12(volume, sig), volume.canonical / 1e12,
                         "1e12 gal", notes.get("water", "")))
    rows.append(_Row("renewable_supply", "renewable supply",
                     _twh(a.renewable_supply, sig),
                     a.renewable_supply.in_unit("TWh"), "TWh"))
    shown_fraction = min(a.conversion_fraction, 1.0)
    rows.append(_Row("conversion_fraction", "sustainable conversion fraction",
                     _frac(shown_fraction, sig), shown_fraction, "frac",
                     notes.get("conversion_fraction", "")))
    rows.append(_Row("baseline_generation", "baseline generation",
                     _twh(a.scenario.baseline_generation, sig),
                     a.scenario.baseline_generation.in_unit("TWh"), "TWh"))
    rows.append(_Row("total_vs_baseline_ratio", "total vs baseline ratio",
                     _sig(a.deficit.ratio_to_baseline, sig.other),
                     a.deficit.ratio_to_baseline, "ratio"))
    rows.append(_Row("capacity_deficit", "capacity deficit",
                     _twh(a.deficit.deficit, sig),
                     a.deficit.deficit.in_unit("TWh"), "TWh"))
    return rows


def _scenario_echo(a: Assessment) -> dict:
    s = a.scenario
    basis = s.fleet_basis
    if isinstance(basis, SharesBasis):
        fleet = {
            "basis": "shares",
            "total_energy_twh": basis.total_energy.in_unit("TWh"),
            "transport_share": basis.transport_share.canonical,
            "fuel_share": basis.fuel_share.canonical,
        }
    else:
        fleet = {
            "basis": "gallons",
            "gallons": basis.gallons.canonical,
            "heat_content_btu_per_gal": basis.heat_content.canonical,
            "btu_to_wh": basis.btu_to_wh.canonical,
        }
    return {
        "name": s.name,
        "dataset": s.dataset.id,
        "year": s.dataset.year,
        "fleet": fleet,
        "ev_reference": type(s.ev_reference).__name__,
        "chemistry": s.chemistry.name,
        "batteries_per_ev": s.batteries_per_ev,
        "method": s.method.value,
        "convention": s.convention.value,
        "renewable_share": s.renewable_share.canonical,
        "baseline_generation_twh": s.baseline_generation.in_unit("TWh"),
        "water_fuels": [fuel for fuel, _ in s.water],
    }


def render(a: Assessment, fmt: str = "text", sig: SigConfig = DEFAULT_SIG) -> str:
    """Render one assessment as text, csv, or json."""
    rows = _assessment_rows(a, sig)
    if fmt == "text":
        s = a.scenario
        lines = [f"scenario {s.name}  (dataset {s.dataset.id}, year {s.dataset.year})", ""]
        for row in rows:
            lines.append(f"  {row.label:<32}{row.display}")
        note_rows = [r for r in rows if r.note]
        if note_rows:
            lines.append("")
            lines.append("  notes:")
            for row in note_rows:
                lines.append(f"    {row.key}: {row.note}")
        lines.append("")
        return "\n".join(lines)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["key", "value", "unit", "note"])
        for row in rows:
            writer.writerow([row.key, repr(row.value), row.unit, row.note])
        return buf.getvalue()
    if fmt == "json":
        payload = {
            "scenario": _scenario_echo(a),
            "values": {row.key: {"value": row.value, "unit": row.unit,
                                 **({"note": row.note} if row.note else {})}
                       for row in rows},
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")


# --- sweeps -----------------------------------------------------------------

_SWEEP_COLUMNS = (
    "index", "value", "fleet_energy_twh", "per_ev_energy_kwh",
    "battery_count_e9", "battery_energy_twh", "total_additional_twh",
    "additional_co2_mt", "conversion_fraction", "total_vs_baseline_ratio",
    "capacity_deficit_twh", "error",
)


def _sweep_cells(i: int, p: SweepPoint) -> list[str]:
    value = repr(p.value.canonical) if isinstance(p.value, Quantity) else repr(p.value)
    if p.assessment is None:
        return [str(i), value] + [""] * 9 + [p.error or ""]
    a = p.assessment
    selected = a.demand_b if a.demand_b is not None else a.demand_a
    return [
        str(i), value,
        repr(a.fleet_energy.in_unit("TWh")),
        repr(a.per_ev_energy.in_unit("kWh")),
        repr(selected.battery_count.canonical / 1e9),
        repr(a.battery_energy_for_totals.in_unit("TWh")),
        repr(a.total_additional_energy.in_unit("TWh")),
        repr(a.additional_co2.in_unit("Mt")),
        repr(a.conversion_fraction),
        repr(a.deficit.ratio_to_baseline),
        repr(a.deficit.deficit.in_unit("TWh")),
        "",
    ]


def render_sweep(path: str, points: list[SweepPoint], fmt: str = "text",
                 sig: SigConfig = DEFAULT_SIG) -> str:
    """Render sweep results; points keep their evaluation order."""
    table = [_sweep_cells(i, p) for i, p in enumerate(points)]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(_SWEEP_COLUMNS)
        writer.writerows(table)
        return buf.getvalue()
    if fmt == "json":
        payload = [dict(zip(_SWEEP_COLUMNS, row)) for row in table]
        for entry in payload:
            for key, value in list(entry.items()):
                if key in ("index",):
                    entry[key] = int(value)
                elif key not in ("error", "value") and value != "":
                    entry[key] = float(value)
                elif key == "value":
                    entry[key] = float(value)
        return json.dumps({"path": path, "points": payload},
                          indent=2, sort_keys=True) + "\n"
    if fmt == "text":
        lines = [f"sweep over {path}", ""]
        widths = [max(len(col), *(len(row[i]) for row in table)) if table else len(col)
                  for i, col in enumerate(_SWEEP_COLUMNS)]
        header = "  ".join(col.ljust(widths[i]) for i, col in enumerate(_SWEEP_COLUMNS))
        lines.append(header.rstrip())
        for row in table:
            lines.append("  ".join(cell.ljust(widths[i])
                                   for i, cell in enumerate(row)).rstrip())
        lines.append("")
        return "\n".join(lines)
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")


# --- reproduction targets -----------------------------------------------------

@dataclass(frozen=True)
class _Cell:
    label: str
    computed: float
    expected: float
    unit: str
    rule: str          # rel | exact | abs | round2sig | erratum
    tolerance: float
    anchor: str
    note: str = ""


@dataclass(frozen=True)
class CellResult:
    label: str
    computed: float
    expected: float
    unit: str
    rel_err: float
    passed: bool
    flagged: bool
    status: str
    anchor: str
    note: str = ""


@dataclass(frozen=True)
class ComparisonResult:
    target_id: str
    title: str
    cells: tuple[CellResult, ...]
    notes: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cells)


def _evaluate(cell: _Cell) -> CellResult:
    c, e = cell.computed, cell.expected
    rel = abs(c - e) / abs(e) if e != 0 else abs(c)
    flagged = False
    if cell.rule == "rel":
        ok = rel <= cell.tolerance
    elif cell.rule == "abs":
        ok = abs(c - e) <= cell.tolerance
    elif cell.rule == "exact":
        ok = c == e
    elif cell.rule == "round2sig":
        ok = float(f"{c:.1e}") == e
    elif cell.rule == "erratum":
        # documented expected mismatch: passes by carrying the flag
        ok = True
        flagged = True
    else:
        raise AssertionError(f"unknown rule {cell.rule}")
    status = "erratum" if flagged else ("ok" if ok else "FAIL")
    return CellResult(label=cell.label, computed=c, expected=e, unit=cell.unit,
                      rel_err=rel, passed=ok, flagged=flagged, status=status,
                      anchor=cell.anchor, note=cell.note)


def _table2_cells() -> list[_Cell]:
    catalog = builtin_ev_catalog()
    anchor = "study table 2, mean/median rows"
    cells = []
    for field, unit, scale, mean_exp, median_exp in (
            ("power", "kW", 1e3, 118.7, 112.0),
            ("max_speed", "mph", 1.0, 90.0, 97.5),
            ("range", "mi", 1.0, 91.0, 100.0)):
        stats = catalog_stats(catalog, field)
        cells.append(_Cell(f"{field} mean [{unit}]", stats.mean.canonical / scale,
                           mean_exp, unit, "abs", 1.0, anchor,
                           note="printed means carry unreconstructible rounding; "
                                "tolerance is 1 printed unit"))
        cells.append(_Cell(f"{field} median [{unit}]", stats.median.canonical / scale,
                           median_exp, unit, "exact", 0.0, anchor))
    return cells


_TABLE3_EXPECTED = {
    ("A", "2005", "pb_acid"): 591.0,
    ("A", "2001", "pb_acid"): 451.0,
    ("B", "2005", "pb_acid"): 679.55,
    ("B", "2001", "pb_acid"): 518.34,
    ("A", "2005", "nimh"): 1236.45,
    ("A", "2001", "nimh"): 943.55,
    ("B", "2005", "nimh"): 1421.71,
    ("B", "2001", "nimh"): 1084.44,
}


def _table3_cells(a05: Assessment, a01: Assessment) -> list[_Cell]:
    cells = []
    for chem_name in ("pb_acid", "nimh"):
        chem = builtin_chemistry(chem_name)
        for method in ("A", "B"):
            for year, a in (("2005", a05), ("2001", a01)):
                if method == "A":
                    demand = engine.battery_demand_method_a(
                        a.fleet_energy, a.per_ev_energy,
                        a.scenario.batteries_per_ev, chem)
                else:
                    demand = engine.battery_demand_method_b(a.fleet_energy, chem)
                printed = demand.production_energy.canonical / engine.PRODUCTION_TABLE_DIVISOR
                expected = _TABLE3_EXPECTED[(method, year, chem_name)]
                cells.append(_Cell(
                    f"method {method}, {year}, {chem.display_name} [TWh]",
                    printed / 1e12, expected, "TWh", "rel", 0.002,
                    f"study table 3, method {method}, {year}, {chem.display_name}"))
    return cells


def _build_target(target_id: str, a05: Assessment, a01: Assessment) -> ComparisonResult:
    notes: tuple[str, ...] = ()
    if target_id == "table2-stats":
        title = "EV catalog statistics"
        cells = _table2_cells()
    elif target_id == "table3":
        title = "battery production energy table"
        cells = _table3_cells(a05, a01)
        notes = (engine.PRODUCTION_TABLE_NOTE,)
    elif target_id == "sec3-shares":
        title = "generation shares"
        mix = builtin_dataset("us2005").mix
        fossil = source_group_energy(mix, ["coal", "natural_gas", "oil"])
        nuclear = source_group_energy(mix, ["nuclear"])
        cells = [
            _Cell("fossil generation [TWh]", fossil.in_unit("TWh"), 2895.0,
                  "TWh", "rel", 0.005, "study sec. III, fossil total"),
            _Cell("nuclear generation [TWh]", nuclear.in_unit("TWh"), 783.0,
                  "TWh", "rel", 0.001, "study sec. III, nuclear total"),
        ]
        notes = ("per-source shares are a documented reconstruction; only the "
                 "fossil and nuclear totals are published",)
    elif target_id == "sec4-energies":
        title = "gasoline fleet energy"
        cells = [
            _Cell("fleet energy, shares basis [TWh]",
                  a05.fleet_energy.in_unit("TWh"), 4953.0, "TWh", "rel", 0.0005,
                  "study sec. IV, 2005 consumption-share product"),
            _Cell("fleet energy, gallons basis [TWh]",
                  a01.fleet_energy.in_unit("TWh"), 3778.0, "TWh", "rel", 0.001,
                  "study sec. IV, 2001 gasoline-volume conversion"),
        ]
    elif target_id == "sec5-counts":
        title = "EV and battery counts"
        cells = [
            _Cell("EV count, 2005 [1e9]", a05.ev_count.canonical / 1e9, 43.07,
                  "1e9", "rel", 0.002, "study sec. V, method A, 2005"),
            _Cell("EV count, 2001 [1e9]", a01.ev_count.canonical / 1e9, 32.85,
                  "1e9", "rel", 0.002, "study sec. V, method A, 2001"),
            _Cell("battery count, method A, 2005 [1e9]",
                  a05.demand_a.battery_count.canonical / 1e9, 172.28,
                  "1e9", "rel", 0.002, "study sec. V, method A, 2005"),
            _Cell("battery count, method A, 2001 [1e9]",
                  a01.demand_a.battery_count.canonical / 1e9, 131.4,
                  "1e9", "rel", 0.002, "study sec. V, method A, 2001"),
            _Cell("battery count, method B, 2005 [1e9]",
                  a05.demand_b.battery_count.canonical / 1e9, 198.12,
                  "1e9", "rel", 0.002, "study sec. V, method B, 2005"),
            _Cell("battery count, method B, 2001 [1e9]",
                  a01.demand_b.battery_count.canonical / 1e9, 151.12,
                  "1e9", "rel", 0.002, "study sec. V, method B, 2001"),
        ]
    elif target_id == "sec6-co2":
        title = "CO2 emissions"
        cells = [
            _Cell("carbon intensity [Mt/TWh]", a05.carbon_intensity.canonical,
                  0.61159, "Mt/TWh", "rel", 1e-4,
                  "derived: study sec. VI CO2 total over generation total"),
            _Cell("additional CO2 [Mt]", a05.additional_co2.in_unit("Mt"),
                  3900.0, "Mt", "rel", 0.005, "study sec. VI, additional CO2"),
        ]
    elif target_id == "sec6-water":
        title = "freshwater consumption"
        water = dict(a05.water)
        cells = [
            _Cell("freshwater, coal [1e12 gal]",
                  water["coal"].canonical / 1e12, 1181.58, "1e12 gal",
                  "rel", 0.005, "study sec. VI, coal freshwater"),
            _Cell("freshwater, natural gas [1e12 gal]",
                  water["natural_gas"].canonical / 1e12, 336.11, "1e12 gal",
                  "erratum", 0.0, "study sec. VI, gas freshwater",
                  note="published figure is about twice the stated share x "
                       "intensity product; irreproducible from stated inputs, "
                       "flagged rather than matched"),
        ]
        notes = (engine.WATER_CONVENTION_NOTE,)
    elif target_id == "sec7-strategy":
        title = "renewable conversion strategy"
        cells = [
            _Cell("renewable supply [TWh]", a05.renewable_supply.in_unit("TWh"),
                  1216.0, "TWh", "rel", 0.001, "study sec. VII, 30% of baseline"),
            _Cell("conversion fraction", a05.conversion_fraction, 0.25,
                  "frac", "round2sig", 0.0, "study sec. VII, printed 25%",
                  note="compared after rounding to 2 significant digits, "
                       "the study's own rounding rule"),
        ]
    elif target_id == "sec8-deficit":
        title = "capacity deficit"
        cells = [
            _Cell("total additional energy [TWh]",
                  a05.total_additional_energy.in_unit("TWh"), 6374.17,
                  "TWh", "rel", 0.002, "study sec. VI, total additional"),
            _Cell("total vs baseline ratio", a05.deficit.ratio_to_baseline,
                  1.572, "ratio", "rel", 0.002,
                  "derived: study total additional over the 4055 TWh baseline"),
        ]
        notes = ("the study's summary quotes the 2005-column battery energy for "
                 "the 2001 case; the production table's own 2001 figure is used here",)
    else:
        raise UnknownTarget(f"unknown target {target_id!r}; known: {', '.join(TARGET_IDS)}")
    return ComparisonResult(target_id=target_id, title=title,
                            cells=tuple(_evaluate(c) for c in cells), notes=notes)


TARGET_IDS = (
    "table2-stats", "table3", "sec3-shares", "sec4-energies", "sec5-counts",
    "sec6-co2", "sec6-water", "sec7-strategy", "sec8-deficit",
)


def reproduce(target_ids: list[str] | None = None) -> list[ComparisonResult]:
    """Compare computed values against the published figures, per target.

    Runs the canonical 2005 and 2001 scenarios and builds every requested
    target; output order is the canonical registry order regardless of the
    requested order.
    """
    requested = TARGET_IDS if target_ids is None else tuple(target_ids)
    for target_id in requested:
        if target_id not in TARGET_IDS:
            raise UnknownTarget(
                f"unknown target {target_id!r}; known: {', '.join(TARGET_IDS)}")
    a05 = assess(load_builtin_scenario("paper-2005"))
    a01 = assess(load_builtin_scenario("paper-2001"))
    wanted = set(requested)
    return [_build_target(tid, a05, a01) for tid in TARGET_IDS if tid in wanted]


def render_comparisons(results: list[ComparisonResult], fmt: str = "text",
                       sig: SigConfig = DEFAULT_SIG) -> str:
    """Render reproduction results; erratum cells stay visibly flagged."""
    if fmt == "json":
        payload = [
            {
                "target": r.target_id,
                "title": r.title,
                "passed": r.passed,
                "notes": list(r.notes),
                "cells": [
                    {
                        "label": c.label, "computed": c.computed,
                        "expected": c.expected, "unit": c.unit,
                        "rel_err": c.rel_err, "status": c.status,
                        "anchor": c.anchor,
                        **({"note": c.note} if c.note else {}),
                    }
                    for c in r.cells
                ],
            }
            for r in results
        ]
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["target", "cell", "computed", "expected", "unit",
                         "rel_err", "status", "anchor"])
        for r in results:
            for c in r.cells:
                writer.writerow([r.target_id, c.label, repr(c.computed),
                                 repr(c.expected), c.unit, f"{c.rel_err:.3e}",
                                 c.status, c.anchor])
        return buf.getvalue()
    if fmt == "text":
        lines: list[str] = []
        total = passed = 0
        for r in results:
            n = len(r.cells)
            k = sum(1 for c in r.cells if c.passed)
            total += n
            passed += k
            lines.append(f"{r.target_id}: {k}/{n} within tolerance")
            for note in r.notes:
                lines.append(f"  note: {note}")
            label_w = max(len(c.label) for c in r.cells)
            for c in r.cells:
                computed = _sig(c.computed, sig.compare)
                expected = _sig(c.expected, sig.compare)
                lines.append(f"  {c.label.ljust(label_w)}  "
                             f"computed {computed:>12}  expected {expected:>12}  "
                             f"rel err {c.rel_err:.3e}  {c.status}")
                if c.note:
                    lines.append(f"  {' ' * label_w}  ^ {c.note}")
            lines.append("")
        lines.append(f"targets passed: {sum(1 for r in results if r.passed)}"
                     f"/{len(results)}; cells within tolerance: {passed}/{total}")
        lines.append("")
        return "\n".join(lines)
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")
