import dataclasses

import pytest

from evdemand.engine import GallonsBasis, SharesBasis
from evdemand.errors import (
    ParseError,
    UnknownChemistry,
    UnknownDataset,
    UnknownParameter,
    ValidationError,
)
from evdemand.quantities import BTU_TO_WH_EXACT, BTU_TO_WH_PAPER, Dimension, Quantity, quantity
from evdemand.refdata import builtin_dataset
from evdemand.scenario import (
    BUILTIN_SCENARIOS,
    CatalogMedian,
    Convention,
    ExplicitPerEv,
    Method,
    PowerRangeSpeed,
    Scenario,
    SweepSpec,
    apply_override,
    assess,
    builtin_scenario_text,
    load_builtin_scenario,
    load_scenario,
    parse_scenario,
    render_scenario,
    sweep,
)

MINIMAL = """
[meta]
dataset = us2005
"""


def _scn(extra: str, base: str = MINIMAL) -> Scenario:
    return parse_scenario(base + extra)


class TestLoading:
    def test_paper_2005_fixture(self):
        s = load_builtin_scenario("paper-2005")
        assert s.name == "paper-2005"
        assert s.dataset.id == "us2005"
        assert isinstance(s.fleet_basis, SharesBasis)
        assert s.fleet_basis.total_energy.in_unit("TWh") == 29000.0
        assert s.fleet_basis.transport_share.magnitude == 0.28
        assert s.fleet_basis.fuel_share.magnitude == 0.61
        assert s.chemistry.name == "nimh"
        assert s.batteries_per_ev == 4.0
        assert s.method is Method.BOTH
        assert s.convention is Convention.PUBLISHED
        assert isinstance(s.ev_reference, CatalogMedian)

    def test_paper_2001_fixture(self):
        s = load_builtin_scenario("paper-2001")
        assert isinstance(s.fleet_basis, GallonsBasis)
        assert s.fleet_basis.gallons.magnitude == 113.1e9
        assert s.fleet_basis.heat_content.magnitude == 114000.0
        assert s.fleet_basis.btu_to_wh.magnitude == BTU_TO_WH_EXACT

    def test_empty_text_is_parse_error(self):
        with pytest.raises(ParseError):
            parse_scenario("")

    def test_defaults_from_dataset(self):
        s = parse_scenario(MINIMAL)
        assert s.name == "us2005"
        assert isinstance(s.fleet_basis, SharesBasis)
        assert s.fleet_basis.total_energy == builtin_dataset("us2005").total_energy_consumption
        assert isinstance(s.ev_reference, CatalogMedian)
        assert s.chemistry.name == "nimh"
        assert s.batteries_per_ev == 4.0
        assert s.method is Method.BOTH
        assert s.convention is Convention.PUBLISHED
        assert s.renewable_share.magnitude == 0.30
        assert s.baseline_generation.in_unit("TWh") == 4055.0
        assert dict(s.water)["coal"].magnitude == 480.0

    def test_renewable_share_percent_override(self):
        s = _scn("\n[strategy]\nrenewable_share = 30 %\n")
        assert s.renewable_share.magnitude == 0.30

    def test_unknown_dataset(self):
        with pytest.raises(UnknownDataset):
            parse_scenario("[meta]\ndataset = us2030\n")

    def test_unknown_chemistry(self):
        with pytest.raises(UnknownChemistry):
            _scn("\n[battery]\nchemistry = li_ion\n")

    def test_unknown_key_is_error(self):
        with pytest.raises(ValidationError) as exc:
            _scn("\n[strategy]\nrenewable_shard = 30 %\n")
        assert any("renewable_shard" in p for p in exc.value.problems)

    def test_unknown_section_is_error(self):
        with pytest.raises(ValidationError):
            _scn("\n[turbines]\ncount = 5\n")

    def test_missing_dataset_is_error(self):
        with pytest.raises(ValidationError):
            parse_scenario("[fleet]\nbasis = shares\n")

    def test_ev_sources_are_mutually_exclusive(self):
        with pytest.raises(ValidationError):
            _scn("\n[ev]\nper_ev_energy = 115 kWh\nsource = catalog-median\n")

    def test_ev_triple_requires_all_three(self):
        with pytest.raises(ValidationError):
            _scn("\n[ev]\npower = 112 kW\nrange = 100 mi\n")

    def test_explicit_per_ev(self):
        s = _scn("\n[ev]\nper_ev_energy = 115 kWh\n")
        assert isinstance(s.ev_reference, ExplicitPerEv)
        assert s.ev_reference.per_ev.in_unit("kWh") == 115.0

    def test_power_range_speed(self):
        s = _scn("\n[ev]\npower = 112 kW\nrange = 100 mi\nspeed = 97.5 mph\n")
        assert isinstance(s.ev_reference, PowerRangeSpeed)

    def test_wrong_dimension_is_error(self):
        with pytest.raises(ValidationError) as exc:
            _scn("\n[strategy]\nbaseline_generation = 4055 gal\n")
        assert any("energy" in p for p in exc.value.problems)

    def test_batteries_per_ev_must_be_at_least_one(self):
        with pytest.raises(ValidationError):
            _scn("\n[battery]\nbatteries_per_ev = 0.5\n")

    def test_water_fuel_must_be_in_mix(self):
        with pytest.raises(ValidationError):
            _scn("\n[water]\ngeothermal = 10 gal/MWh\n")

    def test_bad_mix_fixture_reports_sum_violation(self):
        with pytest.raises(ValidationError) as exc:
            parse_scenario(builtin_scenario_text("bad-mix"))
        assert any("sum" in p for p in exc.value.problems)

    def test_btu_token_paper(self):
        s = _scn("", base="[meta]\ndataset = us2001\n[fleet]\nbasis = gallons\n"
                          "btu_to_wh = paper\n")
        assert s.fleet_basis.btu_to_wh.magnitude == BTU_TO_WH_PAPER

    def test_custom_chemistry_requires_pack_fields(self):
        with pytest.raises(ValidationError):
            _scn("\n[battery]\nchemistry = li_ion\npack_capacity = 25 kWh\n")

    def test_custom_chemistry(self):
        s = _scn("\n[battery]\nchemistry = li_ion\npack_capacity = 25 kWh\n"
                 "manufacture_energy = 5000 kWh\nenergy_density = 125 Wh/kg\n"
                 "pack_mass = 200 kg\n")
        assert s.chemistry.name == "li_ion"
        assert s.chemistry.manufacture_energy.in_unit("kWh") == 5000.0

    def test_load_scenario_from_path(self, tmp_path):
        p = tmp_path / "mini.scn"
        p.write_text(MINIMAL, encoding="utf-8")
        s = load_scenario(p)
        assert s.name == "mini"  # unnamed scenarios take the file stem

    def test_inline_and_reference_conflict(self):
        text = builtin_scenario_text("bad-mix").replace(
            "name = \"bad-mix\"", "name = \"bad-mix\"\ndataset = us2005")
        with pytest.raises(ValidationError) as exc:
            parse_scenario(text)
        assert any("inline" in p for p in exc.value.problems)


class TestAssess:
    def test_paper_2005(self):
        a = assess(load_builtin_scenario("paper-2005"))
        assert a.fleet_energy.in_unit("TWh") == pytest.approx(4953.2, rel=1e-12)
        assert a.per_ev_energy.in_unit("kWh") == pytest.approx(112 * 100 / 97.5,
                                                               rel=1e-12)
        assert a.total_additional_energy.in_unit("TWh") == pytest.approx(6374.17,
                                                                         rel=0.002)
        assert a.additional_co2.in_unit("Mt") == pytest.approx(3898, rel=0.001)
        assert a.totals_method == "B"

    def test_paper_2001(self):
        a = assess(load_builtin_scenario("paper-2001"))
        assert a.fleet_energy.in_unit("TWh") == pytest.approx(3778.7, rel=1e-4)
        assert a.demand_b.battery_count.magnitude == pytest.approx(151.15e9, rel=1e-4)
        assert a.demand_b.battery_count.magnitude == pytest.approx(151.12e9, rel=0.001)

    def test_zero_transport_share_zeroes_everything(self):
        a = assess(_scn("\n[fleet]\ntransport_share = 0 %\n"))
        assert a.fleet_energy.magnitude == 0.0
        assert a.demand_a.ev_count.magnitude == 0.0
        assert a.demand_b.battery_count.magnitude == 0.0
        assert a.battery_energy_for_totals.magnitude == 0.0
        assert a.total_additional_energy.magnitude == 0.0
        assert a.additional_co2.magnitude == 0.0
        assert all(v.magnitude == 0.0 for _, v in a.water)
        assert a.conversion_fraction == 0.0
        assert a.deficit.deficit.magnitude == 0.0

    def test_method_a_only(self):
        a = assess(_scn("\n[battery]\nmethod = A\n"))
        assert a.demand_b is None
        assert a.totals_method == "A"

    def test_consistent_convention(self):
        published = assess(load_builtin_scenario("paper-2005"))
        consistent = assess(_scn("\n[battery]\nconvention = consistent\n"))
        assert consistent.battery_energy_for_totals.magnitude == pytest.approx(
            published.battery_energy_for_totals.magnitude * 1e3, rel=1e-12)

    def test_paper_mantissa_token_accepted(self):
        s = _scn("\n[battery]\nconvention = paper-mantissa\n")
        assert s.convention is Convention.PUBLISHED

    def test_referentially_transparent(self):
        s = load_builtin_scenario("paper-2005")
        assert assess(s) == assess(s)

    def test_notes_mark_documented_conventions(self):
        a = assess(load_builtin_scenario("paper-2005"))
        keys = dict(a.notes)
        assert "battery_energy" in keys
        assert "water" in keys

    def test_full_conversion_flag(self):
        a = assess(_scn("\n[fleet]\ntotal_energy = 100 TWh\n"))
        assert a.conversion_fraction > 1.0
        assert a.full_conversion
        assert any(k == "conversion_fraction" for k, _ in a.notes)


class TestSweep:
    def test_renewable_share_points(self):
        s = load_builtin_scenario("paper-2005")
        spec = SweepSpec.from_values("strategy.renewable_share", [0.1, 0.2, 0.3])
        points = sweep(s, spec)
        fleet = 29000e12 * 0.28 * 0.61
        got = [p.assessment.conversion_fraction for p in points]
        expected = [4055e12 * share / fleet for share in (0.1, 0.2, 0.3)]
        assert got == pytest.approx(expected, rel=1e-12)
        assert [round(f, 4) for f in got] == [0.0819, 0.1637, 0.2456]

    def test_single_value_sweep_matches_assess(self):
        s = load_builtin_scenario("paper-2005")
        [point] = sweep(s, SweepSpec.from_values("strategy.renewable_share", [0.3]))
        direct = assess(apply_override(s, "strategy.renewable_share", 0.3))
        assert point.assessment == direct

    def test_batteries_per_ev_scaling(self):
        s = load_builtin_scenario("paper-2005")
        points = sweep(s, SweepSpec.from_values("battery.batteries_per_ev",
                                                [1.0, 2.0, 4.0]))
        counts = [p.assessment.demand_a.battery_count.magnitude for p in points]
        assert counts[1] == pytest.approx(2 * counts[0], rel=1e-12)
        assert counts[2] == pytest.approx(4 * counts[0], rel=1e-12)
        assert counts[2] == pytest.approx(172.28e9, rel=0.002)

    def test_every_point_matches_assess(self):
        s = load_builtin_scenario("paper-2005")
        spec = SweepSpec.from_progression("strategy.renewable_share", 0.05, 0.45, 0.1)
        for point in sweep(s, spec):
            assert point.assessment == assess(
                apply_override(s, "strategy.renewable_share", point.value))

    def test_progression_counter_has_no_drift(self):
        spec = SweepSpec.from_progression("strategy.renewable_share", 0.1, 0.3, 0.1)
        assert len(spec.points) == 3
        assert spec.points[2] == 0.1 + 2 * 0.1

    def test_invalid_progressions(self):
        with pytest.raises(ValueError):
            SweepSpec.from_progression("p", 0.1, 0.3, 0.0)
        with pytest.raises(ValueError):
            SweepSpec.from_progression("p", 0.3, 0.1, 0.1)

    def test_unknown_parameter(self):
        s = load_builtin_scenario("paper-2005")
        with pytest.raises(UnknownParameter):
            sweep(s, SweepSpec.from_values("strategy.cloudiness", [0.1]))

    def test_per_point_failure_recorded_inline(self):
        s = load_builtin_scenario("paper-2005")
        points = sweep(s, SweepSpec.from_values("strategy.renewable_share",
                                                [0.5, 1.5]))
        assert points[0].assessment is not None
        assert points[1].assessment is None
        assert "fraction" in points[1].error

    def test_quantity_valued_points(self):
        s = load_builtin_scenario("paper-2005")
        points = sweep(s, SweepSpec.from_values(
            "strategy.baseline_generation", [quantity(4055, "TWh")]))
        assert points[0].assessment is not None

    def test_shares_path_rejected_on_gallons_basis(self):
        s = load_builtin_scenario("paper-2001")
        with pytest.raises(UnknownParameter):
            apply_override(s, "fleet.transport_share", 0.3)


class TestRoundTrip:
    @pytest.mark.parametrize("name", ["paper-2005", "paper-2001"])
    def test_fixture_round_trip(self, name):
        s = load_builtin_scenario(name)
        assert parse_scenario(render_scenario(s)) == s

    def test_round_trip_with_sweep_section(self):
        s = _scn("\n[sweep]\npath = strategy.renewable_share\nvalues = 0.1, 0.2, 0.3\n")
        assert s.sweep_spec is not None
        assert parse_scenario(render_scenario(s)) == s

    def test_round_trip_with_progression(self):
        s = _scn("\n[sweep]\npath = battery.batteries_per_ev\nfrom = 1\nto = 4\nstep = 1\n")
        assert s.sweep_spec.points == (1.0, 2.0, 3.0, 4.0)
        assert parse_scenario(render_scenario(s)) == s

    def test_round_trip_explicit_ev_and_overrides(self):
        s = _scn("\n[ev]\nper_ev_energy = 115 kWh\n[battery]\nchemistry = pb_acid\n"
                 "batteries_per_ev = 2\nmethod = B\nconvention = consistent\n")
        assert parse_scenario(render_scenario(s)) == s

    def test_round_trip_gallons_paper_constant(self):
        s = parse_scenario("[meta]\ndataset = us2001\n[fleet]\nbasis = gallons\n"
                           "btu_to_wh = paper\n")
        assert parse_scenario(render_scenario(s)) == s

    def test_round_trip_custom_chemistry(self):
        s = _scn("\n[battery]\nchemistry = li_ion\npack_capacity = 25 kWh\n"
                 "manufacture_energy = 5000 kWh\nenergy_density = 125 Wh/kg\n"
                 "pack_mass = 200 kg\n")
        assert parse_scenario(render_scenario(s)) == s

    def test_round_trip_equality_is_fieldwise(self):
        s = load_builtin_scenario("paper-2005")
        s2 = parse_scenario(render_scenario(s))
        for field in dataclasses.fields(Scenario):
            assert getattr(s, field.name) == getattr(s2, field.name), field.name


class TestScnFormatDetails:
    def test_comment_inside_string_preserved(self):
        s = parse_scenario('[meta]\nname = "a # b"\ndataset = us2005\n')
        assert s.name == "a # b"

    def test_trailing_comment_stripped(self):
        s = parse_scenario("[meta]\ndataset = us2005  # the 2005 baseline\n")
        assert s.dataset.id == "us2005"

    def test_duplicate_key_rejected(self):
        with pytest.raises(ParseError) as exc:
            parse_scenario("[meta]\ndataset = us2005\ndataset = us2001\n")
        assert exc.value.line == 3

    def test_entry_before_section_rejected(self):
        with pytest.raises(ParseError):
            parse_scenario("dataset = us2005\n")

    def test_garbled_line_has_position(self):
        with pytest.raises(ParseError) as exc:
            parse_scenario("[meta]\ndataset us2005\n")
        assert exc.value.line == 2
