import numpy as np
import pytest

from oracles import oracle_first_quarter
from pvbatt import _engine
from pvbatt.battery import BatteryUnitSpec, OperatingMode
from pvbatt.economics import EconomicAssumptions, npv
from pvbatt.errors import ValidationError
from pvbatt.ingest import LoadProfile, WeatherSeries
from pvbatt.lifecycle import DesignObjective, SimulationContext, SystemDesign, objective, simulate
from pvbatt.pv import PvPanelSpec
from pvbatt.solar import GeoLocation
from pvbatt.tariff import TouPlan, base_period_cost

SYDNEY = GeoLocation(-33.86, 151.21, 10.0)
POWERWALL = BatteryUnitSpec("powerwall2", 13.5, 9.45, 3200.0, 1.0, 5.0, 0.90, 10000.0)
SHALLOW = BatteryUnitSpec("shallow", 10.0, 8.0, 4000.0, 0.8, 3.0, 0.92, 6000.0)
PANEL = PvPanelSpec("trina", 1.6368, 0.171, -0.0007011, 44.0, 280.0, 0.007)

WEEKDAY = [(0, 7, "offpeak"), (7, 14, "shoulder"), (14, 20, "peak"), (20, 22, "shoulder"), (22, 24, "offpeak")]
WEEKEND = [(0, 24, "offpeak")]
RATES = {"off": 0.13, "shoulder": 0.21, "peak": 0.50}
FEED_IN = 0.08
TOU = TouPlan("tou", "r", RATES["off"], RATES["shoulder"], RATES["peak"], FEED_IN, 1.0,
              {"weekday": WEEKDAY, "weekend": WEEKEND})
FLAT = TouPlan("flat", "r", 0.26, 0.26, 0.26, 0.06, 0.9, {"weekday": WEEKEND, "weekend": WEEKEND})
LABEL = {"offpeak": "off", "shoulder": "shoulder", "peak": "peak"}
WEEKDAY_PERIODS = {h: LABEL[lb] for s, e, lb in WEEKDAY for h in range(s, e)}


def synthetic_context(**kw):
    """Constant 0.9 kWh load and an identical clear-ish day repeated all year."""
    day = np.zeros(24)
    day[8:17] = [150, 320, 480, 580, 620, 580, 480, 320, 150]
    ghi = np.tile(day, 365)
    beam = ghi * 0.65
    diffuse = ghi - beam
    temp = np.full(8760, 22.0)
    load = LoadProfile("flat", 2013, np.full(8760, 0.9))
    weather = WeatherSeries(SYDNEY, (2013,), ghi[None], beam[None], diffuse[None], temp[None])
    return SimulationContext(load, weather, {"tou": TOU, "flat": FLAT}, "flat",
                             {"powerwall2": POWERWALL, "shallow": SHALLOW}, PANEL, **kw)


@pytest.fixture(scope="module")
def synthetic():
    return synthetic_context()


@pytest.fixture(scope="module")
def synthetic_consistent():
    return synthetic_context(loss_convention="consistent")


class TestOracleReplay:
    @pytest.mark.parametrize("product,x", [("powerwall2", 1), ("shallow", 2)])
    @pytest.mark.parametrize("mode", [1, 2, 3, 4])
    @pytest.mark.parametrize("consistent", [False, True])
    def test_three_days_match_brute_force(self, synthetic, synthetic_consistent, product, x, mode, consistent):
        ctx = synthetic_consistent if consistent else synthetic
        design = SystemDesign(25.0, 10.0, 12, x, product, mode, "tou")
        rep = simulate(design, ctx, trace=True)
        m = ctx.weather
        rows, _ = oracle_first_quarter(
            ctx.load.series, m.global_I[0], m.beam_Ib[0], m.diffuse_Id[0], m.ambient_Ta[0],
            (SYDNEY.latitude, SYDNEY.longitude, SYDNEY.timezone_offset), 25.0, 10.0, 12, PANEL, 0.9, 0.2,
            ctx.batteries[product], x, mode, RATES, FEED_IN, WEEKDAY_PERIODS, 2013, 72, consistent)
        np.testing.assert_allclose(rep.trace[:72, :8], np.array(rows), rtol=0, atol=1e-9)

    def test_first_quarter_cost_matches_brute_force(self, synthetic):
        design = SystemDesign(25.0, 10.0, 12, 1, "powerwall2", 2, "tou")
        rep = simulate(design, synthetic)
        m = synthetic.weather
        _, energy_cost = oracle_first_quarter(
            synthetic.load.series, m.global_I[0], m.beam_Ib[0], m.diffuse_Id[0], m.ambient_Ta[0],
            (SYDNEY.latitude, SYDNEY.longitude, SYDNEY.timezone_offset), 25.0, 10.0, 12, PANEL, 0.9, 0.2,
            POWERWALL, 1, 2, RATES, FEED_IN, WEEKDAY_PERIODS, 2013, 90 * 24)
        assert rep.per_quarter["c_pvbatt"][0] == pytest.approx(energy_cost + 90 * 1.0, abs=1e-7)
        # base plan is flat: 0.9 kWh * 2160 h * 0.26 + 90 days * 0.9
        assert rep.per_quarter["c_base"][0] == pytest.approx(0.9 * 2160 * 0.26 + 90 * 0.9, rel=1e-12)


class TestReportIdentities:
    def test_null_design_on_base_plan(self, synthetic):
        rep = simulate(SystemDesign(0, 0, 0, 0, None, 2, "flat"), synthetic, trace=True)
        assert rep.npv == 0.0
        assert rep.capital_pv == rep.capital_battery == 0.0
        assert np.all(rep.per_quarter["maintenance"] == 0.0)
        assert np.all(rep.trace[:, 1:7] == 0.0)

    def test_pv_only_balance(self, fixture_context):
        rep = simulate(SystemDesign(30, 0, 20, 0, "powerwall2", 2, "retailer_b_tou"), fixture_context, trace=True)
        assert np.all(rep.per_quarter["battery_throughput"] == 0.0)
        load = np.tile(fixture_context.load.series, 20)
        np.testing.assert_array_equal(rep.hourly("e_bal"), load - rep.hourly("e_pv"))

    @pytest.mark.parametrize("mode", [1, 2, 3, 4])
    @pytest.mark.parametrize("product,x", [("powerwall2", 1), ("enphase_ac", 4)])
    def test_hourly_energy_balance(self, fixture_context, mode, product, x):
        rep = simulate(SystemDesign(30, -10, 24, x, product, mode, "retailer_b_tou"), fixture_context, trace=True)
        load = np.tile(fixture_context.load.series, 20)
        e_pv, e_bpv, e_bg, e_bd = (rep.hourly(c) for c in ("e_pv", "e_bpv", "e_bg", "e_bd"))
        losses = rep.hourly("loss_pv") + rep.hourly("loss_grid") + rep.hourly("loss_discharge")
        imports = np.maximum(rep.hourly("e_bal"), 0)
        exports = np.maximum(-rep.hourly("e_bal"), 0)
        lhs = imports + e_pv + (e_bd - rep.hourly("loss_discharge"))
        rhs = load + exports + e_bpv + e_bg + rep.hourly("loss_pv") + rep.hourly("loss_grid")
        assert np.max(np.abs(lhs - rhs)) <= 1e-9
        assert np.max(np.abs(rep.hourly("e_bal") - (load - e_pv - e_bd + e_bpv + e_bg + losses))) <= 1e-9

    def test_state_of_charge_bounds(self, fixture_context):
        rep = simulate(SystemDesign(30, 0, 30, 2, "powerwall2", 4, "retailer_b_tou"), fixture_context, trace=True)
        c, cmax = rep.hourly("c_start"), rep.hourly("cmax_start")
        assert np.all(c >= (1 - POWERWALL.max_dod_D) * cmax - 1e-9)
        assert np.all(c <= cmax + 1e-9)
        assert np.all(cmax >= 2 * POWERWALL.eol_capacity_CEOL - 1e-12)

    def test_replacement_resets_bank(self, fixture_context):
        rep = simulate(SystemDesign(30, 0, 30, 2, "enphase_ac", 4, "retailer_b_tou"), fixture_context, trace=True)
        cmax = rep.hourly("cmax_start")
        first_after = 10 * 8760  # first hour of quarter 10t + 1
        assert cmax[first_after - 1] < 2 * 1.2
        assert cmax[first_after] == 2 * 1.2
        assert rep.hourly("c_start")[first_after] == 0.0
        # fade never recovers between replacements
        assert np.all(np.diff(cmax[:first_after]) <= 0)

    def test_horizon_tiling(self, fixture_context):
        rep = simulate(SystemDesign(20, 5, 10, 0, None, 2, "retailer_a_tou"), fixture_context)
        ins = rep.per_quarter["insolation"]
        np.testing.assert_array_equal(ins[:-16], ins[16:])
        assert np.all(np.diff(rep.per_quarter["pv_generation"][::4]) < 0)  # degradation

    def test_npv_recomputes_from_series(self, fixture_context):
        rep = simulate(SystemDesign(30, 0, 24, 1, "powerwall2", 2, "retailer_c_tou"), fixture_context)
        pq = rep.per_quarter
        again = npv(pq["c_base"] - pq["c_pvbatt"], pq["maintenance"], rep.capital_pv, rep.capital_battery,
                    EconomicAssumptions())
        assert again == rep.npv

    def test_annual_aggregates(self, fixture_context):
        rep = simulate(SystemDesign(30, 0, 24, 1, "powerwall2", 2, "retailer_c_tou"), fixture_context)
        assert len(rep.annual) == 20
        total_pv = sum(a["pv_generation"] for a in rep.annual)
        assert total_pv == pytest.approx(rep.per_quarter["pv_generation"].sum(), rel=1e-12)
        for a in rep.annual:
            assert a["self_consumed"] == pytest.approx(a["pv_generation"] - a["exported"])


class TestObjective:
    def test_deterministic(self, fixture_context):
        d = SystemDesign(33, -20, 18, 1, "powerwall2", 2, "retailer_b_tou")
        assert objective(d, fixture_context) == objective(d, fixture_context)

    def test_more_panels_more_generation(self, fixture_context):
        small = simulate(SystemDesign(30, 0, 10, 0, None, 2, "retailer_b_tou"), fixture_context)
        large = simulate(SystemDesign(30, 0, 11, 0, None, 2, "retailer_b_tou"), fixture_context)
        assert large.per_quarter["pv_generation"].sum() > small.per_quarter["pv_generation"].sum()

    def test_design_objective_maps_positions(self, fixture_context):
        obj = DesignObjective(fixture_context, "retailer_b_tou", 2, "powerwall2")
        d = obj.design((30.0, 5.0, 12.0, 1.0))
        assert (d.panel_count_Z, d.battery_count_X, d.operating_mode) == (12, 1, OperatingMode.MODE2)
        assert obj((30.0, 5.0, 12.0, 1.0)) == objective(d, fixture_context)

    def test_price_factor_only_changes_battery_capital(self, fixture_context):
        d = SystemDesign(30, 0, 20, 1, "powerwall2", 2, "retailer_b_tou")
        full = simulate(d, fixture_context)
        cheap = simulate(d, fixture_context.with_price_factor(0.5))
        assert cheap.capital_battery == pytest.approx(5000.0)
        assert cheap.npv > full.npv
        np.testing.assert_array_equal(full.per_quarter["savings"], cheap.per_quarter["savings"])

    def test_python_kernel_agrees(self, fixture_context):
        d = SystemDesign(28, 12, 22, 2, "enphase_ac", 4, "retailer_c_tou")
        a = simulate(d, fixture_context, kernel=_engine.python_simulate_horizon)
        b = simulate(d, fixture_context)
        assert a.npv == b.npv


class TestValidation:
    def test_design_box(self):
        with pytest.raises(ValidationError):
            SystemDesign(-1, 0, 1, 0, None, 2, "p")
        with pytest.raises(ValidationError):
            SystemDesign(10, -180, 1, 0, None, 2, "p")
        with pytest.raises(ValidationError):
            SystemDesign(10, 0, 1.5, 0, None, 2, "p")
        with pytest.raises(ValueError):
            SystemDesign(10, 0, 1, 0, None, 7, "p")

    def test_unknown_ids(self, synthetic):
        with pytest.raises(ValidationError):
            simulate(SystemDesign(10, 0, 1, 0, None, 2, "nope"), synthetic)
        with pytest.raises(ValidationError):
            simulate(SystemDesign(10, 0, 1, 1, "nope", 2, "tou"), synthetic)

    def test_base_costs_match_tariff_module(self, fixture_context):
        ctx = fixture_context
        b = ctx.bounds
        codes = ctx._tables[ctx.base_plan_id][0]
        expected = [base_period_cost(ctx.plans[ctx.base_plan_id], ctx.load.series[b[p]:b[p + 1]],
                                     codes[b[p]:b[p + 1]]) for p in range(4)]
        np.testing.assert_allclose(ctx.base_costs, expected, rtol=1e-12)

    def test_auto_base_plan_picks_cheapest(self, fixture_context):
        costs = {pid: fixture_context.annual_base_cost(pid) for pid in fixture_context.plans}
        assert fixture_context.base_plan_id == min(costs, key=costs.get)
