"""Full-horizon simulation of one system design and the NPV objective.

One year of load and (per-slot averaged) weather is tiled over the system
lifespan. PV output degrades once per billing period, the battery bank fades
with cycling and is replaced on the maintenance schedule, and each billing
period is costed under the base plan and the tested plan.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from . import _engine
from .battery import BatteryUnitSpec, OperatingMode, battery_cost, degradation_rate, loss_factor
from .economics import (
    EconomicAssumptions,
    MaintenanceParams,
    cashflow_stream,
    discounted_payback,
    maintenance_schedule,
    mirr,
    npv,
)
from .errors import UndefinedMetricError, ValidationError
from .ingest import LoadProfile, RunConfig, WeatherSeries, load_catalogue, load_plans, load_profile, load_weather
from .pv import BalanceOfPlant, PvCostSchedule, PvPanelSpec, pv_system_cost, unit_energy
from .solar import GeoLocation, extraterrestrial_hourly, plane_of_array
from .tariff import BillingCalendar, TouPlan

QUARTER_COLUMNS = ("q", "c_base", "c_pvbatt", "savings", "maintenance", "pv_generation", "imported",
                   "exported", "battery_throughput", "battery_losses", "cycles", "insolation")
TRACE_COLUMNS = ("e_pv", "e_bpv", "e_bg", "e_bd", "loss_pv", "loss_grid", "loss_discharge", "e_bal",
                 "c_start", "cmax_start")


@dataclass(frozen=True)
class SystemDesign:
    tilt_beta: float
    azimuth_gamma: float
    panel_count_Z: int
    battery_count_X: int
    battery_product_id: str | None
    operating_mode: OperatingMode
    plan_id: str

    def __post_init__(self):
        object.__setattr__(self, "operating_mode", OperatingMode(self.operating_mode))
        if not 0 <= self.tilt_beta <= 180:
            raise ValidationError("tilt outside [0, 180]", field="tilt_beta")
        if not -180 < self.azimuth_gamma <= 180:
            raise ValidationError("azimuth outside (-180, 180]", field="azimuth_gamma")
        if self.panel_count_Z < 0 or int(self.panel_count_Z) != self.panel_count_Z:
            raise ValidationError("panel count must be a non-negative integer", field="panel_count_Z")
        if self.battery_count_X < 0 or int(self.battery_count_X) != self.battery_count_X:
            raise ValidationError("battery count must be a non-negative integer", field="battery_count_X")
        object.__setattr__(self, "panel_count_Z", int(self.panel_count_Z))
        object.__setattr__(self, "battery_count_X", int(self.battery_count_X))


@dataclass
class SimulationReport:
    design: SystemDesign
    npv: float
    mirr: float | None
    payback_years: float | None
    capital_pv: float
    capital_battery: float
    per_quarter: dict
    annual: list
    final_battery_capacity: float
    final_available_capacity: float
    cumulative_cycles: float
    rated_pv_watts: float
    battery_kwh: float
    trace: np.ndarray | None = field(default=None, repr=False)

    def hourly(self, column: str) -> np.ndarray:
        if self.trace is None:
            raise ValueError("simulation was run without trace=True")
        return self.trace[:, TRACE_COLUMNS.index(column)]

    def to_dict(self) -> dict:
        d = self.design
        return {
            "design": {
                "tilt_beta": d.tilt_beta,
                "azimuth_gamma": d.azimuth_gamma,
                "panel_count_Z": d.panel_count_Z,
                "battery_count_X": d.battery_count_X,
                "battery_product_id": d.battery_product_id,
                "operating_mode": int(d.operating_mode),
                "plan_id": d.plan_id,
            },
            "npv": self.npv,
            "mirr": self.mirr,
            "payback_years": self.payback_years,
            "capital_pv": self.capital_pv,
            "capital_battery": self.capital_battery,
            "rated_pv_watts": self.rated_pv_watts,
            "battery_kwh": self.battery_kwh,
            "final_battery_capacity": self.final_battery_capacity,
            "final_available_capacity": self.final_available_capacity,
            "cumulative_cycles": self.cumulative_cycles,
            "annual": self.annual,
            "metric_conventions": {
                "mirr": "quarterly stream, quarter 0 = -(S_pv + S_b), quarter q = escalated savings - W_q; "
                        "finance and reinvestment at the real quarterly discount rate; annualised",
                "payback_years": "first crossing of cumulative discounted stream, linear within the quarter",
            },
        }


class SimulationContext:
    """Validated inputs plus everything about them that does not depend on the design."""

    def __init__(self, load: LoadProfile, weather: WeatherSeries, plans: dict, base_plan_id: str,
                 batteries: dict, pv_spec: PvPanelSpec, *, location: GeoLocation | None = None,
                 pv_costs: PvCostSchedule = PvCostSchedule(), bop: BalanceOfPlant = BalanceOfPlant(),
                 economics: EconomicAssumptions = EconomicAssumptions(),
                 maintenance: MaintenanceParams = MaintenanceParams(), ground_reflectance: float = 0.2,
                 rb_max: float = 10.0, loss_convention: str = "paper", battery_price_factor: float = 1.0):
        self.load = load
        self.weather = weather
        self.location = location or weather.location
        self.plans = dict(plans)
        self.batteries = dict(batteries)
        self.pv_spec = pv_spec
        self.pv_costs = pv_costs
        self.bop = bop
        self.economics = economics
        self.maintenance = maintenance
        self.ground_reflectance = ground_reflectance
        self.rb_max = rb_max
        self.loss_convention = loss_convention
        self.battery_price_factor = battery_price_factor
        self.calendar = BillingCalendar.standard(economics.billing_periods_per_year_t,
                                                 economics.lifespan_years)
        self.bounds = self.calendar.hour_bounds
        self.days = load.days()
        self.day_of_year = np.repeat(np.arange(1, 366), 24)
        self.hour_slot = np.tile(np.arange(24), 365)
        self.global_I, self.beam_Ib, self.diffuse_Id, self.ambient_Ta = weather.mean_year()
        self.io = extraterrestrial_hourly(self.location, self.day_of_year, self.hour_slot)

        self._tables = {}
        for pid, plan in self.plans.items():
            codes = plan.period_codes(self.days)
            self._tables[pid] = (codes, plan.rates[codes], plan.feed_in_rates[codes])
        if base_plan_id == "auto":
            base_plan_id = min(self.plans, key=lambda pid: (self.annual_base_cost(pid), pid))
        if base_plan_id not in self.plans:
            raise ValidationError(f"unknown plan id {base_plan_id!r}", field="base_plan_id")
        self.base_plan_id = base_plan_id
        self.base_costs = self._period_base_costs(base_plan_id)
        self._poa_cache = {}
        self._lock = threading.Lock()

    @classmethod
    def from_config(cls, cfg: RunConfig) -> "SimulationContext":
        load = load_profile(cfg.load_path, fill_gaps=cfg.fill_gaps)
        weather = load_weather(cfg.weather_path, cfg.location, fill_gaps=cfg.fill_gaps)
        plans = load_plans(cfg.plans_dir)
        catalogue = load_catalogue(cfg.catalogue_path)
        for pid in (*cfg.candidate_plan_ids, *([cfg.base_plan_id] if cfg.base_plan_id != "auto" else [])):
            if pid not in plans:
                raise ValidationError(f"unknown plan id {pid!r}", field="candidate_plan_ids",
                                      location=str(cfg.plans_dir))
        for bid in cfg.battery_product_ids:
            if bid not in catalogue.batteries:
                raise ValidationError(f"unknown battery product {bid!r}", field="battery_product_ids",
                                      location=str(cfg.catalogue_path))
        if cfg.pv_spec_id not in catalogue.pv_panels:
            raise ValidationError(f"unknown PV product {cfg.pv_spec_id!r}", field="pv_spec_id",
                                  location=str(cfg.catalogue_path))
        return cls(load, weather, plans, cfg.base_plan_id, catalogue.batteries,
                   catalogue.pv_panels[cfg.pv_spec_id], location=cfg.location, pv_costs=cfg.pv_costs,
                   bop=cfg.balance_of_plant, economics=cfg.economics, maintenance=cfg.maintenance,
                   ground_reflectance=cfg.ground_reflectance, rb_max=cfg.rb_max,
                   loss_convention=cfg.loss_convention, battery_price_factor=cfg.battery_price_factor)

    def with_price_factor(self, factor: float) -> "SimulationContext":
        """Shallow copy sharing all cached geometry, with a different battery price factor."""
        other = object.__new__(SimulationContext)
        other.__dict__.update(self.__dict__)
        other.battery_price_factor = factor
        return other

    def _period_base_costs(self, plan_id):
        """One year of grid-only bills, accumulated by the same loop that bills PV-battery designs.

        Sharing the accumulation order makes an empty design on the base plan
        save exactly zero rather than a rounding residue.
        """
        codes, import_rate, feed_rate = self._tables[plan_id]
        t = self.calendar.periods_per_year_t
        out_q = np.zeros((t, _engine.N_Q_COLS))
        _engine.simulate_horizon(self.load.series, np.zeros(len(codes)), codes, import_rate, feed_rate,
                                 self.bounds, 1, t, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0, 0, 0, 0,
                                 out_q, None)
        days = np.array(self.calendar.period_lengths, dtype=float)
        return out_q[:, 0] + days * self.plans[plan_id].daily_supply_charge

    def annual_base_cost(self, plan_id) -> float:
        return float(np.sum(self._period_base_costs(plan_id)))

    def plane_of_array(self, tilt, azimuth):
        """Cached ``(per-panel undegraded kWh, tilted insolation Wh/m^2)`` for one orientation."""
        key = (float(tilt), float(azimuth))
        hit = self._poa_cache.get(key)
        if hit is not None:
            return hit
        it = plane_of_array(self.location, self.day_of_year, self.hour_slot, self.global_I, self.beam_Ib,
                            self.diffuse_Id, tilt, azimuth, self.ground_reflectance, self.rb_max)
        unit = np.ascontiguousarray(unit_energy(self.pv_spec, it, self.ambient_Ta, self.bop))
        with self._lock:
            self._poa_cache.setdefault(key, (unit, it))
        return self._poa_cache[key]

    def check(self, design: SystemDesign):
        if design.plan_id not in self.plans:
            raise ValidationError(f"unknown plan id {design.plan_id!r}", field="plan_id")
        if design.battery_count_X > 0 and design.battery_product_id not in self.batteries:
            raise ValidationError(f"unknown battery product {design.battery_product_id!r}",
                                  field="battery_product_id")


def simulate(design: SystemDesign, context: SimulationContext, *, trace: bool = False,
             kernel=None) -> SimulationReport:
    """Simulate ``design`` over the whole horizon.

    ``kernel`` overrides the backend hourly loop (used to compare backends).
    """
    ctx = context
    ctx.check(design)
    kernel = kernel or _engine.simulate_horizon
    econ = ctx.economics
    t = econ.billing_periods_per_year_t
    years = econ.lifespan_years
    Q = econ.horizon
    Z = design.panel_count_Z
    X = design.battery_count_X

    unit, it = ctx.plane_of_array(design.tilt_beta, design.azimuth_gamma)
    codes, import_rate, feed_rate = ctx._tables[design.plan_id]

    spec: BatteryUnitSpec | None = ctx.batteries.get(design.battery_product_id) if X else None
    if spec is not None:
        bank = (X * spec.initial_capacity_Cmax0, X * spec.eol_capacity_CEOL, X * degradation_rate(spec),
                spec.max_dod_D, X * spec.rate_Rmax, loss_factor(spec.roundtrip_eta))
    else:
        bank = (0.0, 0.0, 0.0, 1.0, 0.0, 0.0)
    mode = design.operating_mode

    out_q = np.zeros((Q, _engine.N_Q_COLS))
    tr = np.zeros((years * len(unit), _engine.N_TRACE_COLS)) if trace else None
    cmax, c, cycles = kernel(
        ctx.load.series, unit, codes, import_rate, feed_rate, ctx.bounds, years, t, float(Z),
        ctx.pv_spec.annual_degradation, *bank, int(mode.grid_charging), int(mode.shoulder_discharge),
        ctx.maintenance.replacement_interval_years * t, int(ctx.loss_convention == "consistent"), out_q, tr)

    plan = ctx.plans[design.plan_id]
    days = np.array(ctx.calendar.period_lengths, dtype=float)
    supply = np.tile(days * plan.daily_supply_charge, years)
    c_pvbatt = out_q[:, 0] + supply
    c_base = np.tile(ctx.base_costs, years)
    savings = c_base - c_pvbatt

    rated = Z * ctx.pv_spec.rated_power
    s_pv = pv_system_cost(rated, ctx.pv_costs)
    s_b = battery_cost(spec, X, ctx.battery_price_factor) if spec is not None else 0.0
    if Z == 0 and X == 0:
        upkeep = np.zeros(Q)  # nothing installed, nothing to service
    else:
        upkeep = maintenance_schedule(Q, ctx.maintenance, rated, s_b, t)
    value = npv(savings, upkeep, s_pv, s_b, econ)

    flows = cashflow_stream(savings, upkeep, s_pv + s_b, econ)
    try:
        m = mirr(flows, econ.discount_rate, econ.discount_rate, t)
    except UndefinedMetricError:
        m = None
    payback = discounted_payback(flows, econ.discount_rate, t)

    b = ctx.bounds
    insolation = np.tile([it[b[p]:b[p + 1]].sum() / 1000.0 for p in range(t)], years)
    per_quarter = {
        "q": np.arange(1, Q + 1),
        "c_base": c_base,
        "c_pvbatt": c_pvbatt,
        "savings": savings,
        "maintenance": upkeep,
        "pv_generation": out_q[:, 1].copy(),
        "imported": out_q[:, 2].copy(),
        "exported": out_q[:, 3].copy(),
        "battery_throughput": out_q[:, 4].copy(),
        "battery_losses": out_q[:, 5].copy(),
        "cycles": out_q[:, 6].copy(),
        "insolation": insolation,
    }
    annual = []
    for y in range(years):
        s = slice(y * t, (y + 1) * t)
        pv_gen = float(out_q[s, 1].sum())
        exported = float(out_q[s, 3].sum())
        annual.append({
            "year": y + 1,
            "pv_generation": pv_gen,
            "self_consumed": pv_gen - exported,
            "exported": exported,
            "imported": float(out_q[s, 2].sum()),
            "battery_throughput": float(out_q[s, 4].sum()),
            "battery_losses": float(out_q[s, 5].sum()),
        })
    return SimulationReport(
        design=design,
        npv=value,
        mirr=m,
        payback_years=payback,
        capital_pv=s_pv,
        capital_battery=s_b,
        per_quarter=per_quarter,
        annual=annual,
        final_battery_capacity=cmax,
        final_available_capacity=c,
        cumulative_cycles=cycles,
        rated_pv_watts=rated,
        battery_kwh=X * spec.initial_capacity_Cmax0 if spec is not None else 0.0,
        trace=tr,
    )


def objective(design: SystemDesign, context: SimulationContext) -> float:
    return simulate(design, context).npv


class DesignObjective:
    """Maps an optimiser position ``(tilt, azimuth, panels, batteries)`` to NPV."""

    def __init__(self, context: SimulationContext, plan_id: str, mode, battery_product_id: str | None):
        self.context = context
        self.plan_id = plan_id
        self.mode = OperatingMode(mode)
        self.battery_product_id = battery_product_id

    def design(self, position) -> SystemDesign:
        tilt, azimuth, z, x = position
        return SystemDesign(float(tilt), float(azimuth), int(round(z)), int(round(x)),
                            self.battery_product_id, self.mode, self.plan_id)

    def __call__(self, position) -> float:
        return objective(self.design(position), self.context)
