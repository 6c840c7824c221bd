"""Hourly battery bank model: cycle-driven capacity fade, tariff-gated dispatch and losses.

A bank of ``X`` identical units is treated as one store whose initial
capacity, end-of-life capacity and charge rate are ``X`` times the unit
values. Charge flows are net energy added to the cells; discharge is gross
energy drawn from the cells (deliverable energy plus loss).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

EPS = 1e-12

OFFPEAK, SHOULDER, PEAK = 0, 1, 2

LOSS_CONVENTIONS = ("paper", "consistent")


class OperatingMode(IntEnum):
    """Battery operating modes.

    1. PV shifting, discharge in peak only.
    2. PV shifting, discharge in shoulder and peak.
    3. Off-peak grid charging plus PV shifting, discharge in peak only.
    4. Off-peak grid charging plus PV shifting, discharge in shoulder and peak.
    """

    MODE1 = 1
    MODE2 = 2
    MODE3 = 3
    MODE4 = 4

    @property
    def masks(self) -> tuple:
        return tuple(int(self == m) for m in OperatingMode)

    @property
    def grid_charging(self) -> bool:
        return self in (OperatingMode.MODE3, OperatingMode.MODE4)

    @property
    def shoulder_discharge(self) -> bool:
        return self in (OperatingMode.MODE2, OperatingMode.MODE4)


@dataclass(frozen=True)
class TariffPeriodFlags:
    offpeak_Iop: int = 1
    shoulder_Ish: int = 0
    peak_Ipk: int = 0

    def __post_init__(self):
        flags = (self.offpeak_Iop, self.shoulder_Ish, self.peak_Ipk)
        if any(f not in (0, 1) for f in flags) or sum(flags) != 1:
            raise ValueError(f"exactly one tariff period flag must be set, got {flags}")

    @classmethod
    def from_code(cls, code: int) -> "TariffPeriodFlags":
        return cls(*(int(code == k) for k in (OFFPEAK, SHOULDER, PEAK)))

    @property
    def code(self) -> int:
        return (OFFPEAK, SHOULDER, PEAK)[(self.offpeak_Iop, self.shoulder_Ish, self.peak_Ipk).index(1)]


@dataclass(frozen=True)
class BatteryUnitSpec:
    product_id: str
    initial_capacity_Cmax0: float
    eol_capacity_CEOL: float
    cycle_life_YEOL: float
    max_dod_D: float
    rate_Rmax: float
    roundtrip_eta: float
    unit_price_Ub: float

    def __post_init__(self):
        if not 0.0 < self.eol_capacity_CEOL <= self.initial_capacity_Cmax0:
            raise ValueError("require 0 < eol_capacity_CEOL <= initial_capacity_Cmax0")
        if self.cycle_life_YEOL <= 0:
            raise ValueError("cycle_life_YEOL must be positive")
        if not 0.0 < self.max_dod_D <= 1.0:
            raise ValueError("max_dod_D must lie in (0, 1]")
        if self.rate_Rmax <= 0:
            raise ValueError("rate_Rmax must be positive")
        if not 0.0 < self.roundtrip_eta <= 1.0:
            raise ValueError("roundtrip_eta must lie in (0, 1]")
        if self.unit_price_Ub < 0:
            raise ValueError("unit_price_Ub must be non-negative")


@dataclass(frozen=True)
class BatteryBankState:
    current_max_capacity: float
    available_capacity_C: float
    cumulative_cycles: float
    unit_count_X: int

    @classmethod
    def fresh(cls, spec: BatteryUnitSpec, unit_count_X: int) -> "BatteryBankState":
        """New bank with empty usable capacity."""
        if unit_count_X < 0:
            raise ValueError("unit count must be non-negative")
        cmax = spec.initial_capacity_Cmax0 * unit_count_X
        return cls(cmax, (1.0 - spec.max_dod_D) * cmax, 0.0, unit_count_X)


@dataclass(frozen=True)
class HourFlows:
    pv_charge_Ebpv: float = 0.0
    grid_charge_Ebg: float = 0.0
    discharge_Ebd: float = 0.0
    loss_pv: float = 0.0
    loss_grid: float = 0.0
    loss_discharge: float = 0.0

    @property
    def total_loss(self) -> float:
        return self.loss_pv + self.loss_grid + self.loss_discharge


def loss_factor(roundtrip_eta: float) -> float:
    if not 0.0 < roundtrip_eta <= 1.0:
        raise ValueError("roundtrip efficiency must lie in (0, 1]")
    return (1.0 - roundtrip_eta) / 2.0


def degradation_rate(spec: BatteryUnitSpec) -> float:
    """Capacity fade per full cycle, kWh/cycle (per unit)."""
    return (spec.initial_capacity_Cmax0 - spec.eol_capacity_CEOL) / spec.cycle_life_YEOL


def battery_cost(spec: BatteryUnitSpec, unit_count_X: int, price_factor: float = 1.0) -> float:
    if unit_count_X < 0:
        raise ValueError("unit count must be non-negative")
    return spec.unit_price_Ub * price_factor * unit_count_X


def step_scalar(cmax, c, cycles, cmax_floor, zeta, dod, rate, F, grid_gate, discharge_gate,
                pv, load, consistent):
    """One hour of the bank model on plain floats.

    ``zeta`` and ``rate`` are bank-level (already multiplied by the unit
    count). ``grid_gate`` and ``discharge_gate`` are the 0/1 products of mode
    masks and tariff-period indicators. Returns
    ``(cmax, c, cycles, e_bpv, e_bg, e_bd, l_pv, l_g, l_d)``.
    """
    keep = 1.0 - F
    surplus = pv - load
    headroom = cmax - c
    if headroom < EPS:
        headroom = 0.0
    usable = c - cmax * (1.0 - dod)
    if usable < EPS:
        usable = 0.0

    e_bpv = min(headroom, surplus * keep, rate * keep)
    if e_bpv < EPS:
        e_bpv = 0.0
    l_pv = min(headroom / keep, surplus, rate)
    l_pv = l_pv * F if l_pv > EPS else 0.0

    e_bg = 0.0
    l_g = 0.0
    if grid_gate:
        e_bg = min(headroom, rate * keep) - e_bpv
        if e_bg < EPS:
            e_bg = 0.0
        if consistent:
            l_g = e_bg / keep * F
        else:
            l_g = min(headroom / keep, rate) - e_bpv
            l_g = l_g * F if l_g > EPS else 0.0

    e_bd = 0.0
    l_d = 0.0
    if discharge_gate:
        e_bd = min(usable, -surplus / keep, rate)
        if e_bd < EPS:
            e_bd = 0.0
        if consistent:
            l_d = e_bd * F
        else:
            l_d = min(-surplus, rate, usable)
            l_d = l_d * F if l_d > EPS else 0.0

    throughput = e_bpv + e_bg + e_bd
    y = throughput / (2.0 * dod * cmax) if cmax > 0.0 else 0.0
    c = c - e_bd + e_bpv + e_bg
    cmax_new = cmax - y * zeta
    if cmax_new < cmax_floor:
        cmax_new = cmax_floor
    if c > cmax_new:
        c = cmax_new
    return cmax_new, c, cycles + y, e_bpv, e_bg, e_bd, l_pv, l_g, l_d


def step_hour(state: BatteryBankState, spec: BatteryUnitSpec, mode: OperatingMode,
              flags: TariffPeriodFlags, pv_energy: float, load_energy: float,
              loss_convention: str = "paper"):
    """Advance the bank by one hour. Returns ``(new_state, HourFlows)``.

    ``loss_convention="paper"`` takes the discharge loss on the unscaled load
    deficit and forms the grid-charge loss by subtracting the net PV charge
    from a gross quantity, so neither loss is exactly ``F`` times its gross
    flow when those terms bind. ``"consistent"`` instead takes every loss as
    the exact gross/net difference of its flow.
    """
    if pv_energy < 0 or load_energy < 0:
        raise ValueError("pv_energy and load_energy must be non-negative")
    if loss_convention not in LOSS_CONVENTIONS:
        raise ValueError(f"unknown loss convention {loss_convention!r}")
    if not isinstance(flags, TariffPeriodFlags):
        flags = TariffPeriodFlags(*flags)
    mode = OperatingMode(mode)
    X = state.unit_count_X
    if X == 0:
        return state, HourFlows()

    grid_gate = int(mode.grid_charging and flags.offpeak_Iop == 1)
    discharge_gate = int(flags.peak_Ipk == 1 or (mode.shoulder_discharge and flags.shoulder_Ish == 1))
    out = step_scalar(
        state.current_max_capacity,
        state.available_capacity_C,
        state.cumulative_cycles,
        X * spec.eol_capacity_CEOL,
        X * degradation_rate(spec),
        spec.max_dod_D,
        X * spec.rate_Rmax,
        loss_factor(spec.roundtrip_eta),
        grid_gate,
        discharge_gate,
        float(pv_energy),
        float(load_energy),
        loss_convention == "consistent",
    )
    cmax, c, cycles = out[:3]
    return BatteryBankState(cmax, c, cycles, X), HourFlows(*out[3:])
