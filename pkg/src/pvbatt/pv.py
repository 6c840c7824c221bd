"""PV array energy yield and installed cost."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class PvPanelSpec:
    """Datasheet parameters of one PV module.

    ``mu_mpp`` is the change in absolute efficiency per degree C of
    (cell - ambient) temperature difference, so it is normally a small negative
    number such as ``-0.0041 * 0.171``.
    """

    product_id: str
    area_Ac: float
    eta_stc: float
    mu_mpp: float
    t_noct: float
    rated_power: float
    annual_degradation: float = 0.007

    def __post_init__(self):
        if self.area_Ac <= 0:
            raise ValueError("area_Ac must be positive")
        if not 0.0 < self.eta_stc < 1.0:
            raise ValueError("eta_stc must lie in (0, 1)")
        if self.mu_mpp > 0:
            raise ValueError("mu_mpp must be <= 0")
        if self.rated_power <= 0:
            raise ValueError("rated_power must be positive")
        if not 0.0 <= self.annual_degradation < 1.0:
            raise ValueError("annual_degradation must lie in [0, 1)")


# Sydney-market March 2016 installed prices, $/W by nominal system size in kW
DEFAULT_PRICE_TIERS = ((1.0, 3.20), (1.5, 3.00), (3.0, 2.55), (5.0, 2.35), (10.0, 2.20))


@dataclass(frozen=True)
class PvCostSchedule:
    price_tiers: tuple = DEFAULT_PRICE_TIERS
    stc_multiplier_Mloc: float = 20.73
    stc_price: float = 34.0
    round_certificates: bool = True

    def __post_init__(self):
        tiers = tuple((float(kw), float(price)) for kw, price in self.price_tiers)
        if not tiers:
            raise ValueError("price_tiers must not be empty")
        sizes = [kw for kw, _ in tiers]
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ValueError("price tier sizes must be strictly increasing")
        if any(price <= 0 for _, price in tiers):
            raise ValueError("tier unit prices must be positive")
        object.__setattr__(self, "price_tiers", tiers)


@dataclass(frozen=True)
class BalanceOfPlant:
    eta_e: float = 0.9

    def __post_init__(self):
        if not 0.0 < self.eta_e <= 1.0:
            raise ValueError("eta_e must lie in (0, 1]")


def cell_temperature(ambient_Ta, incident_GT, spec: PvPanelSpec):
    """Cell temperature from the NOCT model, degrees C."""
    return ambient_Ta + (spec.t_noct - 20.0) * (incident_GT / 800.0) * (1.0 - spec.eta_stc)


def operating_efficiency(ambient_Ta, cell_Tc, spec: PvPanelSpec):
    # temperature term uses (Tc - Ta), not (Tc - 25)
    return np.maximum(spec.eta_stc + spec.mu_mpp * (cell_Tc - ambient_Ta), 0.0)[()]


def degradation_factor(spec: PvPanelSpec, years_elapsed: float) -> float:
    return max(0.0, 1.0 - spec.annual_degradation * years_elapsed)


def pv_hourly_energy(spec: PvPanelSpec, panel_count_Z: int, tilted_IT, eta_mpp,
                     bop: BalanceOfPlant, years_elapsed: float = 0.0):
    """Array output in kWh for insolation ``tilted_IT`` in Wh/m^2."""
    if panel_count_Z < 0:
        raise ValueError("panel count must be non-negative")
    delta = degradation_factor(spec, years_elapsed)
    return spec.area_Ac * panel_count_Z * tilted_IT * eta_mpp * bop.eta_e * delta / 1000.0


def unit_energy(spec: PvPanelSpec, tilted_IT, ambient_Ta, bop: BalanceOfPlant):
    """Undegraded hourly kWh of a single panel for arrays of insolation and temperature."""
    tc = cell_temperature(ambient_Ta, tilted_IT, spec)
    eta = operating_efficiency(ambient_Ta, tc, spec)
    return pv_hourly_energy(spec, 1, tilted_IT, eta, bop)


def unit_price(rated_watts: float, schedule: PvCostSchedule) -> float:
    """$/W of the tier nearest in size; ties go to the smaller tier."""
    kw = rated_watts / 1000.0
    best = min(schedule.price_tiers, key=lambda tier: (abs(tier[0] - kw), tier[0]))
    return best[1]


def stc_rebate(rated_watts: float, schedule: PvCostSchedule) -> float:
    certificates = schedule.stc_multiplier_Mloc * rated_watts / 1000.0
    if schedule.round_certificates:
        # guard against 20.73 * 5 landing a hair below an integer
        certificates = math.floor(certificates + 1e-9)
    return certificates * schedule.stc_price


def pv_system_cost(rated_watts: float, schedule: PvCostSchedule) -> float:
    """Installed PV cost net of the STC subsidy, never negative."""
    if rated_watts < 0:
        raise ValueError("rated_watts must be non-negative")
    if rated_watts == 0:
        return 0.0
    gross = unit_price(rated_watts, schedule) * rated_watts
    return max(0.0, gross - stc_rebate(rated_watts, schedule))
