"""Discounting, maintenance schedule, NPV and secondary investment metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UndefinedMetricError


@dataclass(frozen=True)
class EconomicAssumptions:
    real_discount_annual: float = 0.0392
    electricity_growth_annual: float = 0.02
    lifespan_years: int = 20
    billing_periods_per_year_t: int = 4

    def __post_init__(self):
        if self.real_discount_annual <= -1 or self.electricity_growth_annual <= -1:
            raise ValueError("annual rates must exceed -1")
        if self.lifespan_years < 1:
            raise ValueError("lifespan_years must be >= 1")
        if self.billing_periods_per_year_t < 1:
            raise ValueError("billing_periods_per_year_t must be >= 1")

    @property
    def horizon(self) -> int:
        return self.lifespan_years * self.billing_periods_per_year_t

    @property
    def discount_rate(self) -> float:
        return quarterly_effective_rate(self.real_discount_annual, self.billing_periods_per_year_t)

    @property
    def growth_rate(self) -> float:
        return quarterly_effective_rate(self.electricity_growth_annual, self.billing_periods_per_year_t)


@dataclass(frozen=True)
class MaintenanceParams:
    minor_service_cost: float = 200.0
    major_service_cost: float = 400.0
    inverter_unit_cost_Uinv: float = 0.41
    kappa_inv: float = 0.69
    kappa_b: float = 0.47
    service_interval_years: int = 5
    replacement_interval_years: int = 10

    def __post_init__(self):
        for name in ("minor_service_cost", "major_service_cost", "inverter_unit_cost_Uinv",
                     "kappa_inv", "kappa_b"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.kappa_inv > 1 or self.kappa_b > 1:
            raise ValueError("cost reduction factors must be <= 1")
        if self.service_interval_years < 1 or self.replacement_interval_years < 1:
            raise ValueError("intervals must be >= 1 year")


def quarterly_effective_rate(annual: float, t: int) -> float:
    """Per-period rate equivalent to ``annual`` compounded ``t`` times a year."""
    if annual <= -1 or t < 1:
        raise ValueError("need annual > -1 and t >= 1")
    return (1.0 + annual) ** (1.0 / t) - 1.0


def _positive_multiple(q: int, every: int) -> bool:
    return q - 1 > 0 and (q - 1) % every == 0


def is_replacement_period(q: int, params: MaintenanceParams, t: int) -> bool:
    """True for the billing periods that start with a battery/inverter replacement."""
    return _positive_multiple(q, params.replacement_interval_years * t)


def maintenance_cost(q: int, params: MaintenanceParams, rated_ac_watts: float,
                     battery_capital_Sb: float, t: int) -> float:
    """Service and replacement spend in billing period ``q`` (1-based).

    The inverter replacement is priced per AC watt of the installed array.
    """
    if q < 1:
        raise ValueError("billing period index starts at 1")
    if is_replacement_period(q, params, t):
        return (params.major_service_cost
                + params.kappa_inv * params.inverter_unit_cost_Uinv * rated_ac_watts
                + params.kappa_b * battery_capital_Sb)
    if _positive_multiple(q, params.service_interval_years * t):
        return params.minor_service_cost
    return 0.0


def maintenance_schedule(Q: int, params: MaintenanceParams, rated_ac_watts: float,
                         battery_capital_Sb: float, t: int) -> np.ndarray:
    return np.array([maintenance_cost(q, params, rated_ac_watts, battery_capital_Sb, t)
                     for q in range(1, Q + 1)])


def npv(savings_per_quarter, maintenance_per_quarter, capital_Spv: float, capital_Sb: float,
        assumptions: EconomicAssumptions) -> float:
    savings = np.asarray(savings_per_quarter, dtype=float)
    upkeep = np.asarray(maintenance_per_quarter, dtype=float)
    Q = assumptions.horizon
    if savings.shape != (Q,) or upkeep.shape != (Q,):
        raise ValueError(f"series must have length Q={Q}")
    q = np.arange(1, Q + 1)
    discount = (1.0 + assumptions.discount_rate) ** q
    escalation = (1.0 + assumptions.growth_rate) ** q
    return float(np.sum(savings * escalation / discount) - np.sum(upkeep / discount)
                 - (capital_Spv + capital_Sb)) + 0.0  # no negative zero


def cashflow_stream(savings_per_quarter, maintenance_per_quarter, capital: float,
                    assumptions: EconomicAssumptions) -> np.ndarray:
    """Undiscounted stream: period 0 is the capital outlay, then escalated savings net of upkeep."""
    savings = np.asarray(savings_per_quarter, dtype=float)
    upkeep = np.asarray(maintenance_per_quarter, dtype=float)
    q = np.arange(1, len(savings) + 1)
    inflows = savings * (1.0 + assumptions.growth_rate) ** q - upkeep
    return np.concatenate([[-capital], inflows])


def mirr(cashflows, finance_rate: float, reinvest_rate: float, periods_per_year: int = 4) -> float:
    """Modified IRR of a per-period stream, annualised.

    Raises UndefinedMetricError unless the stream has both signs.
    """
    cf = np.asarray(cashflows, dtype=float)
    n = len(cf) - 1
    if n < 1 or not (np.any(cf < 0) and np.any(cf > 0)):
        raise UndefinedMetricError("MIRR needs at least one negative and one positive cash flow")
    k = np.arange(len(cf))
    pv_out = -np.sum(np.where(cf < 0, cf, 0.0) / (1.0 + finance_rate) ** k)
    fv_in = np.sum(np.where(cf > 0, cf, 0.0) * (1.0 + reinvest_rate) ** (n - k))
    per_period = (fv_in / pv_out) ** (1.0 / n) - 1.0
    return float((1.0 + per_period) ** periods_per_year - 1.0)


def discounted_payback(cashflows, discount_quarterly: float, periods_per_year: int = 4):
    """Years until cumulative discounted cash flow reaches zero, or None if never.

    The crossing is interpolated linearly inside the period where it happens.
    """
    cf = np.asarray(cashflows, dtype=float)
    if len(cf) == 0:
        return None
    cumulative = cf[0]
    if cumulative >= 0:
        return 0.0
    for k in range(1, len(cf)):
        step = cf[k] / (1.0 + discount_quarterly) ** k
        if cumulative + step >= 0:
            return ((k - 1) + (-cumulative / step)) / periods_per_year
        cumulative += step
    return None
