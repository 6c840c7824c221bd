"""Retail time-of-use plans, hourly period classification and billing-period costs."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field

import numpy as np

from .battery import OFFPEAK, PEAK, SHOULDER, TariffPeriodFlags
from .errors import PartitionError, SchemaError

PERIOD_LABELS = {"offpeak": OFFPEAK, "shoulder": SHOULDER, "peak": PEAK}
DAY_TYPES = ("weekday", "weekend")


def _build_day(ranges, where):
    """Turn ``[(start, end, label), ...]`` into 24 period codes, checking the partition."""
    codes = [None] * 24
    for item in ranges:
        start, end, label = item
        if label not in PERIOD_LABELS:
            raise SchemaError(f"unknown period label {label!r}", field="period", location=where)
        if not (isinstance(start, int) and isinstance(end, int)) or not 0 <= start < end <= 24:
            raise SchemaError(f"bad hour range [{start}, {end})", field="hours", location=where)
        for h in range(start, end):
            if codes[h] is not None:
                raise PartitionError(f"hour {h} assigned twice", field="schedule", location=where)
            codes[h] = PERIOD_LABELS[label]
    missing = [h for h, c in enumerate(codes) if c is None]
    if missing:
        raise PartitionError(f"hours {missing} not covered", field="schedule", location=where)
    return codes


@dataclass(frozen=True)
class TouPlan:
    """A retail plan.

    ``schedule`` maps ``"weekday"`` and ``"weekend"`` to lists of
    ``(start_hour, end_hour, label)`` with ``end`` exclusive, and may carry a
    ``"seasons"`` list whose entries add ``"months"`` plus their own
    weekday/weekend lists. ``feed_in_by_period`` optionally overrides the
    flat feed-in tariff for individual periods.
    """

    plan_id: str
    retailer: str
    rate_offpeak: float
    rate_shoulder: float
    rate_peak: float
    feed_in_tariff: float
    daily_supply_charge: float
    schedule: dict
    feed_in_by_period: dict = field(default_factory=dict)
    table: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("rate_offpeak", "rate_shoulder", "rate_peak", "feed_in_tariff", "daily_supply_charge"):
            if getattr(self, name) < 0:
                raise SchemaError("rates must be non-negative", field=name, location=self.plan_id)
        for label, value in self.feed_in_by_period.items():
            if label not in PERIOD_LABELS:
                raise SchemaError(f"unknown period {label!r}", field="feed_in_by_period", location=self.plan_id)
            if value < 0:
                raise SchemaError("rates must be non-negative", field="feed_in_by_period", location=self.plan_id)

        # table[month - 1, weekend, hour] -> period code
        table = np.empty((12, 2, 24), dtype=np.int8)
        for k, day_type in enumerate(DAY_TYPES):
            if day_type not in self.schedule:
                raise SchemaError("missing day type", field=f"schedule.{day_type}", location=self.plan_id)
            table[:, k, :] = _build_day(self.schedule[day_type], f"{self.plan_id}:{day_type}")
        for i, season in enumerate(self.schedule.get("seasons", [])):
            months = season.get("months")
            if not months or any(m not in range(1, 13) for m in months):
                raise SchemaError("season months must be 1..12", field=f"schedule.seasons[{i}].months",
                                  location=self.plan_id)
            for k, day_type in enumerate(DAY_TYPES):
                if day_type in season:
                    codes = _build_day(season[day_type], f"{self.plan_id}:season{i}:{day_type}")
                    for m in months:
                        table[m - 1, k, :] = codes
        object.__setattr__(self, "table", table)

    @property
    def rates(self) -> np.ndarray:
        return np.array([self.rate_offpeak, self.rate_shoulder, self.rate_peak])

    @property
    def feed_in_rates(self) -> np.ndarray:
        labels = ("offpeak", "shoulder", "peak")
        return np.array([self.feed_in_by_period.get(lb, self.feed_in_tariff) for lb in labels])

    def period_code(self, day: dt.date, hour_slot: int) -> int:
        if not 0 <= hour_slot <= 23:
            raise ValueError(f"hour slot out of range: {hour_slot}")
        return int(self.table[day.month - 1, int(day.weekday() >= 5), hour_slot])

    def period_codes(self, days) -> np.ndarray:
        """Hourly period codes for consecutive whole days."""
        months = np.array([d.month - 1 for d in days], dtype=np.intp)
        weekend = np.array([d.weekday() >= 5 for d in days], dtype=np.intp)
        return self.table[months, weekend, :].reshape(-1)


def classify_hour(plan: TouPlan, day: dt.date, hour_slot: int) -> TariffPeriodFlags:
    return TariffPeriodFlags.from_code(plan.period_code(day, hour_slot))


def _check_lengths(series, periods):
    series = np.asarray(series, dtype=float)
    periods = np.asarray(periods)
    if series.ndim != 1 or len(series) % 24:
        raise ValueError(f"hourly series length {len(series)} is not a whole number of days")
    if periods.shape != series.shape:
        raise ValueError(f"period codes length {len(periods)} != series length {len(series)}")
    return series, periods


def base_period_cost(plan0: TouPlan, load, periods) -> float:
    """Cost of supplying ``load`` entirely from the grid under ``plan0``."""
    load, periods = _check_lengths(load, periods)
    days = len(load) // 24
    return float(np.sum(plan0.rates[periods] * load) + days * plan0.daily_supply_charge)


def pvbatt_period_cost(plan: TouPlan, net_balance, periods) -> float:
    """Imports billed at the TOU rate, exports credited at the feed-in tariff."""
    bal, periods = _check_lengths(net_balance, periods)
    days = len(bal) // 24
    imports = np.maximum(bal, 0.0)
    exports = np.maximum(-bal, 0.0)
    energy = np.sum(plan.rates[periods] * imports) - np.sum(plan.feed_in_rates[periods] * exports)
    return float(energy + days * plan.daily_supply_charge)


@dataclass(frozen=True)
class BillingCalendar:
    """A fixed 365-day year split into ``t`` billing periods, repeated over the horizon."""

    periods_per_year_t: int
    period_lengths: tuple
    horizon_quarters_Q: int

    def __post_init__(self):
        if self.periods_per_year_t < 1:
            raise ValueError("periods_per_year_t must be >= 1")
        if len(self.period_lengths) != self.periods_per_year_t:
            raise ValueError("need one length per billing period")
        if sum(self.period_lengths) != 365:
            raise ValueError("billing periods must cover 365 days")
        if self.horizon_quarters_Q % self.periods_per_year_t:
            raise ValueError("horizon must be a whole number of years")

    @classmethod
    def standard(cls, t: int = 4, lifespan_years: int = 20) -> "BillingCalendar":
        month_days = [31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31]
        if 12 % t == 0:
            k = 12 // t
            lengths = [sum(month_days[i:i + k]) for i in range(0, 12, k)]
        else:
            base, extra = divmod(365, t)
            lengths = [base + (1 if i >= t - extra else 0) for i in range(t)]
        return cls(t, tuple(lengths), lifespan_years * t)

    @property
    def years(self) -> int:
        return self.horizon_quarters_Q // self.periods_per_year_t

    @property
    def hour_bounds(self) -> np.ndarray:
        """Start hour of each period within the year, plus 8760 as the final bound."""
        return np.concatenate([[0], np.cumsum(self.period_lengths) * 24]).astype(np.int64)
