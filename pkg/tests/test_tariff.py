import datetime as dt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pvbatt.errors import PartitionError, SchemaError
from pvbatt.tariff import BillingCalendar, TouPlan, base_period_cost, classify_hour, pvbatt_period_cost

WEEKDAY = [(0, 7, "offpeak"), (7, 14, "shoulder"), (14, 20, "peak"), (20, 22, "shoulder"), (22, 24, "offpeak")]
ALL_OFF = [(0, 24, "offpeak")]


def make_plan(**kw):
    base = dict(plan_id="p", retailer="r", rate_offpeak=0.12, rate_shoulder=0.22, rate_peak=0.50,
                feed_in_tariff=0.06, daily_supply_charge=1.0, schedule={"weekday": WEEKDAY, "weekend": ALL_OFF})
    base.update(kw)
    return TouPlan(**base)


PLAN = make_plan()
WEDNESDAY = dt.date(2013, 1, 2)
SUNDAY = dt.date(2013, 1, 6)


class TestClassification:
    def test_weekday_peak(self):
        f = classify_hour(PLAN, WEDNESDAY, 15)
        assert (f.offpeak_Iop, f.shoulder_Ish, f.peak_Ipk) == (0, 0, 1)

    def test_weekend_offpeak(self):
        f = classify_hour(PLAN, SUNDAY, 15)
        assert (f.offpeak_Iop, f.shoulder_Ish, f.peak_Ipk) == (1, 0, 0)

    def test_week_partition(self):
        for d in range(7):
            day = WEDNESDAY + dt.timedelta(days=d)
            for h in range(24):
                f = classify_hour(PLAN, day, h)
                assert f.offpeak_Iop + f.shoulder_Ish + f.peak_Ipk == 1

    def test_season_override(self):
        plan = make_plan(schedule={"weekday": WEEKDAY, "weekend": ALL_OFF,
                                   "seasons": [{"months": [7], "weekday": [(0, 24, "peak")]}]})
        assert plan.period_code(dt.date(2013, 7, 3), 3) == 2
        assert plan.period_code(dt.date(2013, 8, 7), 3) == 0
        assert plan.period_code(dt.date(2013, 7, 6), 3) == 0  # weekend untouched

    def test_vectorised_codes_agree(self):
        days = [dt.date(2013, 1, 1) + dt.timedelta(days=i) for i in range(14)]
        codes = PLAN.period_codes(days)
        assert [int(c) for c in codes] == [PLAN.period_code(d, h) for d in days for h in range(24)]


class TestPlanValidation:
    def test_gap_rejected(self):
        with pytest.raises(PartitionError):
            make_plan(schedule={"weekday": [(0, 23, "offpeak")], "weekend": ALL_OFF})

    def test_overlap_rejected(self):
        with pytest.raises(PartitionError):
            make_plan(schedule={"weekday": [(0, 24, "offpeak"), (5, 6, "peak")], "weekend": ALL_OFF})

    def test_unknown_label(self):
        with pytest.raises(SchemaError):
            make_plan(schedule={"weekday": [(0, 24, "super")], "weekend": ALL_OFF})

    def test_missing_day_type(self):
        with pytest.raises(SchemaError):
            make_plan(schedule={"weekday": WEEKDAY})

    def test_negative_rate(self):
        with pytest.raises(SchemaError):
            make_plan(rate_peak=-0.1)


def _codes(days=1, start=WEDNESDAY):
    return PLAN.period_codes([start + dt.timedelta(days=i) for i in range(days)])


class TestCosts:
    def test_supply_only(self):
        codes = _codes(90)
        assert base_period_cost(PLAN, np.zeros(24 * 90), codes) == pytest.approx(90.0)

    def test_single_peak_hour(self):
        plan = make_plan(daily_supply_charge=0.0, rate_peak=0.5)
        load = np.zeros(24)
        load[15] = 1.0
        assert base_period_cost(plan, load, _codes()) == pytest.approx(0.5)

    def test_mixed_profile_matches_accumulation(self):
        rng = np.random.default_rng(3)
        load = rng.uniform(0, 2, 72)
        days = [WEDNESDAY + dt.timedelta(days=i) for i in range(3)]
        rate = {"offpeak": 0.12, "shoulder": 0.22, "peak": 0.50}
        expected = 0.0
        for i, day in enumerate(days):
            for h in range(24):
                label = "offpeak"
                if day.weekday() < 5:
                    for s, e, lb in WEEKDAY:
                        if s <= h < e:
                            label = lb
                expected += rate[label] * load[24 * i + h]
            expected += 1.0
        assert base_period_cost(PLAN, load, PLAN.period_codes(days)) == pytest.approx(expected, rel=1e-13)

    def test_zero_balance(self):
        assert pvbatt_period_cost(PLAN, np.zeros(48), _codes(2)) == pytest.approx(2.0)

    def test_single_export_hour(self):
        plan = make_plan(daily_supply_charge=0.0)
        bal = np.zeros(24)
        bal[12] = -2.0
        assert pvbatt_period_cost(plan, bal, _codes()) == pytest.approx(-0.12)

    def test_feed_in_override(self):
        plan = make_plan(daily_supply_charge=0.0, feed_in_by_period={"peak": 0.3})
        bal = np.zeros(24)
        bal[15] = -1.0
        bal[10] = -1.0
        assert pvbatt_period_cost(plan, bal, _codes()) == pytest.approx(-0.36)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            base_period_cost(PLAN, np.zeros(25), np.zeros(25, dtype=int))
        with pytest.raises(ValueError):
            pvbatt_period_cost(PLAN, np.zeros(48), _codes(1))

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(0.0, 5.0), min_size=48, max_size=48))
    def test_reduction_to_base(self, load):
        codes = _codes(2)
        assert pvbatt_period_cost(PLAN, load, codes) == base_period_cost(PLAN, load, codes)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(-5.0, 5.0), min_size=48, max_size=48))
    def test_additive_over_days(self, bal):
        codes = _codes(2)
        whole = pvbatt_period_cost(PLAN, bal, codes)
        parts = pvbatt_period_cost(PLAN, bal[:24], codes[:24]) + pvbatt_period_cost(PLAN, bal[24:], codes[24:])
        assert whole == pytest.approx(parts, rel=1e-12, abs=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(0.0, 5.0), min_size=24, max_size=24), st.sampled_from(
        ["rate_offpeak", "rate_shoulder", "rate_peak"]), st.floats(0.0, 1.0))
    def test_monotone_in_rates(self, load, which, bump):
        codes = _codes()
        dearer = make_plan(**{which: getattr(PLAN, which) + bump})
        assert base_period_cost(PLAN, load, codes) <= base_period_cost(dearer, load, codes)


class TestCalendar:
    def test_quarters(self):
        cal = BillingCalendar.standard(4, 20)
        assert cal.period_lengths == (90, 91, 92, 92)
        assert cal.horizon_quarters_Q == 80
        assert cal.years == 20
        assert list(cal.hour_bounds) == [0, 2160, 4344, 6552, 8760]

    def test_monthly(self):
        cal = BillingCalendar.standard(12, 1)
        assert sum(cal.period_lengths) == 365 and cal.period_lengths[1] == 28

    def test_uneven_split(self):
        cal = BillingCalendar.standard(5, 2)
        assert sum(cal.period_lengths) == 365 and cal.horizon_quarters_Q == 10

    def test_invalid(self):
        with pytest.raises(ValueError):
            BillingCalendar(4, (90, 90, 90, 90), 80)
        with pytest.raises(ValueError):
            BillingCalendar(0, (), 0)
