import datetime as dt

import numpy as np
import pytest
import yaml

from conftest import DATA, DEMO_CONFIG
from pvbatt.errors import (
    InvariantError,
    MalformedTimestampError,
    MissingSlotError,
    NegativeValueError,
    SchemaError,
    ValidationError,
)
from pvbatt.ingest import (
    HOURS_PER_YEAR,
    LoadProfile,
    WeatherSeries,
    config_from_dict,
    config_to_dict,
    dump_catalogue,
    dump_config,
    dump_plan,
    load_catalogue,
    load_config,
    load_plan,
    load_plans,
    load_profile,
    load_weather,
    plan_from_dict,
    plan_to_dict,
    resolve_mode,
    write_load_profile,
    write_weather,
)
from pvbatt.solar import GeoLocation


def stamps(year=2013):
    t = dt.datetime(year, 1, 1)
    out = []
    while len(out) < HOURS_PER_YEAR:
        if not (t.month == 2 and t.day == 29):
            out.append(t.isoformat(timespec="minutes"))
        t += dt.timedelta(hours=1)
    return out


def write_load(path, values=None, year=2013, edit=None):
    values = np.full(HOURS_PER_YEAR, 0.5) if values is None else values
    rows = [f"{ts},{float(v)!r}" for ts, v in zip(stamps(year), values)]
    if edit:
        edit(rows)
    path.write_text("# customer_id: c9\ntimestamp,kwh\n" + "\n".join(rows) + "\n")
    return path


def raises_at(exc, fn, *args, **kw):
    with pytest.raises(exc) as info:
        fn(*args, **kw)
    return info.value


class TestLoadProfile:
    def test_bundled(self):
        p = load_profile(DATA / "customer_1_load.csv")
        assert p.customer_id == "customer_1" and p.year == 2013
        assert p.series.shape == (HOURS_PER_YEAR,) and np.all(p.series >= 0)

    def test_round_trip_is_exact(self, tmp_path):
        rng = np.random.default_rng(1)
        prof = LoadProfile("abc", 2013, rng.uniform(0, 3, HOURS_PER_YEAR))
        write_load_profile(prof, tmp_path / "l.csv")
        back = load_profile(tmp_path / "l.csv")
        assert back.customer_id == "abc" and back.series.tobytes() == prof.series.tobytes()

    def test_leap_year_drops_feb_29(self, tmp_path):
        t = dt.datetime(2016, 1, 1)
        rows = []
        while t.year == 2016:
            rows.append(f"{t.isoformat()},1.0")
            t += dt.timedelta(hours=1)
        (tmp_path / "l.csv").write_text("timestamp,kwh\n" + "\n".join(rows))
        p = load_profile(tmp_path / "l.csv")
        assert p.series.shape == (HOURS_PER_YEAR,)
        assert p.days()[59] == dt.date(2016, 3, 1)

    def test_customer_id_defaults_to_stem(self, tmp_path):
        path = write_load(tmp_path / "house7.csv")
        path.write_text(path.read_text().split("\n", 1)[1])
        assert load_profile(path).customer_id == "house7"

    def test_malformed_timestamp(self, tmp_path):
        def edit(rows):
            rows[5] = "2013-01-01 xx,0.5"

        err = raises_at(MalformedTimestampError, load_profile, write_load(tmp_path / "l.csv", edit=edit))
        assert err.field == "timestamp" and "row 8" in err.location

    def test_sub_hour_timestamp(self, tmp_path):
        def edit(rows):
            rows[3] = "2013-01-01T03:30,0.5"

        raises_at(MalformedTimestampError, load_profile, write_load(tmp_path / "l.csv", edit=edit))

    def test_duplicate_timestamp(self, tmp_path):
        def edit(rows):
            rows[4] = rows[3]

        raises_at(MalformedTimestampError, load_profile, write_load(tmp_path / "l.csv", edit=edit))

    def test_missing_slot(self, tmp_path):
        def edit(rows):
            del rows[100]

        err = raises_at(MissingSlotError, load_profile, write_load(tmp_path / "l.csv", edit=edit))
        assert "1 missing" in str(err)

    def test_truncated_year(self, tmp_path):
        def edit(rows):
            del rows[-10:]

        raises_at(MissingSlotError, load_profile, write_load(tmp_path / "l.csv", edit=edit))

    def test_gap_filled_linearly_when_allowed(self, tmp_path):
        values = np.arange(HOURS_PER_YEAR, dtype=float) * 0.001

        def edit(rows):
            del rows[200:203]

        path = write_load(tmp_path / "l.csv", values, edit=edit)
        filled = load_profile(path, fill_gaps=True)
        assert filled.series[200:203] == pytest.approx(values[200:203], abs=1e-12)

    def test_long_gap_never_filled(self, tmp_path):
        def edit(rows):
            del rows[200:204]

        raises_at(MissingSlotError, load_profile, write_load(tmp_path / "l.csv", edit=edit), fill_gaps=True)

    def test_negative_value(self, tmp_path):
        values = np.full(HOURS_PER_YEAR, 0.5)
        values[9] = -0.1
        err = raises_at(NegativeValueError, load_profile, write_load(tmp_path / "l.csv", values))
        assert err.field == "kwh"

    def test_non_numeric(self, tmp_path):
        def edit(rows):
            rows[0] = "2013-01-01T00:00,abc"

        raises_at(SchemaError, load_profile, write_load(tmp_path / "l.csv", edit=edit))

    def test_missing_column(self, tmp_path):
        (tmp_path / "l.csv").write_text("timestamp,energy\n2013-01-01T00:00,1\n")
        err = raises_at(SchemaError, load_profile, tmp_path / "l.csv")
        assert err.field == "kwh"

    def test_two_years_rejected(self, tmp_path):
        def edit(rows):
            rows.append("2014-01-01T00:00,0.5")

        raises_at(MalformedTimestampError, load_profile, write_load(tmp_path / "l.csv", edit=edit))

    def test_all_errors_are_validation_errors(self):
        for exc in (MalformedTimestampError, MissingSlotError, NegativeValueError, SchemaError, InvariantError):
            assert issubclass(exc, ValidationError)


class TestWeather:
    def test_bundled(self):
        w = load_weather(DATA / "sydney_weather.csv")
        assert w.years == (2013, 2014, 2015)
        assert w.global_I.shape == (3, HOURS_PER_YEAR)
        assert w.location == GeoLocation(-33.86, 151.21, 10.0)
        g, b, d, t = w.mean_year()
        assert g.shape == (HOURS_PER_YEAR,)
        assert np.allclose(g, b + d, rtol=0.01, atol=1e-6)

    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(2)
        b = rng.uniform(0, 500, (1, HOURS_PER_YEAR))
        d = rng.uniform(0, 200, (1, HOURS_PER_YEAR))
        w = WeatherSeries(GeoLocation(-30.0, 150.0, 10.0), (2014,), b + d, b, d,
                          rng.uniform(0, 30, (1, HOURS_PER_YEAR)))
        write_weather(w, tmp_path / "w.csv")
        back = load_weather(tmp_path / "w.csv")
        assert back.location == w.location and back.years == (2014,)
        for name in ("global_I", "beam_Ib", "diffuse_Id", "ambient_Ta"):
            assert getattr(back, name).tobytes() == getattr(w, name).tobytes()

    def _write(self, path, g=100.0, b=60.0, d=40.0, meta=True):
        head = "# latitude: -33.0\n# longitude: 151.0\n# timezone_offset: 10\n" if meta else ""
        rows = [f"{ts},{g},{b},{d},20" for ts in stamps()]
        path.write_text(head + "timestamp,global,beam,diffuse,ambient_temp\n" + "\n".join(rows))
        return path

    def test_balance_violation(self, tmp_path):
        err = raises_at(InvariantError, load_weather, self._write(tmp_path / "w.csv", g=150.0))
        assert err.field == "global"

    def test_balance_within_tolerance(self, tmp_path):
        assert load_weather(self._write(tmp_path / "w.csv", g=100.5)).years == (2013,)

    def test_negative_irradiance(self, tmp_path):
        raises_at(NegativeValueError, load_weather, self._write(tmp_path / "w.csv", g=-1.0, b=-1.0, d=0.0))

    def test_location_required(self, tmp_path):
        path = self._write(tmp_path / "w.csv", meta=False)
        raises_at(SchemaError, load_weather, path)
        assert load_weather(path, GeoLocation(-33.0, 151.0, 10.0)).years == (2013,)


PLAN_DOC = {
    "plan_id": "x_tou",
    "retailer": "X",
    "rates": {"offpeak": 0.1, "shoulder": 0.2, "peak": 0.4},
    "feed_in_tariff": 0.07,
    "daily_supply_charge": 0.9,
    "schedule": {
        "weekday": [{"start": 0, "end": 14, "period": "offpeak"}, {"start": 14, "end": 20, "period": "peak"},
                    {"start": 20, "end": 24, "period": "shoulder"}],
        "weekend": [{"start": 0, "end": 24, "period": "offpeak"}],
        "seasons": [{"months": [6, 7, 8], "weekday": [{"start": 0, "end": 24, "period": "shoulder"}]}],
    },
    "feed_in_by_period": {"peak": 0.2},
}


class TestPlans:
    def test_dict_round_trip(self):
        assert plan_to_dict(plan_from_dict(PLAN_DOC)) == PLAN_DOC

    def test_file_round_trip(self, tmp_path):
        plan = plan_from_dict(PLAN_DOC)
        dump_plan(plan, tmp_path / "p.yaml")
        assert load_plan(tmp_path / "p.yaml") == plan

    def test_bundled_plans(self):
        plans = load_plans(DATA / "plans")
        assert set(plans) == {"retailer_a_flat", "retailer_a_tou", "retailer_b_tou", "retailer_c_tou"}

    def test_unknown_field(self):
        err = raises_at(SchemaError, plan_from_dict, {**PLAN_DOC, "discount": 0.1})
        assert err.field == "discount"

    def test_missing_rate(self):
        err = raises_at(SchemaError, plan_from_dict, {**PLAN_DOC, "rates": {"offpeak": 0.1, "peak": 0.4}})
        assert err.field == "shoulder"

    def test_wrong_type(self):
        err = raises_at(SchemaError, plan_from_dict, {**PLAN_DOC, "feed_in_tariff": "low"})
        assert err.field == "feed_in_tariff"

    def test_duplicate_ids(self, tmp_path):
        for name in ("a.yaml", "b.yaml"):
            (tmp_path / name).write_text(yaml.safe_dump(PLAN_DOC))
        raises_at(SchemaError, load_plans, tmp_path)

    def test_empty_directory(self, tmp_path):
        raises_at(SchemaError, load_plans, tmp_path)

    def test_invalid_yaml(self, tmp_path):
        (tmp_path / "p.yaml").write_text("plan_id: [unclosed\n")
        raises_at(SchemaError, load_plan, tmp_path / "p.yaml")


class TestCatalogue:
    def test_round_trip(self, tmp_path):
        cat = load_catalogue(DATA / "catalogue.yaml")
        dump_catalogue(cat, tmp_path / "c.yaml")
        assert load_catalogue(tmp_path / "c.yaml") == cat
        assert set(cat.batteries) == {"powerwall2", "enphase_ac"}

    def test_bad_spec_names_field(self, tmp_path):
        doc = yaml.safe_load((DATA / "catalogue.yaml").read_text())
        doc["batteries"][0]["max_dod_D"] = 1.5
        (tmp_path / "c.yaml").write_text(yaml.safe_dump(doc))
        err = raises_at(InvariantError, load_catalogue, tmp_path / "c.yaml")
        assert "batteries[0]" in err.location

    def test_unknown_spec_field(self, tmp_path):
        doc = yaml.safe_load((DATA / "catalogue.yaml").read_text())
        doc["pv_panels"][0]["colour"] = "black"
        (tmp_path / "c.yaml").write_text(yaml.safe_dump(doc))
        err = raises_at(SchemaError, load_catalogue, tmp_path / "c.yaml")
        assert err.field == "colour"


class TestConfig:
    def test_demo(self, demo_config):
        assert demo_config.base_plan_id == "auto"
        assert demo_config.seed == 2017
        assert demo_config.qpso.swarm_size == 20
        assert demo_config.load_path.is_file()

    def test_round_trip(self, demo_config, tmp_path):
        doc = config_to_dict(demo_config)
        again = config_from_dict(doc, demo_config.base_dir)
        assert again == demo_config

    def test_dump_and_reload_elsewhere(self, demo_config, tmp_path):
        dump_config(demo_config, tmp_path / "c.yaml")
        again = load_config(tmp_path / "c.yaml")
        assert again.load_path == demo_config.load_path
        assert again.economics == demo_config.economics

    def _doc(self, **changes):
        doc = yaml.safe_load(DEMO_CONFIG.read_text())
        doc.update(changes)
        return doc

    def test_unknown_key(self):
        err = raises_at(SchemaError, config_from_dict, self._doc(colour="red"), DATA)
        assert err.field == "colour"

    def test_unknown_nested_key(self):
        err = raises_at(SchemaError, config_from_dict, self._doc(qpso={"particles": 10}), DATA)
        assert err.field == "particles"

    def test_bad_mode(self):
        raises_at(SchemaError, config_from_dict, self._doc(operating_modes=[5]), DATA)

    def test_bad_limits(self):
        err = raises_at(InvariantError, config_from_dict, self._doc(limits={"tilt": [10, 5]}), DATA)
        assert err.field == "limits.tilt"

    def test_bad_factor(self):
        raises_at(InvariantError, config_from_dict, self._doc(sensitivity={"price_factors": [1.2]}), DATA)

    def test_bad_loss_convention(self):
        raises_at(SchemaError, config_from_dict, self._doc(loss_convention="other"), DATA)

    def test_bad_economics_value(self):
        err = raises_at(ValidationError, config_from_dict,
                        self._doc(economics={"lifespan_years": -1}), DATA)
        assert "economics" in err.field

    def test_missing_file(self, tmp_path):
        doc = self._doc(load=str(tmp_path / "nope.csv"))
        (tmp_path / "c.yaml").write_text(yaml.safe_dump(doc))
        err = raises_at(SchemaError, load_config, tmp_path / "c.yaml")
        assert err.field == "load"

    def test_resolve_mode(self):
        assert int(resolve_mode("3")) == 3
        raises_at(SchemaError, resolve_mode, 7)
