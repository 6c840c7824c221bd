"""Loaders, validators and writers for every input file.

Hourly series are CSV with a header row and one ISO-8601 local-standard-time
timestamp per row. Optional ``# key: value`` comment lines before the header
carry metadata (customer id, weather station location). Feb 29 rows are
dropped so every year has 8760 slots.

Plans, catalogues and run configs are YAML documents; see ``docs/formats.md``.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import logging
import math
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np
import yaml

from .battery import LOSS_CONVENTIONS, BatteryUnitSpec, OperatingMode
from .economics import EconomicAssumptions, MaintenanceParams
from .errors import (
    InvariantError,
    MalformedTimestampError,
    MissingSlotError,
    NegativeValueError,
    SchemaError,
    ValidationError,
)
from .pv import BalanceOfPlant, PvCostSchedule, PvPanelSpec
from .qpso import SwarmConfig
from .solar import GeoLocation
from .tariff import PERIOD_LABELS, TouPlan

log = logging.getLogger(__name__)

HOURS_PER_YEAR = 8760
MAX_FILL_GAP = 3
BALANCE_TOLERANCE = 0.01
ONE_HOUR = dt.timedelta(hours=1)

LOAD_COLUMNS = ("timestamp", "kwh")
WEATHER_COLUMNS = ("timestamp", "global", "beam", "diffuse", "ambient_temp")


@dataclass(frozen=True)
class LoadProfile:
    customer_id: str
    year: int
    series: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.series.shape != (HOURS_PER_YEAR,):
            raise InvariantError(f"load profile needs {HOURS_PER_YEAR} values", field="kwh")
        if np.any(self.series < 0):
            raise NegativeValueError("negative load", field="kwh")

    def days(self) -> list:
        start = dt.date(self.year, 1, 1)
        out = []
        d = start
        while len(out) < 365:
            if not (d.month == 2 and d.day == 29):
                out.append(d)
            d += dt.timedelta(days=1)
        return out


@dataclass(frozen=True)
class WeatherSeries:
    """Aligned hourly horizontal insolation (Wh/m^2) and ambient temperature, one row per year."""

    location: GeoLocation
    years: tuple
    global_I: np.ndarray = field(repr=False)
    beam_Ib: np.ndarray = field(repr=False)
    diffuse_Id: np.ndarray = field(repr=False)
    ambient_Ta: np.ndarray = field(repr=False)

    def mean_year(self):
        """Per-slot averages across the supplied years: (global, beam, diffuse, ambient)."""
        return (self.global_I.mean(axis=0), self.beam_Ib.mean(axis=0),
                self.diffuse_Id.mean(axis=0), self.ambient_Ta.mean(axis=0))


# --------------------------------------------------------------------------- CSV series


def _read_csv(path, columns):
    text = Path(path).read_text()
    meta = {}
    lines = text.splitlines()
    body_start = 0
    for i, line in enumerate(lines):
        if line.startswith("#"):
            key, sep, value = line[1:].partition(":")
            if sep:
                meta[key.strip()] = value.strip()
            body_start = i + 1
        else:
            break
    reader = csv.reader(lines[body_start:])
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise SchemaError("empty file", location=str(path)) from None
    missing = [c for c in columns if c not in header]
    if missing:
        raise SchemaError(f"missing columns {missing}", field=missing[0], location=f"{path}:header")
    idx = [header.index(c) for c in columns]
    rows = []
    for n, rec in enumerate(reader, start=body_start + 2):
        if not rec or all(not x.strip() for x in rec):
            continue
        rows.append((n, [rec[i].strip() if i < len(rec) else "" for i in idx]))
    return meta, rows


def _parse_rows(path, rows, columns, *, nonnegative):
    out = []
    for line, values in rows:
        try:
            ts = dt.datetime.fromisoformat(values[0])
        except ValueError:
            raise MalformedTimestampError(f"unparseable timestamp {values[0]!r}", field="timestamp",
                                          location=f"{path}:row {line}") from None
        if ts.tzinfo is not None or ts.minute or ts.second or ts.microsecond:
            raise MalformedTimestampError("timestamps must be naive whole hours", field="timestamp",
                                          location=f"{path}:row {line}")
        nums = []
        for name, raw in zip(columns[1:], values[1:]):
            try:
                v = float(raw)
            except ValueError:
                raise SchemaError(f"not a number: {raw!r}", field=name,
                                  location=f"{path}:row {line}") from None
            if not math.isfinite(v):
                raise SchemaError("non-finite value", field=name, location=f"{path}:row {line}")
            if name in nonnegative and v < 0:
                raise NegativeValueError(f"negative value {v}", field=name, location=f"{path}:row {line}")
            nums.append(v)
        out.append((line, ts, nums))
    return out


def _align_year(path, parsed, year, fill_gaps):
    """Validate one calendar year of hourly rows and return an (8760, k) array."""
    rows = [r for r in parsed if not (r[1].month == 2 and r[1].day == 29)]
    expected = dt.datetime(year, 1, 1)
    values = []
    prev_line = None
    for line, ts, nums in rows:
        if ts < expected:
            raise MalformedTimestampError(f"duplicate or out-of-order timestamp {ts.isoformat()}",
                                          field="timestamp", location=f"{path}:row {line}")
        gap = 0
        probe = expected
        while probe < ts:
            if not (probe.month == 2 and probe.day == 29):
                gap += 1
            probe += ONE_HOUR
        if gap:
            if not fill_gaps or gap > MAX_FILL_GAP or not values:
                raise MissingSlotError(f"{gap} missing hour(s) before {ts.isoformat()}",
                                       field="timestamp", location=f"{path}:row {line}")
            log.warning("%s: filling %d missing hour(s) before row %d by linear interpolation",
                        path, gap, line)
            left = np.array(values[-1])
            right = np.array(nums)
            for k in range(1, gap + 1):
                values.append(list(left + (right - left) * k / (gap + 1)))
        values.append(nums)
        expected = ts + ONE_HOUR
        if expected.month == 2 and expected.day == 29:
            expected += dt.timedelta(days=1)
        prev_line = line
    if len(values) != HOURS_PER_YEAR:
        where = f"{path}:row {prev_line}" if prev_line else str(path)
        raise MissingSlotError(f"year {year} has {len(values)} hourly slots, expected {HOURS_PER_YEAR}",
                               field="timestamp", location=where)
    return np.array(values, dtype=float)


def load_profile(path, *, fill_gaps: bool = False) -> LoadProfile:
    meta, rows = _read_csv(path, LOAD_COLUMNS)
    parsed = _parse_rows(path, rows, LOAD_COLUMNS, nonnegative={"kwh"})
    if not parsed:
        raise MissingSlotError("no data rows", location=str(path))
    years = sorted({ts.year for _, ts, _ in parsed})
    if len(years) != 1:
        raise MalformedTimestampError(f"load profile spans years {years}", field="timestamp",
                                      location=str(path))
    data = _align_year(path, parsed, years[0], fill_gaps)
    return LoadProfile(meta.get("customer_id", Path(path).stem), years[0], data[:, 0])


def load_weather(path, location: GeoLocation | None = None, *, fill_gaps: bool = False) -> WeatherSeries:
    meta, rows = _read_csv(path, WEATHER_COLUMNS)
    parsed = _parse_rows(path, rows, WEATHER_COLUMNS, nonnegative={"global", "beam", "diffuse"})
    if location is None:
        try:
            location = GeoLocation(float(meta["latitude"]), float(meta["longitude"]),
                                   float(meta.get("timezone_offset", 0.0)))
        except KeyError as exc:
            raise SchemaError("weather file lacks location metadata", field=exc.args[0],
                              location=str(path)) from None
        except ValueError as exc:
            raise SchemaError(str(exc), field="location", location=str(path)) from None
    for line, _, (g, b, d, _t) in parsed:
        if abs(g - (b + d)) > max(BALANCE_TOLERANCE * g, 1e-6):
            raise InvariantError(f"global {g} != beam {b} + diffuse {d}", field="global",
                                 location=f"{path}:row {line}")
    if not parsed:
        raise MissingSlotError("no data rows", location=str(path))
    years = sorted({ts.year for _, ts, _ in parsed})
    blocks = [_align_year(path, [r for r in parsed if r[1].year == y], y, fill_gaps) for y in years]
    stack = np.stack(blocks)
    return WeatherSeries(location, tuple(years), stack[:, :, 0], stack[:, :, 1], stack[:, :, 2],
                         stack[:, :, 3])


def _hour_stamps(year):
    t = dt.datetime(year, 1, 1)
    out = []
    while len(out) < HOURS_PER_YEAR:
        if not (t.month == 2 and t.day == 29):
            out.append(t.isoformat(timespec="minutes"))
        t += ONE_HOUR
    return out


def write_load_profile(profile: LoadProfile, path) -> None:
    buf = io.StringIO()
    buf.write(f"# customer_id: {profile.customer_id}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(LOAD_COLUMNS)
    for ts, v in zip(_hour_stamps(profile.year), profile.series):
        w.writerow([ts, repr(float(v))])
    Path(path).write_text(buf.getvalue())


def write_weather(weather: WeatherSeries, path) -> None:
    buf = io.StringIO()
    loc = weather.location
    buf.write(f"# latitude: {loc.latitude!r}\n# longitude: {loc.longitude!r}\n"
              f"# timezone_offset: {loc.timezone_offset!r}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(WEATHER_COLUMNS)
    for k, year in enumerate(weather.years):
        cols = (weather.global_I[k], weather.beam_Ib[k], weather.diffuse_Id[k], weather.ambient_Ta[k])
        for i, ts in enumerate(_hour_stamps(year)):
            w.writerow([ts, *(repr(float(c[i])) for c in cols)])
    Path(path).write_text(buf.getvalue())


# --------------------------------------------------------------------------- YAML documents


def _read_yaml(path):
    try:
        doc = yaml.safe_load(Path(path).read_text())
    except OSError as exc:
        raise SchemaError(f"cannot read file: {exc.strerror}", location=str(path)) from None
    except yaml.YAMLError as exc:
        raise SchemaError(f"invalid YAML: {exc}", location=str(path)) from None
    if not isinstance(doc, dict):
        raise SchemaError("document must be a mapping", location=str(path))
    return doc


def _take(doc, key, kind, where, default=...):
    if key not in doc:
        if default is ...:
            raise SchemaError("required field missing", field=key, location=where)
        return default
    value = doc[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise SchemaError(f"expected {getattr(kind, '__name__', kind)}, got {type(value).__name__}",
                          field=key, location=where)
    return value


def _reject_unknown(doc, allowed, where):
    extra = sorted(set(doc) - set(allowed))
    if extra:
        raise SchemaError("unknown field", field=extra[0], location=where)


def _build(cls, doc, where, prefix=""):
    """Instantiate a dataclass from a mapping, naming the field on any failure."""
    names = {f.name for f in fields(cls) if f.init}
    _reject_unknown(doc, names, where)
    try:
        return cls(**doc)
    except TypeError as exc:
        raise SchemaError(str(exc), field=prefix or cls.__name__, location=where) from None
    except ValidationError:
        raise
    except ValueError as exc:
        msg = str(exc)
        bad = next((n for n in sorted(names, key=len, reverse=True) if n in msg), None)
        raise InvariantError(msg, field=f"{prefix}{bad}" if bad else prefix or None,
                             location=where) from None


def plan_from_dict(doc: dict, where: str = "<plan>") -> TouPlan:
    _reject_unknown(doc, {"plan_id", "retailer", "rates", "feed_in_tariff", "feed_in_by_period",
                          "daily_supply_charge", "schedule"}, where)
    rates = _take(doc, "rates", dict, where)
    _reject_unknown(rates, PERIOD_LABELS, f"{where}:rates")
    schedule_doc = _take(doc, "schedule", dict, where)
    _reject_unknown(schedule_doc, {"weekday", "weekend", "seasons"}, f"{where}:schedule")

    def ranges(items, loc):
        if not isinstance(items, list):
            raise SchemaError("expected a list of hour ranges", field="schedule", location=loc)
        out = []
        for i, item in enumerate(items):
            if not isinstance(item, dict):
                raise SchemaError("hour range must be a mapping", field="schedule", location=f"{loc}[{i}]")
            _reject_unknown(item, {"start", "end", "period"}, f"{loc}[{i}]")
            out.append((_take(item, "start", int, f"{loc}[{i}]"), _take(item, "end", int, f"{loc}[{i}]"),
                        _take(item, "period", str, f"{loc}[{i}]")))
        return out

    schedule = {k: ranges(schedule_doc[k], f"{where}:schedule.{k}")
                for k in ("weekday", "weekend") if k in schedule_doc}
    if "seasons" in schedule_doc:
        seasons = []
        for i, s in enumerate(schedule_doc["seasons"] or []):
            loc = f"{where}:schedule.seasons[{i}]"
            if not isinstance(s, dict):
                raise SchemaError("season must be a mapping", field="seasons", location=loc)
            _reject_unknown(s, {"months", "weekday", "weekend"}, loc)
            entry = {"months": list(_take(s, "months", list, loc))}
            for k in ("weekday", "weekend"):
                if k in s:
                    entry[k] = ranges(s[k], f"{loc}.{k}")
            seasons.append(entry)
        schedule["seasons"] = seasons
    fib = _take(doc, "feed_in_by_period", dict, where, {}) or {}
    return TouPlan(
        plan_id=_take(doc, "plan_id", str, where),
        retailer=_take(doc, "retailer", str, where, ""),
        rate_offpeak=_take(rates, "offpeak", float, f"{where}:rates"),
        rate_shoulder=_take(rates, "shoulder", float, f"{where}:rates"),
        rate_peak=_take(rates, "peak", float, f"{where}:rates"),
        feed_in_tariff=_take(doc, "feed_in_tariff", float, where),
        daily_supply_charge=_take(doc, "daily_supply_charge", float, where),
        schedule=schedule,
        feed_in_by_period={k: float(v) for k, v in fib.items()},
    )


def plan_to_dict(plan: TouPlan) -> dict:
    def ranges(items):
        return [{"start": s, "end": e, "period": p} for s, e, p in items]

    schedule = {k: ranges(plan.schedule[k]) for k in ("weekday", "weekend")}
    if plan.schedule.get("seasons"):
        schedule["seasons"] = [
            {"months": list(s["months"]), **{k: ranges(s[k]) for k in ("weekday", "weekend") if k in s}}
            for s in plan.schedule["seasons"]
        ]
    doc = {
        "plan_id": plan.plan_id,
        "retailer": plan.retailer,
        "rates": {"offpeak": plan.rate_offpeak, "shoulder": plan.rate_shoulder, "peak": plan.rate_peak},
        "feed_in_tariff": plan.feed_in_tariff,
        "daily_supply_charge": plan.daily_supply_charge,
        "schedule": schedule,
    }
    if plan.feed_in_by_period:
        doc["feed_in_by_period"] = dict(plan.feed_in_by_period)
    return doc


def load_plan(path) -> TouPlan:
    return plan_from_dict(_read_yaml(path), str(path))


def load_plans(directory) -> dict:
    """Every ``*.yaml`` / ``*.yml`` plan in a directory, keyed by plan id."""
    plans = {}
    paths = sorted(Path(directory).glob("*.y*ml"))
    if not paths:
        raise SchemaError("no plan documents found", location=str(directory))
    for p in paths:
        plan = load_plan(p)
        if plan.plan_id in plans:
            raise SchemaError(f"duplicate plan id {plan.plan_id!r}", field="plan_id", location=str(p))
        plans[plan.plan_id] = plan
    return plans


def dump_plan(plan: TouPlan, path) -> None:
    Path(path).write_text(yaml.safe_dump(plan_to_dict(plan), sort_keys=False))


@dataclass(frozen=True)
class Catalogue:
    batteries: dict
    pv_panels: dict


def catalogue_from_dict(doc: dict, where: str = "<catalogue>") -> Catalogue:
    _reject_unknown(doc, {"batteries", "pv_panels"}, where)
    out = {}
    for key, cls in (("batteries", BatteryUnitSpec), ("pv_panels", PvPanelSpec)):
        items = {}
        for i, entry in enumerate(_take(doc, key, list, where, [])):
            loc = f"{where}:{key}[{i}]"
            if not isinstance(entry, dict):
                raise SchemaError("entry must be a mapping", field=key, location=loc)
            entry = {k: float(v) if isinstance(v, int) and not isinstance(v, bool) else v
                     for k, v in entry.items()}
            spec = _build(cls, entry, loc)
            if spec.product_id in items:
                raise SchemaError(f"duplicate product id {spec.product_id!r}", field="product_id",
                                  location=loc)
            items[spec.product_id] = spec
        out[key] = items
    return Catalogue(**out)


def catalogue_to_dict(cat: Catalogue) -> dict:
    return {"batteries": [asdict(b) for b in cat.batteries.values()],
            "pv_panels": [asdict(p) for p in cat.pv_panels.values()]}


def load_catalogue(path) -> Catalogue:
    return catalogue_from_dict(_read_yaml(path), str(path))


def dump_catalogue(cat: Catalogue, path) -> None:
    Path(path).write_text(yaml.safe_dump(catalogue_to_dict(cat), sort_keys=False))


# --------------------------------------------------------------------------- run configuration


@dataclass(frozen=True)
class GridRange:
    """Inclusive ``[lower, upper]`` sampled every ``step``."""

    lower: float
    upper: float
    step: float = 1.0


@dataclass(frozen=True)
class RunConfig:
    base_dir: Path
    load_path: Path
    weather_path: Path
    plans_dir: Path
    catalogue_path: Path
    base_plan_id: str
    candidate_plan_ids: tuple
    battery_product_ids: tuple
    pv_spec_id: str
    operating_modes: tuple = (2,)
    z_max: int = 30
    x_max: int = 2
    tilt: GridRange = GridRange(0, 90, 1)
    azimuth: GridRange = GridRange(-179, 180, 1)
    location: GeoLocation | None = None
    battery_price_factor: float = 1.0
    economics: EconomicAssumptions = EconomicAssumptions()
    maintenance: MaintenanceParams = MaintenanceParams()
    pv_costs: PvCostSchedule = PvCostSchedule()
    balance_of_plant: BalanceOfPlant = BalanceOfPlant()
    ground_reflectance: float = 0.2
    rb_max: float = 10.0
    loss_convention: str = "paper"
    fill_gaps: bool = False
    qpso: SwarmConfig = SwarmConfig()
    sensitivity_factors: tuple = (1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1)
    sensitivity_plan_id: str | None = None
    sensitivity_mode: int = 2
    modes_price_factor: float = 0.1
    modes_plan_id: str | None = None
    modes_product_id: str | None = None
    seed: int = 0
    threads: int = 1
    out_dir: Path = Path("out")


_CONFIG_KEYS = {
    "location", "load", "weather", "plans_dir", "catalogue", "base_plan_id", "candidate_plan_ids",
    "battery_product_ids", "pv_spec_id", "operating_modes", "limits", "battery_price_factor",
    "economics", "maintenance", "pv_costs", "balance_of_plant_efficiency", "solar",
    "loss_convention", "fill_gaps", "qpso", "sensitivity", "modes", "seed", "threads", "out_dir",
}


def _str_list(doc, key, where, default=...):
    value = _take(doc, key, list, where, default)
    if any(not isinstance(v, str) for v in value):
        raise SchemaError("expected a list of strings", field=key, location=where)
    return tuple(value)


def _grid(doc, key, where, default):
    if key not in doc:
        return default
    value = doc[key]
    if not (isinstance(value, list) and len(value) in (2, 3)
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)):
        raise SchemaError("expected [lower, upper] or [lower, upper, step]", field=f"limits.{key}",
                          location=where)
    g = GridRange(*value)
    if g.lower >= g.upper or g.step <= 0:
        raise InvariantError("need lower < upper and step > 0", field=f"limits.{key}", location=where)
    return g


def config_from_dict(doc: dict, base_dir, where: str = "<config>") -> RunConfig:
    base_dir = Path(base_dir)
    _reject_unknown(doc, _CONFIG_KEYS, where)

    def path_of(key):
        return (base_dir / _take(doc, key, str, where)).resolve()

    location = None
    if "location" in doc:
        loc = _take(doc, "location", dict, where)
        location = _build(GeoLocation, {k: float(v) for k, v in loc.items()}, f"{where}:location",
                          "location.")
    limits = _take(doc, "limits", dict, where, {})
    _reject_unknown(limits, {"z_max", "x_max", "tilt", "azimuth"}, f"{where}:limits")
    z_max = _take(limits, "z_max", int, f"{where}:limits", 30)
    x_max = _take(limits, "x_max", int, f"{where}:limits", 2)
    if z_max < 0 or x_max < 0:
        raise InvariantError("limits must be non-negative", field="limits", location=where)
    tilt = _grid(limits, "tilt", where, GridRange(0, 90, 1))
    azimuth = _grid(limits, "azimuth", where, GridRange(-179, 180, 1))
    if tilt.lower < 0 or tilt.upper > 180:
        raise InvariantError("tilt must stay within [0, 180]", field="limits.tilt", location=where)
    if azimuth.lower <= -180 or azimuth.upper > 180:
        raise InvariantError("azimuth must stay within (-180, 180]", field="limits.azimuth", location=where)

    modes = tuple(_take(doc, "operating_modes", list, where, [2]))
    for m in modes:
        if m not in (1, 2, 3, 4):
            raise SchemaError(f"unknown operating mode {m!r}", field="operating_modes", location=where)

    solar = _take(doc, "solar", dict, where, {})
    _reject_unknown(solar, {"ground_reflectance", "rb_max"}, f"{where}:solar")
    rho = _take(solar, "ground_reflectance", float, f"{where}:solar", 0.2)
    if not 0 <= rho <= 1:
        raise InvariantError("must lie in [0, 1]", field="solar.ground_reflectance", location=where)
    rb_max = _take(solar, "rb_max", float, f"{where}:solar", 10.0)
    if rb_max <= 0:
        raise InvariantError("must be positive", field="solar.rb_max", location=where)

    def sub(key, cls):
        part = _take(doc, key, dict, where, {})
        part = {k: float(v) if isinstance(v, int) and not isinstance(v, bool)
                and cls.__dataclass_fields__.get(k) is not None
                and cls.__dataclass_fields__[k].type in ("float", float) else v
                for k, v in part.items()}
        return _build(cls, part, f"{where}:{key}", f"{key}.")

    costs_doc = dict(_take(doc, "pv_costs", dict, where, {}))
    if "price_tiers" in costs_doc:
        tiers = costs_doc["price_tiers"]
        if not isinstance(tiers, list) or any(not isinstance(t, list) or len(t) != 2 for t in tiers):
            raise SchemaError("expected a list of [kW, $/W] pairs", field="pv_costs.price_tiers",
                              location=where)
        costs_doc["price_tiers"] = tuple(tuple(t) for t in tiers)
    pv_costs = _build(PvCostSchedule, costs_doc, f"{where}:pv_costs", "pv_costs.")

    bop = _take(doc, "balance_of_plant_efficiency", float, where, 0.9)
    try:
        balance = BalanceOfPlant(bop)
    except ValueError as exc:
        raise InvariantError(str(exc), field="balance_of_plant_efficiency", location=where) from None

    loss_convention = _take(doc, "loss_convention", str, where, "paper")
    if loss_convention not in LOSS_CONVENTIONS:
        raise SchemaError(f"must be one of {LOSS_CONVENTIONS}", field="loss_convention", location=where)

    sens = _take(doc, "sensitivity", dict, where, {})
    _reject_unknown(sens, {"price_factors", "plan_id", "mode"}, f"{where}:sensitivity")
    factors = tuple(float(f) for f in _take(sens, "price_factors", list, f"{where}:sensitivity",
                                            list(RunConfig.sensitivity_factors)))
    if any(not 0 < f <= 1 for f in factors):
        raise InvariantError("price factors must lie in (0, 1]", field="sensitivity.price_factors",
                             location=where)
    modes_doc = _take(doc, "modes", dict, where, {})
    _reject_unknown(modes_doc, {"price_factor", "plan_id", "product_id"}, f"{where}:modes")

    factor = _take(doc, "battery_price_factor", float, where, 1.0)
    if factor <= 0:
        raise InvariantError("must be positive", field="battery_price_factor", location=where)

    return RunConfig(
        base_dir=base_dir,
        load_path=path_of("load"),
        weather_path=path_of("weather"),
        plans_dir=path_of("plans_dir"),
        catalogue_path=path_of("catalogue"),
        base_plan_id=_take(doc, "base_plan_id", str, where),
        candidate_plan_ids=_str_list(doc, "candidate_plan_ids", where),
        battery_product_ids=_str_list(doc, "battery_product_ids", where, []),
        pv_spec_id=_take(doc, "pv_spec_id", str, where),
        operating_modes=modes,
        z_max=z_max,
        x_max=x_max,
        tilt=tilt,
        azimuth=azimuth,
        location=location,
        battery_price_factor=factor,
        economics=sub("economics", EconomicAssumptions),
        maintenance=sub("maintenance", MaintenanceParams),
        pv_costs=pv_costs,
        balance_of_plant=balance,
        ground_reflectance=rho,
        rb_max=rb_max,
        loss_convention=loss_convention,
        fill_gaps=_take(doc, "fill_gaps", bool, where, False),
        qpso=sub("qpso", SwarmConfig),
        sensitivity_factors=factors,
        sensitivity_plan_id=_take(sens, "plan_id", str, f"{where}:sensitivity", None),
        sensitivity_mode=_take(sens, "mode", int, f"{where}:sensitivity", 2),
        modes_price_factor=_take(modes_doc, "price_factor", float, f"{where}:modes", 0.1),
        modes_plan_id=_take(modes_doc, "plan_id", str, f"{where}:modes", None),
        modes_product_id=_take(modes_doc, "product_id", str, f"{where}:modes", None),
        seed=_take(doc, "seed", int, where, 0),
        threads=_take(doc, "threads", int, where, 1),
        out_dir=(base_dir / _take(doc, "out_dir", str, where, "out")),
    )


def load_config(path) -> RunConfig:
    path = Path(path)
    cfg = config_from_dict(_read_yaml(path), path.parent, str(path))
    for p, name in ((cfg.load_path, "load"), (cfg.weather_path, "weather"),
                    (cfg.catalogue_path, "catalogue")):
        if not p.is_file():
            raise SchemaError(f"file not found: {p}", field=name, location=str(path))
    if not cfg.plans_dir.is_dir():
        raise SchemaError(f"directory not found: {cfg.plans_dir}", field="plans_dir", location=str(path))
    return cfg


def config_to_dict(cfg: RunConfig, base_dir=None) -> dict:
    """Inverse of ``config_from_dict``; paths are made relative to ``base_dir`` (default ``cfg.base_dir``)."""
    anchor = Path(base_dir if base_dir is not None else cfg.base_dir).resolve()

    def rel(p):
        return os.path.relpath(Path(p).resolve(), anchor)

    doc = {
        "load": rel(cfg.load_path),
        "weather": rel(cfg.weather_path),
        "plans_dir": rel(cfg.plans_dir),
        "catalogue": rel(cfg.catalogue_path),
        "base_plan_id": cfg.base_plan_id,
        "candidate_plan_ids": list(cfg.candidate_plan_ids),
        "battery_product_ids": list(cfg.battery_product_ids),
        "pv_spec_id": cfg.pv_spec_id,
        "operating_modes": list(cfg.operating_modes),
        "limits": {
            "z_max": cfg.z_max,
            "x_max": cfg.x_max,
            "tilt": [cfg.tilt.lower, cfg.tilt.upper, cfg.tilt.step],
            "azimuth": [cfg.azimuth.lower, cfg.azimuth.upper, cfg.azimuth.step],
        },
        "battery_price_factor": cfg.battery_price_factor,
        "economics": asdict(cfg.economics),
        "maintenance": asdict(cfg.maintenance),
        "pv_costs": {**asdict(cfg.pv_costs), "price_tiers": [list(t) for t in cfg.pv_costs.price_tiers]},
        "balance_of_plant_efficiency": cfg.balance_of_plant.eta_e,
        "solar": {"ground_reflectance": cfg.ground_reflectance, "rb_max": cfg.rb_max},
        "loss_convention": cfg.loss_convention,
        "fill_gaps": cfg.fill_gaps,
        "qpso": asdict(cfg.qpso),
        "sensitivity": {"price_factors": list(cfg.sensitivity_factors), "mode": cfg.sensitivity_mode},
        "modes": {"price_factor": cfg.modes_price_factor},
        "seed": cfg.seed,
        "threads": cfg.threads,
        "out_dir": rel(cfg.out_dir),
    }
    if cfg.location is not None:
        doc["location"] = asdict(cfg.location)
    if cfg.sensitivity_plan_id:
        doc["sensitivity"]["plan_id"] = cfg.sensitivity_plan_id
    if cfg.modes_plan_id:
        doc["modes"]["plan_id"] = cfg.modes_plan_id
    if cfg.modes_product_id:
        doc["modes"]["product_id"] = cfg.modes_product_id
    return doc


def dump_config(cfg: RunConfig, path) -> None:
    path = Path(path)
    path.write_text(yaml.safe_dump(config_to_dict(cfg, path.parent), sort_keys=False))


def resolve_mode(value) -> OperatingMode:
    try:
        return OperatingMode(int(value))
    except (TypeError, ValueError):
        raise SchemaError(f"unknown operating mode {value!r}", field="operating_mode") from None
