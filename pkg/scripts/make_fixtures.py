"""Regenerate the bundled fixture data in ``src/pvbatt/data``.

The load profile and weather are synthetic but shaped like a Sydney household
and Sydney climate. Tariffs are representative 2016-era NSW time-of-use plans,
not any retailer's published rates.

    python scripts/make_fixtures.py
"""

from pathlib import Path

import numpy as np
import yaml

from pvbatt.ingest import LoadProfile, WeatherSeries, write_load_profile, write_weather
from pvbatt.solar import GeoLocation, extraterrestrial_hourly

DATA = Path(__file__).resolve().parents[1] / "src" / "pvbatt" / "data"
SYDNEY = GeoLocation(-33.86, 151.21, 10.0)
LOAD_YEAR = 2013
WEATHER_YEARS = (2013, 2014, 2015)


def synthetic_load(rng):
    import datetime as dt

    doy = np.arange(365)
    hours = np.arange(24)
    weekday = np.array([(dt.date(LOAD_YEAR, 1, 1) + dt.timedelta(days=int(d))).weekday() for d in doy])
    weekend = weekday >= 5
    winter = np.exp(-(((doy - 190) / 45.0) ** 2))  # heating around July
    summer = np.exp(-(((doy - 20) / 35.0) ** 2)) + np.exp(-(((doy - 385) / 35.0) ** 2))

    base = 0.28 + 0.35 * np.exp(-(((hours - 7.5) / 1.3) ** 2)) + 1.05 * np.exp(-(((hours - 19.0) / 2.2) ** 2))
    midday = 0.25 * np.exp(-(((hours - 13.0) / 3.0) ** 2))
    out = np.empty((365, 24))
    for d in range(365):
        profile = base + (midday * 1.8 if weekend[d] else midday * 0.6)
        profile = profile * (1.0 + 0.45 * winter[d])
        profile = profile + summer[d] * 0.9 * np.exp(-(((hours - 16.0) / 2.5) ** 2))
        out[d] = profile
    noise = rng.lognormal(0.0, 0.18, size=out.shape)
    return np.round((out * noise).reshape(-1), 3)


def erbs_diffuse_fraction(kt):
    return np.where(
        kt <= 0.22,
        1.0 - 0.09 * kt,
        np.where(kt <= 0.80,
                 0.9511 - 0.1604 * kt + 4.388 * kt**2 - 16.638 * kt**3 + 12.336 * kt**4,
                 0.165),
    )


def synthetic_weather(rng):
    doy = np.repeat(np.arange(1, 366), 24)
    hour = np.tile(np.arange(24), 365)
    io = extraterrestrial_hourly(SYDNEY, doy, hour)
    out = []
    for _ in WEATHER_YEARS:
        daily_kt = rng.beta(5.0, 2.5, size=365) * 0.80
        kt = np.clip(np.repeat(daily_kt, 24) * rng.normal(1.0, 0.08, size=365 * 24), 0.0, 0.8)
        glob = io * kt
        diffuse = np.round(glob * erbs_diffuse_fraction(kt), 3)
        beam = np.round(np.maximum(glob - diffuse, 0.0), 3)
        glob = np.round(beam + diffuse, 3)
        seasonal = 18.5 + 4.5 * np.cos(2 * np.pi * (doy - 25) / 365.0)
        diurnal = 3.5 * np.sin(2 * np.pi * (hour - 9) / 24.0)
        temp = np.round(seasonal + diurnal + rng.normal(0.0, 1.2, size=doy.shape), 2)
        out.append((glob, beam, diffuse, temp))
    g, b, d, t = (np.stack(c) for c in zip(*out))
    return WeatherSeries(SYDNEY, WEATHER_YEARS, g, b, d, t)


WEEKDAY = [
    {"start": 0, "end": 7, "period": "offpeak"},
    {"start": 7, "end": 14, "period": "shoulder"},
    {"start": 14, "end": 20, "period": "peak"},
    {"start": 20, "end": 22, "period": "shoulder"},
    {"start": 22, "end": 24, "period": "offpeak"},
]
WEEKEND = [
    {"start": 0, "end": 7, "period": "offpeak"},
    {"start": 7, "end": 22, "period": "shoulder"},
    {"start": 22, "end": 24, "period": "offpeak"},
]
ALL_DAY = [{"start": 0, "end": 24, "period": "offpeak"}]

PLANS = [
    {
        "plan_id": "retailer_a_tou",
        "retailer": "Retailer A (representative)",
        "rates": {"offpeak": 0.1397, "shoulder": 0.2178, "peak": 0.5247},
        "feed_in_tariff": 0.06,
        "daily_supply_charge": 0.9911,
        "schedule": {"weekday": WEEKDAY, "weekend": WEEKEND},
    },
    {
        "plan_id": "retailer_b_tou",
        "retailer": "Retailer B (representative)",
        "rates": {"offpeak": 0.1280, "shoulder": 0.2050, "peak": 0.4950},
        "feed_in_tariff": 0.08,
        "daily_supply_charge": 1.0340,
        "schedule": {"weekday": WEEKDAY, "weekend": WEEKEND},
    },
    {
        "plan_id": "retailer_c_tou",
        "retailer": "Retailer C (representative)",
        "rates": {"offpeak": 0.1350, "shoulder": 0.2250, "peak": 0.5100},
        "feed_in_tariff": 0.07,
        "daily_supply_charge": 0.9500,
        "schedule": {
            "weekday": WEEKDAY,
            "weekend": WEEKEND,
            "seasons": [{
                "months": [6, 7, 8],
                "weekday": [
                    {"start": 0, "end": 7, "period": "offpeak"},
                    {"start": 7, "end": 17, "period": "shoulder"},
                    {"start": 17, "end": 21, "period": "peak"},
                    {"start": 21, "end": 22, "period": "shoulder"},
                    {"start": 22, "end": 24, "period": "offpeak"},
                ],
            }],
        },
    },
    {
        "plan_id": "retailer_a_flat",
        "retailer": "Retailer A (representative)",
        "rates": {"offpeak": 0.2618, "shoulder": 0.2618, "peak": 0.2618},
        "feed_in_tariff": 0.06,
        "daily_supply_charge": 0.8800,
        "schedule": {"weekday": ALL_DAY, "weekend": ALL_DAY},
    },
]

CATALOGUE = {
    "batteries": [
        {
            "product_id": "powerwall2",
            "initial_capacity_Cmax0": 13.5,
            "eol_capacity_CEOL": 9.45,
            "cycle_life_YEOL": 3200.0,
            "max_dod_D": 1.0,
            "rate_Rmax": 5.0,
            "roundtrip_eta": 0.90,
            "unit_price_Ub": 10000.0,
        },
        {
            "product_id": "enphase_ac",
            "initial_capacity_Cmax0": 1.2,
            "eol_capacity_CEOL": 0.96,
            "cycle_life_YEOL": 7300.0,
            "max_dod_D": 1.0,
            "rate_Rmax": 0.26,
            "roundtrip_eta": 0.96,
            "unit_price_Ub": 2000.0,
        },
    ],
    "pv_panels": [
        {
            "product_id": "trina_tsm_pc05a_280",
            "area_Ac": 1.6368,
            "eta_stc": 0.171,
            "mu_mpp": -0.00070110,
            "t_noct": 44.0,
            "rated_power": 280.0,
            "annual_degradation": 0.007,
        },
    ],
}


def main():
    rng = np.random.default_rng(2016)
    DATA.mkdir(parents=True, exist_ok=True)
    (DATA / "plans").mkdir(exist_ok=True)
    write_load_profile(LoadProfile("customer_1", LOAD_YEAR, synthetic_load(rng)), DATA / "customer_1_load.csv")
    write_weather(synthetic_weather(rng), DATA / "sydney_weather.csv")
    for plan in PLANS:
        (DATA / "plans" / f"{plan['plan_id']}.yaml").write_text(yaml.safe_dump(plan, sort_keys=False))
    (DATA / "catalogue.yaml").write_text(yaml.safe_dump(CATALOGUE, sort_keys=False))


if __name__ == "__main__":
    main()
