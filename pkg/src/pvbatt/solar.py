"""Solar geometry and HDKR transposition of horizontal insolation.

Conventions
-----------
* Hour slot ``h`` covers ``[h:00, h+1:00)`` local standard time; no daylight
  saving is applied.
* Azimuth ``gamma`` is measured from north (0 = north-facing surface), with
  positive angles rotating toward the east. ``gamma = 90`` faces east,
  ``gamma = -90`` faces west.
* Insolation quantities are hourly totals in Wh/m^2.

Every function accepts numpy arrays as well as scalars, so the lifecycle
simulation evaluates a whole year of geometry in one call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SOLAR_CONSTANT = 1367.0  # W/m^2
DEFAULT_GROUND_REFLECTANCE = 0.2
DEFAULT_RB_MAX = 10.0


@dataclass(frozen=True)
class GeoLocation:
    latitude: float
    longitude: float
    timezone_offset: float = 0.0

    def __post_init__(self):
        if not -90.0 <= self.latitude <= 90.0:
            raise ValueError(f"latitude out of range: {self.latitude}")
        if not -180.0 <= self.longitude <= 180.0:
            raise ValueError(f"longitude out of range: {self.longitude}")


@dataclass(frozen=True)
class HorizontalIrradiance:
    global_I: float
    beam_Ib: float
    diffuse_Id: float
    extraterrestrial_Io: float

    def __post_init__(self):
        for name in ("global_I", "beam_Ib", "diffuse_Id", "extraterrestrial_Io"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        total = self.beam_Ib + self.diffuse_Id
        if abs(self.global_I - total) > 1e-6 * max(abs(self.global_I), 1.0):
            raise ValueError("global_I must equal beam_Ib + diffuse_Id")


@dataclass(frozen=True)
class PlaneOrientation:
    tilt_beta: float
    azimuth_gamma: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.tilt_beta <= 180.0:
            raise ValueError(f"tilt out of range [0, 180]: {self.tilt_beta}")
        if not -180.0 < self.azimuth_gamma <= 180.0:
            raise ValueError(f"azimuth out of range (-180, 180]: {self.azimuth_gamma}")


@dataclass(frozen=True)
class TiltedIrradiance:
    total_IT: float


def declination(day_of_year):
    """Cooper's declination in degrees."""
    return 23.45 * np.sin(np.radians(360.0 * (284.0 + day_of_year) / 365.0))


def equation_of_time(day_of_year):
    """Spencer's equation of time in minutes."""
    b = np.radians((day_of_year - 1) * 360.0 / 365.0)
    return 229.2 * (
        0.000075
        + 0.001868 * np.cos(b)
        - 0.032077 * np.sin(b)
        - 0.014615 * np.cos(2 * b)
        - 0.04089 * np.sin(2 * b)
    )


def _solar_time_shift(location: GeoLocation, day_of_year):
    """Hours to add to local standard time to obtain apparent solar time."""
    standard_meridian = 15.0 * location.timezone_offset
    minutes = 4.0 * (location.longitude - standard_meridian) + equation_of_time(day_of_year)
    return minutes / 60.0


def hour_angle(location: GeoLocation, day_of_year, clock_hour):
    """Hour angle in degrees at a (fractional) local standard clock hour."""
    solar_time = clock_hour + _solar_time_shift(location, day_of_year)
    return 15.0 * (solar_time - 12.0)


def extraterrestrial_hourly(location: GeoLocation, day_of_year, hour_slot):
    """Extraterrestrial insolation on a horizontal plane over one hour slot, Wh/m^2.

    The hour-angle interval of the slot is clipped to the sunrise/sunset hour
    angles before integrating, so slots entirely in darkness give 0.
    """
    phi = np.radians(location.latitude)
    delta = np.radians(declination(day_of_year))
    g_on = SOLAR_CONSTANT * (1.0 + 0.033 * np.cos(np.radians(360.0 * day_of_year / 365.0)))

    cos_ws = np.clip(-np.tan(phi) * np.tan(delta), -1.0, 1.0)
    ws = np.arccos(cos_ws)
    w1 = np.radians(hour_angle(location, day_of_year, np.asarray(hour_slot, dtype=float)))
    w2 = w1 + np.radians(15.0)
    w1 = np.clip(w1, -ws, ws)
    w2 = np.clip(w2, -ws, ws)

    integral = np.cos(phi) * np.cos(delta) * (np.sin(w2) - np.sin(w1)) + (w2 - w1) * np.sin(phi) * np.sin(delta)
    io = (12.0 / np.pi) * g_on * integral
    return np.maximum(io, 0.0)


def _sun_and_plane_cosines(location, day_of_year, hour_slot, tilt, azimuth):
    phi = np.radians(location.latitude)
    delta = np.radians(declination(day_of_year))
    omega = np.radians(hour_angle(location, day_of_year, np.asarray(hour_slot, dtype=float) + 0.5))

    # sun direction in a local east-north-up frame; morning (omega < 0) is east
    sun_e = -np.cos(delta) * np.sin(omega)
    sun_n = np.sin(delta) * np.cos(phi) - np.cos(delta) * np.sin(phi) * np.cos(omega)
    sun_u = np.sin(phi) * np.sin(delta) + np.cos(phi) * np.cos(delta) * np.cos(omega)

    beta = np.radians(tilt)
    gamma = np.radians(azimuth)
    cos_theta = (
        np.sin(beta) * np.sin(gamma) * sun_e
        + np.sin(beta) * np.cos(gamma) * sun_n
        + np.cos(beta) * sun_u
    )
    return sun_u, cos_theta


def beam_ratio(location: GeoLocation, day_of_year, hour_slot, orientation: PlaneOrientation,
               rb_max: float = DEFAULT_RB_MAX):
    """Ratio of beam insolation on the tilted plane to that on the horizontal.

    Evaluated at the midpoint of the hour slot. A horizontal plane returns
    exactly 1; otherwise the ratio is 0 with the sun down or behind the
    plane, and is capped at ``rb_max`` near sunrise and sunset.
    """
    return beam_ratio_array(location, day_of_year, hour_slot, orientation.tilt_beta,
                            orientation.azimuth_gamma, rb_max)


def beam_ratio_array(location, day_of_year, hour_slot, tilt, azimuth, rb_max=DEFAULT_RB_MAX):
    if tilt == 0:
        return np.ones(np.broadcast(np.asarray(day_of_year), np.asarray(hour_slot)).shape)[()]
    cos_zenith, cos_theta = _sun_and_plane_cosines(location, day_of_year, hour_slot, tilt, azimuth)
    with np.errstate(divide="ignore", invalid="ignore"):
        rb = np.where(cos_zenith > 0.0, np.maximum(cos_theta, 0.0) / cos_zenith, 0.0)
    return np.minimum(rb, rb_max)


def hdkr(global_I, beam_Ib, diffuse_Id, extraterrestrial_Io, rb, tilt,
         ground_reflectance=DEFAULT_GROUND_REFLECTANCE):
    """Vectorised HDKR transposition. Returns total tilted insolation, Wh/m^2.

    Degenerate denominators: the anisotropy index is 0 where ``Io == 0`` and the
    horizon-brightening modulator is 0 where ``I == 0``. The anisotropy index is
    capped at 1 so hourly data with beam above the integrated extraterrestrial
    value cannot produce a negative diffuse term.
    """
    I = np.asarray(global_I, dtype=float)
    Ib = np.asarray(beam_Ib, dtype=float)
    Id = np.asarray(diffuse_Id, dtype=float)
    Io = np.asarray(extraterrestrial_Io, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        ai = np.where(Io > 0.0, np.minimum(Ib / Io, 1.0), 0.0)
        f = np.where(I > 0.0, np.sqrt(np.clip(Ib / I, 0.0, 1.0)), 0.0)

    beta = np.radians(tilt)
    cos_b = np.cos(beta)
    beam = (Ib + ai * Id) * rb
    diffuse = Id * (1.0 - ai) * ((1.0 + cos_b) / 2.0) * (1.0 + f * np.sin(beta / 2.0) ** 3)
    ground = I * ground_reflectance * ((1.0 - cos_b) / 2.0)
    total = beam + diffuse + ground
    if tilt == 0:
        # exact collapse: Ib + Id can differ from I in the last bit
        total = I.copy() if I.ndim else I
    return np.where(I > 0.0, np.maximum(total, 0.0), 0.0)[()]


def hdkr_transpose(irr: HorizontalIrradiance, orientation: PlaneOrientation, rb: float,
                   ground_reflectance: float = DEFAULT_GROUND_REFLECTANCE) -> TiltedIrradiance:
    if not 0.0 <= ground_reflectance <= 1.0:
        raise ValueError("ground reflectance must lie in [0, 1]")
    total = hdkr(irr.global_I, irr.beam_Ib, irr.diffuse_Id, irr.extraterrestrial_Io, rb,
                 orientation.tilt_beta, ground_reflectance)
    return TiltedIrradiance(float(total))


def plane_of_array(location: GeoLocation, day_of_year, hour_slot, global_I, beam_Ib, diffuse_Id,
                   tilt, azimuth, ground_reflectance=DEFAULT_GROUND_REFLECTANCE,
                   rb_max=DEFAULT_RB_MAX):
    """Tilted-plane insolation for aligned arrays of slots and horizontal data."""
    io = extraterrestrial_hourly(location, day_of_year, hour_slot)
    rb = beam_ratio_array(location, day_of_year, hour_slot, tilt, azimuth, rb_max)
    return hdkr(global_I, beam_Ib, diffuse_Id, io, rb, tilt, ground_reflectance)
