"""Unit conversions between dB/dBm and linear watts.

All internal link-budget arithmetic is carried out in linear units;
dB shows up only at I/O boundaries.
"""

import math

# Thermal noise power spectral density, -174 dBm/Hz, in W/Hz.
NOISE_PSD_W_PER_HZ = 10.0 ** (-174.0 / 10.0) * 1e-3

# Propagation speed used for wavelength bookkeeping (m/s).
SPEED_OF_LIGHT = 299792458.0


def db_to_linear(db: float) -> float:
    """dB power ratio -> linear ratio."""
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    """Linear power ratio -> dB."""
    if x <= 0:
        raise ValueError(f"cannot express non-positive ratio {x} in dB")
    return 10.0 * math.log10(x)


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) * 1e-3


def watts_to_dbm(w: float) -> float:
    if w <= 0:
        raise ValueError(f"cannot express non-positive power {w} W in dBm")
    return 10.0 * math.log10(w * 1e3)


def dbw_to_watts(dbw: float) -> float:
    return 10.0 ** (dbw / 10.0)


def wavelength(frequency_ghz: float) -> float:
    """Carrier wavelength in meters for a frequency in GHz."""
    if frequency_ghz <= 0:
        raise ValueError(f"frequency must be positive, got {frequency_ghz} GHz")
    return SPEED_OF_LIGHT / (frequency_ghz * 1e9)
