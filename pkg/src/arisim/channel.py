"""Link-budget primitives: path loss, LoS channels, array gain, HPBW, SNR.

Everything here works in linear units (watts, ratios); dB appears only in
`reference_path_loss`, which follows the usual 1-m free-space reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import Vec3, sin_aoa_source, sin_aod_ris, sin_aod_source
from .units import NOISE_PSD_W_PER_HZ, wavelength

# Relative guard band around array-factor 0/0 points (multiples of pi in the
# denominator argument), where the analytic limit n_active**2 is returned.
_NULL_GUARD = 1e-9


@dataclass(frozen=True)
class AntennaPattern:
    """Sectorized directional pattern: peak gain minus capped attenuations."""

    g_max_db: float = 8.0
    sla_v_db: float = 30.0
    a_max_db: float = 30.0
    theta_hpbw_deg: float = 65.0
    phi_hpbw_deg: float = 65.0

    def __post_init__(self):
        for name in ("g_max_db", "sla_v_db", "a_max_db", "theta_hpbw_deg", "phi_hpbw_deg"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class RisConfig:
    """Reflecting ULA: element count, normalized spacing, altitude, carrier."""

    n_elements: int = 300
    element_spacing_norm: float = 0.1
    altitude: float = 150.0
    frequency_ghz: float = 3.5

    def __post_init__(self):
        if self.n_elements < 1:
            raise ValueError("n_elements must be >= 1")
        if not 0.1 <= self.element_spacing_norm <= 0.2:
            raise ValueError(
                f"element spacing {self.element_spacing_norm} outside the "
                "[1/10, 1/5] wavelength bracket"
            )
        if self.altitude <= 0:
            raise ValueError("altitude must be positive")
        if self.frequency_ghz <= 0:
            raise ValueError("frequency must be positive")


@dataclass(frozen=True)
class SourceConfig:
    """Ground source ULA and its power budget."""

    n_antennas: int = 16
    antenna_spacing_norm: float = 0.5
    gain_pattern: AntennaPattern = AntennaPattern()
    max_power_w: float = 1000.0

    def __post_init__(self):
        if self.n_antennas < 1:
            raise ValueError("n_antennas must be >= 1")
        if self.max_power_w <= 0:
            raise ValueError("max_power_w must be positive")


def reference_path_loss(frequency_ghz: float) -> float:
    """Free-space attenuation at 1 m, in dB (negative)."""
    if frequency_ghz <= 0:
        raise ValueError(f"frequency must be positive, got {frequency_ghz}")
    return -20.0 * math.log10(frequency_ghz) - 32.45


def noise_power(bandwidth_hz: float, n_shares: int) -> float:
    """Thermal noise in a bandwidth split evenly into n_shares bands, watts."""
    if bandwidth_hz <= 0 or n_shares < 1:
        raise ValueError("bandwidth must be positive and n_shares >= 1")
    return bandwidth_hz / n_shares * NOISE_PSD_W_PER_HZ


def path_loss_source_ris(ris_pos: Vec3, beta0: float) -> float:
    """Inverse-square loss of the source->array hop (linear)."""
    r = ris_pos.norm()
    if r == 0.0:
        raise ValueError("array position coincides with the source")
    return beta0 / (r * r)


def path_loss_ris_uav(ris_pos: Vec3, uav: Vec3, beta0: float) -> float:
    """Inverse-square loss of the array->UAV hop (linear)."""
    r = ris_pos.distance(uav)
    if r == 0.0:
        raise ValueError("UAV coincides with the array position")
    return beta0 / (r * r)


def array_response(n: int, spacing_norm: float, sin_angle: float) -> np.ndarray:
    """Steering vector of an n-element ULA, entries exp(-j*2pi*k*d*sin)."""
    if n < 1:
        raise ValueError("array size must be >= 1")
    k = np.arange(n)
    return np.exp(-2j * np.pi * k * spacing_norm * sin_angle)


def build_channels(
    ris_pos: Vec3,
    uav_positions: Sequence[Vec3],
    ris: RisConfig,
    source: SourceConfig,
    seed: int = 0,
) -> tuple[np.ndarray, list[np.ndarray]]:
    """LoS rank-1 channel matrices with seeded random common phases.

    Returns the source->array matrix (N x M) and, per UAV, the 1 x N
    array->UAV row vector as it multiplies from the left.
    """
    rng = np.random.default_rng(seed)
    beta0 = 10.0 ** (reference_path_loss(ris.frequency_ghz) / 10.0)
    lam = wavelength(ris.frequency_ghz)

    d_sr = ris_pos.norm()
    a_rx = array_response(ris.n_elements, ris.element_spacing_norm, sin_aoa_source(ris_pos))
    a_src = array_response(source.n_antennas, source.antenna_spacing_norm, sin_aod_source(ris_pos))
    phi_h_mat = rng.uniform(0.0, 2.0 * np.pi)
    h_mat = (
        math.sqrt(path_loss_source_ris(ris_pos, beta0))
        * np.exp(1j * phi_h_mat)
        * np.exp(-2j * np.pi * d_sr / lam)
        * np.outer(a_rx, a_src.conj())
    )

    rows = []
    for uav in uav_positions:
        d_ru = ris_pos.distance(uav)
        a_tx = array_response(ris.n_elements, ris.element_spacing_norm, sin_aod_ris(ris_pos, uav))
        phi = rng.uniform(0.0, 2.0 * np.pi)
        rows.append(
            math.sqrt(path_loss_ris_uav(ris_pos, uav, beta0))
            * np.exp(1j * phi)
            * np.exp(-2j * np.pi * d_ru / lam)
            * a_tx.conj()
        )
    return h_mat, rows


def beamforming_gain(n_active: int, spacing_norm: float, dev):
    """Array-factor power gain |sin(pi*N*d*dev) / sin(pi*d*dev)|^2.

    The 0/0 points (dev*spacing at an integer) are evaluated through the
    analytic limit n_active**2 inside a small guard band instead of by
    division. Accepts scalar or ndarray ``dev``.
    """
    if n_active < 1:
        raise ValueError("active element count must be >= 1")
    x = np.pi * spacing_norm * np.asarray(dev, dtype=float)
    frac = x - np.pi * np.round(x / np.pi)
    at_peak = np.abs(frac) < _NULL_GUARD
    den = np.sin(x)
    num = np.sin(n_active * x)
    safe_den = np.where(at_peak, 1.0, den)
    g = np.where(at_peak, float(n_active), num / safe_den) ** 2
    if np.isscalar(dev) or np.asarray(dev).ndim == 0:
        return float(g)
    return g


def hpbw(n_active: int, spacing_norm: float) -> float:
    """Half-power beamwidth of the array factor on the sin-angle axis."""
    if n_active < 1 or spacing_norm <= 0:
        raise ValueError("need n_active >= 1 and positive spacing")
    return 0.8858 / (n_active * spacing_norm)


def snr_scale(p_tx_w: float, g_s: float, beta0: float, n_antennas: int, noise_w: float) -> float:
    """Common SNR prefactor P * Gs * beta0^2 * M / sigma^2."""
    return p_tx_w * g_s * beta0 * beta0 * n_antennas / noise_w


def received_snr_closed(
    p_tx_w: float,
    g_s: float,
    beta0: float,
    n_antennas: int,
    noise_w: float,
    dist_source_ris: float,
    dist_ris_uav: float,
    gain: float,
) -> float:
    """Closed-form received SNR through the reflecting array."""
    if dist_source_ris <= 0 or dist_ris_uav <= 0:
        raise ValueError("link distances must be positive")
    scale = snr_scale(p_tx_w, g_s, beta0, n_antennas, noise_w)
    return scale * gain / (dist_source_ris**2 * dist_ris_uav**2)


def received_snr_matrix(
    p_tx_w: float,
    g_s: float,
    noise_w: float,
    h_row: np.ndarray,
    phases: np.ndarray,
    h_mat: np.ndarray,
    precoder: np.ndarray,
) -> float:
    """Received SNR from the explicit matrix product |h* Theta H v|^2.

    ``phases`` are the per-element shifts; the diagonal reflection matrix is
    applied without materializing it.
    """
    cascade = h_row * np.exp(1j * phases)
    amp = cascade @ (h_mat @ precoder)
    return p_tx_w * g_s * float(np.abs(amp)) ** 2 / noise_w
