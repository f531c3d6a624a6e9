"""Fronthaul throughput and minimum per-UAV source transmit power.

Each UAV's power is the smallest value whose backhaul rate meets that
UAV's fronthaul throughput; the total is then checked against the source
power budget (divided by the antenna gain, since the gain multiplies the
radiated signal).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .units import NOISE_PSD_W_PER_HZ


@dataclass(frozen=True)
class FronthaulDemand:
    """Per-UAV required throughput plus the split bandwidths."""

    per_uav_throughput_bps: tuple[float, ...]
    fronthaul_bandwidth_hz: float
    backhaul_bandwidth_hz: float

    def __post_init__(self):
        if self.fronthaul_bandwidth_hz <= 0 or self.backhaul_bandwidth_hz <= 0:
            raise ValueError("bandwidths must be positive")
        if any(c <= 0 for c in self.per_uav_throughput_bps):
            raise ValueError("per-UAV throughput must be positive")


@dataclass
class PowerSolution:
    """Per-UAV transmit powers with the feasibility verdict."""

    per_uav_power_w: np.ndarray
    feasible: bool
    final_deviations: np.ndarray

    @property
    def total_w(self) -> float:
        return float(self.per_uav_power_w.sum())


def throughput(user_rx_powers_w: Sequence[float], fronthaul_bandwidth_hz: float) -> float:
    """Sum rate of one UAV's users over an evenly split fronthaul band."""
    powers = np.asarray(user_rx_powers_w, dtype=float)
    n_users = len(powers)
    if n_users == 0:
        raise ValueError("every UAV must serve a non-empty user subset")
    band = fronthaul_bandwidth_hz / n_users
    noise = band * NOISE_PSD_W_PER_HZ
    return float(band * np.log2(1.0 + powers / noise).sum())


def required_power(
    demand_bps: float,
    n_uavs: int,
    backhaul_bandwidth_hz: float,
    noise_w: float,
    dist_source_ris: float,
    dist_ris_uav: float,
    g_s: float,
    beta0: float,
    n_antennas: int,
    gain: float,
) -> float:
    """Transmit power meeting one UAV's rate demand with equality."""
    if gain <= 0:
        raise ValueError(
            "beamforming gain vanished at the final deviation (array-factor "
            "null); re-partition before assigning powers"
        )
    rate_factor = 2.0 ** (n_uavs * demand_bps / backhaul_bandwidth_hz) - 1.0
    return (
        rate_factor
        * noise_w
        * dist_ris_uav**2
        * dist_source_ris**2
        / (g_s * beta0**2 * n_antennas * gain)
    )


def assign_powers(
    demands: FronthaulDemand,
    noise_w: float,
    dist_source_ris: float,
    dists_ris_uav: Sequence[float],
    gains: Sequence[float],
    deviations: Sequence[float],
    g_s: float,
    beta0: float,
    n_antennas: int,
    max_power_w: float,
) -> PowerSolution:
    """Power for every UAV at its rate lower bound, plus the budget check."""
    n_uavs = len(demands.per_uav_throughput_bps)
    powers = np.array(
        [
            required_power(
                demands.per_uav_throughput_bps[m],
                n_uavs,
                demands.backhaul_bandwidth_hz,
                noise_w,
                dist_source_ris,
                dists_ris_uav[m],
                g_s,
                beta0,
                n_antennas,
                gains[m],
            )
            for m in range(n_uavs)
        ]
    )
    feasible = bool(powers.sum() <= max_power_w / g_s)
    return PowerSolution(
        per_uav_power_w=powers,
        feasible=feasible,
        final_deviations=np.asarray(deviations, dtype=float),
    )
