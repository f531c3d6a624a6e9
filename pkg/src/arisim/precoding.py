"""Source precoder and reflecting-array phase profiles.

The source always beamforms straight at the array (the cascaded channel is
rank one, so matched transmission is optimal); the array phases are set so
reflected element signals add coherently at a chosen 3D align point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import RisConfig, SourceConfig, array_response
from .geometry import Vec3, sin_aoa_source, sin_aod_ris, sin_aod_source

TWO_PI = 2.0 * np.pi


@dataclass
class PhaseProfile:
    """Per-element phase shifts in [0, 2pi) plus the free reference phase."""

    phases: np.ndarray
    reference_phase: float = 0.0

    def __post_init__(self):
        self.phases = np.mod(np.asarray(self.phases, dtype=float), TWO_PI)

    def __len__(self) -> int:
        return len(self.phases)

    def reflection_coefficients(self) -> np.ndarray:
        """Diagonal of the unit-amplitude reflection matrix."""
        return np.exp(1j * self.phases)


def mrt_vector(ris_pos: Vec3, source: SourceConfig) -> np.ndarray:
    """Unit-norm matched (MRT) precoder steering at the array."""
    a = array_response(source.n_antennas, source.antenna_spacing_norm, sin_aod_source(ris_pos))
    return a / np.linalg.norm(a)


def phase_profile(
    ris_pos: Vec3,
    align: Vec3,
    ris: RisConfig,
    element_range: tuple[int, int] | None = None,
    reference_phase: float = 0.0,
    base: PhaseProfile | None = None,
) -> PhaseProfile:
    """Phase shifts that add the reflection coherently at ``align``.

    ``element_range`` is a half-open [start, stop) window of global element
    indices; entries outside the window keep their previous value (from
    ``base``), which is how per-sub-array profiles share one array.
    """
    n = ris.n_elements
    start, stop = (0, n) if element_range is None else element_range
    if not 0 <= start < stop <= n:
        raise ValueError(f"element range [{start}, {stop}) invalid for {n} elements")

    delta_sin = sin_aod_ris(ris_pos, align) - sin_aoa_source(ris_pos)
    idx = np.arange(start, stop)
    window = reference_phase - TWO_PI * idx * ris.element_spacing_norm * delta_sin

    phases = np.zeros(n) if base is None else base.phases.copy()
    phases[start:stop] = np.mod(window, TWO_PI)
    return PhaseProfile(phases=phases, reference_phase=reference_phase)
