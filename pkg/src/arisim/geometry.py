"""3D coordinate arithmetic and direction cosines along the reflecting array axis.

The array is a ULA laid parallel to the x-axis, so every phase term in the
link model depends on an angle only through its sine, i.e. the direction
cosine of the link vector along x. The ground source sits at the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class Vec2:
    x: float
    y: float

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def __add__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x - other.x, self.y - other.y)

    def scale(self, s: float) -> "Vec2":
        return Vec2(s * self.x, s * self.y)


@dataclass(frozen=True)
class Vec3:
    x: float
    y: float
    z: float

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def distance(self, other: "Vec3") -> float:
        return (self - other).norm()


def lift(p: Vec2, z: float) -> Vec3:
    """Embed a 2D ground point at altitude z."""
    return Vec3(p.x, p.y, z)


def sin_aod_ris(ris_pos: Vec3, target: Vec3) -> float:
    """Sine of the departure angle from the array toward ``target``.

    Equals the direction cosine of (target - ris_pos) along the array
    (x) axis, always in [-1, 1].
    """
    d = target - ris_pos
    r = d.norm()
    if r == 0.0:
        raise ValueError("target coincides with the array position")
    return d.x / r

def sin_aoa_source(ris_pos: Vec3) -> float:
    """Sine of the arrival angle at the array for the source link.

    The source is at the origin; this is the direction cosine of
    (origin - ris_pos) along the array axis.
    """
    r = ris_pos.norm()
    if r == 0.0:
        raise ValueError("array position coincides with the source")
    return -ris_pos.x / r


def sin_aod_source(ris_pos: Vec3) -> float:
    """Sine of the departure angle at the source ULA toward the array."""
    r = ris_pos.norm()
    if r == 0.0:
        raise ValueError("array position coincides with the source")
    return ris_pos.x / r


def sin_aod_deviation(ris_pos: Vec3, uav: Vec3, align: Vec3) -> float:
    """Difference of departure-angle sines between a UAV and the align point.

    Exact (no small-angle approximation); antisymmetric in (uav, align).
    """
    return sin_aod_ris(ris_pos, uav) - sin_aod_ris(ris_pos, align)
