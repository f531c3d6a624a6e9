"""Reflector placement: per-UAV optimal points and their robust aggregation.

For a single UAV the squared-distance product (source->array) * (array->UAV)
is minimized on the segment toward the UAV's ground projection; the scaling
fraction solves a depressed cubic with three real roots in the operating
regime, and the near-origin root is the one compatible with keeping the
array close to the source. The per-UAV points are then aggregated with a
weighted geometric median (Weiszfeld fixed-point iteration).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import Vec2


class ConvergenceError(RuntimeError):
    """Fixed-point iteration ran out of budget; carries the last iterate."""

    def __init__(self, message: str, last_iterate: np.ndarray):
        super().__init__(message)
        self.last_iterate = last_iterate


@dataclass(frozen=True)
class CubicGeometry:
    """Normalized geometry of the one-UAV placement cubic."""

    zeta1: float
    zeta2: float

    @classmethod
    def from_heights(cls, ris_altitude: float, uav_altitude: float, w_norm: float) -> "CubicGeometry":
        if w_norm <= 0:
            raise ValueError("UAV ground distance must be positive")
        return cls(zeta1=ris_altitude / w_norm, zeta2=abs(ris_altitude - uav_altitude) / w_norm)

    @property
    def a(self) -> float:
        return 0.5 * (self.zeta1**2 + self.zeta2**2) - 0.25

    @property
    def b(self) -> float:
        return 0.25 * (self.zeta2**2 - self.zeta1**2)

    @property
    def discriminant(self) -> float:
        return (self.a / 3.0) ** 3 + (self.b / 2.0) ** 2

    def objective(self, xi) -> np.ndarray:
        """Distance-product objective (w_norm^4 factored out)."""
        x = np.asarray(xi, dtype=float)
        return (x**2 + self.zeta1**2) * ((1.0 - x) ** 2 + self.zeta2**2)


def cubic_roots(geom: CubicGeometry) -> tuple[float, float, float]:
    """All three stationary points of the placement objective, descending.

    Valid only when the discriminant is negative (three real roots).
    """
    a, b = geom.a, geom.b
    if geom.discriminant >= 0:
        raise ValueError(
            "geometry out of asymptotic regime: the placement cubic has fewer "
            f"than three real roots (a={a:.4g}, b={b:.4g}); the scenario must "
            "keep the UAV ground distance large relative to the altitudes"
        )
    arg = (3.0 * b / (2.0 * a)) * math.sqrt(-3.0 / a)
    theta = math.acos(min(1.0, max(-1.0, arg)))
    r = 2.0 * math.sqrt(-a / 3.0)
    roots = tuple(0.5 + r * math.cos(theta / 3.0 - 2.0 * math.pi * k / 3.0) for k in range(3))
    if not roots[0] > roots[1] > roots[2]:
        warnings.warn(
            f"placement cubic roots not strictly ordered: {roots}", RuntimeWarning
        )
    return roots


def xi_solve(ris_altitude: float, uav_altitude: float, w_norm: float) -> float:
    """Scaling fraction of the per-UAV optimal array ground point.

    Returns the near-origin local minimizer of the distance-product
    objective, always in (0, 1/2) in the valid regime.
    """
    geom = CubicGeometry.from_heights(ris_altitude, uav_altitude, w_norm)
    return cubic_roots(geom)[2]


def per_uav_point(uav_ground: Vec2, uav_altitude: float, ris_altitude: float) -> Vec2:
    """Optimal 2D array position when serving one UAV alone."""
    w_norm = uav_ground.norm()
    if w_norm <= 0:
        raise ValueError("UAV ground projection coincides with the source")
    return uav_ground.scale(xi_solve(ris_altitude, uav_altitude, w_norm))


@dataclass
class WeiszfeldProblem:
    """Weighted Fermat point problem: minimize sum_i w_i * ||x - z_i||."""

    anchors: np.ndarray
    weights: np.ndarray | None = None
    tolerance: float = 1e-6
    max_iterations: int = 100_000

    def __post_init__(self):
        self.anchors = np.atleast_2d(np.asarray(self.anchors, dtype=float))
        if len(self.anchors) < 1:
            raise ValueError("need at least one anchor")
        if self.weights is None:
            self.weights = np.ones(len(self.anchors))
        self.weights = np.asarray(self.weights, dtype=float)
        if (self.weights <= 0).any():
            raise ValueError("weights must be positive")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")


def _merge_duplicates(anchors: np.ndarray, weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Collapse exactly coincident anchors into one with summed weight."""
    unique, inverse = np.unique(anchors, axis=0, return_inverse=True)
    if len(unique) == len(anchors):
        return anchors, weights
    merged_w = np.zeros(len(unique))
    np.add.at(merged_w, inverse, weights)
    return unique, merged_w


def _anchor_test(anchors: np.ndarray, weights: np.ndarray, i: int) -> bool:
    """True when anchor i is itself the minimizer."""
    diff = np.delete(anchors, i, axis=0) - anchors[i]
    dist = np.linalg.norm(diff, axis=1)
    pull = (np.delete(weights, i) / dist) @ diff
    return float(np.linalg.norm(pull)) <= weights[i]


def _all_collinear(anchors: np.ndarray) -> bool:
    if len(anchors) < 3:
        return False
    centered = anchors - anchors[0]
    return np.linalg.matrix_rank(centered, tol=1e-9 * max(1.0, np.abs(centered).max())) <= 1


def weiszfeld(problem: WeiszfeldProblem, initial: np.ndarray | None = None) -> np.ndarray:
    """Weighted geometric median via the Weiszfeld fixed-point map.

    Checks each anchor for optimality first; otherwise iterates
    x <- sum(w_i z_i / d_i) / sum(w_i / d_i) until the step shrinks below
    the tolerance. An iterate landing on an anchor is resolved through the
    anchor optimality test or a small restart perturbation.
    """
    z, w = _merge_duplicates(problem.anchors, problem.weights)
    m = len(z)
    if m == 1:
        return z[0].copy()
    if _all_collinear(z):
        warnings.warn(
            "anchors are collinear; the minimizer reduces to a 1-D weighted median",
            RuntimeWarning,
        )
    for i in range(m):
        if _anchor_test(z, w, i):
            return z[i].copy()

    diameter = float(np.linalg.norm(z.max(axis=0) - z.min(axis=0))) or 1.0
    if initial is None:
        x = (w[:, None] * z).sum(axis=0) / w.sum()
        if np.linalg.norm(z - x, axis=1).min() < 1e-12:
            x = x + 1e-6 * diameter
    else:
        x = np.asarray(initial, dtype=float)

    restart_rng = np.random.default_rng(0)
    for _ in range(problem.max_iterations):
        dist = np.linalg.norm(z - x, axis=1)
        hit = int(np.argmin(dist))
        if dist[hit] < 1e-12:
            if _anchor_test(z, w, hit):
                return z[hit].copy()
            x = z[hit] + 1e-6 * diameter * restart_rng.standard_normal(z.shape[1])
            continue
        coef = w / dist
        x_next = (coef[:, None] * z).sum(axis=0) / coef.sum()
        if np.linalg.norm(x_next - x) <= problem.tolerance:
            return x_next
        x = x_next
    raise ConvergenceError(
        f"no convergence within {problem.max_iterations} iterations", x
    )


def aggregate_q(per_uav_points: Sequence[Vec2], tolerance: float = 1e-6) -> Vec2:
    """Unit-weight geometric median of the per-UAV placement points."""
    pts = np.array([[p.x, p.y] for p in per_uav_points], dtype=float)
    if len(pts) == 1:
        return Vec2(*pts[0])
    sol = weiszfeld(WeiszfeldProblem(anchors=pts, tolerance=tolerance))
    return Vec2(float(sol[0]), float(sol[1]))
