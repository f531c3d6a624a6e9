"""Array structure selection and element allocation across sub-arrays.

When the UAV fleet's sin-angle spread does not fit inside the array's
half-power beamwidth around one align point, the array is split into L
contiguous sub-arrays, each serving the UAVs falling in one of L equal
slices of the deviation range. Element counts follow a reverse-waterfilling
rule: cube-root proportional to each slice's demand weight, capped so no
sub-array's own beamwidth is exceeded, with the multiplier chosen by
bisection so the counts sum to the array size.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .channel import hpbw
from .geometry import Vec3, sin_aod_deviation, sin_aod_ris
from .placement import WeiszfeldProblem, weiszfeld

_SUM_RTOL = 1e-9
_BISECT_LIMIT = 500


@dataclass
class PartitionPlan:
    """Outcome of the structure decision and, in sub-array mode, the split."""

    mode: str  # "full" | "sub"
    n_elements: int
    dev_max: float
    align_point: Vec3 | None = None
    # sub-array fields (empty in full mode)
    n_partitions: int = 0
    subset_assignment: dict[int, int] = field(default_factory=dict)
    sizes_continuous: np.ndarray | None = None
    sizes_integer: list[int] | None = None
    align_points: list[Vec3] | None = None
    cap: float = float("inf")
    objective: float = float("nan")

    @property
    def is_full(self) -> bool:
        return self.mode == "full"

    def subsets(self) -> list[list[int]]:
        """UAV indices grouped by sub-array, in sub-array order."""
        groups: list[list[int]] = [[] for _ in range(self.n_partitions)]
        for uav_idx, part_idx in sorted(self.subset_assignment.items()):
            groups[part_idx].append(uav_idx)
        return groups

    def element_windows(self) -> list[tuple[int, int]]:
        """Half-open [start, stop) global element index window per sub-array."""
        if self.is_full:
            return [(0, self.n_elements)]
        bounds = np.concatenate([[0], np.cumsum(self.sizes_integer)])
        return [(int(bounds[i]), int(bounds[i + 1])) for i in range(len(self.sizes_integer))]


def bound_coefficients(
    demands_bps: Sequence[float],
    backhaul_bandwidth_hz: float,
    n_uavs: int,
    noise_w: float,
    dist_source_ris: float,
    dists_ris_uav: Sequence[float],
    g_s: float,
    beta0: float,
    n_antennas: int,
) -> np.ndarray:
    """Per-UAV scaled power lower-bound numerators (demand-geometry weights)."""
    rate_factor = np.exp2(n_uavs * np.asarray(demands_bps, float) / backhaul_bandwidth_hz) - 1.0
    d2 = np.asarray(dists_ris_uav, float)
    coeffs = (
        rate_factor * noise_w * d2**2 * dist_source_ris**2 / (g_s * beta0**2 * n_antennas)
    )
    if (coeffs <= 0).any():
        raise ValueError("bound coefficients must be positive; check demands")
    return coeffs


def cosine_weights(ris_pos: Vec3, uavs: Sequence[Vec3]) -> np.ndarray:
    """|cos| of each UAV's departure angle; the sin-deviation sensitivity."""
    sines = np.array([sin_aod_ris(ris_pos, u) for u in uavs])
    return np.sqrt(np.clip(1.0 - sines**2, 0.0, 1.0)).clip(1e-12)


def align_point_full(ris_pos: Vec3, uavs: Sequence[Vec3], tolerance: float = 1e-6) -> Vec3:
    """Whole-array phase align point: cosine-weighted geometric median."""
    if len(uavs) == 0:
        raise ValueError("need at least one UAV")
    anchors = np.array([[u.x, u.y, u.z] for u in uavs])
    sol = weiszfeld(
        WeiszfeldProblem(anchors=anchors, weights=cosine_weights(ris_pos, uavs), tolerance=tolerance)
    )
    return Vec3(*map(float, sol))


def structure_decision(
    ris_pos: Vec3, align: Vec3, uavs: Sequence[Vec3], n_elements: int, spacing_norm: float
) -> tuple[str, float]:
    """Pick full- vs sub-array mode from the worst sin-angle deviation."""
    devs = [abs(sin_aod_deviation(ris_pos, u, align)) for u in uavs]
    dev_max = max(devs)
    mode = "sub" if dev_max > hpbw(n_elements, spacing_norm) / 2.0 else "full"
    return mode, dev_max


def divide_deviation_range(devs: Sequence[float], n_partitions: int) -> list[int]:
    """Bin deviations into ``n_partitions`` equal left-open/right-closed slices.

    Slice i (0-based) covers (-dev_max + i*width, -dev_max + (i+1)*width]
    with width = 2*dev_max/L; the lone boundary point at -dev_max belongs
    to the first slice so the slices cover everything.
    """
    if n_partitions < 2:
        raise ValueError("need at least two partitions")
    devs = np.asarray(devs, dtype=float)
    if len(devs) == 0:
        raise ValueError("cannot divide an empty UAV set")
    dev_max = np.abs(devs).max()
    if dev_max <= 0:
        raise ValueError("zero deviation spread; sub-array division is meaningless")
    width = 2.0 * dev_max / n_partitions
    raw = np.ceil((devs + dev_max) / width).astype(int) - 1
    return [int(v) for v in np.clip(raw, 0, n_partitions - 1)]


def divide_sets(
    uavs: Sequence[Vec3], align: Vec3, ris_pos: Vec3, n_partitions: int
) -> dict[int, int]:
    """Assign each UAV to one of ``n_partitions`` equal deviation slices."""
    devs = [sin_aod_deviation(ris_pos, u, align) for u in uavs]
    bins = divide_deviation_range(devs, n_partitions)
    return dict(enumerate(bins))


def partition_sizes(subset_coeff_sums: Sequence[float], n_elements: int, cap: float) -> np.ndarray:
    """Reverse-waterfilling element allocation for fixed subset count.

    Solves min sum_i S_i / N_i^2 subject to sum N_i = N, 0 <= N_i <= cap,
    where S_i are the per-subset coefficient sums. Solution: N_i =
    min(cap, (2 S_i / mu)^(1/3)) with mu found by bisection on the sum
    constraint.
    """
    sums = np.asarray(subset_coeff_sums, dtype=float)
    if (sums <= 0).any():
        raise ValueError("subset coefficient sums must be positive")
    n_parts = len(sums)
    if cap * n_parts < n_elements * (1.0 - _SUM_RTOL):
        raise ValueError(
            f"element cap infeasible: {n_parts} sub-arrays with at most "
            f"{cap:.3f} elements each cannot reach {n_elements} total"
        )

    def sizes_at(mu: float) -> np.ndarray:
        return np.minimum(cap, np.cbrt(2.0 * sums / mu))

    # total(mu) is continuous and decreasing; bracket then bisect to
    # machine precision
    mu_hi = float((2.0 * sums / (n_elements / n_parts) ** 3).max())
    mu_lo = mu_hi
    while sizes_at(mu_lo).sum() < n_elements:
        mu_lo /= 2.0
        if mu_lo < 1e-300:
            # every coordinate capped; feasibility was already checked
            return sizes_at(mu_lo)
    for _ in range(_BISECT_LIMIT):
        mu = 0.5 * (mu_lo + mu_hi)
        if sizes_at(mu).sum() > n_elements:
            mu_lo = mu
        else:
            mu_hi = mu
        if mu_hi - mu_lo <= 1e-15 * mu_hi:
            break
    sizes = sizes_at(0.5 * (mu_lo + mu_hi))
    # spread any last-bit residual over the uncapped coordinates
    uncapped = sizes < cap
    residual = n_elements - sizes.sum()
    if uncapped.any():
        sizes[uncapped] += residual / uncapped.sum()
    if abs(sizes.sum() - n_elements) > _SUM_RTOL * n_elements:
        raise ValueError("element allocation failed to meet the sum constraint")
    return sizes


def partition_objective(coeff_sums: Sequence[float], sizes: np.ndarray) -> float:
    """Aggregate power lower bound sum_i S_i / N_i^2 for an allocation."""
    return float((np.asarray(coeff_sums) / np.asarray(sizes) ** 2).sum())


def search_L(
    uavs: Sequence[Vec3],
    align: Vec3,
    ris_pos: Vec3,
    coeffs: np.ndarray,
    n_elements: int,
    spacing_norm: float,
    l_max: int,
) -> PartitionPlan:
    """One-dimensional search over the sub-array count L in {2..l_max}.

    Empty deviation slices are dropped (with their bin geometry, and hence
    the cap, kept from the nominal L). Ties in the objective go to the
    smaller L, which preserves larger peak gains.
    """
    if l_max < 2:
        raise ValueError("l_max must be >= 2")
    devs = np.array([sin_aod_deviation(ris_pos, u, align) for u in uavs])
    dev_max = np.abs(devs).max()
    full_hpbw = hpbw(n_elements, spacing_norm)

    best: PartitionPlan | None = None
    failures: list[str] = []
    for l_nominal in range(2, l_max + 1):
        bins = divide_deviation_range(devs, l_nominal)
        cap = l_nominal * (full_hpbw / 2.0) / dev_max * n_elements
        occupied = sorted(set(bins))
        reindex = {old: new for new, old in enumerate(occupied)}
        assignment = {m: reindex[p] for m, p in enumerate(bins)}
        n_eff = len(occupied)
        coeff_sums = np.zeros(n_eff)
        for m, p in assignment.items():
            coeff_sums[p] += coeffs[m]
        try:
            sizes = partition_sizes(coeff_sums, n_elements, cap)
        except ValueError as exc:
            failures.append(f"L={l_nominal}: {exc}")
            continue
        objective = partition_objective(coeff_sums, sizes)
        if best is None or objective < best.objective - 1e-12 * abs(best.objective):
            best = PartitionPlan(
                mode="sub",
                n_elements=n_elements,
                dev_max=dev_max,
                align_point=align,
                n_partitions=n_eff,
                subset_assignment=assignment,
                sizes_continuous=sizes,
                cap=cap,
                objective=objective,
            )
    if best is None:
        raise ValueError("no feasible sub-array count: " + "; ".join(failures))
    return best


def round_sizes(sizes_continuous: np.ndarray, n_elements: int) -> list[int]:
    """Round a continuous allocation to integers summing exactly to N.

    Floor first, then hand out the remaining elements by largest fractional
    part; finally make sure every sub-array keeps at least one element.
    """
    sizes = np.asarray(sizes_continuous, dtype=float)
    if len(sizes) > n_elements:
        raise ValueError("more sub-arrays than elements; cannot give each one element")
    floors = np.floor(sizes).astype(int)
    fracs = sizes - floors
    shortfall = int(round(n_elements - floors.sum()))
    for idx in np.argsort(-fracs, kind="stable")[:shortfall]:
        floors[idx] += 1
    while (floors == 0).any():
        floors[int(np.argmin(floors))] += 1
        floors[int(np.argmax(floors))] -= 1
    return [int(v) for v in floors]


def subarray_align_points(
    subsets: Sequence[Sequence[int]],
    uavs: Sequence[Vec3],
    weights: np.ndarray,
    tolerance: float = 1e-6,
) -> list[Vec3]:
    """Weighted geometric median align point for every sub-array's subset."""
    points = []
    for members in subsets:
        if len(members) == 0:
            raise ValueError("sub-array with no assigned UAVs")
        anchors = np.array([[uavs[m].x, uavs[m].y, uavs[m].z] for m in members])
        sol = weiszfeld(
            WeiszfeldProblem(anchors=anchors, weights=weights[list(members)], tolerance=tolerance)
        )
        points.append(Vec3(*map(float, sol)))
    return points


def find_hpbw_outliers(plan: PartitionPlan, uavs: Sequence[Vec3], ris_pos: Vec3, spacing_norm: float) -> list[int]:
    """UAVs whose deviation from their sub-array's align point exceeds its half HPBW."""
    outliers = []
    for subset, align, size in zip(plan.subsets(), plan.align_points, plan.sizes_integer):
        half = hpbw(size, spacing_norm) / 2.0
        for m in subset:
            if abs(sin_aod_deviation(ris_pos, uavs[m], align)) > half:
                outliers.append(m)
    if outliers:
        warnings.warn(
            f"UAVs {outliers} fall outside their sub-array's half-power "
            "beamwidth after rounding; their gain is degraded",
            RuntimeWarning,
        )
    return outliers
