import math

import numpy as np
import pytest

from arisim.geometry import Vec2
from arisim.placement import (
    ConvergenceError,
    CubicGeometry,
    WeiszfeldProblem,
    aggregate_q,
    cubic_roots,
    per_uav_point,
    weiszfeld,
    xi_solve,
)


def brute_force_xi(geom: CubicGeometry, step: float = 1e-5) -> float:
    """Leftmost local minimum of the exact quartic objective on (0, 1).

    The objective has two interior minima; the origin-restriction
    constraint selects the near-origin one, which is the first local
    minimum scanning from zero.
    """
    grid = np.arange(step, 1.0, step)
    f = geom.objective(grid)
    interior = np.flatnonzero((f[1:-1] < f[:-2]) & (f[1:-1] <= f[2:])) + 1
    assert len(interior) >= 1
    return float(grid[interior[0]])


def test_xi_ground_uav_closed_form():
    # ground-level UAV collapses the cubic to 1/2 - sqrt(1/4 - zeta^2)
    xi = xi_solve(150.0, 0.0, 1000.0)
    assert xi == pytest.approx(0.5 - math.sqrt(0.25 - 0.15**2), abs=1e-12)
    assert xi == pytest.approx(0.02303, abs=5e-6)


def test_xi_far_uav_is_small():
    assert 0.0 < xi_solve(150.0, 45.0, 2500.0) < 0.01


def test_xi_approaches_half():
    # ground UAV with H -> w/2 pushes the fraction toward 1/2
    xi = xi_solve(499.0, 0.0, 1000.0)
    assert xi == pytest.approx(0.5, abs=0.05)


def test_xi_monotone_in_altitude_of_platform():
    for h, w in ((0.0, 1200.0), (45.0, 1500.0), (100.0, 2000.0)):
        xis = [xi_solve(H, h, w) for H in np.linspace(100.0, 300.0, 12)]
        assert all(b > a for a, b in zip(xis, xis[1:]))


def test_xi_out_of_regime_raises():
    with pytest.raises(ValueError, match="asymptotic regime"):
        xi_solve(300.0, 150.0, 320.0)


def test_cubic_roots_ordering():
    geom = CubicGeometry.from_heights(150.0, 75.0, 1000.0)
    r0, r1, r2 = cubic_roots(geom)
    assert r0 > r1 > r2
    # stationarity of the quartic derivative at each root
    for r in (r0, r1, r2):
        d = 4 * r**3 - 6 * r**2 + 2 * r * (1 + geom.zeta1**2 + geom.zeta2**2) - 2 * geom.zeta1**2
        assert d == pytest.approx(0.0, abs=1e-9)


def test_xi_matches_brute_force_sample():
    rng = np.random.default_rng(17)
    checked = 0
    while checked < 60:
        H = rng.uniform(100.0, 300.0)
        w = math.sqrt(rng.uniform(500.0**2, 3000.0**2))
        h = rng.uniform(0.0, 150.0)
        geom = CubicGeometry.from_heights(H, h, w)
        if geom.discriminant >= 0:
            continue
        assert abs(xi_solve(H, h, w) - brute_force_xi(geom)) <= 1e-3
        checked += 1


def test_per_uav_point_collinear():
    p = per_uav_point(Vec2(1000.0, 0.0), 0.0, 150.0)
    assert p.x == pytest.approx(23.03, abs=5e-3)
    assert p.y == 0.0
    q = per_uav_point(Vec2(600.0, 800.0), 45.0, 150.0)
    # result lies on the ray through the UAV ground point
    assert q.x * 800.0 == pytest.approx(q.y * 600.0, rel=1e-12)


def test_weiszfeld_equilateral_centroid():
    anchors = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3) / 2]])
    sol = weiszfeld(WeiszfeldProblem(anchors=anchors, tolerance=1e-9))
    np.testing.assert_allclose(sol, anchors.mean(axis=0), atol=1e-6)


def test_weiszfeld_dominant_anchor():
    anchors = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    # pull on the heavy anchor is sqrt(2) <= 10, so it wins outright
    sol = weiszfeld(WeiszfeldProblem(anchors=anchors, weights=np.array([10.0, 1.0, 1.0])))
    np.testing.assert_allclose(sol, anchors[0])


def test_weiszfeld_square_center():
    anchors = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    sol = weiszfeld(WeiszfeldProblem(anchors=anchors, tolerance=1e-9))
    np.testing.assert_allclose(sol, [0.5, 0.5], atol=1e-6)


def test_weiszfeld_interior_first_order_optimality():
    rng = np.random.default_rng(23)
    for _ in range(40):
        m = rng.integers(3, 9)
        anchors = rng.uniform(-100.0, 100.0, size=(m, 3))
        weights = rng.uniform(0.2, 2.0, size=m)
        problem = WeiszfeldProblem(anchors=anchors, weights=weights, tolerance=1e-9)
        sol = weiszfeld(problem)
        if any(np.linalg.norm(sol - a) < 1e-9 for a in anchors):
            continue  # vertex solution; covered by the anchor test
        diff = sol - anchors
        grad = (weights / np.linalg.norm(diff, axis=1)) @ diff
        assert np.linalg.norm(grad) / weights.sum() <= 1e-4


def test_weiszfeld_collinear_warns_but_solves():
    anchors = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [3.0, 0.0]])
    with pytest.warns(RuntimeWarning, match="collinear"):
        sol = weiszfeld(WeiszfeldProblem(anchors=anchors, tolerance=1e-9))
    # 1-D weighted median of four unit weights: anywhere on the middle
    # segment minimizes; the iteration settles inside it
    assert 1.0 - 1e-6 <= sol[0] <= 2.0 + 1e-6
    assert sol[1] == pytest.approx(0.0, abs=1e-9)


def test_weiszfeld_convergence_error_carries_iterate():
    anchors = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, 1.0]])
    with pytest.raises(ConvergenceError) as err:
        weiszfeld(WeiszfeldProblem(anchors=anchors, tolerance=1e-15, max_iterations=3))
    assert err.value.last_iterate.shape == (2,)


def test_weiszfeld_duplicate_anchors_merged():
    anchors = np.array([[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [100.0, 0.0]])
    sol = weiszfeld(WeiszfeldProblem(anchors=anchors))
    np.testing.assert_allclose(sol, [0.0, 0.0])


def test_aggregate_single_point():
    assert aggregate_q([Vec2(12.0, -7.0)]) == Vec2(12.0, -7.0)


def test_aggregate_identical_points():
    pts = [Vec2(3.0, 4.0)] * 5
    got = aggregate_q(pts)
    assert got.x == pytest.approx(3.0) and got.y == pytest.approx(4.0)


def test_aggregate_is_outlier_robust():
    pts = [Vec2(0.0, 0.0)] * 4 + [Vec2(100.0, 0.0)]
    got = aggregate_q(pts)
    assert got.norm() <= 1.0  # the mean would sit at (20, 0)


def test_weights_must_be_positive():
    with pytest.raises(ValueError):
        WeiszfeldProblem(anchors=np.zeros((2, 2)), weights=np.array([1.0, 0.0]))
