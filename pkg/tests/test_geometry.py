import math

import numpy as np
import pytest

from arisim.geometry import (
    Vec2,
    Vec3,
    lift,
    sin_aoa_source,
    sin_aod_deviation,
    sin_aod_ris,
    sin_aod_source,
)

RIS = Vec3(0.0, 0.0, 150.0)


def test_sin_aod_on_axis():
    assert sin_aod_ris(RIS, Vec3(100.0, 0.0, 150.0)) == pytest.approx(1.0)


def test_sin_aod_broadside():
    assert sin_aod_ris(RIS, Vec3(0.0, 50.0, 150.0)) == pytest.approx(0.0)


def test_sin_aod_pythagorean():
    assert sin_aod_ris(RIS, Vec3(300.0, 400.0, 150.0)) == pytest.approx(0.6)


def test_sin_aod_zero_distance_raises():
    with pytest.raises(ValueError):
        sin_aod_ris(RIS, RIS)


def test_sin_aoa_above_source():
    assert sin_aoa_source(Vec3(0.0, 0.0, 150.0)) == pytest.approx(0.0)


def test_sin_aoa_diagonal():
    assert sin_aoa_source(Vec3(150.0, 0.0, 150.0)) == pytest.approx(-1.0 / math.sqrt(2.0))


def test_sin_aoa_ground():
    assert sin_aoa_source(Vec3(30.0, 40.0, 0.0)) == pytest.approx(-0.6)


def test_sin_aoa_at_origin_raises():
    with pytest.raises(ValueError):
        sin_aoa_source(Vec3(0.0, 0.0, 0.0))


def test_source_aod_is_negated_aoa():
    p = Vec3(123.0, -45.0, 150.0)
    assert sin_aod_source(p) == pytest.approx(-sin_aoa_source(p))


def test_deviation_identical_points():
    u = Vec3(100.0, 20.0, 140.0)
    assert sin_aod_deviation(RIS, u, u) == 0.0


def test_deviation_on_axis_vs_broadside():
    dev = sin_aod_deviation(RIS, Vec3(100.0, 0.0, 150.0), Vec3(0.0, 50.0, 150.0))
    assert dev == pytest.approx(1.0)


def test_deviation_antisymmetry():
    rng = np.random.default_rng(3)
    for _ in range(200):
        a = Vec3(*rng.uniform(-500, 500, 2), rng.uniform(1, 300))
        b = Vec3(*rng.uniform(-500, 500, 2), rng.uniform(1, 300))
        assert sin_aod_deviation(RIS, a, b) == -sin_aod_deviation(RIS, b, a)


def test_sin_bounded():
    rng = np.random.default_rng(4)
    for _ in range(500):
        t = Vec3(*rng.uniform(-2000, 2000, 2), rng.uniform(0, 500))
        if t.distance(RIS) == 0:
            continue
        assert abs(sin_aod_ris(RIS, t)) <= 1.0


def test_vec_helpers():
    assert Vec2(3.0, 4.0).norm() == pytest.approx(5.0)
    assert lift(Vec2(1.0, 2.0), 7.0) == Vec3(1.0, 2.0, 7.0)
    assert Vec2(1.0, 2.0).scale(2.0) == Vec2(2.0, 4.0)
