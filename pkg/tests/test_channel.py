import math

import numpy as np
import pytest

from arisim.channel import (
    RisConfig,
    SourceConfig,
    array_response,
    beamforming_gain,
    build_channels,
    hpbw,
    noise_power,
    path_loss_ris_uav,
    path_loss_source_ris,
    received_snr_closed,
    received_snr_matrix,
    reference_path_loss,
)
from arisim.geometry import Vec3, sin_aod_deviation
from arisim.precoding import mrt_vector, phase_profile
from arisim.units import NOISE_PSD_W_PER_HZ, db_to_linear


def test_reference_path_loss_1ghz():
    assert reference_path_loss(1.0) == pytest.approx(-32.45)


def test_reference_path_loss_sub6():
    # matches the tabulated sub-6 GHz value to rounding
    assert reference_path_loss(3.5) == pytest.approx(-43.33, abs=5e-3)


def test_reference_path_loss_10ghz():
    assert reference_path_loss(10.0) == pytest.approx(-52.45)


def test_reference_path_loss_rejects_nonpositive():
    with pytest.raises(ValueError):
        reference_path_loss(0.0)


def test_path_loss_unit_distance():
    beta0 = db_to_linear(reference_path_loss(3.5))
    assert path_loss_source_ris(Vec3(1.0, 0.0, 0.0), beta0) == pytest.approx(beta0)


def test_path_loss_inverse_square():
    beta0 = db_to_linear(reference_path_loss(3.5))
    assert path_loss_source_ris(Vec3(0.0, 0.0, 10.0), beta0) == pytest.approx(beta0 / 100.0)


def test_path_loss_ris_uav_500m():
    beta0 = db_to_linear(reference_path_loss(3.5))
    got = path_loss_ris_uav(Vec3(0.0, 0.0, 150.0), Vec3(300.0, 400.0, 150.0), beta0)
    assert got == pytest.approx(beta0 / 2.5e5)


def test_path_loss_zero_distance_raises():
    beta0 = 1.0
    with pytest.raises(ValueError):
        path_loss_ris_uav(Vec3(1.0, 2.0, 3.0), Vec3(1.0, 2.0, 3.0), beta0)


def test_array_response_broadside_all_ones():
    np.testing.assert_allclose(array_response(8, 0.5, 0.0), np.ones(8))


def test_array_response_two_element_endfire():
    np.testing.assert_allclose(
        array_response(2, 0.5, 1.0), np.array([1.0, -1.0]), atol=1e-12
    )


def test_array_response_unit_modulus():
    v = array_response(64, 0.1, 0.37)
    np.testing.assert_allclose(np.abs(v), 1.0)


def test_build_channels_rank_one_and_modulus():
    ris_pos = Vec3(20.0, 5.0, 150.0)
    ris = RisConfig(n_elements=32)
    src = SourceConfig(n_antennas=8)
    h_mat, rows = build_channels(ris_pos, [Vec3(1000.0, 50.0, 100.0)], ris, src, seed=5)
    assert np.linalg.matrix_rank(h_mat) == 1
    beta_s = path_loss_source_ris(ris_pos, db_to_linear(reference_path_loss(ris.frequency_ghz)))
    np.testing.assert_allclose(np.abs(h_mat), math.sqrt(beta_s))
    assert rows[0].shape == (32,)


def test_gain_peak_is_squared_count():
    for n in (1, 4, 300, 400):
        assert beamforming_gain(n, 0.1, 0.0) == pytest.approx(n * n)


def test_gain_array_factor_null():
    assert beamforming_gain(4, 0.25, 1.0) < 1e-20


def test_gain_half_power_point_large_array():
    # at the tabulated half-power offset the gain is half the peak within 2%
    g = beamforming_gain(400, 0.1, 0.011)
    assert g / (400**2 / 2) == pytest.approx(1.0, abs=0.02)


def test_gain_never_exceeds_peak():
    rng = np.random.default_rng(11)
    devs = rng.uniform(-2.0, 2.0, 10_000)
    g = beamforming_gain(64, 0.1, devs)
    assert (g <= 64**2 + 1e-6).all()
    assert (g >= 0).all()


def test_gain_half_power_bracket():
    for n, d in ((100, 0.1), (300, 0.1), (50, 0.2), (400, 0.1)):
        g = beamforming_gain(n, d, hpbw(n, d) / 2.0)
        assert 0.49 * n * n <= g <= 0.51 * n * n


def test_hpbw_values():
    assert hpbw(400, 0.1) == pytest.approx(0.022145)
    assert hpbw(300, 0.1) == pytest.approx(0.029527, abs=1e-6)


def test_hpbw_halving_doubles():
    assert hpbw(100, 0.1) == pytest.approx(2.0 * hpbw(200, 0.1))


def test_noise_power():
    assert noise_power(50e6, 8) == pytest.approx(50e6 / 8 * NOISE_PSD_W_PER_HZ)


def _closed_and_matrix(ris_pos, uav, align, n_elem=64, m_ant=8, seed=0, spacing_src=0.5):
    ris = RisConfig(n_elements=n_elem, element_spacing_norm=0.1)
    src = SourceConfig(n_antennas=m_ant, antenna_spacing_norm=spacing_src)
    beta0 = db_to_linear(reference_path_loss(ris.frequency_ghz))
    sigma2 = noise_power(50e6, 4)
    p, gs = 2.0, db_to_linear(8.0)

    dev = sin_aod_deviation(ris_pos, uav, align)
    g = beamforming_gain(n_elem, ris.element_spacing_norm, dev)
    closed = received_snr_closed(
        p, gs, beta0, m_ant, sigma2, ris_pos.norm(), ris_pos.distance(uav), g
    )

    h_mat, rows = build_channels(ris_pos, [uav], ris, src, seed=seed)
    profile = phase_profile(ris_pos, align, ris)
    v = mrt_vector(ris_pos, src)
    matrix = received_snr_matrix(p, gs, sigma2, rows[0], profile.phases, h_mat, v)
    return closed, matrix


def test_closed_form_matches_matrix_form():
    rng = np.random.default_rng(21)
    for _ in range(100):
        ris_pos = Vec3(rng.uniform(-30, 30), rng.uniform(-30, 30), rng.uniform(100, 300))
        uav = Vec3(rng.uniform(500, 2000), rng.uniform(-300, 300), rng.uniform(40, 160))
        align = Vec3(uav.x + rng.uniform(-30, 30), uav.y + rng.uniform(-30, 30), uav.z + rng.uniform(-20, 20))
        closed, matrix = _closed_and_matrix(ris_pos, uav, align)
        assert matrix == pytest.approx(closed, rel=1e-9)


def test_snr_independent_of_random_phases():
    ris_pos = Vec3(10.0, -5.0, 150.0)
    uav = Vec3(900.0, 100.0, 90.0)
    align = Vec3(920.0, 80.0, 100.0)
    _, m1 = _closed_and_matrix(ris_pos, uav, align, seed=1)
    _, m2 = _closed_and_matrix(ris_pos, uav, align, seed=2)
    assert m1 == pytest.approx(m2, rel=1e-12)


def test_snr_independent_of_source_spacing():
    ris_pos = Vec3(10.0, -5.0, 150.0)
    uav = Vec3(900.0, 100.0, 90.0)
    align = Vec3(920.0, 80.0, 100.0)
    _, m1 = _closed_and_matrix(ris_pos, uav, align, spacing_src=0.5)
    _, m2 = _closed_and_matrix(ris_pos, uav, align, spacing_src=0.25)
    assert m1 == pytest.approx(m2, rel=1e-12)


def test_snr_linear_in_power():
    beta0 = db_to_linear(reference_path_loss(3.5))
    args = (db_to_linear(8.0), beta0, 16, noise_power(50e6, 8), 150.0, 1000.0, 300.0**2)
    assert received_snr_closed(2.0, *args) == pytest.approx(2 * received_snr_closed(1.0, *args))


def test_ris_config_spacing_bracket():
    with pytest.raises(ValueError):
        RisConfig(element_spacing_norm=0.5)
