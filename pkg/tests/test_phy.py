import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from uavisac.phy import (ArrayGeometry, ContractViolation, beampattern_gain, channel_vector,
                         directional_sinr, omni_covariance, omni_sinr, radar_snr_dir,
                         radar_snr_omni, rate, reflection_coeff, steering_vector)

HALF = ArrayGeometry(2, 2, 0.5, 1.0)


def test_steering_examples():
    assert np.allclose(steering_vector(0.0, ArrayGeometry(4, 4, 0.5, 1.0)), 1)
    assert np.allclose(steering_vector(math.pi / 2, HALF), [1, -1])
    assert np.allclose(steering_vector(math.radians(30), HALF), [1, 1j])


@given(st.floats(-3.2, 3.2), st.integers(2, 40))
def test_steering_unit_modulus(theta, n):
    a = steering_vector(theta, ArrayGeometry(n, n, 0.5, 1.0))
    assert np.allclose(np.abs(a), 1)
    assert np.vdot(a, a).real == pytest.approx(n)


def test_channel_vector(geom):
    lam = geom.wavelength
    assert np.allclose(channel_vector(0.0, lam, geom), np.ones(geom.N_t) / lam)
    assert np.allclose(np.abs(channel_vector(1.1, 100.0, geom)), 0.01)
    with pytest.raises(ContractViolation):
        channel_vector(0.0, 0.0, geom)


def test_omni_covariance(geom):
    assert np.allclose(omni_covariance(1, 2), np.diag([0.5, 0.5]))
    C = omni_covariance(1000, geom.N_t)
    assert np.trace(C).real == pytest.approx(1000)
    thetas = np.linspace(0, math.pi, 181)
    assert np.allclose(beampattern_gain(C, thetas, geom), 1000)


def test_omni_sinr():
    assert omni_sinr(1, 1, 1, 1, 1) == pytest.approx(1.0)
    assert omni_sinr(100, 2, 1, 1000, 1) == pytest.approx(0.05 / 1.05)
    assert omni_sinr(10, 200, 1, 1e6, 0.0) == pytest.approx(1 / 199)


def test_directional_sinr(geom):
    theta, d = 0.7, 100.0
    h = channel_vector(theta, d, geom)
    w = math.sqrt(1000 / geom.N_t) * steering_vector(theta, geom)
    assert directional_sinr(h, [w], 0, 1.0) == pytest.approx(3.0)
    assert directional_sinr(h, [w], 0, 1.0) == pytest.approx(abs(np.vdot(h, w)) ** 2)
    v = np.arange(geom.N_t, dtype=complex)
    w_perp = v - np.vdot(h, v) / np.vdot(h, h) * h
    assert directional_sinr(h, [w_perp], 0, 1.0) == pytest.approx(0, abs=1e-20)


@given(st.floats(0, 2 * math.pi))
def test_directional_sinr_phase_invariant(phi):
    rng = np.random.default_rng(1)
    geom = ArrayGeometry(6, 6, 0.5, 1.0)
    h = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    W = rng.standard_normal((2, 6)) + 1j * rng.standard_normal((2, 6))
    assert directional_sinr(h, W * np.exp(1j * phi), 0, 0.3) == pytest.approx(
        directional_sinr(h, W, 0, 0.3), rel=1e-12)


def test_rate():
    assert rate(1) == 1.0 and rate(3) == 2.0 and rate(0) == 0.0
    g = np.linspace(0, 10, 50)
    assert np.all(np.diff(rate(g)) > 0)


def test_reflection_and_radar_snr(geom):
    beta = reflection_coeff(100, 120 + 120j)
    assert beta == pytest.approx(0.012 + 0.012j)
    assert abs(beta) ** 2 == pytest.approx(2.88e-4)
    assert abs(reflection_coeff(200, 120 + 120j)) == pytest.approx(abs(beta) / 4)
    assert reflection_coeff(1, 5j) == 5j
    assert radar_snr_omni(beta, 1000, 10, 1) == pytest.approx(2.88)
    assert radar_snr_omni(beta, 1000, 0, 1) == 0
    assert radar_snr_omni(beta, 2000, 10, 1) == pytest.approx(5.76)
    theta = 0.4
    w = math.sqrt(1000 / geom.N_t) * steering_vector(theta, geom)
    assert radar_snr_dir(theta, [w], beta, 10, 1, geom) == pytest.approx(86.4)
    omni_cols = math.sqrt(1000 / geom.N_t) * np.eye(geom.N_t)
    assert radar_snr_dir(theta, omni_cols, beta, 10, 1, geom) == pytest.approx(
        radar_snr_omni(beta, 1000, 10, 1), rel=1e-12)


def test_radar_snr_orthogonal_beam():
    geom = ArrayGeometry(4, 4, 0.5, 1.0)
    # a(0) = ones; an alternating vector is orthogonal to it
    w = np.array([1, -1, 1, -1], dtype=complex)
    assert radar_snr_dir(0.0, [w], 0.1, 10, 1, geom) == pytest.approx(0, abs=1e-20)


def test_beampattern(geom):
    rng = np.random.default_rng(0)
    w = rng.standard_normal(geom.N_t) + 1j * rng.standard_normal(geom.N_t)
    thetas = np.linspace(-1, 1, 7)
    expected = np.abs(steering_vector(thetas, geom).conj() @ w) ** 2
    assert np.allclose(beampattern_gain(np.outer(w, w.conj()), thetas, geom), expected)
    assert np.all(beampattern_gain(np.zeros((geom.N_t, geom.N_t)), thetas, geom) == 0)
    assert isinstance(beampattern_gain(np.eye(geom.N_t), 0.3, geom), float)
    with pytest.raises(ContractViolation):
        beampattern_gain(-np.eye(geom.N_t), 0.0, geom)
