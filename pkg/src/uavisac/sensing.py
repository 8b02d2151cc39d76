"""CRB-calibrated measurement noise and synthetic radar measurements.

Measurements are truth plus zero-mean Gaussian noise whose variances equal the
Cramer-Rao bounds for the current echo SNR; no waveform is ever synthesised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import SPEED_OF_LIGHT as C
from .world import PolarState, UavState


class NearZenithError(ValueError):
    """Velocity cannot be recovered from Doppler when cos(theta) ~ 0."""


@dataclass(frozen=True)
class CrbParams:
    kappa: float
    iota: float
    N_t: int
    N_r: int
    wavelength: float
    angle_var_ceiling: float = math.radians(1.0) ** 2

    @classmethod
    def from_config(cls, config) -> "CrbParams":
        return cls(config.kappa, config.iota, config.N_t, config.N_r, config.wavelength,
                   config.angle_var_ceiling)


@dataclass(frozen=True)
class CrbVariances:
    theta: float
    tau: float
    mu: float
    ceiling_hit: bool = False


@dataclass(frozen=True)
class Measurement:
    theta_hat: float
    tau_hat: float
    mu_hat: float
    var_theta: float
    var_tau: float
    var_mu: float

    def as_array(self) -> np.ndarray:
        return np.array([self.theta_hat, self.tau_hat, self.mu_hat])

    @property
    def covariance(self) -> np.ndarray:
        return np.diag([self.var_theta, self.var_tau, self.var_mu])


def aperture_width_sq(d: float, theta: float, N_t: int, wavelength: float) -> float:
    # d enters squared, as in the printed bound; see the decisions log
    return np.pi**2 * d**2 * np.cos(theta) ** 2 * (N_t**2 - 1) / (3 * wavelength**2)


def crb_variances(snr: float, crb: CrbParams, theta: float, d: float) -> CrbVariances:
    if not snr > 0:
        raise ValueError(f"SNR must be positive, got {snr}")
    if not d > 0:
        raise ValueError(f"distance must be positive, got {d}")
    base = snr * crb.N_t * crb.N_r
    xi2 = aperture_width_sq(d, theta, crb.N_t, crb.wavelength)
    if xi2 > 0:
        var_theta = 1.0 / (base * xi2)
        ceiling_hit = var_theta > crb.angle_var_ceiling
    else:
        var_theta, ceiling_hit = crb.angle_var_ceiling, True
    if ceiling_hit:
        var_theta = crb.angle_var_ceiling
    return CrbVariances(var_theta, 1.0 / (base * crb.kappa**2), 1.0 / (base * crb.iota**2),
                        ceiling_hit)


def ideal_measurement(e: PolarState, uav: UavState, f_c: float) -> np.ndarray:
    tau = 2 * e.d / C
    mu = -2 * (e.v * math.cos(e.theta) - uav.v_u * math.cos(e.theta + uav.theta_u)) * f_c / C
    return np.array([e.theta, tau, mu])


def synthesize_measurement(e: PolarState, uav: UavState, snr: float, crb: CrbParams,
                           rng: np.random.Generator, f_c: float, noise_scale: float = 1.0
                           ) -> Measurement:
    """Draw one noisy (theta, tau, mu) triple.

    Exactly three standard normals are consumed per call, so schemes sharing
    a seed see identical noise draws. ``noise_scale=0`` returns the ideal
    measurement (the variances are still the CRB values).
    """
    var = crb_variances(snr, crb, e.theta, e.d)
    z = rng.standard_normal(3)
    std = np.sqrt([var.theta, var.tau, var.mu])
    m = ideal_measurement(e, uav, f_c) + noise_scale * std * z
    return Measurement(m[0], m[1], m[2], var.theta, var.tau, var.mu)


def initial_state_from_measurement(m: Measurement, uav: UavState, f_c: float) -> PolarState:
    cos_t = math.cos(m.theta_hat)
    if abs(cos_t) < 1e-6:
        raise NearZenithError(f"object near zenith (theta={m.theta_hat}); velocity unobservable")
    d = C * m.tau_hat / 2
    # inverse of the Doppler model in ideal_measurement
    v = (uav.v_u * math.cos(m.theta_hat + uav.theta_u) - m.mu_hat * C / (2 * f_c)) / cos_t
    return PolarState(m.theta_hat, d, v)


def initial_mse(m: Measurement, f_c: float, inflation: float = 10.0) -> np.ndarray:
    """Measurement-consistent initial MSE: each variance mapped to state units, inflated."""
    cos_t = math.cos(m.theta_hat)
    var_d = (C / 2) ** 2 * m.var_tau
    var_v = (C / (2 * f_c * cos_t)) ** 2 * m.var_mu
    return inflation * np.diag([m.var_theta, var_d, var_v])
