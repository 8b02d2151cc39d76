"""Closed-form physical-layer quantities for the ULA-equipped UAV."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import SPEED_OF_LIGHT


class ContractViolation(ValueError):
    """An input broke a documented precondition (e.g. a non-PSD covariance)."""


@dataclass(frozen=True)
class ArrayGeometry:
    N_t: int
    N_r: int
    spacing: float
    wavelength: float

    def __post_init__(self):
        if self.N_t < 2 or self.N_r < 1 or self.spacing <= 0 or self.wavelength <= 0:
            raise ContractViolation(f"invalid array geometry {self}")

    @classmethod
    def from_config(cls, config) -> "ArrayGeometry":
        return cls(config.N_t, config.N_r, config.spacing, config.wavelength)


def steering_vector(theta, geom: ArrayGeometry) -> np.ndarray:
    """Transmit steering vector(s); a 1-D array of angles gives one row per angle."""
    m = np.arange(geom.N_t)
    phase = 2 * np.pi * (geom.spacing / geom.wavelength) * np.multiply.outer(np.sin(theta), m)
    return np.exp(1j * phase)


def channel_vector(theta: float, d: float, geom: ArrayGeometry, alpha0: float = 1.0) -> np.ndarray:
    if not d > 0:
        raise ContractViolation(f"distance must be positive, got {d}")
    return (alpha0 / d) * np.exp(2j * np.pi * d / geom.wavelength) * steering_vector(theta, geom)


def omni_covariance(P_T: float, N_t: int) -> np.ndarray:
    return (P_T / N_t) * np.eye(N_t, dtype=complex)


def omni_sinr(d_k: float, K: int, alpha0: float, P_T: float, sigma_c2: float) -> float:
    signal = alpha0**2 * P_T / (d_k**2 * K)
    return signal / ((K - 1) * signal + sigma_c2)


def directional_sinr(h_k: np.ndarray, beams, k: int, sigma_c2: float) -> float:
    gains = np.abs(np.asarray(beams) @ h_k.conj()) ** 2
    return float(gains[k] / (gains.sum() - gains[k] + sigma_c2))


def rate(gamma) -> float:
    return np.log2(1.0 + gamma)


def reflection_coeff(d: float, epsilon: complex) -> complex:
    return epsilon / d**2


def radar_snr_omni(beta: complex, P_T: float, G_m: float, sigma2: float) -> float:
    return P_T * G_m * abs(beta) ** 2 / sigma2


def radar_snr_dir(theta_true: float, beams, beta: complex, G_m: float, sigma2: float,
                  geom: ArrayGeometry) -> float:
    a = steering_vector(theta_true, geom)
    energy = np.sum(np.abs(np.asarray(beams) @ a.conj()) ** 2)
    return float(G_m * abs(beta) ** 2 * energy / sigma2)


def check_psd(W: np.ndarray, herm_tol: float = 1e-9, eig_tol: float = 1e-8) -> None:
    scale = max(abs(np.trace(W)), 1.0)
    if np.max(np.abs(W - W.conj().T)) > herm_tol * scale:
        raise ContractViolation("matrix is not Hermitian")
    if np.linalg.eigvalsh((W + W.conj().T) / 2)[0] < -eig_tol * scale:
        raise ContractViolation("matrix is not positive semidefinite")


def beampattern_gain(W: np.ndarray, theta, geom: ArrayGeometry) -> np.ndarray | float:
    """Radiated power a^H(theta) W a(theta); vectorised over ``theta``."""
    check_psd(W)
    A = steering_vector(theta, geom)
    gain = np.einsum("...i,ij,...j->...", A.conj(), W, A)
    if np.max(np.abs(gain.imag)) > 1e-9 * max(abs(np.trace(W)), 1.0):
        raise ContractViolation("beampattern gain has an imaginary residue")
    out = np.maximum(gain.real, 0.0)
    return float(out) if out.ndim == 0 else out


def wavelength_for(f_c: float) -> float:
    return SPEED_OF_LIGHT / f_c
