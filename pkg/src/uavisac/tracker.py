"""Evolution model, measurement model and the EKF recursion on e = [theta, d, v]."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve, LinAlgError

from .config import SPEED_OF_LIGHT as C
from .sensing import Measurement, ideal_measurement
from .world import PolarState, UavState


class DegenerateGeometryError(ValueError):
    """The predicted distance is non-positive (object passed through the UAV footprint)."""


class FilterDivergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrackState:
    e: np.ndarray  # [theta, d, v]
    mse: np.ndarray  # 3x3

    @property
    def polar(self) -> PolarState:
        return PolarState.from_array(self.e)


@dataclass(frozen=True)
class NoiseModel:
    Q_s: np.ndarray
    Q_m: np.ndarray | None = None

    @classmethod
    def from_std(cls, sigma1: float, sigma2: float, sigma3: float) -> "NoiseModel":
        return cls(np.diag([sigma1**2, sigma2**2, sigma3**2]))


def _increments(e: PolarState, uav: UavState, dT: float):
    I = uav.v_u * math.sin(uav.theta_u) * dT
    II = e.v * dT - uav.v_u * math.cos(uav.theta_u) * dT
    return I, II


def evolve(e: PolarState, uav: UavState, dT: float) -> PolarState:
    """One-slot state prediction under the linearised geometry (constant velocity)."""
    I, II = _increments(e, uav, dT)
    s, c = math.sin(e.theta), math.cos(e.theta)
    d_next = e.d + I * s + II * c
    if not d_next > 0:
        raise DegenerateGeometryError(f"predicted distance {d_next} is not positive")
    theta_next = e.theta - (II * s - I * c) / d_next
    return PolarState(theta_next, d_next, e.v)


def measure_fn(e: PolarState, uav: UavState, f_c: float) -> np.ndarray:
    return ideal_measurement(e, uav, f_c)


def jacobian_g(e: PolarState, uav: UavState, dT: float) -> np.ndarray:
    I, II = _increments(e, uav, dT)
    s, c = math.sin(e.theta), math.cos(e.theta)
    D = e.d + I * s + II * c
    if not D > 0:
        raise DegenerateGeometryError(f"predicted distance {D} is not positive")
    D2 = D * D
    return np.array([
        [1 - ((I * s + II * c) * e.d + I**2 + II**2) / D2, (II * s - I * c) / D2,
         -(e.d * s + I) * dT / D2],
        # the printed matrix omits -II*sin(theta) here; this is d(d')/d(theta) of evolve()
        [I * c - II * s, 1.0, dT * c],
        [0.0, 0.0, 1.0],
    ])


def jacobian_h(e: PolarState, uav: UavState, f_c: float) -> np.ndarray:
    return np.array([
        [1.0, 0.0, 0.0],
        [0.0, 2 / C, 0.0],
        [2 * f_c * (e.v * math.sin(e.theta) - uav.v_u * math.sin(e.theta + uav.theta_u)) / C,
         0.0, -2 * f_c * math.cos(e.theta) / C],
    ])


def wrap_angle(x: float) -> float:
    """Wrap to (-pi, pi]."""
    y = math.remainder(x, 2 * math.pi)
    return math.pi if y == -math.pi else y


def _symmetrize(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M + M.T)


def predict(track: TrackState, uav: UavState, Q_s: np.ndarray, dT: float) -> TrackState:
    e = track.polar
    G = jacobian_g(e, uav, dT)
    e_pred = evolve(e, uav, dT)
    return TrackState(e_pred.as_array(), _symmetrize(G @ track.mse @ G.T + Q_s))


def update(pred: TrackState, m: Measurement, uav: UavState, f_c: float,
           Q_m: np.ndarray | None = None, cond_limit: float = 1e14) -> TrackState:
    e_pred = pred.polar
    H = jacobian_h(e_pred, uav, f_c)
    Q_m = m.covariance if Q_m is None else Q_m
    S = H @ pred.mse @ H.T + Q_m
    # Jacobi scaling makes the conditioning test unit-free (rows span ~25 decades)
    scale = 1.0 / np.sqrt(np.diag(S))
    S_n = S * np.outer(scale, scale)
    if not np.all(np.isfinite(S_n)) or np.linalg.cond(S_n) > cond_limit:
        raise FilterDivergenceError("innovation covariance is numerically singular")
    try:
        factor = cho_factor(S_n)
    except LinAlgError as exc:
        raise FilterDivergenceError(f"innovation covariance not positive definite: {exc}") from None
    PHt = pred.mse @ H.T
    # KAL = PHt S^-1 = PHt D (S_n)^-1 D with D = diag(scale)
    gain = (cho_solve(factor, (PHt * scale).T).T) * scale
    innov = m.as_array() - measure_fn(e_pred, uav, f_c)
    innov[0] = wrap_angle(innov[0])
    e_new = pred.e + gain @ innov
    # Joseph form: equal to (I - KH) P for this gain, but stays PSD under round-off
    A = np.eye(3) - gain @ H
    mse_new = _symmetrize(A @ pred.mse @ A.T + gain @ Q_m @ gain.T)
    return TrackState(e_new, mse_new)


def ekf_step(track: TrackState, m: Measurement, uav_prev: UavState, uav: UavState,
             noise: NoiseModel, dT: float, f_c: float) -> TrackState:
    """Prediction with the previous slot's UAV state, then the measurement update.

    ``uav_prev`` drives the evolution from slot n-1 to n; ``uav`` is the pose at
    slot n used by the measurement model.
    """
    pred = predict(track, uav_prev, noise.Q_s, dT)
    return update(pred, m, uav, f_c, noise.Q_m)


def predict_k_steps(track: TrackState, uavs, steps: int, Q_s: np.ndarray, dT: float) -> TrackState:
    """Apply ``steps`` predictions without updates; ``uavs[i]`` is the pose at step i."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    for i in range(steps):
        track = predict(track, uavs[i], Q_s, dT)
    return track
