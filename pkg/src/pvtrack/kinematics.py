"""Near-constant-velocity motion model and scalar position sensor.

The state is ``(position, velocity)`` on a line. Everything is written out
in scalar arithmetic because the filter runs millions of 2x2 updates and
numpy call overhead dominates at that size.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_LOG_2PI = math.log(2.0 * math.pi)


class NumericalDegeneracyError(ArithmeticError):
    """Raised when the innovation variance is not strictly positive."""


@dataclass(frozen=True, slots=True)
class GaussianState:
    """Gaussian over (position [m], velocity [m/s]).

    The covariance is stored by its three free entries, so it is symmetric
    by construction.
    """

    pos: float
    vel: float
    p_pp: float
    p_pv: float
    p_vv: float

    @classmethod
    def from_arrays(cls, mean, covariance) -> "GaussianState":
        mean = np.asarray(mean, dtype=float).reshape(2)
        cov = np.asarray(covariance, dtype=float).reshape(2, 2)
        scale = max(1.0, float(np.abs(cov).max()))
        if abs(cov[0, 1] - cov[1, 0]) > 1e-9 * scale:
            raise ValueError("covariance is not symmetric")
        state = cls(float(mean[0]), float(mean[1]), float(cov[0, 0]),
                    float(cov[0, 1]), float(cov[1, 1]))
        if not state.is_psd():
            raise ValueError("covariance is not positive semi-definite")
        return state

    @property
    def mean(self) -> np.ndarray:
        return np.array([self.pos, self.vel])

    @property
    def covariance(self) -> np.ndarray:
        return np.array([[self.p_pp, self.p_pv], [self.p_pv, self.p_vv]])

    @property
    def pos_std(self) -> float:
        return math.sqrt(max(self.p_pp, 0.0))

    def eigenvalues(self) -> tuple[float, float]:
        half_tr = 0.5 * (self.p_pp + self.p_vv)
        disc = math.hypot(0.5 * (self.p_pp - self.p_vv), self.p_pv)
        return half_tr - disc, half_tr + disc

    def is_psd(self, tol: float = 1e-12) -> bool:
        return self.eigenvalues()[0] >= -tol


@dataclass(frozen=True, slots=True)
class NcvModel:
    """Near-constant-velocity dynamics with a position-only sensor.

    ``q`` is the continuous white-noise acceleration intensity (m^2/s^3),
    ``dt`` the frame period and ``meas_sigma`` the sensor standard deviation.
    """

    q: float = 1.0
    dt: float = 1.0
    meas_sigma: float = 1.0

    def __post_init__(self):
        for name in ("q", "dt", "meas_sigma"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def transition(self) -> np.ndarray:
        return np.array([[1.0, self.dt], [0.0, 1.0]])

    @property
    def process_noise(self) -> np.ndarray:
        dt = self.dt
        return self.q * np.array([[dt**3 / 3.0, dt**2 / 2.0],
                                  [dt**2 / 2.0, dt]])


def predict(state: GaussianState, model: NcvModel) -> GaussianState:
    """Propagate one frame: ``F x`` and ``F P F' + Q``."""
    dt, q = model.dt, model.q
    p_pp = (state.p_pp + 2.0 * dt * state.p_pv + dt * dt * state.p_vv
            + q * dt**3 / 3.0)
    p_pv = state.p_pv + dt * state.p_vv + q * dt * dt / 2.0
    p_vv = state.p_vv + q * dt
    return GaussianState(state.pos + dt * state.vel, state.vel, p_pp, p_pv, p_vv)


def update(state: GaussianState, z: float,
           model: NcvModel) -> tuple[GaussianState, float]:
    """Kalman update with a scalar position measurement.

    Returns
    -------
    (GaussianState, float)
        Posterior state and ``log N(z; H x, H P H' + R)``.
    """
    r = model.meas_sigma * model.meas_sigma
    s = state.p_pp + r
    if not s > 0.0:
        raise NumericalDegeneracyError(f"innovation variance {s!r} <= 0")
    innov = z - state.pos
    k_pos = state.p_pp / s
    k_vel = state.p_pv / s
    # (I - K H) P written per entry; p_pp and p_pv shrink by R / S
    post = GaussianState(
        state.pos + k_pos * innov,
        state.vel + k_vel * innov,
        state.p_pp * r / s,
        state.p_pv * r / s,
        state.p_vv - k_vel * state.p_pv,
    )
    loglik = -0.5 * (_LOG_2PI + math.log(s) + innov * innov / s)
    return post, loglik


def log_likelihood(state: GaussianState, z: float, model: NcvModel) -> float:
    s = state.p_pp + model.meas_sigma * model.meas_sigma
    if not s > 0.0:
        raise NumericalDegeneracyError(f"innovation variance {s!r} <= 0")
    innov = z - state.pos
    return -0.5 * (_LOG_2PI + math.log(s) + innov * innov / s)


def gate(state: GaussianState, z: float, gate_distance: float) -> bool:
    """Absolute position gate, inclusive at the boundary."""
    if not gate_distance > 0:
        raise ValueError("gate_distance must be positive")
    return abs(z - state.pos) <= gate_distance
