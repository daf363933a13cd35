"""Per-stick discretized double-integrator Kalman filter.

The stick tip is modeled per axis as a particle driven by white-noise force
(constant between sampling instants), observed through noisy position
measurements.  The two axes are uncoupled, so each stick carries two
independent 2-state filters (position, velocity).  Missed detections are
handled by predict-only coasting: the belief keeps advancing under the
motion model until a measurement is assigned again.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .core import StickId

_I2 = np.eye(2)


@dataclass(frozen=True)
class KinematicModel:
    """Discretized constant-force model for one axis.

    A = [[1, T], [0, 1]], G = [T^2/2, T]^T, C = [1, 0],
    Q = G G^T sigma_w, R = sigma_v.
    """

    T: float
    A: np.ndarray
    G: np.ndarray
    C: np.ndarray
    Q: np.ndarray
    R: float


def build_model(T: float, sigma_w: float, sigma_v: float) -> KinematicModel:
    if T <= 0:
        raise ValueError(f"T must be positive: {T}")
    if sigma_w <= 0:
        raise ValueError(f"sigma_w must be positive: {sigma_w}")
    if sigma_v <= 0:
        raise ValueError(f"sigma_v must be positive: {sigma_v}")
    A = np.array([[1.0, T], [0.0, 1.0]])
    G = np.array([[T * T / 2.0], [T]])
    Q = (G @ G.T) * sigma_w
    C = np.array([[1.0, 0.0]])
    return KinematicModel(T=T, A=A, G=G, C=C, Q=Q, R=float(sigma_v))


@dataclass(frozen=True)
class AxisEstimate:
    """State mean [p, v] and covariance for one axis."""

    x: np.ndarray  # shape (2,)
    P: np.ndarray  # shape (2, 2), symmetric PSD

    @property
    def p(self) -> float:
        return float(self.x[0])

    @property
    def v(self) -> float:
        return float(self.x[1])


@dataclass(frozen=True)
class TrackBelief:
    """Joint belief for one stick: independent x/y axis estimates plus the
    coast counter used for track death."""

    stick: StickId
    x_axis: AxisEstimate
    y_axis: AxisEstimate
    frames_since_measurement: int = 0
    initialized: bool = True

    @property
    def position(self) -> tuple[float, float]:
        return (self.x_axis.p, self.y_axis.p)

    @property
    def velocity(self) -> tuple[float, float]:
        return (self.x_axis.v, self.y_axis.v)


def initialize(
    stick: StickId,
    first_meas: tuple[float, float],
    pos_var: float = 1e4,
    vel_var: float = 1e6,
) -> TrackBelief:
    """Seed a track at a measurement with zero velocity and wide covariance."""
    P0 = np.diag([pos_var, vel_var])
    return TrackBelief(
        stick=stick,
        x_axis=AxisEstimate(np.array([float(first_meas[0]), 0.0]), P0.copy()),
        y_axis=AxisEstimate(np.array([float(first_meas[1]), 0.0]), P0.copy()),
        frames_since_measurement=0,
        initialized=True,
    )


def _predict_axis(est: AxisEstimate, model: KinematicModel) -> AxisEstimate:
    A = model.A
    x = A @ est.x
    P = A @ est.P @ A.T + model.Q
    return AxisEstimate(x, P)


def _update_axis(est: AxisEstimate, y: float, model: KinematicModel) -> AxisEstimate:
    P = est.P
    S = P[0, 0] + model.R
    if S <= 0:
        raise ValueError(f"innovation variance not positive ({S}); covariance corrupted")
    K = P[:, :1] / S  # P C^T / S, shape (2, 1)
    x = est.x + (K[:, 0] * (y - est.x[0]))
    IKC = _I2 - K @ model.C
    # Joseph form keeps P symmetric PSD under roundoff
    P = IKC @ P @ IKC.T + (K @ K.T) * model.R
    P = (P + P.T) * 0.5
    return AxisEstimate(x, P)


def predict(belief: TrackBelief, model: KinematicModel) -> TrackBelief:
    """Advance the belief one filter step under the motion model.

    frames_since_measurement is a per-frame counter owned by the engine and
    deliberately not touched here.
    """
    if not belief.initialized:
        raise ValueError("predict on uninitialized belief")
    return replace(
        belief,
        x_axis=_predict_axis(belief.x_axis, model),
        y_axis=_predict_axis(belief.y_axis, model),
    )


def update(belief: TrackBelief, meas: tuple[float, float], model: KinematicModel) -> TrackBelief:
    """Fold a position measurement into the belief; resets the coast counter."""
    if not belief.initialized:
        raise ValueError("update on uninitialized belief")
    mx, my = float(meas[0]), float(meas[1])
    if not (np.isfinite(mx) and np.isfinite(my)):
        raise ValueError(f"non-finite measurement: {meas}")
    return replace(
        belief,
        x_axis=_update_axis(belief.x_axis, mx, model),
        y_axis=_update_axis(belief.y_axis, my, model),
        frames_since_measurement=0,
    )
