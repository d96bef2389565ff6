"""Constant-velocity Kalman filter over the 8-dimensional box state.

State layout is (u, v, gamma, h, du, dv, dgamma, dh); only the first four
components are measured. Noise standard deviations scale with the current
box height, so uncertainty grows with apparent target size. The time step
is fixed at one frame.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NumericDegeneracyError

# Measured components: u, v, gamma, h.
_NDIM = 4

_MOTION = np.eye(2 * _NDIM)
_MOTION[:_NDIM, _NDIM:] = np.eye(_NDIM)


@dataclass(frozen=True)
class NoiseProfile:
    """Height-relative noise scales for process and measurement models."""

    std_weight_position: float = 1.0 / 20
    std_weight_velocity: float = 1.0 / 160

    def __post_init__(self):
        if self.std_weight_position <= 0 or self.std_weight_velocity <= 0:
            raise ValueError("noise weights must be strictly positive")


@dataclass(frozen=True)
class TrackState:
    """Gaussian state estimate: 8-vector mean and 8x8 covariance."""

    mean: np.ndarray
    covariance: np.ndarray


def _measurement(measurement) -> np.ndarray:
    m = np.asarray(measurement, dtype=float).reshape(_NDIM)
    if m[3] <= 0:
        raise ValueError(f"measurement height must be positive, got {m[3]}")
    return m


def initiate(measurement, noise: NoiseProfile = NoiseProfile()) -> TrackState:
    """Start a new state from an unmatched measurement (u, v, gamma, h).

    Velocities start at zero with deliberately wide uncertainty; position
    uncertainty scales with the measured height.
    """
    m = _measurement(measurement)
    mean = np.concatenate([m, np.zeros(_NDIM)])
    wp = noise.std_weight_position
    wv = noise.std_weight_velocity
    h = m[3]
    std = np.array(
        [
            2 * wp * h,
            2 * wp * h,
            1e-2,
            2 * wp * h,
            10 * wv * h,
            10 * wv * h,
            1e-5,
            10 * wv * h,
        ]
    )
    return TrackState(mean=mean, covariance=np.diag(np.square(std)))


def predict(state: TrackState, noise: NoiseProfile = NoiseProfile()) -> TrackState:
    """Advance one frame under the constant-velocity motion model."""
    wp = noise.std_weight_position
    wv = noise.std_weight_velocity
    h = state.mean[3]
    std = np.array([wp * h, wp * h, 1e-2, wp * h, wv * h, wv * h, 1e-5, wv * h])
    process_cov = np.diag(np.square(std))
    mean = _MOTION @ state.mean
    covariance = _MOTION @ state.covariance @ _MOTION.T + process_cov
    return TrackState(mean=mean, covariance=covariance)


def project(
    state: TrackState, noise: NoiseProfile = NoiseProfile()
) -> tuple[np.ndarray, np.ndarray]:
    """Project the state into measurement space.

    Returns the positional mean and H P H^T + R with height-scaled
    measurement noise R.
    """
    wp = noise.std_weight_position
    h = state.mean[3]
    std = np.array([wp * h, wp * h, 1e-1, wp * h])
    mean4 = state.mean[:_NDIM].copy()
    cov4 = state.covariance[:_NDIM, :_NDIM] + np.diag(np.square(std))
    return mean4, cov4


def update(
    state: TrackState, measurement, noise: NoiseProfile = NoiseProfile()
) -> TrackState:
    """Condition the state on a measurement (u, v, gamma, h).

    The gain solve goes through a Cholesky factorization of the innovation
    covariance; the posterior covariance is re-symmetrized to keep round-off
    from breaking positive semidefiniteness.
    """
    m = _measurement(measurement)
    mean4, cov4 = project(state, noise)
    try:
        chol = scipy.linalg.cho_factor(cov4, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise NumericDegeneracyError(f"singular innovation covariance: {exc}") from exc
    # gain = P H^T S^-1, solved as S gain^T = H P.
    gain = scipy.linalg.cho_solve(
        chol, state.covariance[:, :_NDIM].T, check_finite=False
    ).T
    innovation = m - mean4
    mean = state.mean + gain @ innovation
    covariance = state.covariance - gain @ cov4 @ gain.T
    covariance = 0.5 * (covariance + covariance.T)
    return TrackState(mean=mean, covariance=covariance)


def gating_distance(
    state: TrackState, measurements, noise: NoiseProfile = NoiseProfile()
) -> np.ndarray:
    """Squared Mahalanobis distance of each measurement to the projection.

    ``measurements`` is an (n, 4) array-like of (u, v, gamma, h) rows; the
    solve uses the lower-triangular Cholesky factor of the projected
    covariance for numerical stability.
    """
    z = np.atleast_2d(np.asarray(measurements, dtype=float))
    if z.ndim != 2 or z.shape[1] != _NDIM or z.shape[0] == 0:
        raise ValueError(f"expected a nonempty (n, {_NDIM}) measurement array")
    mean4, cov4 = project(state, noise)
    try:
        factor = np.linalg.cholesky(cov4)
    except np.linalg.LinAlgError as exc:
        raise NumericDegeneracyError(f"projected covariance not PD: {exc}") from exc
    solved = scipy.linalg.solve_triangular(
        factor, (z - mean4).T, lower=True, check_finite=False
    )
    return np.sum(solved * solved, axis=0)
