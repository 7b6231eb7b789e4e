"""Score-driven recursion for the time-varying ALD parameters.

The parameter vector evolves in link space theta_tilde = (mu, ln sigma,
ln p) as

    theta_tilde[t+1] = kappa + a * score[t] + b * theta_tilde[t]

componentwise, where score[t] is the gradient of the conditional log
density with respect to the link coordinates. Running the recursion on
(mu, ln sigma, ln p) rather than (mu, sigma, p) keeps sigma and p positive
for any coefficient values; the chain rule maps the natural-parameter
gradient into link space (multiply the sigma and p components by sigma and
p respectively).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .ald import AldParams, _cdf_arrays
from .exceptions import DomainError, FilterDivergenceError, InputError

STATE_BOUND = _kernels.STATE_BOUND


@dataclass(frozen=True)
class GasCoefficients:
    """Static coefficients (kappa, diag A, diag B) of the recursion.

    Component order is (mu, ln sigma, ln p). Every |b_i| must be < 1 so the
    stationary initialization kappa / (1 - b) exists.
    """

    kappa: np.ndarray
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        for name in ("kappa", "a", "b"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (3,):
                raise DomainError(f"{name} must be a 3-vector, got shape {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise DomainError(f"{name} must be finite, got {arr}")
            object.__setattr__(self, name, arr)
        if np.any(np.abs(self.b) >= 1.0):
            raise DomainError(
                f"|b| must be < 1 for a stationary initialization, got {self.b}"
            )


@dataclass(frozen=True)
class FilterState:
    """Link-space state theta_tilde = (mu, ln sigma, ln p)."""

    theta_tilde: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.theta_tilde, dtype=float)
        if arr.shape != (3,) or not np.all(np.isfinite(arr)):
            raise DomainError(f"state must be a finite 3-vector, got {arr}")
        object.__setattr__(self, "theta_tilde", arr)

    @property
    def params(self) -> AldParams:
        t = self.theta_tilde
        return AldParams(mu=t[0], sigma=math.exp(t[1]), p=math.exp(t[2]))


@dataclass(frozen=True)
class ParamPath:
    """Per-time-step filtered quantities over one series.

    theta_tilde[t] is the link state in force when y[t] was observed,
    scores[t] the link-space score at (y[t], theta[t]) and loglik[t] the
    log-density contribution ln f(y[t]; theta[t]).
    """

    theta_tilde: np.ndarray  # (T, 3)
    scores: np.ndarray  # (T, 3)
    loglik: np.ndarray  # (T,)
    total_loglik: float

    def __len__(self) -> int:
        return self.theta_tilde.shape[0]

    @property
    def mu(self) -> np.ndarray:
        return self.theta_tilde[:, 0]

    @property
    def sigma(self) -> np.ndarray:
        return np.exp(self.theta_tilde[:, 1])

    @property
    def p(self) -> np.ndarray:
        return np.exp(self.theta_tilde[:, 2])

    def params_at(self, t: int) -> AldParams:
        return FilterState(self.theta_tilde[t]).params

    def state_at(self, t: int) -> FilterState:
        return FilterState(self.theta_tilde[t])


def score(y, params: AldParams):
    """Link-space score of the ALD log density at observation(s) `y`.

    Returns (d/d mu, d/d ln sigma, d/d ln p) of ln f(y; params), shape
    y.shape + (3,). The kink y == mu uses the y >= mu branch.
    """
    mu, sigma, p = params.mu, params.sigma, params.p
    z = np.asarray(y, dtype=float) - mu
    up = z >= 0.0
    w_up = p * z / sigma
    w_dn = z / (sigma * p)
    common = 1.0 - 2.0 * p * p / (1.0 + p * p)
    d_mu = np.where(up, p / sigma, -1.0 / (sigma * p))
    d_lnsigma = np.where(up, -1.0 + w_up, -1.0 - w_dn)
    d_lnp = common - np.where(up, w_up, w_dn)
    return np.stack([d_mu, d_lnsigma, d_lnp], axis=-1)


def step(state: FilterState, y: float, coeffs: GasCoefficients) -> FilterState:
    """One recursion update: theta' = kappa + a * score + b * theta."""
    s = score(y, state.params)
    new = coeffs.kappa + coeffs.a * s + coeffs.b * state.theta_tilde
    if not np.all(np.isfinite(new)) or np.any(np.abs(new) > STATE_BOUND):
        raise FilterDivergenceError(f"filter state diverged: {new}")
    return FilterState(new)


def init_state(coeffs: GasCoefficients) -> FilterState:
    """Stationary initialization theta_1 = kappa / (1 - b) (diagonal B)."""
    if np.any(np.abs(coeffs.b) >= 1.0):
        raise DomainError(f"|b| must be < 1 to initialize, got {coeffs.b}")
    return FilterState(coeffs.kappa / (1.0 - coeffs.b))


def filter_series(series, coeffs: GasCoefficients) -> ParamPath:
    """Filter a full return series, recording the path and log likelihood.

    Deterministic: identical inputs give the bitwise-identical path.

    Raises
    ------
    InputError
        Series shorter than 2 or containing non-finite values.
    FilterDivergenceError
        State left the admissible region; carries the offending index.
    """
    y = np.asarray(series, dtype=float)
    if y.ndim != 1 or y.shape[0] < 2:
        raise InputError(f"series must be 1-d with length >= 2, got shape {y.shape}")
    if not np.all(np.isfinite(y)):
        raise InputError("series contains non-finite values")
    theta0 = init_state(coeffs).theta_tilde
    theta, scores, loglik, diverged = _kernels.ald_filter(
        y, coeffs.kappa, coeffs.a, coeffs.b, theta0
    )
    if diverged >= 0:
        raise FilterDivergenceError(
            f"filter diverged at time index {diverged}", time_index=int(diverged)
        )
    return ParamPath(theta, scores, loglik, float(np.sum(loglik)))


def pit(series, path: ParamPath) -> np.ndarray:
    """Probability integral transform u_t = F(y_t; theta_t), elementwise."""
    y = np.asarray(series, dtype=float)
    if y.shape[0] != len(path):
        raise InputError(
            f"series length {y.shape[0]} does not match path length {len(path)}"
        )
    return _cdf_arrays(y, path.mu, path.sigma, path.p)
