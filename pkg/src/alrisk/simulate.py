"""Synthetic data generation from the score-driven ALD process."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .exceptions import FilterDivergenceError, InputError
from .filtering import GasCoefficients, ParamPath, init_state


@dataclass(frozen=True)
class SimulationSpec:
    """One reproducible simulation request."""

    coeffs: GasCoefficients
    length: int
    burn_in: int = 500
    seed: int = 0

    def __post_init__(self):
        if self.length < 1:
            raise InputError(f"length must be >= 1, got {self.length}")
        if self.burn_in < 0:
            raise InputError(f"burn_in must be >= 0, got {self.burn_in}")


def simulate_path(spec: SimulationSpec) -> tuple[np.ndarray, ParamPath]:
    """Evolve the recursion generatively and draw y_t ~ ALD(theta_t).

    One uniform is consumed per observation in time order (burn-in draws
    included), each mapped through the ALD inverse CDF at the current
    parameters. The recursion starts from the stationary initialization;
    the first `burn_in` observations are discarded. Returns the retained
    series together with its true parameter path — filtering the output of
    a zero-burn-in run with the same coefficients reproduces that path
    exactly, because generator and filter share the per-step update.
    """
    total = spec.burn_in + spec.length
    rng = np.random.default_rng(spec.seed)
    u = rng.random(total)
    u[u == 0.0] = np.finfo(float).tiny
    theta0 = init_state(spec.coeffs).theta_tilde
    c = spec.coeffs
    y, theta, scores, loglik, diverged = _kernels.ald_simulate(
        u, c.kappa, c.a, c.b, theta0
    )
    if diverged >= 0:
        raise FilterDivergenceError(
            f"simulation diverged at step {diverged}", time_index=int(diverged)
        )
    k = spec.burn_in
    path = ParamPath(
        theta_tilde=theta[k:].copy(),
        scores=scores[k:].copy(),
        loglik=loglik[k:].copy(),
        total_loglik=float(np.sum(loglik[k:])),
    )
    return y[k:].copy(), path
