"""Maximum-likelihood estimation of the recursion coefficients.

The 9 coefficients are optimized in an unconstrained "raw" space

    raw = (kappa_1..3, a_1..3, c_1..3)   with   b_i = tanh(c_i)

so every iterate satisfies |b_i| < 1 and the stationary initialization
always exists. The objective is the negative filtered log likelihood, made
total by mapping filter divergence to the finite penalty 1e10 + |raw|^2
(whose gradient points back toward the admissible region).

Each start is solved by a quasi-Newton (BFGS) pass with central-difference
gradients, alternated with Nelder-Mead refinement. The alternation matters:
the location score jumps when an observation crosses mu, so the filtered
likelihood is only piecewise continuous in the coefficients and a Wolfe
line search alone stalls on the micro-cliffs; the simplex stage walks
through them. The objective is scaled by 1/T inside the optimizer so the
first line-search step is well sized; reported values and the convergence
check are on the unscaled objective.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import _kernels
from .exceptions import EstimationError, InputError, StateError
from .filtering import GasCoefficients

RAW_DIM = 9
_PENALTY = 1e10
MIN_OBS = 100


@dataclass(frozen=True)
class FitConfig:
    """Optimizer settings.

    restrict_static forces a = b = 0, leaving only kappa free: the fit then
    collapses to a constant-parameter ALD maximum likelihood.
    """

    max_iterations: int = 300
    gradient_tolerance: float = 1e-4
    n_restarts: int = 3
    seed: int = 0
    restrict_static: bool = False

    def __post_init__(self):
        if self.max_iterations < 1:
            raise InputError("max_iterations must be >= 1")
        if self.gradient_tolerance <= 0:
            raise InputError("gradient_tolerance must be > 0")
        if self.n_restarts < 1:
            raise InputError("n_restarts must be >= 1")


@dataclass(frozen=True)
class FitResult:
    coeffs: GasCoefficients
    loglik: float
    converged: bool
    n_obs: int
    restricted: bool = False
    std_errors: np.ndarray | None = None


def decode(raw) -> GasCoefficients:
    """Map a raw 9-vector to coefficients; b = tanh(c)."""
    raw = np.asarray(raw, dtype=float)
    return GasCoefficients(kappa=raw[:3], a=raw[3:6], b=np.tanh(raw[6:9]))


def encode(coeffs: GasCoefficients) -> np.ndarray:
    """Inverse of :func:`decode`; c = arctanh(b)."""
    return np.concatenate([coeffs.kappa, coeffs.a, np.arctanh(coeffs.b)])


def negative_log_likelihood(raw, series) -> float:
    """Negative filtered log likelihood; finite for every 9-vector.

    Filter divergence (including |b| rounding to 1 under tanh) returns the
    penalty 1e10 + |raw|^2 instead of raising.
    """
    raw = np.asarray(raw, dtype=float)
    y = np.asarray(series, dtype=float)
    penalty = _PENALTY + float(raw @ raw)
    b = np.tanh(raw[6:9])
    if np.any(np.abs(b) >= 1.0):
        return penalty
    theta0 = raw[:3] / (1.0 - b)
    total, diverged = _kernels.ald_loglik(y, raw[:3], raw[3:6], b, theta0)
    if diverged >= 0 or not np.isfinite(total):
        return penalty
    return -total


def _numeric_gradient(fun, x, rel_step=1e-6):
    """Central differences with per-coordinate step rel_step * (1 + |x_i|)."""
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        h = rel_step * (1.0 + abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        g[i] = (fun(xp) - fun(xm)) / (2.0 * h)
    return g


def _numeric_hessian(fun, x, rel_step=1e-4):
    """Symmetric central-difference Hessian."""
    x = np.asarray(x, dtype=float)
    n = x.size
    h = rel_step * (1.0 + np.abs(x))
    hess = np.empty((n, n))
    f0 = fun(x)
    for i in range(n):
        xp = x.copy()
        xm = x.copy()
        xp[i] += h[i]
        xm[i] -= h[i]
        hess[i, i] = (fun(xp) - 2.0 * f0 + fun(xm)) / (h[i] * h[i])
        for j in range(i + 1, n):
            xpp = x.copy()
            xpm = x.copy()
            xmp = x.copy()
            xmm = x.copy()
            xpp[i] += h[i]; xpp[j] += h[j]
            xpm[i] += h[i]; xpm[j] -= h[j]
            xmp[i] -= h[i]; xmp[j] += h[j]
            xmm[i] -= h[i]; xmm[j] -= h[j]
            val = (fun(xpp) - fun(xpm) - fun(xmp) + fun(xmm)) / (4.0 * h[i] * h[j])
            hess[i, j] = val
            hess[j, i] = val
    return hess


def _method_of_moments_link(y: np.ndarray) -> np.ndarray:
    """Static link-space start: median location, MAD scale, symmetric p."""
    mu0 = float(np.median(y))
    sigma0 = float(np.mean(np.abs(y - mu0)))
    sigma0 = max(sigma0, 1e-8)  # constant series would put ln(0) in the start
    return np.array([mu0, np.log(sigma0), 0.0])


def _starting_points(y: np.ndarray, config: FitConfig) -> list[np.ndarray]:
    link0 = _method_of_moments_link(y)
    if config.restrict_static:
        base = link0
    else:
        b0 = 0.9
        base = np.concatenate(
            [(1.0 - b0) * link0, np.full(3, 0.05), np.full(3, np.arctanh(b0))]
        )
    starts = [base]
    for r in range(1, config.n_restarts):
        rng = np.random.default_rng([config.seed, r])
        starts.append(base + rng.normal(0.0, 0.2, size=base.size))
    return starts


_CHAIN_ROUNDS = 3
_NM_FACTOR = 10  # simplex budget per round, relative to max_iterations


def _chain_minimize(objective, x0, config: FitConfig, scale: float,
                    bfgs_iter: int | None = None, nm_iter: int | None = None,
                    rounds: int = _CHAIN_ROUNDS):
    """Alternate BFGS and Nelder-Mead on the 1/T-scaled objective.

    Returns (x, unscaled fun). Stops early once a simplex pass no longer
    improves the incumbent.
    """
    if bfgs_iter is None:
        bfgs_iter = config.max_iterations
    if nm_iter is None:
        nm_iter = _NM_FACTOR * config.max_iterations
    scaled = lambda x: objective(x) * scale
    jac = lambda x: _numeric_gradient(scaled, x)
    x = np.asarray(x0, dtype=float)
    f = scaled(x)
    for _ in range(rounds):
        res = optimize.minimize(
            scaled, x, jac=jac, method="BFGS",
            options={"maxiter": bfgs_iter,
                     "gtol": config.gradient_tolerance * scale},
        )
        if res.fun < f:
            x, f = res.x, float(res.fun)
        res = optimize.minimize(
            scaled, x, method="Nelder-Mead",
            options={"maxiter": nm_iter, "xatol": 1e-10, "fatol": 1e-13,
                     "adaptive": True},
        )
        improved = res.fun < f - 1e-13
        if res.fun < f:
            x, f = res.x, float(res.fun)
        if not improved:
            break
    return x, f / scale


def _minimize_multistart(objective, starts, config: FitConfig, scale: float = 1.0,
                         bfgs_iter: int | None = None, nm_iter: int | None = None,
                         rounds: int = _CHAIN_ROUNDS):
    """Run the solver chain from every start; keep the best finite optimum.

    Selection is deterministic: lowest objective, ties broken by lowest
    start index. Returns (x, fun, converged) or raises EstimationError if
    every start ended on the divergence penalty.
    """
    best = None
    for idx, x0 in enumerate(starts):
        x, fun = _chain_minimize(objective, x0, config, scale,
                                 bfgs_iter=bfgs_iter, nm_iter=nm_iter,
                                 rounds=rounds)
        if fun >= _PENALTY:
            continue
        if best is None or fun < best[1]:
            best = (x, fun, idx)
    if best is None:
        raise EstimationError("all optimizer restarts diverged")
    x, fun, _ = best
    gnorm = float(np.max(np.abs(_numeric_gradient(objective, x))))
    return x, fun, gnorm <= config.gradient_tolerance


def _embed_static(kappa3: np.ndarray) -> np.ndarray:
    raw = np.zeros(RAW_DIM)
    raw[:3] = kappa3
    return raw


def fit(series, config: FitConfig = FitConfig()) -> FitResult:
    """Maximum-likelihood fit of the recursion coefficients.

    With config.restrict_static only the three kappa coordinates are free
    (a = b = 0): the result is the constant-parameter ALD fit. Deterministic
    for fixed (series, config).

    Raises
    ------
    InputError
        Series shorter than 100 observations.
    EstimationError
        Every restart diverged.
    """
    y = np.asarray(series, dtype=float)
    if y.ndim != 1 or y.shape[0] < MIN_OBS:
        raise InputError(
            f"need at least {MIN_OBS} observations to estimate 9 coefficients, "
            f"got {y.shape}"
        )
    if config.restrict_static:
        objective = lambda k: negative_log_likelihood(_embed_static(k), y)
    else:
        objective = lambda raw: negative_log_likelihood(raw, y)
    x, fun, converged = _minimize_multistart(
        objective, _starting_points(y, config), config
    )
    raw = _embed_static(x) if config.restrict_static else x
    return FitResult(
        coeffs=decode(raw),
        loglik=-fun,
        converged=converged,
        n_obs=int(y.shape[0]),
        restricted=config.restrict_static,
    )


def _ses_from_hessian(hess: np.ndarray, dcoef_draw: np.ndarray) -> np.ndarray:
    """Standard errors from an observed-information matrix.

    dcoef_draw holds d(decoded)/d(raw) per free coordinate (delta method).
    Coordinates where the inverse Hessian is not positive come back NaN; a
    singular Hessian yields all-NaN.
    """
    n = hess.shape[0]
    out = np.full(n, np.nan)
    if not np.all(np.isfinite(hess)):
        return out
    try:
        inv = np.linalg.inv(hess)
    except np.linalg.LinAlgError:
        return out
    diag = np.diag(inv)
    ok = diag > 0.0
    out[ok] = np.sqrt(diag[ok]) * np.abs(dcoef_draw[ok])
    return out


def std_errors(result: FitResult, series) -> np.ndarray:
    """Delta-method standard errors of the decoded coefficients.

    Returns a 9-vector ordered (kappa, a, b); entries are NaN where the
    numeric Hessian is not positive at the optimum, and for the a and b
    slots of a restricted fit (those coordinates were not estimated).

    Raises
    ------
    StateError
        If the fit did not converge.
    """
    if not result.converged:
        raise StateError("standard errors require a converged fit")
    y = np.asarray(series, dtype=float)
    raw = encode(result.coeffs)
    out = np.full(RAW_DIM, np.nan)
    if result.restricted:
        objective = lambda k: negative_log_likelihood(_embed_static(k), y)
        hess = _numeric_hessian(objective, raw[:3])
        out[:3] = _ses_from_hessian(hess, np.ones(3))
        return out
    objective = lambda r: negative_log_likelihood(r, y)
    hess = _numeric_hessian(objective, raw)
    dcoef = np.ones(RAW_DIM)
    dcoef[6:9] = 1.0 - result.coeffs.b**2  # d tanh(c) / dc
    return _ses_from_hessian(hess, dcoef)
