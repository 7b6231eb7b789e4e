"""Comparator models sharing the rolling out-of-sample protocol.

Three baselines: a short-window historical simulation, a fixed-parameter
ALD refit on the rolling schedule, and a two-parameter normal score
recursion (time-varying mu and ln sigma, same update rule and protocol as
the main model).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import stats

from . import _kernels, ald
from .estimation import (
    FitConfig,
    _method_of_moments_link,
    _minimize_multistart,
    _PENALTY,
)
from .exceptions import DomainError, EstimationError, InputError
from .filtering import GasCoefficients
from .forecast import RiskForecast, RollingConfig


@dataclass(frozen=True)
class NormalParams:
    """Location/scale pair of a normal conditional distribution."""

    mu: float
    sigma: float

    def __post_init__(self):
        if not (math.isfinite(self.mu) and math.isfinite(self.sigma)):
            raise DomainError(f"normal parameters must be finite, got {self}")
        if self.sigma <= 0.0:
            raise DomainError(f"sigma must be > 0, got {self.sigma}")


def normal_var_es(params: NormalParams, alpha: float) -> tuple[float, float]:
    """Closed-form normal VaR and ES: mu + sigma z_a and mu - sigma phi(z_a)/a."""
    z = stats.norm.ppf(alpha)
    var = params.mu + params.sigma * z
    es = params.mu - params.sigma * stats.norm.pdf(z) / alpha
    return float(var), float(es)


def historical_var_es(series, window: int = 25, alpha: float = 0.01):
    """Rolling empirical quantile VaR with the window-tail mean as ES.

    For each day t past the window, VaR_t is the linearly interpolated
    alpha order statistic of the previous `window` returns and ES_t the
    mean of the window returns at or below VaR_t (nonempty: the window
    minimum is always included). Returns (var, es) arrays of length
    len(series) - window, aligned to targets window..T-1.
    """
    y = np.asarray(series, dtype=float)
    if window < 2:
        raise InputError(f"window must be >= 2, got {window}")
    if y.shape[0] <= window:
        raise InputError(
            f"series length {y.shape[0]} must exceed window {window}"
        )
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    n = y.shape[0] - window
    var = np.empty(n)
    es = np.empty(n)
    for i, t in enumerate(range(window, y.shape[0])):
        w = y[t - window : t]
        v = np.quantile(w, alpha)  # linear-interpolation order statistic
        var[i] = v
        es[i] = w[w <= v].mean()
    return var, es


def static_ald_var_es(
    series,
    train_length: int,
    alpha: float,
    fit_config: FitConfig = FitConfig(),
    refit_interval: int = 5,
):
    """Fixed-parameter ALD forecasts on the rolling refit schedule.

    Refits the restricted (a = b = 0) maximum likelihood on the expanding
    window every `refit_interval` days; VaR/ES are the ALD closed forms at
    the fitted parameters and stay constant between refits. Returns
    (var, es) arrays aligned to targets train_length..T-1.
    """
    y = np.asarray(series, dtype=float)
    if y.shape[0] <= train_length:
        raise InputError(
            f"series length {y.shape[0]} must exceed train_length {train_length}"
        )
    cfg = replace(fit_config, restrict_static=True)
    from .estimation import fit

    n = y.shape[0] - train_length
    var = np.empty(n)
    es = np.empty(n)
    cur = (np.nan, np.nan)
    for j in range(n):
        if j % refit_interval == 0:
            origin = train_length + j
            try:
                res = fit(y[:origin], cfg)
            except EstimationError as exc:
                raise EstimationError(
                    f"static refit at origin {origin} failed: {exc}"
                ) from exc
            k = res.coeffs.kappa
            params = ald.AldParams(k[0], math.exp(k[1]), math.exp(k[2]))
            cur = (
                float(ald.quantile(alpha, params)),
                float(ald.tail_expectation(alpha, params)),
            )
        var[j], es[j] = cur
    return var, es


def normal_score(y, params: NormalParams):
    """Link-space score (d/d mu, d/d ln sigma) of the normal log density."""
    z = (np.asarray(y, dtype=float) - params.mu) / params.sigma
    return np.stack([z / params.sigma, -1.0 + z * z], axis=-1)


def _normal_nll(raw, y) -> float:
    """Objective for the 6-coefficient normal recursion; total by penalty."""
    raw = np.asarray(raw, dtype=float)
    penalty = _PENALTY + float(raw @ raw)
    b = np.tanh(raw[4:6])
    if np.any(np.abs(b) >= 1.0):
        return penalty
    theta0 = raw[:2] / (1.0 - b)
    total, diverged = _kernels.norm_loglik(y, raw[:2], raw[2:4], b, theta0)
    if diverged >= 0 or not np.isfinite(total):
        return penalty
    return -total


def _normal_starts(y: np.ndarray, config: FitConfig) -> list[np.ndarray]:
    link0 = _method_of_moments_link(y)[:2]
    if config.restrict_static:
        base = link0
    else:
        b0 = 0.9
        base = np.concatenate(
            [(1.0 - b0) * link0, np.full(2, 0.05), np.full(2, np.arctanh(b0))]
        )
    starts = [base]
    for r in range(1, config.n_restarts):
        rng = np.random.default_rng([config.seed, r])
        starts.append(base + rng.normal(0.0, 0.2, size=base.size))
    return starts


def _embed_static2(kappa2: np.ndarray) -> np.ndarray:
    raw = np.zeros(6)
    raw[:2] = kappa2
    return raw


def _fit_normal(y: np.ndarray, config: FitConfig) -> np.ndarray:
    """Fit the normal recursion; returns the raw 6-vector optimum."""
    if config.restrict_static:
        objective = lambda k: _normal_nll(_embed_static2(k), y)
    else:
        objective = lambda raw: _normal_nll(raw, y)
    x, _, _ = _minimize_multistart(objective, _normal_starts(y, config), config)
    return _embed_static2(x) if config.restrict_static else x


def gas_normal_forecast(
    series,
    config: RollingConfig = RollingConfig(),
    fit_config: FitConfig = FitConfig(),
) -> list[RiskForecast]:
    """Rolling VaR/ES from the normal score recursion.

    Same protocol as forecast.rolling_forecast: expanding-window refits
    every refit_interval days, state carried continuously across refits.
    """
    y = np.asarray(series, dtype=float)
    train = config.train_length
    if y.shape[0] <= train:
        raise InputError(
            f"series length {y.shape[0]} must exceed train_length {train}"
        )

    def _refit(origin: int) -> np.ndarray:
        try:
            raw = _fit_normal(y[:origin], fit_config)
        except EstimationError as exc:
            raise EstimationError(
                f"normal refit at origin {origin} failed: {exc}"
            ) from exc
        return raw

    def _advance(state: np.ndarray, yt: float, raw: np.ndarray) -> np.ndarray:
        params = NormalParams(state[0], math.exp(state[1]))
        s = normal_score(yt, params)
        b = np.tanh(raw[4:6])
        new = raw[:2] + raw[2:4] * s + b * state
        if not np.all(np.isfinite(new)) or np.any(
            np.abs(new) > _kernels.STATE_BOUND
        ):
            from .exceptions import FilterDivergenceError

            raise FilterDivergenceError(f"normal filter state diverged: {new}")
        return new

    raw = _refit(train)
    b = np.tanh(raw[4:6])
    theta, _, _, diverged = _kernels.norm_filter(
        y[:train], raw[:2], raw[2:4], b, raw[:2] / (1.0 - b)
    )
    if diverged >= 0:
        raise EstimationError(f"normal filter diverged in training at {diverged}")
    state = theta[-1]
    out: list[RiskForecast] = []
    for t in range(train, y.shape[0]):
        j = t - train
        if j > 0 and j % config.refit_interval == 0:
            raw = _refit(t)
        state = _advance(state, y[t - 1], raw)
        params = NormalParams(state[0], math.exp(state[1]))
        var, es = normal_var_es(params, config.alpha)
        out.append(
            RiskForecast(
                time_index=t,
                params_next=params,
                var_alpha=var,
                es_alpha=es,
                alpha=config.alpha,
            )
        )
    return out
