"""One-step-ahead VaR/ES forecasting and the rolling out-of-sample protocol.

VaR is reported as the raw left-tail quantile of the conditional ALD (a
negative number in the 1% tail) and ES as the conditional mean below it,
so ES < VaR for every forecast.

Rolling protocol: fit on the first `train_length` observations, then one
forecast per remaining day. Coefficients are re-estimated every
`refit_interval` days on the expanding window up to the forecast origin;
every refit restarts the optimizer from the same deterministic starting
points (refits depend on the data only, never on earlier refits). The
filter state is carried forward continuously across refit boundaries — a
refit swaps the coefficients driving future updates but does not reset or
re-filter the state, so the emitted parameter path is unbroken.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import ald
from .ald import AldParams, MomentSet
from .estimation import FitConfig, fit
from .exceptions import DomainError, EstimationError, InputError
from .filtering import FilterState, GasCoefficients, ParamPath, filter_series, step


@dataclass(frozen=True)
class RiskForecast:
    """One-step-ahead forecast record for one out-of-sample day.

    params_next holds the forecast conditional distribution; it is an
    AldParams for the main model and a baselines.NormalParams for the
    normal baseline.
    """

    time_index: int
    params_next: object
    var_alpha: float
    es_alpha: float
    alpha: float

    def __post_init__(self):
        if not self.es_alpha < self.var_alpha:
            raise DomainError(
                f"ES must lie strictly below VaR, got es={self.es_alpha} "
                f"var={self.var_alpha}"
            )


@dataclass(frozen=True)
class RollingConfig:
    train_length: int = 1500
    refit_interval: int = 5
    alpha: float = 0.01

    def __post_init__(self):
        if self.train_length < 100:
            raise InputError(f"train_length must be >= 100, got {self.train_length}")
        if self.refit_interval < 1:
            raise InputError(f"refit_interval must be >= 1, got {self.refit_interval}")
        if not 0.0 < self.alpha < 0.5:
            raise InputError(f"alpha must lie in (0, 0.5), got {self.alpha}")


def _forecast_from_state(
    state: FilterState, alpha: float, time_index: int
) -> RiskForecast:
    params = state.params
    return RiskForecast(
        time_index=time_index,
        params_next=params,
        var_alpha=float(ald.quantile(alpha, params)),
        es_alpha=float(ald.tail_expectation(alpha, params)),
        alpha=alpha,
    )


def forecast_one(
    state: FilterState,
    last_y: float,
    coeffs: GasCoefficients,
    alpha: float,
    time_index: int = 0,
) -> RiskForecast:
    """Advance the state one step with `last_y` and price the next day.

    The advanced state theta_{t+1} is decoded into (mu, sigma, p); VaR is
    its alpha-quantile and ES its alpha-tail expectation.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    return _forecast_from_state(step(state, last_y, coeffs), alpha, time_index)


def rolling_forecast(
    series,
    config: RollingConfig = RollingConfig(),
    fit_config: FitConfig = FitConfig(),
) -> list[tuple[RiskForecast, float]]:
    """Out-of-sample forecasts for every day past the training window.

    Returns one (forecast, realized return) pair per out-of-sample day, in
    time order; the forecast for day t is a function of y[0:t] only.

    Raises
    ------
    InputError
        Series not longer than the training window.
    EstimationError
        A refit failed; the message names the refit origin.
    """
    y = np.asarray(series, dtype=float)
    train = config.train_length
    if y.shape[0] <= train:
        raise InputError(
            f"series length {y.shape[0]} must exceed train_length {train}"
        )

    def _refit(origin: int) -> GasCoefficients:
        try:
            return fit(y[:origin], fit_config).coeffs
        except EstimationError as exc:
            raise EstimationError(f"refit at origin {origin} failed: {exc}") from exc

    coeffs = _refit(train)
    # Link state at the last training day, implied by the first fit.
    state = filter_series(y[:train], coeffs).state_at(train - 1)
    out: list[tuple[RiskForecast, float]] = []
    for t in range(train, y.shape[0]):
        j = t - train
        if j > 0 and j % config.refit_interval == 0:
            coeffs = _refit(t)
        state = step(state, y[t - 1], coeffs)
        out.append((_forecast_from_state(state, config.alpha, t), float(y[t])))
    return out


def moment_path(path: ParamPath) -> list[MomentSet]:
    """Conditional moments along a filtered path, one MomentSet per step."""
    return [ald.moments(path.params_at(t)) for t in range(len(path))]
