"""Score-driven asymmetric-Laplace engine for VaR/ES forecasting and backtesting."""

from .ald import AldParams, MomentSet, cdf, log_pdf, moments, pdf, quantile, sample, tail_expectation
from .backtest import (
    LossSummary,
    TestReport,
    cc_test,
    dq_test,
    es_bootstrap_test,
    fzl_loss,
    jarque_bera,
    ql_loss,
    uc_test,
    violations,
)
from .baselines import NormalParams, gas_normal_forecast, historical_var_es, static_ald_var_es
from .estimation import FitConfig, FitResult, decode, encode, fit, negative_log_likelihood, std_errors
from .filtering import FilterState, GasCoefficients, ParamPath, filter_series, init_state, pit, score, step
from .forecast import RiskForecast, RollingConfig, forecast_one, moment_path, rolling_forecast
from .simulate import SimulationSpec, simulate_path

__version__ = "0.1.0"

__all__ = [
    "AldParams",
    "MomentSet",
    "log_pdf",
    "pdf",
    "cdf",
    "quantile",
    "moments",
    "sample",
    "tail_expectation",
    "GasCoefficients",
    "FilterState",
    "ParamPath",
    "score",
    "step",
    "init_state",
    "filter_series",
    "pit",
    "FitConfig",
    "FitResult",
    "fit",
    "negative_log_likelihood",
    "std_errors",
    "encode",
    "decode",
    "RiskForecast",
    "RollingConfig",
    "forecast_one",
    "rolling_forecast",
    "moment_path",
    "SimulationSpec",
    "simulate_path",
    "NormalParams",
    "historical_var_es",
    "static_ald_var_es",
    "gas_normal_forecast",
    "TestReport",
    "LossSummary",
    "violations",
    "uc_test",
    "cc_test",
    "dq_test",
    "es_bootstrap_test",
    "ql_loss",
    "fzl_loss",
    "jarque_bera",
    "__version__",
]
