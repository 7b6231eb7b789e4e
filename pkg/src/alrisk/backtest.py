"""Statistical validation of VaR/ES forecast streams.

Coverage tests (unconditional, conditional, dynamic quantile), a bootstrap
test of the ES exceedance residuals, the quantile and joint (VaR, ES)
loss functions, and the Jarque-Bera normality test used in the
descriptive-statistics block. A violation is a day with realized return
strictly below the VaR forecast; ties count as non-violations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .exceptions import (
    DegenerateInputError,
    DomainError,
    InputError,
    InsufficientExceedancesError,
)


@dataclass(frozen=True)
class TestReport:
    statistic: float
    p_value: float
    n_obs: int
    n_violations: int


@dataclass(frozen=True)
class LossSummary:
    """Average forecast losses; each producer fills its own field."""

    n_obs: int
    mean_ql: float | None = None
    mean_fzl: float | None = None


def _check_lengths(*seqs) -> tuple[np.ndarray, ...]:
    arrays = tuple(np.asarray(s, dtype=float) for s in seqs)
    n = arrays[0].shape[0]
    if any(a.shape[0] != n for a in arrays):
        raise InputError(
            f"sequence lengths differ: {[a.shape[0] for a in arrays]}"
        )
    return arrays


def violations(realized, var_seq) -> np.ndarray:
    """Hit sequence: 1 where the realized return is strictly below VaR."""
    y, v = _check_lengths(realized, var_seq)
    return (y < v).astype(int)


def _xlogy(n: float, x: float) -> float:
    """n * log(x) with the 0 * log(0) = 0 convention."""
    if n == 0:
        return 0.0
    return n * np.log(x)


def uc_test(hits, alpha: float) -> TestReport:
    """Unconditional-coverage likelihood ratio (proportion of failures).

    LR = -2 [ln((1-a)^n0 a^n1) - ln((1-pi)^n0 pi^n1)], pi = n1/n, tested
    against chi-square(1).
    """
    h = np.asarray(hits, dtype=int)
    n = h.shape[0]
    if n < 1:
        raise InputError("need at least one observation")
    n1 = int(h.sum())
    n0 = n - n1
    pi = n1 / n
    lr = -2.0 * (
        _xlogy(n0, 1.0 - alpha)
        + _xlogy(n1, alpha)
        - _xlogy(n0, 1.0 - pi)
        - _xlogy(n1, pi)
    )
    lr = max(lr, 0.0)  # clip tiny negative rounding at pi == alpha
    return TestReport(float(lr), float(stats.chi2.sf(lr, 1)), n, n1)


def _independence_lr(h: np.ndarray) -> float:
    """Markov-independence LR from first-order transition counts."""
    prev, cur = h[:-1], h[1:]
    n00 = int(np.sum((prev == 0) & (cur == 0)))
    n01 = int(np.sum((prev == 0) & (cur == 1)))
    n10 = int(np.sum((prev == 1) & (cur == 0)))
    n11 = int(np.sum((prev == 1) & (cur == 1)))
    m = n00 + n01 + n10 + n11
    pi = (n01 + n11) / m
    pi0 = n01 / (n00 + n01) if (n00 + n01) > 0 else 0.0
    pi1 = n11 / (n10 + n11) if (n10 + n11) > 0 else 0.0
    lr = -2.0 * (
        _xlogy(n00 + n10, 1.0 - pi)
        + _xlogy(n01 + n11, pi)
        - _xlogy(n00, 1.0 - pi0)
        - _xlogy(n01, pi0)
        - _xlogy(n10, 1.0 - pi1)
        - _xlogy(n11, pi1)
    )
    return max(lr, 0.0)


def cc_test(hits, alpha: float) -> TestReport:
    """Conditional coverage: LR_uc + Markov-independence LR vs chi-square(2)."""
    h = np.asarray(hits, dtype=int)
    if h.shape[0] < 2:
        raise InputError("need at least two observations")
    lr = uc_test(h, alpha).statistic + _independence_lr(h)
    return TestReport(float(lr), float(stats.chi2.sf(lr, 2)), h.shape[0], int(h.sum()))


def dq_test(hits, var_seq, alpha: float, n_lags: int = 4) -> TestReport:
    """Dynamic quantile regression test.

    Regresses Hit_t = I_t - alpha on a constant, n_lags of its own past and
    the contemporaneous VaR, over t = n_lags..n-1; the statistic
    beta' (X'X) beta / (alpha (1 - alpha)) is chi-square(n_lags + 2) under
    correct dynamics.
    """
    h = np.asarray(hits, dtype=float)
    v = np.asarray(var_seq, dtype=float)
    if h.shape[0] != v.shape[0]:
        raise InputError(
            f"hits length {h.shape[0]} does not match VaR length {v.shape[0]}"
        )
    n = h.shape[0]
    if n <= n_lags + 2:
        raise InputError(f"need more than n_lags + 2 = {n_lags + 2} observations")
    dep = h - alpha
    rows = n - n_lags
    x = np.empty((rows, n_lags + 2))
    x[:, 0] = 1.0
    for k in range(1, n_lags + 1):
        x[:, k] = dep[n_lags - k : n - k]
    x[:, n_lags + 1] = v[n_lags:]
    y = dep[n_lags:]
    gram = x.T @ x
    if np.linalg.cond(gram) > 1e12:
        raise DegenerateInputError("singular regressor matrix in DQ test")
    beta = np.linalg.solve(gram, x.T @ y)
    dq = float(beta @ gram @ beta) / (alpha * (1.0 - alpha))
    df = n_lags + 2
    return TestReport(dq, float(stats.chi2.sf(dq, df)), n, int(np.sum(h > 0)))


def es_bootstrap_test(
    realized, var_seq, es_seq, n_boot: int = 1000, seed: int = 0
) -> TestReport:
    """Bootstrap test of zero-mean standardized ES exceedance residuals.

    On violation days, e = (x - ES) / s with s the sample standard
    deviation of x - ES over those days. The observed statistic is the
    one-sample t of e; bootstrap resamples (with replacement) of the
    centered residuals give its null distribution, and the p-value is the
    fraction of resampled statistics above the observed one (alternative:
    positive mean, i.e. realized tail losses milder than forecast ES).
    """
    y, v, e_seq = _check_lengths(realized, var_seq, es_seq)
    mask = y < v
    z = int(mask.sum())
    if z < 2:
        raise InsufficientExceedancesError(
            f"ES bootstrap needs at least 2 exceedances, got {z}"
        )
    resid = y[mask] - e_seq[mask]
    scale = float(np.std(resid, ddof=1))
    if scale == 0.0:
        raise DegenerateInputError("exceedance residuals are constant")
    e = resid / scale
    delta0 = float(np.mean(e) / (np.std(e, ddof=1) / np.sqrt(z)))
    centered = e - e.mean()
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, z, size=(n_boot, z))
    samples = centered[idx]
    means = samples.mean(axis=1)
    sds = samples.std(axis=1, ddof=1)
    ok = sds > 0.0  # a resample of one repeated value carries no t-statistic
    deltas = means[ok] / (sds[ok] / np.sqrt(z))
    p = float(np.mean(deltas > delta0))
    return TestReport(delta0, p, int(y.shape[0]), z)


def ql_loss(realized, var_seq, alpha: float) -> LossSummary:
    """Mean quantile (tick) loss (alpha - I_t)(y_t - VaR_t); each term >= 0."""
    y, v = _check_lengths(realized, var_seq)
    hit = (y < v).astype(float)
    ql = (alpha - hit) * (y - v)
    return LossSummary(n_obs=int(y.shape[0]), mean_ql=float(ql.mean()))


def fzl_loss(realized, var_seq, es_seq, alpha: float) -> LossSummary:
    """Mean joint (VaR, ES) loss.

    FZL_t = I_t (y_t - VaR_t) / (alpha ES_t) + VaR_t/ES_t + ln(-ES_t) - 1,
    which requires every ES_t < 0.
    """
    y, v, e = _check_lengths(realized, var_seq, es_seq)
    bad = np.nonzero(e >= 0.0)[0]
    if bad.size:
        raise DomainError(
            f"FZL needs ES < 0; offending index {int(bad[0])} has ES={e[bad[0]]}"
        )
    hit = (y < v).astype(float)
    fzl = hit * (y - v) / (alpha * e) + v / e + np.log(-e) - 1.0
    return LossSummary(n_obs=int(y.shape[0]), mean_fzl=float(fzl.mean()))


def jarque_bera(series) -> TestReport:
    """Jarque-Bera normality test: JB = n/6 (S^2 + K^2/4) vs chi-square(2)."""
    y = np.asarray(series, dtype=float)
    n = y.shape[0]
    if n < 8:
        raise InputError(f"need at least 8 observations, got {n}")
    d = y - y.mean()
    m2 = float(np.mean(d * d))
    if m2 == 0.0:
        raise DegenerateInputError("series is constant")
    s = float(np.mean(d**3)) / m2**1.5
    k = float(np.mean(d**4)) / m2**2 - 3.0
    jb = n / 6.0 * (s * s + k * k / 4.0)
    return TestReport(float(jb), float(stats.chi2.sf(jb, 2)), n, 0)
