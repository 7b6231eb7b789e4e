"""Compiled inner loops for the score recursions.

The filter and the simulator share one per-observation update function so
that filtering a simulated series with the generating coefficients
reproduces the generating parameter path exactly (same floating-point
operations, same order).

State is kept in link space: theta_tilde = (mu, ln sigma, ln p) for the
asymmetric Laplace model and (mu, ln sigma) for the normal baseline, which
keeps sigma and p positive under the unconstrained linear update.
"""

import numpy as np
from numba import njit

# Any |theta_tilde| beyond this is treated as divergence; exp(50) is far
# outside any plausible return scale and keeps every likelihood finite.
STATE_BOUND = 50.0

_LOG_2PI = 1.8378770664093453


@njit(cache=True)
def _ald_obs(yt, th0, th1, th2):
    """Log density and link-space score of one ALD observation.

    Returns (lp, s0, s1, s2) where lp = ln f(yt; theta) and s = d lp /
    d(mu, ln sigma, ln p). The kink yt == mu uses the upper branch.
    """
    sigma = np.exp(th1)
    p = np.exp(th2)
    z = yt - th0
    lp = th2 - th1 - np.log1p(p * p)
    common = 1.0 - 2.0 * p * p / (1.0 + p * p)
    if z >= 0.0:
        w = p * z / sigma
        lp -= w
        s0 = p / sigma
        s1 = -1.0 + w
        s2 = common - w
    else:
        w = z / (sigma * p)
        lp += w
        s0 = -1.0 / (sigma * p)
        s1 = -1.0 - w
        s2 = common - w
    return lp, s0, s1, s2


@njit(cache=True)
def _out_of_bounds3(th0, th1, th2):
    return (
        not (np.isfinite(th0) and np.isfinite(th1) and np.isfinite(th2))
        or abs(th0) > STATE_BOUND
        or abs(th1) > STATE_BOUND
        or abs(th2) > STATE_BOUND
    )


@njit(cache=True)
def ald_filter(y, kappa, a, b, theta0):
    """Run the ALD score recursion over `y` from the initial link state.

    Returns (theta, scores, loglik, diverged) where theta[t] is the state
    in force when y[t] was observed, and diverged is the first offending
    time index (-1 if the whole pass stayed in bounds).
    """
    T = y.shape[0]
    theta = np.empty((T, 3))
    scores = np.empty((T, 3))
    loglik = np.empty(T)
    th0, th1, th2 = theta0[0], theta0[1], theta0[2]
    for t in range(T):
        if _out_of_bounds3(th0, th1, th2):
            return theta, scores, loglik, t
        theta[t, 0] = th0
        theta[t, 1] = th1
        theta[t, 2] = th2
        lp, s0, s1, s2 = _ald_obs(y[t], th0, th1, th2)
        scores[t, 0] = s0
        scores[t, 1] = s1
        scores[t, 2] = s2
        loglik[t] = lp
        th0 = kappa[0] + a[0] * s0 + b[0] * th0
        th1 = kappa[1] + a[1] * s1 + b[1] * th1
        th2 = kappa[2] + a[2] * s2 + b[2] * th2
    if _out_of_bounds3(th0, th1, th2):
        return theta, scores, loglik, T - 1
    return theta, scores, loglik, -1


@njit(cache=True)
def ald_loglik(y, kappa, a, b, theta0):
    """Total log likelihood only; same recursion as :func:`ald_filter`.

    Returns (total, diverged); avoids the path allocations on the hot
    estimation path.
    """
    T = y.shape[0]
    total = 0.0
    th0, th1, th2 = theta0[0], theta0[1], theta0[2]
    for t in range(T):
        if _out_of_bounds3(th0, th1, th2):
            return total, t
        lp, s0, s1, s2 = _ald_obs(y[t], th0, th1, th2)
        total += lp
        th0 = kappa[0] + a[0] * s0 + b[0] * th0
        th1 = kappa[1] + a[1] * s1 + b[1] * th1
        th2 = kappa[2] + a[2] * s2 + b[2] * th2
    if _out_of_bounds3(th0, th1, th2):
        return total, T - 1
    return total, -1


@njit(cache=True)
def ald_simulate(u, kappa, a, b, theta0):
    """Generate a path by inverse-CDF draws, one uniform per observation.

    Shares the per-observation update with :func:`ald_filter`, so filtering
    the output with the same coefficients reproduces `theta` exactly.
    """
    T = u.shape[0]
    y = np.empty(T)
    theta = np.empty((T, 3))
    scores = np.empty((T, 3))
    loglik = np.empty(T)
    th0, th1, th2 = theta0[0], theta0[1], theta0[2]
    for t in range(T):
        if _out_of_bounds3(th0, th1, th2):
            return y, theta, scores, loglik, t
        theta[t, 0] = th0
        theta[t, 1] = th1
        theta[t, 2] = th2
        sigma = np.exp(th1)
        p = np.exp(th2)
        psq = p * p
        ut = u[t]
        if ut <= psq / (1.0 + psq):
            yt = th0 + sigma * p * np.log(ut * (1.0 + psq) / psq)
        else:
            yt = th0 - (sigma / p) * np.log((1.0 - ut) * (1.0 + psq))
        y[t] = yt
        lp, s0, s1, s2 = _ald_obs(yt, th0, th1, th2)
        scores[t, 0] = s0
        scores[t, 1] = s1
        scores[t, 2] = s2
        loglik[t] = lp
        th0 = kappa[0] + a[0] * s0 + b[0] * th0
        th1 = kappa[1] + a[1] * s1 + b[1] * th1
        th2 = kappa[2] + a[2] * s2 + b[2] * th2
    if _out_of_bounds3(th0, th1, th2):
        return y, theta, scores, loglik, T - 1
    return y, theta, scores, loglik, -1


@njit(cache=True)
def _norm_obs(yt, th0, th1):
    """Log density and link-space score of one normal observation."""
    sigma = np.exp(th1)
    z = (yt - th0) / sigma
    lp = -0.5 * _LOG_2PI - th1 - 0.5 * z * z
    s0 = z / sigma
    s1 = -1.0 + z * z
    return lp, s0, s1


@njit(cache=True)
def _out_of_bounds2(th0, th1):
    return (
        not (np.isfinite(th0) and np.isfinite(th1))
        or abs(th0) > STATE_BOUND
        or abs(th1) > STATE_BOUND
    )


@njit(cache=True)
def norm_filter(y, kappa, a, b, theta0):
    """Two-parameter normal score recursion; same contract as ald_filter."""
    T = y.shape[0]
    theta = np.empty((T, 2))
    scores = np.empty((T, 2))
    loglik = np.empty(T)
    th0, th1 = theta0[0], theta0[1]
    for t in range(T):
        if _out_of_bounds2(th0, th1):
            return theta, scores, loglik, t
        theta[t, 0] = th0
        theta[t, 1] = th1
        lp, s0, s1 = _norm_obs(y[t], th0, th1)
        scores[t, 0] = s0
        scores[t, 1] = s1
        loglik[t] = lp
        th0 = kappa[0] + a[0] * s0 + b[0] * th0
        th1 = kappa[1] + a[1] * s1 + b[1] * th1
    if _out_of_bounds2(th0, th1):
        return theta, scores, loglik, T - 1
    return theta, scores, loglik, -1


@njit(cache=True)
def norm_loglik(y, kappa, a, b, theta0):
    T = y.shape[0]
    total = 0.0
    th0, th1 = theta0[0], theta0[1]
    for t in range(T):
        if _out_of_bounds2(th0, th1):
            return total, t
        lp, s0, s1 = _norm_obs(y[t], th0, th1)
        total += lp
        th0 = kappa[0] + a[0] * s0 + b[0] * th0
        th1 = kappa[1] + a[1] * s1 + b[1] * th1
    if _out_of_bounds2(th0, th1):
        return total, T - 1
    return total, -1
