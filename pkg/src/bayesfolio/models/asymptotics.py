"""Large-sample targets of the variational decision.

As the sample grows, the variational decision approaches the mean-variance
optimum built from plug-in moment estimates.  This module evaluates that
target at finite n so tests and experiments can measure the distance.
"""

from __future__ import annotations

import numpy as np

from ..linalg import minimize_quadratic, spd_inverse


def _gw_moments(data):
    mu = data.mean
    return mu, data.sample_covariance()


def _ar_moments(data):
    y = data.returns
    if y.shape[0] < 2:
        raise ValueError("autoregressive moments need at least two rows")
    cross = y[1:].T @ y[:-1]
    gram = y[1:].T @ y[1:]
    transition = cross @ spd_inverse(gram, "gram")
    mu = transition @ y[-1]
    centered = y[1:] - mu
    sigma = centered.T @ centered / (y.shape[0] - 1)
    return mu, sigma


def markowitz_plugin_target(data, model, lam, decision_set="simplex"):
    """Mean-variance decision from model-specific plug-in moment estimates.

    Minimises ``lam^2/2 * delta' Sigma delta - lam * delta' mu`` over the
    decision set; on all of R^d this is ``(1/lam) inv(Sigma) mu``.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    if model == "gw":
        if data.n < data.d + 1:
            raise ValueError("need n >= d + 1 rows for an invertible covariance")
        mu, sigma = _gw_moments(data)
    elif model == "ar":
        mu, sigma = _ar_moments(data)
    else:
        raise ValueError(f"no asymptotic target for model {model!r}")
    return minimize_quadratic(lam**2 * sigma, lam * mu, decision_set)
