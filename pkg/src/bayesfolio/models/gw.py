"""Stationary Gaussian model with unknown mean and unknown precision.

Returns are modelled i.i.d. Gaussian; the mean carries a Gaussian prior and
the precision a Wishart prior.  The mean-field family factorises the unseen
next return, the mean, and the precision.  At a fixed portfolio ``delta`` and
risk aversion ``lam``, the optimal factors are Gaussian/Gaussian/Wishart and
their parameters satisfy a fixed-point equation implemented by
:func:`fixed_point_step`.  The sweep updates each block from the freshest
values of the others (coordinate-ascent order), so the variational objective
is nondecreasing along sweeps.

The utility tilt enters only through the predictive mean, which is shifted by
``-lam * E[Lambda]^{-1} @ delta``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..linalg import spd_inverse, spd_logdet, spd_solve, symmetrize


@dataclass(frozen=True, eq=False)
class GwState:
    """Variational parameters: tilted predictive, mean factor, precision factor."""

    xi_y: np.ndarray
    lambda_y: np.ndarray
    xi_mu: np.ndarray
    lambda_mu: np.ndarray
    nu_lambda: float
    psi_lambda: np.ndarray


def init_state(data, prior):
    """Reasonable cold start: moment-matched factors around the sample mean."""
    n, d = data.n, data.d
    nu = n + prior.nu0 + 1.0
    centered = data.returns - data.mean
    psi = spd_inverse(
        spd_inverse(prior.psi0) + centered.T @ centered + np.eye(d),
        "initial precision scale",
    )
    e_lam = nu * psi
    lam_mu = (n + 1.0) * e_lam + prior.lambda0
    return GwState(
        xi_y=data.mean.copy(),
        lambda_y=e_lam,
        xi_mu=data.mean.copy(),
        lambda_mu=lam_mu,
        nu_lambda=nu,
        psi_lambda=psi,
    )


def fixed_point_step(state, data, prior, delta, lam):
    """One coordinate sweep of the fixed-point operator.

    Block order: predictive mean, predictive precision, mean location, mean
    precision, Wishart degrees of freedom, Wishart scale.  Later blocks consume
    values already updated in this sweep.
    """
    n = data.n
    sum_y = data.sum_y
    e_lam = state.nu_lambda * state.psi_lambda

    xi_y = state.xi_mu - (lam / state.nu_lambda) * spd_solve(
        state.psi_lambda, delta, "psi_lambda"
    )
    lambda_y = e_lam
    lambda_mu = (n + 1.0) * e_lam + prior.lambda0
    xi_mu = spd_solve(
        lambda_mu, e_lam @ (xi_y + sum_y) + prior.lambda0 @ prior.mu0, "lambda_mu"
    )
    nu_lambda = n + prior.nu0 + 1.0

    cross = np.outer(xi_y + sum_y, xi_mu)
    scatter = (
        spd_inverse(lambda_y, "lambda_y")
        + np.outer(xi_y, xi_y)
        + (n + 1.0) * (spd_inverse(lambda_mu, "lambda_mu") + np.outer(xi_mu, xi_mu))
        + data.gram
        - (cross + cross.T)
        + spd_inverse(prior.psi0, "psi0")
    )
    psi_lambda = spd_inverse(symmetrize(scatter), "precision scale update")
    return GwState(
        xi_y=xi_y,
        lambda_y=lambda_y,
        xi_mu=xi_mu,
        lambda_mu=lambda_mu,
        nu_lambda=nu_lambda,
        psi_lambda=psi_lambda,
    )


def objective(state, data, prior, delta, lam):
    """Variational objective (risk bound) up to delta-independent constants.

    Valid at any state with the stationary degrees of freedom, not only at the
    fixed point, so partial sweeps can be compared against converged ones.
    Lower is better for the outer decision search.
    """
    n = data.n
    sum_y = data.sum_y
    cov_mu = spd_inverse(state.lambda_mu, "lambda_mu")
    second_mu = cov_mu + np.outer(state.xi_mu, state.xi_mu)
    cross = np.outer(state.xi_y + sum_y, state.xi_mu)
    scatter = (
        data.gram
        - (cross + cross.T)
        + (n + 1.0) * second_mu
        + spd_inverse(state.lambda_y, "lambda_y")
        + np.outer(state.xi_y, state.xi_y)
        + spd_inverse(prior.psi0, "psi0")
    )
    value = -0.5 * state.nu_lambda * float(np.sum(scatter * state.psi_lambda.T))
    value += -0.5 * float(np.sum(second_mu * prior.lambda0.T))
    value += float(state.xi_mu @ prior.lambda0 @ prior.mu0)
    value += 0.5 * (n + prior.nu0 + 1.0) * spd_logdet(state.psi_lambda, "psi_lambda")
    value += -0.5 * spd_logdet(state.lambda_y, "lambda_y")
    value += -0.5 * spd_logdet(state.lambda_mu, "lambda_mu")
    value += -lam * float(delta @ state.xi_y)
    return value


def state_change(a, b):
    """Max-norm movement between two states (inner convergence residual)."""
    return max(
        float(np.abs(a.xi_y - b.xi_y).max()),
        float(np.abs(a.lambda_y - b.lambda_y).max()),
        float(np.abs(a.xi_mu - b.xi_mu).max()),
        float(np.abs(a.lambda_mu - b.lambda_mu).max()),
        abs(a.nu_lambda - b.nu_lambda),
        float(np.abs(a.psi_lambda - b.psi_lambda).max()),
    )
