"""Gaussian model with a known observation covariance (conjugate benchmark).

With the covariance fixed, the posterior and the posterior predictive are
Gaussian in closed form, so the exponentially tilted risk can be minimised
exactly (:func:`exact_decision`).  The same model also runs through the
variational machinery: because the tilt only shifts Gaussian means and the
factor covariances do not depend on the portfolio, the variational decision
coincides with the exact one at every sample size, which makes this model the
primary correctness oracle for the solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..linalg import minimize_quadratic, spd_inverse, spd_solve


@dataclass(frozen=True, eq=False)
class GgState:
    """Means and (constant) precisions of the two Gaussian factors."""

    xi_y: np.ndarray
    lambda_y: np.ndarray
    xi_mu: np.ndarray
    lambda_mu: np.ndarray


def _precisions(data, prior):
    lam_star = spd_inverse(prior.sigma_star, "sigma_star")
    sigma0_inv = spd_inverse(prior.sigma0, "sigma0")
    lam_mu = (data.n + 1.0) * lam_star + sigma0_inv
    return lam_star, sigma0_inv, lam_mu


def init_state(data, prior):
    lam_star, _, lam_mu = _precisions(data, prior)
    return GgState(
        xi_y=data.mean.copy(),
        lambda_y=lam_star,
        xi_mu=data.mean.copy(),
        lambda_mu=lam_mu,
    )


def fixed_point_step(state, data, prior, delta, lam):
    """One coordinate sweep; only the two means move."""
    lam_star, sigma0_inv, lam_mu = _precisions(data, prior)
    xi_y = state.xi_mu - lam * (prior.sigma_star @ delta)
    xi_mu = spd_solve(
        lam_mu, lam_star @ (data.sum_y + xi_y) + sigma0_inv @ prior.mu0, "lambda_mu"
    )
    return GgState(xi_y=xi_y, lambda_y=lam_star, xi_mu=xi_mu, lambda_mu=lam_mu)


def objective(state, data, prior, delta, lam):
    """Variational objective up to delta-independent constants.

    Factor covariances are constant here, so only mean-dependent quadratics
    and the tilt term remain.
    """
    lam_star, sigma0_inv, _ = _precisions(data, prior)
    n = data.n
    xi_y, xi_mu = state.xi_y, state.xi_mu
    quad = (
        float(xi_y @ lam_star @ xi_y)
        - 2.0 * float(xi_y @ lam_star @ xi_mu)
        + (n + 1.0) * float(xi_mu @ lam_star @ xi_mu)
        - 2.0 * float(data.sum_y @ lam_star @ xi_mu)
        + float(xi_mu @ sigma0_inv @ xi_mu)
        - 2.0 * float(xi_mu @ sigma0_inv @ prior.mu0)
    )
    return -0.5 * quad - lam * float(delta @ xi_y)


def state_change(a, b):
    return max(
        float(np.abs(a.xi_y - b.xi_y).max()),
        float(np.abs(a.xi_mu - b.xi_mu).max()),
    )


def posterior_predictive(data, prior):
    """Mean and covariance of the next observation given the history."""
    lam_star, sigma0_inv, _ = _precisions(data, prior)
    post_prec = data.n * lam_star + sigma0_inv
    post_mean = spd_solve(
        post_prec, lam_star @ data.sum_y + sigma0_inv @ prior.mu0, "posterior precision"
    )
    post_cov = spd_inverse(post_prec, "posterior precision")
    return post_mean, prior.sigma_star + post_cov


def exact_decision(data, prior, lam, decision_set="rd"):
    """Exact minimiser of the tilted risk under the conjugate model.

    The risk of a Gaussian predictive with mean ``m`` and covariance ``S`` is
    ``exp(-lam * delta @ m + lam^2 / 2 * delta @ S @ delta)``, so the decision
    solves a quadratic program: ``(1/lam) inv(S) m`` on all of R^d, or the
    corresponding simplex-constrained minimum.
    """
    if lam <= 0:
        raise ValueError("lam must be positive; the unconstrained decision is undefined at 0")
    mean, cov = posterior_predictive(data, prior)
    return minimize_quadratic(lam**2 * cov, lam * mean, decision_set)
