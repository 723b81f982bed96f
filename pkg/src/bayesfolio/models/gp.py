"""Gaussian-process mean model with Wishart noise precision.

Observations sit at integer times 1..n; the next return is predicted at time
n + 1.  The latent mean path over times 1..n+1 carries a process prior whose
stacked covariance is ``kron(K, omega0)`` with ``K`` the kernel Gram matrix
over times (time-major stacking: block (t, s) equals ``K[t, s] * omega0``).
The mean-field factors are Gaussian (next return), a joint Gaussian over the
stacked mean path, and Wishart for the precision.

State sizes grow with n: the path covariance is ((n+1)d, (n+1)d), which keeps
every sweep exact at cubic cost in (n+1)d.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from scipy import linalg as sla

from ..linalg import rbf_gram, spd_cholesky, spd_inverse, spd_logdet, spd_solve, symmetrize


@dataclass(frozen=True, eq=False)
class GpState:
    """Variational parameters; ``m_mu`` and ``cov_mu`` describe the stacked mean path."""

    xi_y: np.ndarray
    lambda_y: np.ndarray
    m_mu: np.ndarray
    cov_mu: np.ndarray
    nu_lambda: float
    psi_lambda: np.ndarray


def _prior_path_covariance(data, prior):
    times = np.arange(1, data.n + 2, dtype=float)
    gram = rbf_gram(times, prior.gamma)
    return np.kron(gram, prior.omega0)


def _path_update(data, prior, e_lam):
    """Stacked-path covariance via the Woodbury identity.

    Dense kernel Gram matrices are badly conditioned, so the update avoids
    the explicit prior precision: with prior covariance ``C`` and noise
    precision blocks ``E``, ``cov = C - C W C`` where
    ``W = inv(C + kron(I, inv(E)))``.  The same ``W`` also yields the prior
    pull on the mean, ``cov @ prior_precision @ m0 = m0 - C @ W @ m0``.
    """
    n = data.n
    c = _prior_path_covariance(data, prior)
    w = spd_inverse(
        c + np.kron(np.eye(n + 1), spd_inverse(e_lam, "mean precision")),
        "mean-path update",
    )
    cov_mu = symmetrize(c - c @ w @ c)
    return c, w, cov_mu


def _blocks(m_stacked, d):
    return m_stacked.reshape(-1, d)


def init_state(data, prior):
    n, d = data.n, data.d
    nu = prior.nu0 + n + 1.0
    centered = data.returns - data.mean
    psi = spd_inverse(
        spd_inverse(prior.psi0) + centered.T @ centered + np.eye(d),
        "initial precision scale",
    )
    e_lam = nu * psi
    _, _, cov_mu = _path_update(data, prior, e_lam)
    m_mu = np.tile(data.mean, n + 1)
    return GpState(
        xi_y=data.mean.copy(),
        lambda_y=e_lam,
        m_mu=m_mu,
        cov_mu=cov_mu,
        nu_lambda=nu,
        psi_lambda=psi,
    )


def fixed_point_step(state, data, prior, delta, lam):
    """One coordinate sweep of the fixed-point operator (coordinate-ascent order)."""
    n, d = data.n, data.d
    e_lam = state.nu_lambda * state.psi_lambda

    xi_y = _blocks(state.m_mu, d)[-1] - (lam / state.nu_lambda) * spd_solve(
        state.psi_lambda, delta, "psi_lambda"
    )
    lambda_y = e_lam

    c, w, cov_mu = _path_update(data, prior, e_lam)
    stacked_obs = np.vstack([data.returns, xi_y])
    prior_mean = prior.mean_path(range(1, n + 2)).reshape(-1)
    m_mu = cov_mu @ (stacked_obs @ e_lam.T).reshape(-1) + prior_mean - c @ (w @ prior_mean)

    nu_lambda = prior.nu0 + n + 1.0

    paths = _blocks(m_mu, d)
    cross = paths[:-1].T @ data.returns + np.outer(paths[-1], xi_y)
    cov_blocks = sum(
        cov_mu[t * d : (t + 1) * d, t * d : (t + 1) * d] for t in range(n + 1)
    )
    scatter = (
        spd_inverse(prior.psi0, "psi0")
        + np.outer(xi_y, xi_y)
        + spd_inverse(lambda_y, "lambda_y")
        + data.gram
        - (cross + cross.T)
        + paths.T @ paths
        + cov_blocks
    )
    psi_lambda = spd_inverse(symmetrize(scatter), "precision scale update")
    return GpState(
        xi_y=xi_y,
        lambda_y=lambda_y,
        m_mu=m_mu,
        cov_mu=cov_mu,
        nu_lambda=nu_lambda,
        psi_lambda=psi_lambda,
    )


def objective(state, data, prior, delta, lam):
    """Variational objective (risk bound) up to delta-independent constants."""
    n, d = data.n, data.d
    paths = _blocks(state.m_mu, d)
    cross = paths[:-1].T @ data.returns + np.outer(paths[-1], state.xi_y)
    cov_blocks = sum(
        state.cov_mu[t * d : (t + 1) * d, t * d : (t + 1) * d] for t in range(n + 1)
    )
    scatter = (
        spd_inverse(prior.psi0, "psi0")
        + np.outer(state.xi_y, state.xi_y)
        + spd_inverse(state.lambda_y, "lambda_y")
        + data.gram
        - (cross + cross.T)
        + paths.T @ paths
        + cov_blocks
    )
    prior_chol = spd_cholesky(_prior_path_covariance(data, prior), "prior path covariance")
    prior_mean = prior.mean_path(range(1, n + 2)).reshape(-1)
    second_path = state.cov_mu + np.outer(state.m_mu, state.m_mu)

    value = -0.5 * state.nu_lambda * float(np.sum(scatter * state.psi_lambda.T))
    value += -0.5 * float(np.trace(sla.cho_solve((prior_chol, True), second_path)))
    value += float(state.m_mu @ sla.cho_solve((prior_chol, True), prior_mean))
    value += 0.5 * (n + prior.nu0 + 1.0) * spd_logdet(state.psi_lambda, "psi_lambda")
    value += -0.5 * spd_logdet(state.lambda_y, "lambda_y")
    value += 0.5 * spd_logdet(symmetrize(state.cov_mu), "cov_mu")
    value += -lam * float(delta @ state.xi_y)
    return value


def state_change(a, b):
    return max(
        float(np.abs(a.xi_y - b.xi_y).max()),
        float(np.abs(a.lambda_y - b.lambda_y).max()),
        float(np.abs(a.m_mu - b.m_mu).max()),
        float(np.abs(a.cov_mu - b.cov_mu).max()),
        abs(a.nu_lambda - b.nu_lambda),
        float(np.abs(a.psi_lambda - b.psi_lambda).max()),
    )
