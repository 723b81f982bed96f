"""First-order vector autoregression with unknown transition and precision.

The first row of the dataset is the initial observation; every later row is a
transition.  The transition matrix carries a matrix-normal prior (stored and
updated through its vec), the noise precision a Wishart prior.  The mean-field
factors are Gaussian (next return), Gaussian over the vec of the transition
matrix, and Wishart.

The Wishart-scale update needs the full second moment of the transition
matrix; the covariance part is accumulated through the spectral decomposition
of the d^2 x d^2 factor covariance, each eigenvector reshaped back to a matrix
and contracted against the lagged Gram matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..linalg import spd_inverse, spd_logdet, spd_solve, symmetrize, unvec, vec


@dataclass(frozen=True, eq=False)
class ArState:
    """Variational parameters: tilted predictive, transition factor, precision factor."""

    xi_y: np.ndarray
    lambda_y: np.ndarray
    m_gamma: np.ndarray
    cov_gamma: np.ndarray
    nu_lambda: float
    psi_lambda: np.ndarray


def _sums(data):
    """Lag sums over a dataset whose first row is the initial observation."""
    y = data.returns
    if y.shape[0] < 2:
        raise ValueError("autoregressive model needs an initial row plus >= 1 transition")
    n = y.shape[0] - 1
    gram_all = y.T @ y
    gram_inner = y[1:].T @ y[1:]
    cross_lag = y[1:].T @ y[:-1]
    return n, gram_all, gram_inner, cross_lag, y[-1]


def init_state(data, prior):
    n, gram_all, gram_inner, cross_lag, y_last = _sums(data)
    d = data.d
    nu = n + prior.nu0 + 1.0
    resid = data.returns[1:] - data.returns[:-1] @ prior.m0.T
    psi = spd_inverse(
        spd_inverse(prior.psi0) + resid.T @ resid + np.eye(d), "initial precision scale"
    )
    e_lam = nu * psi
    prior_prec = np.kron(spd_inverse(prior.v0), spd_inverse(prior.u0))
    cov_gamma = spd_inverse(np.kron(gram_all, e_lam) + prior_prec, "transition precision")
    return ArState(
        xi_y=prior.m0 @ y_last,
        lambda_y=e_lam,
        m_gamma=prior.m0.copy(),
        cov_gamma=cov_gamma,
        nu_lambda=nu,
        psi_lambda=psi,
    )


def _spectral_quadratic(cov_gamma, gram_all, d):
    """sum_i sigma_i * unvec(u_i) @ gram_all @ unvec(u_i)^T over the eigensystem."""
    sigmas, vecs = np.linalg.eigh(symmetrize(cov_gamma))
    out = np.zeros((d, d))
    for sigma, u in zip(sigmas, vecs.T):
        mat = unvec(u, d, d)
        out += sigma * (mat @ gram_all @ mat.T)
    return out


def fixed_point_step(state, data, prior, delta, lam):
    """One coordinate sweep of the fixed-point operator (coordinate-ascent order)."""
    n, gram_all, gram_inner, cross_lag, y_last = _sums(data)
    d = data.d
    e_lam = state.nu_lambda * state.psi_lambda

    xi_y = state.m_gamma @ y_last - (lam / state.nu_lambda) * spd_solve(
        state.psi_lambda, delta, "psi_lambda"
    )
    lambda_y = e_lam

    prior_prec = np.kron(spd_inverse(prior.v0), spd_inverse(prior.u0))
    prec_gamma = np.kron(gram_all, e_lam) + prior_prec
    cov_gamma = spd_inverse(prec_gamma, "transition precision")
    rhs = vec(e_lam @ (cross_lag + np.outer(xi_y, y_last))) + prior_prec @ vec(prior.m0)
    m_gamma = unvec(cov_gamma @ rhs, d, d)

    nu_lambda = n + prior.nu0 + 1.0

    cross = m_gamma @ (cross_lag.T + np.outer(y_last, xi_y))
    scatter = (
        spd_inverse(prior.psi0, "psi0")
        + np.outer(xi_y, xi_y)
        + spd_inverse(lambda_y, "lambda_y")
        + gram_inner
        - (cross + cross.T)
        + m_gamma @ gram_all @ m_gamma.T
        + _spectral_quadratic(cov_gamma, gram_all, d)
    )
    psi_lambda = spd_inverse(symmetrize(scatter), "precision scale update")
    return ArState(
        xi_y=xi_y,
        lambda_y=lambda_y,
        m_gamma=m_gamma,
        cov_gamma=cov_gamma,
        nu_lambda=nu_lambda,
        psi_lambda=psi_lambda,
    )


def objective(state, data, prior, delta, lam):
    """Variational objective (risk bound) up to delta-independent constants."""
    n, gram_all, gram_inner, cross_lag, y_last = _sums(data)
    d = data.d
    cross = state.m_gamma @ (cross_lag.T + np.outer(y_last, state.xi_y))
    scatter = (
        spd_inverse(prior.psi0, "psi0")
        + np.outer(state.xi_y, state.xi_y)
        + spd_inverse(state.lambda_y, "lambda_y")
        + gram_inner
        - (cross + cross.T)
        + state.m_gamma @ gram_all @ state.m_gamma.T
        + _spectral_quadratic(state.cov_gamma, gram_all, d)
    )
    prior_prec = np.kron(spd_inverse(prior.v0), spd_inverse(prior.u0))
    m_vec = vec(state.m_gamma)
    second_gamma = state.cov_gamma + np.outer(m_vec, m_vec)

    value = -0.5 * state.nu_lambda * float(np.sum(scatter * state.psi_lambda.T))
    value += -0.5 * float(np.sum(second_gamma * prior_prec.T))
    value += float(m_vec @ prior_prec @ vec(prior.m0))
    value += 0.5 * (n + prior.nu0 + 1.0) * spd_logdet(state.psi_lambda, "psi_lambda")
    value += -0.5 * spd_logdet(state.lambda_y, "lambda_y")
    value += 0.5 * spd_logdet(symmetrize(state.cov_gamma), "cov_gamma")
    value += -lam * float(delta @ state.xi_y)
    return value


def state_change(a, b):
    return max(
        float(np.abs(a.xi_y - b.xi_y).max()),
        float(np.abs(a.lambda_y - b.lambda_y).max()),
        float(np.abs(a.m_gamma - b.m_gamma).max()),
        float(np.abs(a.cov_gamma - b.cov_gamma).max()),
        abs(a.nu_lambda - b.nu_lambda),
        float(np.abs(a.psi_lambda - b.psi_lambda).max()),
    )


def companion_matrix(gammas):
    """Lift order-p transition matrices to one block transition on stacked state.

    The top block row lists the matrices; identity blocks sit on the first
    subdiagonal.  For p = 1 the single matrix is returned unchanged.
    """
    if not gammas:
        raise ValueError("need at least one transition matrix")
    mats = [np.asarray(g, dtype=float) for g in gammas]
    d = mats[0].shape[0]
    for g in mats:
        if g.shape != (d, d):
            raise ValueError("all transition matrices must share the same square shape")
    p = len(mats)
    if p == 1:
        return mats[0].copy()
    out = np.zeros((d * p, d * p))
    out[:d] = np.hstack(mats)
    idx = np.arange(d * (p - 1))
    out[d + idx, idx] = 1.0
    return out
