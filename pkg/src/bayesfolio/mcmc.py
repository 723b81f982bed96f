"""Gibbs-sampling reference solver for the exponential-utility decision.

The posterior over model parameters is sampled once per solve with a Gibbs
chain (the parameter conditionals do not depend on the portfolio), and each
outer iteration re-draws exponentially tilted predictive samples conditioned
on the stored chain.  Tilting a Gaussian predictive by ``exp(-lam * delta'y)``
shifts its mean by ``-lam * Sigma @ delta`` and leaves the covariance alone,
so the stochastic gradient is an average of cheap Gaussian draws.

The outer loop is projected stochastic ascent on the utility (equivalently
descent on the risk) with a 1/sqrt(k) step decay after a flat warm-up.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .linalg import project_simplex, sample_wishart, spd_inverse
from .solver import SolveReport
from .validation import as_rng, check_seed

#: outer iterations with a flat step before the 1/sqrt(k) decay kicks in
DECAY_AFTER = 100

#: hard cap on the decision norm; beyond this the solve is declared divergent
DIVERGENCE_NORM = 1e3


class DivergenceError(RuntimeError):
    """The stochastic iterates left any plausible region."""


@dataclass(frozen=True)
class McmcConfig:
    """Chain length, burn-in, and outer-loop knobs.

    ``m_samples`` is the total number of Gibbs sweeps; ``burn_in`` (default
    a tenth of the chain) is discarded before averaging gradients.
    """

    m_samples: int = 20_000
    burn_in: int = None
    eta: float = 0.1
    max_outer: int = 400
    outer_tol: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if self.m_samples < 1:
            raise ValueError("m_samples must be at least 1")
        burn = self.m_samples // 10 if self.burn_in is None else int(self.burn_in)
        if not 0 <= burn < self.m_samples:
            raise ValueError("burn_in must be smaller than the total number of draws")
        object.__setattr__(self, "burn_in", burn)
        if self.eta <= 0 or self.outer_tol <= 0:
            raise ValueError("eta and outer_tol must be positive")
        if self.max_outer < 1:
            raise ValueError("max_outer must be at least 1")
        check_seed(self.seed)


@dataclass(frozen=True)
class ChainDiagnostics:
    """Cheap stationarity summary of a Gibbs chain (acceptance is always 1)."""

    acceptance: float
    parameter_means: np.ndarray
    split_half_discrepancy: float


def chain_diagnostics(samples):
    """Split-half discrepancy of per-sweep parameter draws, flattened."""
    flat = np.asarray(samples, dtype=float).reshape(len(samples), -1)
    half = len(flat) // 2
    if half < 1:
        raise ValueError("need at least two samples for diagnostics")
    first, second = flat[:half].mean(axis=0), flat[half : 2 * half].mean(axis=0)
    return ChainDiagnostics(
        acceptance=1.0,
        parameter_means=flat.mean(axis=0),
        split_half_discrepancy=float(np.abs(first - second).max()),
    )


def gibbs_gw(data, prior, m, burn_in, seed):
    """Gibbs chain for the stationary Gaussian model.

    Alternates the Gaussian conditional of the mean given the precision with
    the Wishart conditional of the precision given the mean (degrees of
    freedom ``n + nu0``).  The first ``burn_in`` sweeps are discarded; the
    remaining ``m - burn_in`` pairs ``(mu, Lambda)`` are returned as arrays.
    """
    if data.n < 1:
        raise ValueError("need at least one observation")
    if not 0 <= burn_in < m:
        raise ValueError("burn_in must be smaller than m")
    rng = as_rng(seed)
    n, d = data.n, data.d
    y = data.returns
    sum_y = data.sum_y
    lam0_mu0 = prior.lambda0 @ prior.mu0
    psi0_inv = spd_inverse(prior.psi0, "psi0")

    mu = data.mean.copy()
    lam = spd_inverse(data.sample_covariance() + 1e-8 * np.eye(d), "initial precision")

    mus = np.empty((m - burn_in, d))
    lams = np.empty((m - burn_in, d, d))
    for k in range(m):
        prec = n * lam + prior.lambda0
        chol = np.linalg.cholesky(prec)
        loc = np.linalg.solve(prec, lam @ sum_y + lam0_mu0)
        mu = loc + np.linalg.solve(chol.T, rng.standard_normal(d))

        centered = y - mu
        scale = spd_inverse(centered.T @ centered + psi0_inv, "precision scale")
        lam = sample_wishart(n + prior.nu0, scale, rng)
        if k >= burn_in:
            mus[k - burn_in] = mu
            lams[k - burn_in] = lam
    return mus, lams


def gibbs_ar(data, prior, m, burn_in, seed):
    """Gibbs chain for the autoregressive model.

    Alternates the Gaussian conditional of the vectorised transition matrix
    (precision ``kron(lagged Gram, Lambda) + kron(inv(v0), inv(u0))``) with
    the Wishart conditional of the noise precision (degrees of freedom
    ``n + nu0``).  Returns post-burn-in arrays of transition matrices and
    precisions.
    """
    y = data.returns
    if y.shape[0] < 2:
        raise ValueError("need an initial row plus at least one transition")
    if not 0 <= burn_in < m:
        raise ValueError("burn_in must be smaller than m")
    rng = as_rng(seed)
    d = data.d
    n = y.shape[0] - 1
    gram_lag = y[:-1].T @ y[:-1]
    cross_lag = y[1:].T @ y[:-1]
    prior_prec = np.kron(spd_inverse(prior.v0), spd_inverse(prior.u0))
    prior_term = prior_prec @ prior.m0.reshape(-1, order="F")
    psi0_inv = spd_inverse(prior.psi0, "psi0")

    gamma = prior.m0.copy()
    resid = y[1:] - y[:-1] @ gamma.T
    lam = spd_inverse(
        resid.T @ resid / max(n, 1) + 1e-6 * np.eye(d), "initial precision"
    )

    gammas = np.empty((m - burn_in, d, d))
    lams = np.empty((m - burn_in, d, d))
    for k in range(m):
        prec = np.kron(gram_lag, lam) + prior_prec
        chol = np.linalg.cholesky(prec)
        loc = np.linalg.solve(prec, (lam @ cross_lag).reshape(-1, order="F") + prior_term)
        g_vec = loc + np.linalg.solve(chol.T, rng.standard_normal(d * d))
        gamma = g_vec.reshape((d, d), order="F")

        resid = y[1:] - y[:-1] @ gamma.T
        scale = spd_inverse(resid.T @ resid + psi0_inv, "precision scale")
        lam = sample_wishart(n + prior.nu0, scale, rng)
        if k >= burn_in:
            gammas[k - burn_in] = gamma
            lams[k - burn_in] = lam
    return gammas, lams


def tilted_predictive_sample(loc, cov, delta, lam, seed):
    """Draw from the exponentially tilted Gaussian predictive.

    The tilt by ``exp(-lam * delta'y)`` moves the mean to
    ``loc - lam * cov @ delta`` and keeps the covariance.
    """
    rng = as_rng(seed)
    cov = np.asarray(cov, dtype=float)
    chol = np.linalg.cholesky(cov)
    mean = np.asarray(loc, dtype=float) - lam * cov @ np.asarray(delta, dtype=float)
    return mean + chol @ rng.standard_normal(mean.size)


def _predictive_ensemble(model, data, prior, config, rng):
    """Chain locations, covariances and Cholesky factors for the z-draws."""
    if model == "gw":
        mus, lams = gibbs_gw(data, prior, config.m_samples, config.burn_in, rng)
        locs = mus
    elif model == "ar":
        gammas, lams = gibbs_ar(data, prior, config.m_samples, config.burn_in, rng)
        locs = gammas @ data.returns[-1]
    else:
        raise ValueError(f"no Gibbs sampler for model {model!r}")
    covs = np.linalg.inv(lams)
    covs = 0.5 * (covs + np.transpose(covs, (0, 2, 1)))
    chols = np.linalg.cholesky(covs)
    return locs, covs, chols


def mcmc_solve(model, data, prior, lam, config):
    """Projected stochastic gradient on the Monte Carlo risk estimate.

    One Gibbs chain is materialised per solve; each outer iteration draws a
    fresh tilted predictive sample per retained chain state and steps along
    ``lam`` times their average.  Iterates are projected onto the simplex, so
    they stay feasible; a norm guard aborts on divergence.
    """
    t0 = time.perf_counter()
    rng = as_rng(config.seed)
    locs, covs, chols = _predictive_ensemble(model, data, prior, config, rng)
    mean_loc = locs.mean(axis=0)
    mean_cov = covs.mean(axis=0)
    kept = locs.shape[0]

    d = data.d
    delta = np.full(d, 1.0 / d)
    converged = False
    iters = 0
    for k in range(1, config.max_outer + 1):
        eps = rng.standard_normal((kept, d))
        noise = np.einsum("kij,kj->i", chols, eps) / kept
        z_bar = mean_loc - lam * mean_cov @ delta + noise
        eta_k = config.eta if k <= DECAY_AFTER else config.eta * np.sqrt(DECAY_AFTER / k)
        trial = project_simplex(delta + eta_k * lam * z_bar)
        if float(np.linalg.norm(trial)) > DIVERGENCE_NORM:
            raise DivergenceError(
                f"decision norm exceeded {DIVERGENCE_NORM:g} at outer iteration {k}; "
                f"last step size {eta_k:.3e}, gradient norm {np.linalg.norm(z_bar):.3e}"
            )
        movement = float(np.linalg.norm(trial - delta))
        delta = trial
        iters = k
        if movement < config.outer_tol:
            converged = True
            break

    return SolveReport(
        decision=delta,
        objective_trace=[],
        inner_residual_trace=[],
        outer_iters=iters,
        converged=converged,
        wall_time=time.perf_counter() - t0,
    )
