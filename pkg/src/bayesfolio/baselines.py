"""Classical comparison portfolios: mean-variance, shrinkage, equal weights."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import spd_solve
from .validation import check_returns, check_spd, check_vector


@dataclass(frozen=True, eq=False)
class MomentEstimates:
    """Plug-in mean and covariance of a return history."""

    mu_hat: np.ndarray
    sigma_hat: np.ndarray
    n: int

    def __post_init__(self):
        object.__setattr__(self, "mu_hat", check_vector(self.mu_hat, "mu_hat"))
        sigma = np.asarray(self.sigma_hat, dtype=float)
        if sigma.shape != (self.mu_hat.size, self.mu_hat.size):
            raise ValueError("sigma_hat shape inconsistent with mu_hat")
        scale = max(1.0, float(np.abs(sigma).max()))
        if float(np.abs(sigma - sigma.T).max()) > 1e-10 * scale:
            raise ValueError("sigma_hat must be symmetric")
        object.__setattr__(self, "sigma_hat", sigma)
        if self.n < 2:
            raise ValueError("need at least two observations")


def estimate_moments(X, ddof=0):
    """Sample mean and covariance; 1/n normaliser by default (ddof=1 for 1/(n-1))."""
    X = check_returns(X, min_rows=2)
    mu = X.mean(axis=0)
    centered = X - mu
    sigma = centered.T @ centered / (X.shape[0] - ddof)
    return MomentEstimates(mu_hat=mu, sigma_hat=sigma, n=X.shape[0])


def markowitz(est, lam):
    """Unconstrained mean-variance portfolio ``(1/lam) inv(Sigma) mu``."""
    if lam <= 0:
        raise ValueError("lam must be positive")
    try:
        sigma = check_spd(est.sigma_hat, "sigma_hat")
    except ValueError as exc:
        raise ValueError(
            "sample covariance is singular; consider Ledoit-Wolf shrinkage"
        ) from exc
    return spd_solve(sigma, est.mu_hat) / lam


def ledoit_wolf(X, target="scaled_identity", ddof=0):
    """Shrink the sample covariance toward an identity-shaped target.

    The shrinkage intensity follows Ledoit & Wolf (2004): the ratio of the
    estimated Monte Carlo error of the sample covariance to its distance from
    the target, clamped to [0, 1].  ``target`` selects the scaled identity
    ``mean(diag) * I`` (default) or the plain identity ``I``.

    Returns ``(shrunk_covariance, alpha)``.
    """
    X = check_returns(X, min_rows=2)
    n, d = X.shape
    centered = X - X.mean(axis=0)
    sample = centered.T @ centered / (n - ddof)
    if target == "scaled_identity":
        tgt = (np.trace(sample) / d) * np.eye(d)
    elif target == "identity":
        tgt = np.eye(d)
    else:
        raise ValueError(f"unknown target {target!r}")

    distance = float(((sample - tgt) ** 2).sum())
    if distance <= 0:
        return sample.copy(), 0.0
    # average squared deviation of per-observation outer products around the
    # sample covariance, the standard plug-in for the estimator variance
    sq_norm = 0.0
    for row in centered:
        sq_norm += float(((np.outer(row, row) - sample) ** 2).sum())
    variance = sq_norm / n**2
    alpha = float(np.clip(variance / distance, 0.0, 1.0))
    return shrink_covariance(sample, tgt, alpha), alpha


def shrink_covariance(sample, target, alpha):
    """Convex combination ``(1 - alpha) * sample + alpha * target``."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    return (1.0 - alpha) * np.asarray(sample, float) + alpha * np.asarray(target, float)


def equal_weights(d):
    """Uniform portfolio over ``d`` assets."""
    if d < 1:
        raise ValueError("d must be at least 1")
    return np.full(d, 1.0 / d)
