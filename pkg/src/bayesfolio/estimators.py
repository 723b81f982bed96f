"""Scikit-learn style estimators wrapping the solvers and baselines.

Each estimator consumes an (n, d) return matrix (or a
:class:`~bayesfolio.data.ReturnsDataset`) in ``fit`` and exposes the fitted
portfolio as ``weights_``.  ``predict(X)`` evaluates per-period strategy
returns on new data, so the estimators compose with pipelines, grid search
and cross-validation utilities from the wider ecosystem.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from . import baselines
from .data import ReturnsDataset, _synthetic_dates
from .mcmc import McmcConfig, mcmc_solve
from .models import gg
from .priors import default_prior
from .solver import SolverConfig, alg_vb
from .validation import check_returns


def _as_dataset(X):
    if isinstance(X, ReturnsDataset):
        return X
    X = check_returns(X)
    return ReturnsDataset(dates=_synthetic_dates(X.shape[0]), returns=X)


class _PortfolioMixin:
    """Shared prediction surface: per-period returns of the fitted portfolio."""

    def predict(self, X):
        data = _as_dataset(X)
        return data.returns @ self.weights_


class VBPortfolio(_PortfolioMixin, BaseEstimator):
    """Variational exponential-utility portfolio.

    Parameters mirror the solver configuration; ``prior`` defaults to the
    data-derived prior of the chosen model.  After ``fit`` the decision is in
    ``weights_`` and the full solve trace in ``report_``.
    """

    def __init__(
        self,
        model="gw",
        lam=1.0,
        decision_set="simplex",
        eta="auto",
        max_outer=1000,
        max_inner=500,
        inner_tol=1e-10,
        outer_tol=1e-9,
        prior=None,
        seed=0,
    ):
        self.model = model
        self.lam = lam
        self.decision_set = decision_set
        self.eta = eta
        self.max_outer = max_outer
        self.max_inner = max_inner
        self.inner_tol = inner_tol
        self.outer_tol = outer_tol
        self.prior = prior
        self.seed = seed

    def fit(self, X, y=None):
        data = _as_dataset(X)
        prior = self.prior if self.prior is not None else default_prior(self.model, data)
        config = SolverConfig(
            lam=self.lam,
            eta=self.eta,
            max_outer=self.max_outer,
            max_inner=self.max_inner,
            inner_tol=self.inner_tol,
            outer_tol=self.outer_tol,
            decision_set=self.decision_set,
            seed=self.seed,
        )
        report = alg_vb(self.model, data, prior, config)
        self.prior_ = prior
        self.report_ = report
        self.weights_ = report.decision
        return self


class MCMCPortfolio(_PortfolioMixin, BaseEstimator):
    """Gibbs-sampling reference portfolio (simplex decisions)."""

    def __init__(
        self,
        model="gw",
        lam=1.0,
        m_samples=20_000,
        burn_in=None,
        eta=0.1,
        max_outer=400,
        outer_tol=1e-4,
        prior=None,
        seed=0,
    ):
        self.model = model
        self.lam = lam
        self.m_samples = m_samples
        self.burn_in = burn_in
        self.eta = eta
        self.max_outer = max_outer
        self.outer_tol = outer_tol
        self.prior = prior
        self.seed = seed

    def fit(self, X, y=None):
        data = _as_dataset(X)
        prior = self.prior if self.prior is not None else default_prior(self.model, data)
        config = McmcConfig(
            m_samples=self.m_samples,
            burn_in=self.burn_in,
            eta=self.eta,
            max_outer=self.max_outer,
            outer_tol=self.outer_tol,
            seed=self.seed,
        )
        report = mcmc_solve(self.model, data, prior, self.lam, config)
        self.prior_ = prior
        self.report_ = report
        self.weights_ = report.decision
        return self


class ExactGaussianPortfolio(_PortfolioMixin, BaseEstimator):
    """Closed-form decision under the known-covariance Gaussian model."""

    def __init__(self, lam=1.0, decision_set="rd", prior=None):
        self.lam = lam
        self.decision_set = decision_set
        self.prior = prior

    def fit(self, X, y=None):
        data = _as_dataset(X)
        prior = self.prior if self.prior is not None else default_prior("gg", data)
        self.prior_ = prior
        self.weights_ = gg.exact_decision(data, prior, self.lam, self.decision_set)
        return self


class MarkowitzPortfolio(_PortfolioMixin, BaseEstimator):
    """Plug-in mean-variance portfolio, optionally with shrunk covariance.

    ``shrinkage=None`` uses the raw sample covariance; ``"scaled_identity"``
    or ``"identity"`` selects the Ledoit-Wolf target.
    """

    def __init__(self, lam=1.0, shrinkage=None, ddof=0):
        self.lam = lam
        self.shrinkage = shrinkage
        self.ddof = ddof

    def fit(self, X, y=None):
        data = _as_dataset(X)
        est = baselines.estimate_moments(data.returns, ddof=self.ddof)
        if self.shrinkage is None:
            self.alpha_ = 0.0
            self.covariance_ = est.sigma_hat
        else:
            self.covariance_, self.alpha_ = baselines.ledoit_wolf(
                data.returns, target=self.shrinkage, ddof=self.ddof
            )
            est = baselines.MomentEstimates(
                mu_hat=est.mu_hat, sigma_hat=self.covariance_, n=est.n
            )
        self.weights_ = baselines.markowitz(est, self.lam)
        return self


class EqualWeightPortfolio(_PortfolioMixin, BaseEstimator):
    """Uniform 1/d portfolio."""

    def fit(self, X, y=None):
        data = _as_dataset(X)
        self.weights_ = baselines.equal_weights(data.d)
        return self
