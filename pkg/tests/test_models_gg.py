"""Known-covariance Gaussian model: exact decision and its Monte Carlo oracle."""

import numpy as np
import pytest
from scipy import optimize

from bayesfolio.models import gg
from bayesfolio.priors import GgPrior
from bayesfolio.solver import SolverConfig, solve_inner

from conftest import gaussian_dataset, make_dataset


def make_prior(d, sigma_scale=1.0):
    return GgPrior(mu0=np.zeros(d), sigma0=np.eye(d), sigma_star=sigma_scale * np.eye(d))


class TestExactDecision:
    def test_prior_and_data_agreement_collapses_posterior_mean(self):
        rng = np.random.default_rng(0)
        X = rng.normal(0.1, 0.5, size=(40, 2))
        data = make_dataset(X)
        prior = GgPrior(mu0=data.mean, sigma0=np.eye(2), sigma_star=np.eye(2))
        lam = 1.3
        decision = gg.exact_decision(data, prior, lam, "rd")
        mean, cov = gg.posterior_predictive(data, prior)
        assert np.allclose(mean, data.mean, atol=1e-12)
        assert np.allclose(decision, np.linalg.solve(cov, mean) / lam, atol=1e-10)

    def test_single_asset_simplex(self):
        data = gaussian_dataset(12, 1, seed=1)
        prior = make_prior(1)
        assert np.allclose(gg.exact_decision(data, prior, 2.0, "simplex"), [1.0])

    def test_rejects_zero_risk(self):
        data = gaussian_dataset(5, 2, seed=2)
        with pytest.raises(ValueError):
            gg.exact_decision(data, make_prior(2), 0.0, "rd")

    def test_matches_monte_carlo_risk_minimizer(self):
        """Numeric minimisation of the sampled tilted risk, encoded separately.

        Draw from the posterior predictive with common random numbers and
        minimise the sample average of exp(-lam * delta'y) over R^2; the
        optimum must agree with the closed form up to Monte Carlo error.
        """
        rng = np.random.default_rng(3)
        X = rng.normal(0.05, 0.4, size=(25, 2))
        data = make_dataset(X)
        prior = make_prior(2)
        lam = 1.0
        exact = gg.exact_decision(data, prior, lam, "rd")

        mean, cov = gg.posterior_predictive(data, prior)
        chol = np.linalg.cholesky(cov)
        draws = mean + rng.standard_normal((1_000_000, 2)) @ chol.T

        def sampled_risk(delta):
            from scipy.special import logsumexp

            expo = -lam * draws @ delta
            return float(logsumexp(expo) - np.log(len(draws)))

        res = optimize.minimize(sampled_risk, x0=exact + 0.1, method="Nelder-Mead")
        assert np.linalg.norm(res.x - exact) < 2e-2 * max(1.0, np.linalg.norm(exact))


class TestVariationalEquivalence:
    def test_fixed_point_solves_mean_shift_system(self):
        data = gaussian_dataset(20, 2, seed=5)
        prior = make_prior(2)
        lam = 0.8
        delta = np.array([0.3, 0.7])
        cfg = SolverConfig(lam=lam, inner_tol=1e-13, max_inner=2000)
        sol = solve_inner("gg", data, prior, delta, cfg)
        s = sol.state
        assert np.allclose(s.xi_y, s.xi_mu - lam * prior.sigma_star @ delta, atol=1e-12)
        lam_star = np.linalg.inv(prior.sigma_star)
        lhs = s.lambda_mu @ s.xi_mu
        rhs = lam_star @ (data.sum_y + s.xi_y) + np.linalg.inv(prior.sigma0) @ prior.mu0
        assert np.allclose(lhs, rhs, atol=1e-10)

    def test_zero_risk_objective_ignores_delta(self):
        data = gaussian_dataset(10, 2, seed=6)
        prior = make_prior(2)
        cfg = SolverConfig(lam=0.0, inner_tol=1e-13, max_inner=500)
        d1, d2 = np.array([1.0, 0.0]), np.array([0.2, 0.8])
        o1 = gg.objective(solve_inner("gg", data, prior, d1, cfg).state, data, prior, d1, 0.0)
        o2 = gg.objective(solve_inner("gg", data, prior, d2, cfg).state, data, prior, d2, 0.0)
        assert o1 == pytest.approx(o2, abs=1e-10)

    def test_envelope_gradient_matches_finite_differences(self):
        data = gaussian_dataset(15, 3, seed=7)
        prior = make_prior(3)
        lam = 1.4
        delta = np.array([0.2, 0.3, 0.5])
        cfg = SolverConfig(lam=lam, inner_tol=1e-14, max_inner=2000)
        sol = solve_inner("gg", data, prior, delta, cfg)
        grad = -lam * sol.state.xi_y
        h = 1e-5
        fd = np.zeros(3)
        for i in range(3):
            up, down = delta.copy(), delta.copy()
            up[i] += h
            down[i] -= h
            fd[i] = (
                gg.objective(solve_inner("gg", data, prior, up, cfg, state=sol.state).state, data, prior, up, lam)
                - gg.objective(solve_inner("gg", data, prior, down, cfg, state=sol.state).state, data, prior, down, lam)
            ) / (2 * h)
        assert np.linalg.norm(fd - grad) / np.linalg.norm(grad) < 1e-6
