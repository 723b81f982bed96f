"""Plug-in mean-variance targets for the large-sample behaviour."""

import numpy as np
import pytest

from bayesfolio.data import synth_ar, synth_gw
from bayesfolio.models import markowitz_plugin_target

from conftest import make_dataset


class TestGwTarget:
    def test_identity_covariance_returns_mean(self):
        rng = np.random.default_rng(0)
        mu = np.array([0.5, 0.0, 0.0])
        X = mu + rng.standard_normal((20000, 3))
        # whiten exactly so the sample covariance is the identity
        Xc = X - X.mean(axis=0)
        cov = Xc.T @ Xc / len(X)
        white = Xc @ np.linalg.inv(np.linalg.cholesky(cov)).T + X.mean(axis=0)
        data = make_dataset(white)
        target = markowitz_plugin_target(data, "gw", 1.0, "rd")
        assert np.allclose(target, data.mean, atol=1e-10)

    def test_simplex_case_matches_grid_search(self):
        data = synth_gw(3, 400, np.array([0.3, 0.5, 0.1]), np.eye(3), 1)
        lam = 1.0
        got = markowitz_plugin_target(data, "gw", lam, "simplex")
        mu = data.mean
        sigma = data.sample_covariance()
        step = 1e-3
        ticks = np.arange(0.0, 1.0 + step / 2, step)
        w1, w2 = np.meshgrid(ticks, ticks, indexing="ij")
        mask = w1 + w2 <= 1.0 + 1e-12
        pts = np.stack([w1[mask], w2[mask], 1.0 - w1[mask] - w2[mask]], axis=1)
        vals = 0.5 * lam**2 * np.einsum("ki,ij,kj->k", pts, sigma, pts) - lam * pts @ mu
        best = pts[np.argmin(vals)]
        assert np.abs(got - best).max() <= 2 * step

    def test_large_sample_matches_true_parameters(self):
        # a clearly dominant asset makes the projected decision locally
        # constant in the moments, so sampling noise cannot move it
        mu_star = np.array([1.5, 0.1, 0.2])
        sigma_star = np.eye(3)
        data = synth_gw(3, 5000, mu_star, sigma_star, 7)
        got = markowitz_plugin_target(data, "gw", 1.0, "simplex")
        from bayesfolio.linalg import minimize_quadratic

        truth = minimize_quadratic(sigma_star, mu_star, "simplex")
        assert np.abs(got - truth).max() < 1e-2

    def test_needs_enough_rows(self):
        data = synth_gw(4, 3, np.zeros(4), np.eye(4), 0)
        with pytest.raises(ValueError):
            markowitz_plugin_target(data, "gw", 1.0)


class TestArTarget:
    def test_prediction_uses_last_observation(self):
        gamma = np.diag([0.8, 0.5])
        data = synth_ar(2, 3000, gamma, 0.1 * np.eye(2), np.zeros(2), 3)
        got = markowitz_plugin_target(data, "ar", 1.0, "rd")
        y = data.returns
        cross = y[1:].T @ y[:-1]
        gram = y[1:].T @ y[1:]
        mu = cross @ np.linalg.inv(gram) @ y[-1]
        centered = y[1:] - mu
        sigma = centered.T @ centered / (y.shape[0] - 1)
        assert np.allclose(got, np.linalg.solve(sigma, mu), atol=1e-8)

    def test_unknown_model_rejected(self):
        data = synth_gw(2, 50, np.zeros(2), np.eye(2), 0)
        with pytest.raises(ValueError):
            markowitz_plugin_target(data, "gp", 1.0)
