"""Prior hyperparameter containers and data-derived defaults.

Default priors follow the convention used throughout the experiments: the
Wishart prior on the return precision gets ``nu0 = d`` degrees of freedom and
scale ``(1/nu0) * inv(sample covariance)``, so its mean matches the empirical
precision.  Model-specific location parameters are centred on cheap plug-in
estimates (sample mean, least-squares transition matrix).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import rbf_gram, spd_inverse, spd_logdet, spd_solve
from .validation import check_matrix, check_spd, check_vector


@dataclass(frozen=True, eq=False)
class GwPrior:
    """Gaussian mean prior (precision ``lambda0``) plus Wishart precision prior."""

    mu0: np.ndarray
    lambda0: np.ndarray
    nu0: float
    psi0: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mu0", check_vector(self.mu0, "mu0"))
        object.__setattr__(self, "lambda0", check_spd(self.lambda0, "lambda0"))
        object.__setattr__(self, "psi0", check_spd(self.psi0, "psi0"))
        d = self.mu0.size
        if self.lambda0.shape[0] != d or self.psi0.shape[0] != d:
            raise ValueError("prior dimensions are inconsistent")
        if self.nu0 < d:
            raise ValueError(f"nu0 must be at least d={d}, got {self.nu0}")

    @property
    def d(self):
        return self.mu0.size


@dataclass(frozen=True, eq=False)
class ArPrior:
    """Matrix-normal prior on the transition matrix plus Wishart precision prior."""

    m0: np.ndarray
    u0: np.ndarray
    v0: np.ndarray
    nu0: float
    psi0: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "m0", check_matrix(self.m0, "m0"))
        object.__setattr__(self, "u0", check_spd(self.u0, "u0"))
        object.__setattr__(self, "v0", check_spd(self.v0, "v0"))
        object.__setattr__(self, "psi0", check_spd(self.psi0, "psi0"))
        d = self.m0.shape[0]
        if self.m0.shape != (d, d):
            raise ValueError("m0 must be square")
        for name in ("u0", "v0", "psi0"):
            if getattr(self, name).shape[0] != d:
                raise ValueError("prior dimensions are inconsistent")
        if self.nu0 < d:
            raise ValueError(f"nu0 must be at least d={d}, got {self.nu0}")

    @property
    def d(self):
        return self.m0.shape[0]


@dataclass(frozen=True, eq=False)
class GpPrior:
    """Process prior on the mean path plus Wishart precision prior.

    ``mean_fn`` maps an integer time index to a length-d vector; ``None``
    means the constant zero function.  ``gamma`` is the kernel width.
    """

    gamma: float
    omega0: np.ndarray
    nu0: float
    psi0: np.ndarray
    mean_fn: object = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "omega0", check_spd(self.omega0, "omega0"))
        object.__setattr__(self, "psi0", check_spd(self.psi0, "psi0"))
        if not np.isfinite(self.gamma) or self.gamma <= 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        d = self.omega0.shape[0]
        if self.psi0.shape[0] != d:
            raise ValueError("prior dimensions are inconsistent")
        if self.nu0 < d:
            raise ValueError(f"nu0 must be at least d={d}, got {self.nu0}")

    @property
    def d(self):
        return self.omega0.shape[0]

    def mean_path(self, times):
        """Stacked prior mean over the given integer times, shape (len(times), d)."""
        if self.mean_fn is None:
            return np.zeros((len(times), self.d))
        return np.asarray([check_vector(self.mean_fn(t), "mean_fn(t)") for t in times])


@dataclass(frozen=True, eq=False)
class GgPrior:
    """Gaussian prior on the mean with a known observation covariance."""

    mu0: np.ndarray
    sigma0: np.ndarray
    sigma_star: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mu0", check_vector(self.mu0, "mu0"))
        object.__setattr__(self, "sigma0", check_spd(self.sigma0, "sigma0"))
        object.__setattr__(self, "sigma_star", check_spd(self.sigma_star, "sigma_star"))
        d = self.mu0.size
        if self.sigma0.shape[0] != d or self.sigma_star.shape[0] != d:
            raise ValueError("prior dimensions are inconsistent")

    @property
    def d(self):
        return self.mu0.size


def _stabilized_covariance(data):
    """Sample covariance plus a tiny trace-scaled ridge so Cholesky succeeds."""
    cov = data.sample_covariance()
    scale = max(float(np.trace(cov)) / data.d, 1e-12)
    return cov + 1e-8 * scale * np.eye(data.d)


def _wishart_defaults(data):
    d = data.d
    nu0 = float(d)
    psi0 = spd_inverse(_stabilized_covariance(data)) / nu0
    return nu0, psi0


def least_squares_transition(data):
    """Least-squares one-step transition matrix of the row sequence."""
    y = data.returns
    if y.shape[0] < 2:
        raise ValueError("need at least two rows to estimate a transition matrix")
    cross = y[1:].T @ y[:-1]
    gram = y[:-1].T @ y[:-1]
    scale = max(float(np.trace(gram)) / data.d, 1e-12)
    gram = gram + 1e-10 * scale * np.eye(data.d)
    return cross @ spd_inverse(gram)


def marginal_likelihood_gamma(data, omega0=None, grid=None):
    """Pick the kernel width by maximising the Gaussian marginal likelihood.

    The mean path is integrated out against the kernel prior, leaving the
    stacked data Gaussian with covariance ``K ⊗ omega0 + I ⊗ cov``; the width
    is chosen on a log-spaced grid (derivative-free by design).
    """
    d = data.d
    if omega0 is None:
        omega0 = np.eye(d)
    if grid is None:
        grid = np.logspace(np.log10(0.5), np.log10(50.0), 25)
    times = np.arange(1, data.n + 1, dtype=float)
    noise = np.kron(np.eye(data.n), _stabilized_covariance(data))
    y = data.returns.reshape(-1)
    best_gamma, best_ll = None, -np.inf
    for gamma in grid:
        cov = np.kron(rbf_gram(times, gamma), omega0) + noise
        ll = -0.5 * float(y @ spd_solve(cov, y)) - 0.5 * spd_logdet(cov)
        if ll > best_ll:
            best_gamma, best_ll = float(gamma), ll
    return best_gamma


def default_prior(model, data, **overrides):
    """Data-derived default prior for the named model.

    Overrides replace individual fields, e.g. ``default_prior("gp", data,
    gamma=4.0)`` skips the marginal-likelihood grid search.
    """
    d = data.d
    if model == "gw":
        nu0, psi0 = _wishart_defaults(data)
        fields = dict(mu0=data.mean, lambda0=np.eye(d), nu0=nu0, psi0=psi0)
        fields.update(overrides)
        return GwPrior(**fields)
    if model == "ar":
        nu0, psi0 = _wishart_defaults(data)
        fields = dict(
            m0=least_squares_transition(data),
            u0=np.eye(d),
            v0=np.eye(d),
            nu0=nu0,
            psi0=psi0,
        )
        fields.update(overrides)
        return ArPrior(**fields)
    if model == "gp":
        nu0, psi0 = _wishart_defaults(data)
        fields = dict(omega0=np.eye(d), nu0=nu0, psi0=psi0, mean_fn=None)
        fields.update(overrides)
        if "gamma" not in fields:
            fields["gamma"] = marginal_likelihood_gamma(data, fields["omega0"])
        return GpPrior(**fields)
    if model == "gg":
        fields = dict(
            mu0=data.mean, sigma0=np.eye(d), sigma_star=_stabilized_covariance(data)
        )
        fields.update(overrides)
        return GgPrior(**fields)
    raise ValueError(f"unknown model {model!r}")
