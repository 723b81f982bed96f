import datetime as dt

import numpy as np
import pytest

from bayesfolio.data import ReturnsDataset


def make_dataset(returns, frequency="monthly"):
    returns = np.asarray(returns, dtype=float)
    if returns.ndim == 1:
        returns = returns[:, None]
    base = dt.date(2015, 1, 1)
    dates = tuple(base + dt.timedelta(days=i) for i in range(returns.shape[0]))
    return ReturnsDataset(dates=dates, returns=returns, frequency="daily" if frequency == "daily" else "monthly")


def gaussian_dataset(n, d, seed, mu=0.05, sd=0.2):
    rng = np.random.default_rng(seed)
    return make_dataset(rng.normal(mu, sd, size=(n, d)))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
