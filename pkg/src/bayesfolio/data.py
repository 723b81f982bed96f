"""Price ingestion, return construction, expert features, and synthetic generators.

The CSV contract is strict: header ``date,<name1>,...,<namem>``, dates in
``YYYY-MM-DD``, decimal point ``.``, UTF-8, no thousands separators.  Rows with
any empty price cell are dropped with a warning; malformed cells and
non-positive prices are hard errors that name the offending line.

Everything here is deterministic: re-running a transform on the same inputs
yields byte-identical datasets.
"""

from __future__ import annotations

import csv
import datetime as dt
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .validation import as_rng, check_returns, check_spd, check_vector

#: train sizes (in months) of the three experimental settings
SETTING_SIZES = {1: 12, 2: 48, 3: 84}

#: default half-lives, in periods, of the expert moving averages
DEFAULT_EMA_SCALES = (2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0)


@dataclass(frozen=True, eq=False)
class PriceSeries:
    """Date-indexed price panel for ``m`` raw indices."""

    dates: tuple
    prices: np.ndarray
    names: tuple

    def __post_init__(self):
        prices = check_returns(self.prices, "prices", min_rows=1)
        object.__setattr__(self, "prices", prices)
        if len(self.dates) != prices.shape[0]:
            raise ValueError("dates and prices must have the same length")
        if np.any(prices <= 0):
            raise ValueError("prices must be strictly positive")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise ValueError("dates must be strictly increasing")

    @property
    def n_periods(self):
        return self.prices.shape[0]


@dataclass(frozen=True, eq=False)
class ReturnsDataset:
    """Time-indexed (n, d) matrix of asset returns."""

    dates: tuple
    returns: np.ndarray
    frequency: str = "daily"

    def __post_init__(self):
        returns = check_returns(self.returns, "returns", min_rows=1)
        object.__setattr__(self, "returns", returns)
        object.__setattr__(self, "dates", tuple(self.dates))
        if len(self.dates) != returns.shape[0]:
            raise ValueError("dates and returns must have the same length")
        if self.frequency not in ("daily", "monthly"):
            raise ValueError(f"unknown frequency {self.frequency!r}")

    @property
    def n(self):
        return self.returns.shape[0]

    @property
    def d(self):
        return self.returns.shape[1]

    # sufficient statistics reused by every model sweep; cached_property
    # writes straight into __dict__, which the frozen dataclass allows
    @cached_property
    def sum_y(self):
        return self.returns.sum(axis=0)

    @cached_property
    def gram(self):
        return self.returns.T @ self.returns

    @cached_property
    def mean(self):
        return self.returns.mean(axis=0)

    def sample_covariance(self, ddof=0):
        """Covariance of the rows; population (1/n) normaliser by default."""
        centered = self.returns - self.mean
        return centered.T @ centered / (self.n - ddof)


@dataclass(frozen=True)
class EmaSpec:
    """Half-life parameters of the expert moving averages."""

    scales: tuple = field(default=DEFAULT_EMA_SCALES)

    def __post_init__(self):
        scales = tuple(float(s) for s in self.scales)
        object.__setattr__(self, "scales", scales)
        if not scales:
            raise ValueError("scales must not be empty")
        if any(s <= 0 for s in scales):
            raise ValueError("scales must be positive")
        if any(b <= a for a, b in zip(scales, scales[1:])):
            raise ValueError("scales must be strictly increasing")


class CsvSchemaError(ValueError):
    """Raised when a price CSV violates the documented schema."""


def _parse_date(text, line_no):
    try:
        return dt.date.fromisoformat(text)
    except ValueError as exc:
        raise CsvSchemaError(f"line {line_no}: invalid date {text!r}") from exc


def load_prices_csv(path):
    """Load a price CSV into a date-sorted :class:`PriceSeries`.

    Duplicate dates are rejected; out-of-order dates are sorted.  Rows with an
    empty price cell are dropped (a warning reports how many); malformed
    numbers and non-positive prices raise with the offending line number.
    """
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvSchemaError(f"{path}: file is empty") from None
        header = [h.strip() for h in header]
        if not header or header[0] != "date":
            raise CsvSchemaError(f"{path}: first column must be named 'date'")
        names = tuple(header[1:])
        if not names:
            raise CsvSchemaError(f"{path}: missing price columns after 'date'")

        dates, rows, dropped = [], [], 0
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise CsvSchemaError(
                    f"line {line_no}: expected {len(header)} columns, got {len(row)}"
                )
            date = _parse_date(row[0].strip(), line_no)
            cells = [cell.strip() for cell in row[1:]]
            if any(cell == "" for cell in cells):
                dropped += 1
                continue
            try:
                values = [float(cell) for cell in cells]
            except ValueError as exc:
                raise CsvSchemaError(f"line {line_no}: malformed price value") from exc
            if any(v <= 0 for v in values):
                raise CsvSchemaError(f"line {line_no}: prices must be positive")
            dates.append(date)
            rows.append(values)

    if not rows:
        raise CsvSchemaError(f"{path}: no usable data rows")
    if dropped:
        warnings.warn(f"{path}: dropped {dropped} row(s) with missing prices")
    if len(set(dates)) != len(dates):
        raise CsvSchemaError(f"{path}: duplicate dates are not allowed")

    order = np.argsort(np.array(dates, dtype="O"))
    dates = tuple(dates[i] for i in order)
    prices = np.asarray(rows, dtype=float)[order]
    return PriceSeries(dates=dates, prices=prices, names=names)


def to_returns(prices, frequency="daily"):
    """Simple returns ``r_t = p_t / p_{t-1} - 1`` per column."""
    if prices.n_periods < 2:
        raise ValueError("need at least two price rows to build returns")
    rel = prices.prices[1:] / prices.prices[:-1] - 1.0
    return ReturnsDataset(dates=prices.dates[1:], returns=rel, frequency=frequency)


def ema_experts(returns, spec=None):
    """Build one expert column per smoothing scale.

    For each half-life ``s`` the per-index exponential moving average uses
    decay ``beta = exp(-ln 2 / s)`` and is then averaged across indices, so the
    output has one column per scale.
    """
    if spec is None:
        spec = EmaSpec()
    x = returns.returns
    n = x.shape[0]
    out = np.empty((n, len(spec.scales)))
    for j, scale in enumerate(spec.scales):
        beta = float(np.exp(-np.log(2.0) / scale))
        ema = np.empty_like(x)
        ema[0] = x[0]
        for t in range(1, n):
            ema[t] = (1.0 - beta) * x[t] + beta * ema[t - 1]
        out[:, j] = ema.mean(axis=1)
    return ReturnsDataset(dates=returns.dates, returns=out, frequency=returns.frequency)


def month_end_subsample(returns):
    """Keep the last observation of each calendar month."""
    keep = []
    for i, date in enumerate(returns.dates):
        is_last = i + 1 == len(returns.dates)
        if is_last or (returns.dates[i + 1].year, returns.dates[i + 1].month) != (
            date.year,
            date.month,
        ):
            keep.append(i)
    keep = np.asarray(keep, dtype=int)
    return ReturnsDataset(
        dates=tuple(returns.dates[i] for i in keep),
        returns=returns.returns[keep],
        frequency="monthly",
    )


def build_setting(returns, setting):
    """Split monthly-sampled data into a train prefix and the remaining months."""
    if setting not in SETTING_SIZES:
        raise ValueError(f"setting must be one of {sorted(SETTING_SIZES)}, got {setting}")
    n_train = SETTING_SIZES[setting]
    monthly = returns if returns.frequency == "monthly" else month_end_subsample(returns)
    if monthly.n <= n_train:
        raise ValueError(
            f"setting {setting} needs more than {n_train} monthly rows, got {monthly.n}"
        )
    train = ReturnsDataset(
        dates=monthly.dates[:n_train],
        returns=monthly.returns[:n_train],
        frequency="monthly",
    )
    test = ReturnsDataset(
        dates=monthly.dates[n_train:],
        returns=monthly.returns[n_train:],
        frequency="monthly",
    )
    return train, test


def _synthetic_dates(n):
    base = dt.date(2000, 1, 1)
    return tuple(
        dt.date(base.year + t // 12, 1 + t % 12, 1) for t in range(n)
    )


def synth_gw(d, n, mu_star, sigma_star, seed):
    """Draw ``n`` i.i.d. Gaussian return rows with the given mean and covariance."""
    mu_star = check_vector(mu_star, "mu_star", min_size=d)
    sigma_star = check_spd(sigma_star, "sigma_star")
    rng = as_rng(seed)
    chol = np.linalg.cholesky(sigma_star)
    rows = mu_star + rng.standard_normal((n, d)) @ chol.T
    return ReturnsDataset(dates=_synthetic_dates(n), returns=rows, frequency="monthly")


def synth_ar(d, n, gamma_star, sigma_star, y0, seed):
    """Draw a first-order vector autoregression: ``n`` transitions after row ``y0``.

    The returned dataset has ``n + 1`` rows; the first one is the initial
    observation the autoregressive model conditions on.
    """
    gamma_star = np.asarray(gamma_star, dtype=float)
    sigma_star = check_spd(sigma_star, "sigma_star")
    y0 = check_vector(y0, "y0", min_size=d)
    rng = as_rng(seed)
    chol = np.linalg.cholesky(sigma_star)
    rows = np.empty((n + 1, d))
    rows[0] = y0
    for t in range(1, n + 1):
        rows[t] = gamma_star @ rows[t - 1] + chol @ rng.standard_normal(d)
    return ReturnsDataset(dates=_synthetic_dates(n + 1), returns=rows, frequency="monthly")
