"""Out-of-sample metrics and the variational-vs-MCMC consistency experiment.

Per-period strategy returns are ``delta' y_t``.  Standard deviations use the
population (1/n) convention throughout so the annualised ratio on an
alternating (+0.02, 0.00) series is exactly ``sqrt(12)``.
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .data import synth_ar, synth_gw
from .mcmc import McmcConfig, mcmc_solve
from .priors import default_prior
from .solver import SolverConfig, alg_vb
from .validation import check_weights

ANNUALIZATION = np.sqrt(12.0)


def worker_count():
    """Worker cap from the BAYESFOLIO_THREADS environment variable (>= 1)."""
    raw = os.environ.get("BAYESFOLIO_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    count = int(raw)
    if count < 1:
        raise ValueError("BAYESFOLIO_THREADS must be at least 1")
    return count


def strategy_returns(delta, test):
    delta = check_weights(delta, test.d)
    return test.returns @ delta


def cumulative_wealth(delta, test, rescale=True):
    """Partial sums of per-period strategy returns, optionally risk-rescaled.

    Rescaling divides the path by the population standard deviation of the
    per-period returns; constant returns make that ill-defined and raise.
    """
    per_period = strategy_returns(delta, test)
    path = np.cumsum(per_period)
    if not rescale:
        return path
    std = float(per_period.std())
    if std == 0.0:
        raise ValueError("cannot rescale: per-period returns have zero standard deviation")
    return path / std


def best_index_in_hindsight(test):
    """Asset with the highest final unscaled cumulative wealth."""
    return int(np.argmax(test.returns.sum(axis=0)))


def regret_vs_hindsight(delta, test):
    """Cumulative shortfall against the best single asset in hindsight.

    The per-period shortfall is accumulated and rescaled by its own population
    standard deviation; a zero standard deviation (e.g. the strategy *is* the
    best index) skips the rescale and returns the raw path.
    """
    per_period = strategy_returns(delta, test)
    best = test.returns[:, best_index_in_hindsight(test)]
    increments = best - per_period
    path = np.cumsum(increments)
    std = float(increments.std())
    if std == 0.0:
        return path
    return path / std


def sharpe_annualized(delta, test):
    """``sqrt(12) * mean / std`` of per-period strategy returns (monthly data)."""
    per_period = strategy_returns(delta, test)
    if per_period.size < 2:
        raise ValueError("need at least two test periods")
    std = float(per_period.std())
    if std == 0.0:
        raise ValueError("per-period returns have zero variance")
    return float(ANNUALIZATION * per_period.mean() / std)


@dataclass(frozen=True, eq=False)
class BacktestResult:
    """Risk-rescaled wealth and regret paths plus the annualised Sharpe ratio."""

    strategy: str
    cumulative_wealth_path: np.ndarray
    regret_path: np.ndarray
    sharpe_annualized: float


def run_strategy_backtest(name, delta, test):
    return BacktestResult(
        strategy=name,
        cumulative_wealth_path=cumulative_wealth(delta, test, rescale=True),
        regret_path=regret_vs_hindsight(delta, test),
        sharpe_annualized=sharpe_annualized(delta, test),
    )


@dataclass(frozen=True)
class ConsistencyTable:
    """Rows of (n, mean decision distance, std over repetitions, reps kept)."""

    rows: tuple

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))


def _consistency_rep(model, n, d, lam, m_samples, seed):
    param_ss, data_ss, mcmc_ss = np.random.SeedSequence(seed).spawn(3)
    if model == "gw":
        mu_star = np.random.default_rng(param_ss).uniform(0.0, 1.0, size=d)
        data = synth_gw(d, n, mu_star, np.eye(d), data_ss)
    elif model == "ar":
        gamma_star = np.diag(np.linspace(0.6, 0.99, d))
        data = synth_ar(d, n, gamma_star, 0.1 * np.eye(d), np.zeros(d), data_ss)
    else:
        raise ValueError(f"consistency experiment supports gw or ar, got {model!r}")

    prior = default_prior(model, data)
    vb = alg_vb(
        model,
        data,
        prior,
        SolverConfig(lam=lam, max_outer=2000, outer_tol=1e-8, inner_tol=1e-10),
    )
    mc = mcmc_solve(
        model,
        data,
        prior,
        lam,
        McmcConfig(m_samples=m_samples, seed=int(mcmc_ss.generate_state(1)[0])),
    )
    return float(np.linalg.norm(mc.decision - vb.decision))


def consistency_experiment(ns, d, reps, m_samples, seed, model="gw", lam=1.0):
    """Decision distance between the variational and Monte Carlo solvers.

    For each sample size, ``reps`` synthetic datasets are generated with
    derived seeds, both solvers run, and the Euclidean distance between their
    decisions aggregated.  Failed repetitions are excluded and counted rather
    than aborting the experiment.  Repetitions run on a thread pool capped by
    BAYESFOLIO_THREADS; aggregation is order-independent, so results are
    deterministic for a fixed seed.
    """
    if reps < 2:
        raise ValueError("need at least two repetitions for a standard deviation")
    rows = []
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        for n_idx, n in enumerate(ns):
            futures = [
                pool.submit(
                    _consistency_rep,
                    model,
                    int(n),
                    d,
                    lam,
                    m_samples,
                    (int(seed), n_idx, rep),
                )
                for rep in range(reps)
            ]
            norms = []
            for fut in futures:
                try:
                    norms.append(fut.result())
                except Exception:
                    continue
            if len(norms) < 2:
                raise RuntimeError(f"fewer than two successful repetitions at n={n}")
            norms = np.asarray(norms)
            rows.append((int(n), float(norms.mean()), float(norms.std(ddof=1)), len(norms)))
    return ConsistencyTable(rows=tuple(rows))


def write_consistency_csv(table, path):
    """Emit ``n,mean_norm,std_norm,reps_ok`` rows."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["n", "mean_norm", "std_norm", "reps_ok"])
        for row in table.rows:
            writer.writerow([row[0], f"{row[1]:.10g}", f"{row[2]:.10g}", row[3]])


def write_path_csv(values, path):
    """Emit ``period,value`` rows for a metric path."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["period", "value"])
        for t, value in enumerate(np.asarray(values, dtype=float), start=1):
            writer.writerow([t, f"{value:.10g}"])
