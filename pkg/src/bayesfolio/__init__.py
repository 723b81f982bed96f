"""Bayesian exponential-utility portfolio construction.

The package solves the risk-sensitive Bayesian portfolio problem with a
mean-field variational solver, validates it against a Gibbs-sampling reference
solver and an exactly solvable conjugate model, and benchmarks the decisions
against classical portfolios on user-supplied return data.
"""

from .baselines import equal_weights, estimate_moments, ledoit_wolf, markowitz
from .data import (
    EmaSpec,
    PriceSeries,
    ReturnsDataset,
    build_setting,
    ema_experts,
    load_prices_csv,
    month_end_subsample,
    synth_ar,
    synth_gw,
    to_returns,
)
from .estimators import (
    EqualWeightPortfolio,
    ExactGaussianPortfolio,
    MarkowitzPortfolio,
    MCMCPortfolio,
    VBPortfolio,
)
from .evaluation import (
    BacktestResult,
    ConsistencyTable,
    consistency_experiment,
    cumulative_wealth,
    regret_vs_hindsight,
    run_strategy_backtest,
    sharpe_annualized,
)
from .mcmc import McmcConfig, gibbs_ar, gibbs_gw, mcmc_solve
from .models import get_model, markowitz_plugin_target
from .priors import ArPrior, GgPrior, GpPrior, GwPrior, default_prior
from .solver import (
    SolveReport,
    SolverConfig,
    alg_vb,
    convergence_gap_trace,
    envelope_gradient,
    solve_inner,
)

__version__ = "0.1.0"

__all__ = [
    "ArPrior",
    "BacktestResult",
    "ConsistencyTable",
    "EmaSpec",
    "EqualWeightPortfolio",
    "ExactGaussianPortfolio",
    "GgPrior",
    "GpPrior",
    "GwPrior",
    "MCMCPortfolio",
    "MarkowitzPortfolio",
    "McmcConfig",
    "PriceSeries",
    "ReturnsDataset",
    "SolveReport",
    "SolverConfig",
    "VBPortfolio",
    "alg_vb",
    "build_setting",
    "consistency_experiment",
    "convergence_gap_trace",
    "cumulative_wealth",
    "default_prior",
    "ema_experts",
    "envelope_gradient",
    "equal_weights",
    "estimate_moments",
    "get_model",
    "gibbs_ar",
    "gibbs_gw",
    "ledoit_wolf",
    "load_prices_csv",
    "markowitz",
    "markowitz_plugin_target",
    "mcmc_solve",
    "month_end_subsample",
    "regret_vs_hindsight",
    "run_strategy_backtest",
    "sharpe_annualized",
    "solve_inner",
    "synth_ar",
    "synth_gw",
    "to_returns",
]
