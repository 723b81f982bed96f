"""Variational decision solver: inner fixed-point sweeps, outer projected gradient.

The outer loop performs projected gradient descent on the variational risk
bound.  Its gradient is available in closed form: because the inner problem is
solved to (approximate) stationarity at each decision, all indirect
derivatives vanish and the gradient reduces to ``-lam * xi_y``, the tilted
predictive mean scaled by the risk aversion.  The default step-size policy is
a persistent backtracking line search (halve on objective increase), which
preserves the descent property the convergence analysis relies on.

Inner solves are warm-started from the previous outer iterate by default;
decisions stay inside the decision set exactly at every iterate thanks to the
projection.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .linalg import project_simplex
from .models import get_model
from .validation import check_seed

#: tolerated objective increase when accepting a backtracking step, scaled by
#: (1 + |objective|) to stay above the evaluation noise of large instances
BACKTRACK_SLACK = 1e-10

#: smallest admissible step size before the line search gives up
MIN_STEP = 1e-12


class StepSizeUnderflowError(RuntimeError):
    """Backtracking halved the step below the admissible minimum."""


class NotConvergedError(RuntimeError):
    """An operation required a converged inner state but got a partial one."""


@dataclass(frozen=True)
class SolverConfig:
    """Knobs of the alternating solver.

    ``eta`` is either a positive float (constant step) or ``"auto"`` for
    backtracking from 0.1.  ``decision_set`` is ``"simplex"`` or ``"rd"``.
    """

    lam: float
    eta: object = "auto"
    max_outer: int = 1000
    max_inner: int = 500
    inner_tol: float = 1e-10
    outer_tol: float = 1e-9
    decision_set: str = "simplex"
    seed: int = 0
    warm_start: bool = True

    def __post_init__(self):
        if not np.isfinite(self.lam) or self.lam < 0:
            raise ValueError(f"lam must be nonnegative and finite, got {self.lam}")
        if self.eta != "auto":
            eta = float(self.eta)
            if not np.isfinite(eta) or eta <= 0:
                raise ValueError(f"eta must be positive or 'auto', got {self.eta!r}")
        if self.max_outer < 1 or self.max_inner < 1:
            raise ValueError("iteration caps must be at least 1")
        if self.inner_tol <= 0 or self.outer_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.decision_set not in ("simplex", "rd"):
            raise ValueError(f"decision_set must be 'simplex' or 'rd', got {self.decision_set!r}")
        check_seed(self.seed)


@dataclass(frozen=True)
class SolveReport:
    """Outcome of a solve: decision plus traces for diagnostics and tests."""

    decision: np.ndarray
    objective_trace: list
    inner_residual_trace: list
    outer_iters: int
    converged: bool
    wall_time: float


@dataclass(frozen=True)
class InnerSolution:
    """Converged (or best-effort) fixed-point state with its residual."""

    state: object
    residual: float
    sweeps: int
    converged: bool


def _project(delta, decision_set):
    if decision_set == "simplex":
        return project_simplex(delta)
    return np.asarray(delta, dtype=float)


def solve_inner(model, data, prior, delta, config, state=None):
    """Iterate the fixed-point operator until the parameter movement is small.

    ``state`` warm-starts the iteration; the residual is the max-norm change
    of the final sweep.  Non-convergence within ``max_inner`` sweeps is
    reported through the ``converged`` flag, not raised, so callers decide.
    """
    model = get_model(model) if isinstance(model, str) else model
    if state is None:
        state = model.init_state(data, prior)
    residual = np.inf
    sweeps = 0
    for sweeps in range(1, config.max_inner + 1):
        new_state = model.fixed_point_step(state, data, prior, delta, config.lam)
        residual = model.state_change(new_state, state)
        state = new_state
        if residual < config.inner_tol:
            break
    return InnerSolution(
        state=state,
        residual=residual,
        sweeps=sweeps,
        converged=residual < config.inner_tol,
    )


def envelope_gradient(solution, lam):
    """Gradient of the risk bound at a converged inner solution: ``-lam * xi_y``.

    Refuses partial states: the closed form only holds at (near) stationarity
    of the inner problem.
    """
    if not solution.converged:
        raise NotConvergedError(
            f"inner solve not converged (residual {solution.residual:.3e}); "
            "gradient would be unreliable"
        )
    return -lam * solution.state.xi_y


def alg_vb(model, data, prior, config):
    """Alternate inner fixed-point solves with outer projected gradient steps.

    Starts from the uniform portfolio, stops when the decision stops moving
    (Euclidean movement below ``outer_tol``) or ``max_outer`` is reached.  In
    auto mode the step is halved whenever the trial objective increases; the
    accepted objective trace is therefore nonincreasing up to slack.
    """
    model = get_model(model) if isinstance(model, str) else model
    t0 = time.perf_counter()
    d = data.d
    delta = np.full(d, 1.0 / d)
    delta = _project(delta, config.decision_set) if config.decision_set == "simplex" else delta

    sol = solve_inner(model, data, prior, delta, config)
    obj = model.objective(sol.state, data, prior, delta, config.lam)
    objective_trace = [obj]
    residual_trace = [sol.residual]

    auto = config.eta == "auto"
    eta = 0.1 if auto else float(config.eta)
    converged = False
    iters = 0

    for _ in range(config.max_outer):
        grad = -config.lam * sol.state.xi_y
        slack = BACKTRACK_SLACK * (1.0 + abs(obj))
        while True:
            trial = _project(delta - eta * grad, config.decision_set)
            warm = sol.state if config.warm_start else None
            trial_sol = solve_inner(model, data, prior, trial, config, state=warm)
            trial_obj = model.objective(trial_sol.state, data, prior, trial, config.lam)
            if not auto or trial_obj <= obj + slack:
                break
            eta *= 0.5
            if eta < MIN_STEP:
                raise StepSizeUnderflowError(
                    "backtracking step underflowed; objective cannot decrease "
                    f"(current objective {obj:.6e})"
                )
        movement = float(np.linalg.norm(trial - delta))
        delta, sol, obj = trial, trial_sol, trial_obj
        objective_trace.append(obj)
        residual_trace.append(sol.residual)
        iters += 1
        if movement < config.outer_tol:
            converged = True
            break

    return SolveReport(
        decision=delta,
        objective_trace=objective_trace,
        inner_residual_trace=residual_trace,
        outer_iters=iters,
        converged=converged and sol.converged,
        wall_time=time.perf_counter() - t0,
    )


def convergence_gap_trace(report):
    """Per-iteration optimality gaps: objective minus the best objective seen."""
    if not report.objective_trace:
        raise ValueError("report has an empty objective trace")
    best = min(report.objective_trace)
    return [value - best for value in report.objective_trace]
