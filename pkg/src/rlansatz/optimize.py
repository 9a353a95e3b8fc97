"""Derivative-free parameter optimization of circuits on shot estimates.

The default optimizer is COBYLA (linear-interpolation trust region, run
unconstrained), delegated to SciPy behind a wrapper that enforces the
evaluation budget, tracks the best evaluation ever seen and rejects
non-finite objective values. A Nelder-Mead drop-in is exposed for
debugging; circuit optimization always defaults to COBYLA.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from .circuits import Circuit
from .errors import OptimizationError
from .problems import ProblemInstance
from .qsim import estimate_expectation, sample_shots
from .seeding import OPT_STREAM, derive_seed

DEFAULT_MAX_ITERATIONS = 1000
DEFAULT_RHO_BEGIN = 1.0
DEFAULT_RHO_END = 1e-4


@dataclass(frozen=True)
class OptimizationResult:
    best_params: np.ndarray
    best_value: float
    evaluations: int
    converged: bool


class _BudgetExhausted(Exception):
    pass


class _Recorder:
    """Counts evaluations, tracks the running best, enforces the budget."""

    def __init__(self, objective: Callable[[np.ndarray], float], budget: int):
        self.objective = objective
        self.budget = budget
        self.evaluations = 0
        self.best_params: np.ndarray | None = None
        self.best_value = np.inf

    def __call__(self, x: np.ndarray) -> float:
        if self.evaluations >= self.budget:
            raise _BudgetExhausted
        value = float(self.objective(np.asarray(x, dtype=float)))
        if not np.isfinite(value):
            raise OptimizationError(f"non-finite objective value {value!r} at params {np.asarray(x)!r}")
        self.evaluations += 1
        if value < self.best_value:
            self.best_value = value
            self.best_params = np.array(x, dtype=float)
        return value


def _run_scipy(
    method: str,
    objective: Callable[[np.ndarray], float],
    x0: np.ndarray,
    max_iterations: int,
    options: dict,
) -> OptimizationResult:
    x0 = np.asarray(x0, dtype=float)
    if max_iterations < 1:
        raise OptimizationError(f"max_iterations must be >= 1, got {max_iterations}")
    recorder = _Recorder(objective, max_iterations)
    if x0.size == 0:
        value = recorder(x0)
        return OptimizationResult(x0.copy(), value, 1, True)
    converged = False
    try:
        result = _scipy_minimize(recorder, x0, method=method, options=options)
        converged = bool(result.success)
    except _BudgetExhausted:
        pass
    if recorder.best_params is None:
        raise OptimizationError("optimizer made no evaluations")
    return OptimizationResult(recorder.best_params, recorder.best_value, recorder.evaluations, converged)


def cobyla_minimize(
    objective: Callable[[np.ndarray], float],
    x0: np.ndarray,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    rho_begin: float = DEFAULT_RHO_BEGIN,
    rho_end: float = DEFAULT_RHO_END,
) -> OptimizationResult:
    """Minimize with COBYLA under a hard objective-evaluation budget.

    Terminates when the trust radius shrinks below ``rho_end`` or the budget
    is exhausted; ``best_value`` is the minimum over all evaluations, not the
    last iterate. Deterministic for a deterministic objective.
    """
    if not (rho_begin > rho_end > 0):
        raise OptimizationError(f"need rho_begin > rho_end > 0, got {rho_begin}, {rho_end}")
    options = {"rhobeg": rho_begin, "tol": rho_end, "maxiter": max_iterations}
    return _run_scipy("COBYLA", objective, x0, max_iterations, options)


def nelder_mead_minimize(
    objective: Callable[[np.ndarray], float],
    x0: np.ndarray,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    xatol: float = 1e-4,
    fatol: float = 1e-8,
) -> OptimizationResult:
    """Nelder-Mead substitute with the same result contract (debugging aid)."""
    options = {"maxfev": max_iterations, "xatol": xatol, "fatol": fatol}
    return _run_scipy("Nelder-Mead", objective, x0, max_iterations, options)


MINIMIZERS: dict[str, Callable[..., OptimizationResult]] = {
    "cobyla": cobyla_minimize,
    "nelder-mead": nelder_mead_minimize,
}


def optimize_circuit(
    circuit: Circuit,
    inst: ProblemInstance,
    n_shots: int,
    seed: int,
    *,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    rho_begin: float = DEFAULT_RHO_BEGIN,
    rho_end: float = DEFAULT_RHO_END,
    method: str = "cobyla",
) -> OptimizationResult:
    """Tune the circuit's parameters against the shot-estimated expectation.

    The objective re-samples every evaluation with a fresh seed derived from
    ``seed`` and an evaluation counter, mirroring repeated executions on a
    sampling backend. Warm start: optimization begins at the circuit's
    current parameters (new gates enter at 0). On return the circuit carries
    the best parameters found.
    """
    eval_counter = [0]

    def objective(theta: np.ndarray) -> float:
        shot_seed = derive_seed(seed, OPT_STREAM, eval_counter[0])
        eval_counter[0] += 1
        dist = sample_shots(circuit, n_shots, shot_seed, params=theta)
        return estimate_expectation(dist, inst.ham)

    if method == "cobyla":
        result = cobyla_minimize(
            objective, circuit.params, max_iterations, rho_begin, rho_end
        )
    elif method in MINIMIZERS:
        result = MINIMIZERS[method](objective, circuit.params, max_iterations)
    else:
        raise OptimizationError(f"unknown optimizer {method!r}; expected one of {sorted(MINIMIZERS)}")
    if circuit.n_params:
        circuit.params[:] = result.best_params
    return result
