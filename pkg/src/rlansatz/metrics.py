"""Approximation ratio, evaluation reports and solution distributions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuits import Circuit, transpiled_counts
from .errors import DegenerateSpectrumError
from .optimize import DEFAULT_MAX_ITERATIONS, optimize_circuit
from .problems import ProblemInstance, Spectrum
from .qsim import estimate_expectation, sample_shots
from .seeding import INIT_STREAM, OPT_STREAM, REWARD_STREAM, derive_seed, rng_for


def approximation_ratio(estimate: float, spectrum: Spectrum, clamp: bool = False) -> float:
    """(estimate - e_max) / (e_min - e_max): 1 at the optimum, 0 at the worst.

    Shot estimates are averages of table energies, so the raw value already
    lies in [0, 1]; ``clamp`` only guards float edges for reporting.
    """
    if spectrum.degenerate:
        raise DegenerateSpectrumError("approximation ratio undefined for a constant spectrum")
    ratio = (estimate - spectrum.e_max) / (spectrum.e_min - spectrum.e_max)
    if clamp:
        ratio = min(1.0, max(0.0, ratio))
    return float(ratio)


@dataclass(frozen=True)
class EvalReport:
    approx_ratio: float
    above_feasibility_threshold: bool
    single_qubit_gates: int
    two_qubit_gates: int
    depth: int
    n_runs: int
    per_run_ratios: tuple[float, ...]
    per_run_estimates: tuple[float, ...]

    def to_json_dict(self) -> dict:
        return {
            "approx_ratio": self.approx_ratio,
            "above_feasibility_threshold": self.above_feasibility_threshold,
            "single_qubit_gates": self.single_qubit_gates,
            "two_qubit_gates": self.two_qubit_gates,
            "depth": self.depth,
            "n_runs": self.n_runs,
            "per_run_ratios": list(self.per_run_ratios),
            "per_run_estimates": list(self.per_run_estimates),
        }


def evaluate_circuit(
    circuit: Circuit,
    inst: ProblemInstance,
    n_runs: int = 10,
    n_shots: int = 1000,
    seed: int = 0,
    *,
    random_init: bool = True,
    optimize: bool = True,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    method: str = "cobyla",
) -> EvalReport:
    """Run the standard evaluation protocol and average the ratios.

    Per run: re-initialize every parameter uniformly in [-pi, pi) (unless
    ``random_init`` is off), optimize on shot estimates (unless ``optimize``
    is off), then score a fresh shot estimate. The reported ratio is the
    mean of the per-run ratios.
    """
    if n_runs < 1:
        raise ValueError(f"n_runs must be >= 1, got {n_runs}")
    ratios = []
    estimates = []
    for run in range(n_runs):
        work = circuit.copy()
        if random_init and work.n_params:
            init_rng = rng_for(seed, INIT_STREAM, run)
            work.params[:] = init_rng.uniform(-np.pi, np.pi, work.n_params)
        if optimize and work.n_params:
            optimize_circuit(
                work,
                inst,
                n_shots,
                derive_seed(seed, OPT_STREAM, run),
                max_iterations=max_iterations,
                method=method,
            )
        dist = sample_shots(work, n_shots, derive_seed(seed, REWARD_STREAM, run))
        estimate = estimate_expectation(dist, inst.ham)
        estimates.append(estimate)
        ratios.append(approximation_ratio(estimate, inst.spectrum, clamp=True))
    counts = transpiled_counts(circuit)
    mean_ratio = float(np.mean(ratios))
    threshold = inst.spectrum.feasibility_threshold_ar or 0.0
    return EvalReport(
        approx_ratio=mean_ratio,
        above_feasibility_threshold=mean_ratio >= threshold,
        single_qubit_gates=counts.single_qubit,
        two_qubit_gates=counts.two_qubit,
        depth=counts.depth,
        n_runs=n_runs,
        per_run_ratios=tuple(ratios),
        per_run_estimates=tuple(estimates),
    )


def solution_distribution(
    circuit: Circuit, inst: ProblemInstance, n_shots: int = 1000, seed: int = 0
) -> dict[float, float]:
    """Sampled-energy histogram of an already-optimized circuit.

    Maps each distinct exact energy value hit by the sampled bitstrings to
    its frequency; frequencies sum to 1.
    """
    dist = sample_shots(circuit, n_shots, derive_seed(seed, REWARD_STREAM))
    hist: dict[float, float] = {}
    for b, c in dist.counts.items():
        e = float(inst.ham.energy[b])
        hist[e] = hist.get(e, 0.0) + c / dist.n_shots
    return dict(sorted(hist.items()))
