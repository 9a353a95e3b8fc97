"""Dense statevector simulation, shot sampling and expectation estimation.

States are length-2^n complex128 vectors in little-endian basis order
(qubit i lives at bit i of the amplitude index). Gates are applied in place
over the full vector through tensor contractions on a (2,)*n view; no
operator larger than 4x4 is ever materialized here. Randomness enters only
through explicit per-call integer seeds (see ``seeding``); simulations
never share RNG state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuits import Circuit, GateApplication, GateKind, rotation_axes
from .errors import ConfigurationError, InvalidGateError
from .problems import DiagonalHamiltonian

MAX_QUBITS = 20

_SQRT_HALF = 1.0 / math.sqrt(2.0)

PAULI = {
    "x": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}

_H_MATRIX = np.array([[_SQRT_HALF, _SQRT_HALF], [_SQRT_HALF, -_SQRT_HALF]], dtype=complex)

# Basis order of 4x4 matrices: index m = 2*bit(qubits[0]) + bit(qubits[1]).
_CX_MATRIX = np.array(
    [
        [1, 0, 0, 0],
        [0, 1, 0, 0],
        [0, 0, 0, 1],
        [0, 0, 1, 0],
    ],
    dtype=complex,
)


def gate_matrix(kind: GateKind, angle: float | None = None) -> np.ndarray:
    """Dense 2x2 or 4x4 unitary of one gate kind at the given angle."""
    if kind is GateKind.H:
        return _H_MATRIX
    if kind is GateKind.CX:
        return _CX_MATRIX
    if angle is None:
        raise InvalidGateError(f"{kind.value} needs an angle")
    half = 0.5 * angle
    c, s = math.cos(half), math.sin(half)
    axes = rotation_axes(kind)
    if len(axes) == 1:
        return c * np.eye(2, dtype=complex) - 1.0j * s * PAULI[axes]
    generator = np.kron(PAULI[axes[0]], PAULI[axes[1]])
    return c * np.eye(4, dtype=complex) - 1.0j * s * generator


@dataclass
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


def zero_state(n_qubits: int) -> StateVector:
    """|0...0> on n qubits."""
    if not (1 <= n_qubits <= MAX_QUBITS):
        raise ConfigurationError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
    amps = np.zeros(1 << n_qubits, dtype=complex)
    amps[0] = 1.0
    return StateVector(n_qubits, amps)


def apply_gate(state: StateVector, gate: GateApplication, params: np.ndarray | None = None) -> StateVector:
    """Apply one gate in place and return the state.

    Parametric gates resolve their angle from ``params`` unless they carry a
    fixed angle. Qubit indices must be distinct and within range.
    """
    n = state.n_qubits
    if any(q >= n for q in gate.qubits):
        raise InvalidGateError(f"{gate.kind.value}{gate.qubits} out of range for n={n}")
    matrix = gate_matrix(gate.kind, gate.resolved_angle(params))
    tensor = state.amplitudes.reshape((2,) * n)
    if len(gate.qubits) == 1:
        ax = n - 1 - gate.qubits[0]
        tensor = np.tensordot(matrix, tensor, axes=([1], [ax]))
        tensor = np.moveaxis(tensor, 0, ax)
    else:
        ax0 = n - 1 - gate.qubits[0]
        ax1 = n - 1 - gate.qubits[1]
        m4 = matrix.reshape(2, 2, 2, 2)
        tensor = np.tensordot(m4, tensor, axes=([2, 3], [ax0, ax1]))
        tensor = np.moveaxis(tensor, (0, 1), (ax0, ax1))
    state.amplitudes = np.ascontiguousarray(tensor).reshape(-1)
    return state


def run_circuit(circuit: Circuit, params: np.ndarray | None = None) -> StateVector:
    """Final state of the circuit from |0...0>; ``params`` overrides circuit.params."""
    theta = circuit.params if params is None else np.asarray(params, dtype=float)
    state = zero_state(circuit.n_qubits)
    for gate in circuit.gates:
        apply_gate(state, gate, theta)
    return state


def exact_probabilities(circuit: Circuit, params: np.ndarray | None = None) -> np.ndarray:
    """|amplitude|^2 per basis index; sums to 1 up to float error."""
    return run_circuit(circuit, params).probabilities()


def exact_expectation(circuit: Circuit, ham: DiagonalHamiltonian, params: np.ndarray | None = None) -> float:
    """Exact <H> of the final state for a diagonal H (test oracle)."""
    if ham.n != circuit.n_qubits:
        raise ConfigurationError(f"hamiltonian on {ham.n} qubits vs circuit on {circuit.n_qubits}")
    return float(exact_probabilities(circuit, params) @ ham.energy)


@dataclass(frozen=True)
class ShotDistribution:
    """Multinomial measurement counts: outcome basis index -> occurrences."""

    n_qubits: int
    n_shots: int
    counts: dict[int, int]

    def __post_init__(self):
        if self.n_shots < 1:
            raise ConfigurationError(f"n_shots must be >= 1, got {self.n_shots}")
        if sum(self.counts.values()) != self.n_shots:
            raise ConfigurationError("counts do not sum to n_shots")
        if any(not (0 <= b < (1 << self.n_qubits)) for b in self.counts):
            raise ConfigurationError("outcome out of range")

    def probabilities(self) -> np.ndarray:
        """Dense empirical frequency vector of length 2^n."""
        probs = np.zeros(1 << self.n_qubits)
        for b, c in self.counts.items():
            probs[b] = c / self.n_shots
        return probs


def sample_from_probabilities(probs: np.ndarray, n_qubits: int, n_shots: int, rng_seed: int) -> ShotDistribution:
    rng = np.random.default_rng(rng_seed)
    # guard tiny float drift before the multinomial draw
    p = np.clip(probs, 0.0, None)
    p = p / p.sum()
    counts = rng.multinomial(n_shots, p)
    nonzero = np.flatnonzero(counts)
    return ShotDistribution(n_qubits, n_shots, {int(b): int(counts[b]) for b in nonzero})


def sample_shots(circuit: Circuit, n_shots: int, rng_seed: int, params: np.ndarray | None = None) -> ShotDistribution:
    """Measure the circuit ``n_shots`` times; deterministic for a fixed seed."""
    if n_shots < 1:
        raise ConfigurationError(f"n_shots must be >= 1, got {n_shots}")
    probs = exact_probabilities(circuit, params)
    return sample_from_probabilities(probs, circuit.n_qubits, n_shots, rng_seed)


def estimate_expectation(dist: ShotDistribution, ham: DiagonalHamiltonian) -> float:
    """Average energy of the sampled outcomes: (1/shots) * sum count(b) * energy(b).

    Equals the shot estimate of <H> because H is diagonal, so each measured
    basis state contributes exactly its table energy.
    """
    if dist.n_qubits != ham.n:
        raise ConfigurationError(f"distribution on {dist.n_qubits} qubits vs hamiltonian on {ham.n}")
    total = 0.0
    for b, c in dist.counts.items():
        total += c * ham.energy[b]
    return float(total / dist.n_shots)
