"""
Statevector engine: gate application, expectation values and sampling
"""

import logging
from typing import Optional, Sequence

import numpy as np

from core.circuits.gates import Gate, gate_unitary
from core.circuits.circuit import Circuit
from core.model.jordan_wigner import QubitOperator
from utils.random_streams import random_stream
from .models import StateVector, ShotBatch

logger = logging.getLogger(__name__)


def apply_matrix(amplitudes: np.ndarray, matrix: np.ndarray, qubits: Sequence[int], n_qubits: int) -> np.ndarray:
    """
    Apply a k-qubit matrix to the given qubits.

    amplitudes may carry leading batch axes: shape (..., 2^n).
    """
    batch_shape = amplitudes.shape[:-1]
    k = len(qubits)
    offset = len(batch_shape)
    psi = amplitudes.reshape(batch_shape + (2,) * n_qubits)
    targets = [offset + q for q in qubits]
    gate = np.asarray(matrix).reshape((2,) * (2 * k))
    psi = np.tensordot(gate, psi, axes=(list(range(k, 2 * k)), targets))
    psi = np.moveaxis(psi, list(range(k)), targets)
    return np.ascontiguousarray(psi).reshape(amplitudes.shape)


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    for q in gate.qubits:
        if not 0 <= q < state.n_qubits:
            raise IndexError(f"gate {gate.kind.value} on qubit {q} outside 0..{state.n_qubits - 1}")
    amplitudes = apply_matrix(state.amplitudes, gate_unitary(gate), gate.qubits, state.n_qubits)
    return StateVector(state.n_qubits, amplitudes)


def apply_moments(amplitudes: np.ndarray, moments, n_qubits: int) -> np.ndarray:
    """Apply a sequence of moments to raw (possibly batched) amplitudes"""
    for moment in moments:
        for gate in moment:
            amplitudes = apply_matrix(amplitudes, gate_unitary(gate), gate.qubits, n_qubits)
    return amplitudes


def apply_circuit(state: StateVector, circuit: Circuit) -> StateVector:
    """U|state>, moment by moment"""
    if circuit.n_qubits != state.n_qubits:
        raise IndexError(f"circuit on {circuit.n_qubits} qubits applied to a {state.n_qubits}-qubit state")
    return StateVector(state.n_qubits, apply_moments(state.amplitudes, circuit.moments, state.n_qubits))


def simulate(circuit: Circuit, initial: Optional[StateVector] = None) -> StateVector:
    """Final state of a circuit started from |0...0> (or initial)"""
    state = initial if initial is not None else StateVector.basis(circuit.n_qubits)
    return apply_circuit(state, circuit)


def expectation(state: StateVector, op: QubitOperator) -> float:
    """<psi|O|psi>; the imaginary rounding residue is discarded"""
    if op.n_qubits != state.n_qubits:
        op = op.with_qubits(state.n_qubits)
    return op.expectation(state.amplitudes)


def sample_probabilities(probabilities: np.ndarray, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Basis indices drawn i.i.d. from a distribution (inverse CDF)"""
    cdf = np.cumsum(probabilities)
    cdf /= cdf[-1]
    draws = np.searchsorted(cdf, rng.random(shots), side='right')
    return np.minimum(draws, probabilities.size - 1)


def sample(state: StateVector, shots: int, seed: int) -> ShotBatch:
    """
    Computational-basis measurement.

    Args:
        state: state to measure
        shots: number of draws (>= 1)
        seed: master seed; draws come from its "sampling" stream

    Returns:
        ShotBatch, identical for identical (state, shots, seed)
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    rng = random_stream(seed, "sampling")
    outcomes = sample_probabilities(state.probabilities(), shots, rng)
    return ShotBatch(state.n_qubits, outcomes, seed)
