"""
Stochastic-trajectory noise simulation on statevectors
"""

import logging
from typing import Dict, List, Optional, Tuple

import numpy as np

from core.circuits.circuit import Circuit, require_native
from core.circuits.gates import GateKind, gate_unitary, cphase_matrix
from utils.random_streams import random_stream, stream_key
from .models import StateVector, ShotBatch
from .noise import NoiseModel
from .statevector import apply_matrix, sample_probabilities

logger = logging.getLogger(__name__)

# amplitudes held per trajectory batch
TRAJECTORY_BUDGET = 2 ** 22

_PAULIS = [
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.diag([1, -1]).astype(complex),
]


def two_qubit_pauli(index: int) -> np.ndarray:
    """Pauli product number index in 0..15 (0 is the identity)"""
    return np.kron(_PAULIS[index // 4], _PAULIS[index % 4])


def _apply_native_moment(amplitudes: np.ndarray, moment, n_qubits: int,
                         cphase: Optional[np.ndarray]) -> np.ndarray:
    for gate in moment:
        amplitudes = apply_matrix(amplitudes, gate_unitary(gate), gate.qubits, n_qubits)
        if cphase is not None and gate.kind == GateKind.SQRT_ISWAP:
            amplitudes = apply_matrix(amplitudes, cphase, gate.qubits, n_qubits)
    return amplitudes


def _sample_rows(amplitudes: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One outcome per batched state"""
    cdf = np.cumsum(np.abs(amplitudes) ** 2, axis=1)
    u = rng.random(amplitudes.shape[0]) * cdf[:, -1]
    draws = np.sum(cdf <= u[:, None], axis=1)
    return np.minimum(draws, amplitudes.shape[1] - 1)


def run_noisy(circuit: Circuit, noise: Optional[NoiseModel], shots: int, seed: int) -> ShotBatch:
    """
    Sample a native circuit under a noise model.

    Every sqrt(iSWAP) is followed by the parasitic CPHASE, and every two-qubit
    gate by a depolarizing draw. Shots without a Pauli error share one
    statevector and one sampling call (so a noiseless model reproduces
    sample() exactly); shots with errors are simulated in batches restarted
    from the cached ideal state before their first error. Readout flips are
    applied last, independently per qubit.
    """
    require_native(circuit)
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    noise = noise or NoiseModel()
    n = circuit.n_qubits
    salt = stream_key(noise.stream)

    slots: List[Tuple[int, Tuple[int, ...]]] = [
        (t, g.qubits) for t, moment in enumerate(circuit.moments) for g in moment if g.is_two_qubit
    ]
    if noise.depolarizing_2q > 0 and slots:
        kraus_rng = random_stream(seed, "kraus", salt)
        hits = kraus_rng.random((shots, len(slots))) < noise.depolarizing_2q
        paulis = kraus_rng.integers(1, 16, size=(shots, len(slots)))
    else:
        hits = np.zeros((shots, len(slots)), dtype=bool)
        paulis = np.zeros((shots, len(slots)), dtype=np.int64)

    faulty_mask = hits.any(axis=1)
    faulty = np.flatnonzero(faulty_mask)
    clean = np.flatnonzero(~faulty_mask)
    slot_moment = np.array([t for t, _ in slots], dtype=np.int64)
    first_moment = slot_moment[np.argmax(hits[faulty], axis=1)] if faulty.size else np.zeros(0, dtype=np.int64)

    cphase = cphase_matrix(noise.parasitic_cphase) if noise.parasitic_cphase != 0 else None
    needed = set(first_moment.tolist())
    cache: Dict[int, np.ndarray] = {}
    amplitudes = StateVector.basis(n).amplitudes
    for t, moment in enumerate(circuit.moments):
        if t in needed:
            cache[t] = amplitudes.copy()
        amplitudes = _apply_native_moment(amplitudes, moment, n, cphase)

    outcomes = np.empty(shots, dtype=np.int64)
    if clean.size:
        outcomes[clean] = sample_probabilities(np.abs(amplitudes) ** 2, clean.size, random_stream(seed, "sampling"))

    if faulty.size:
        order = np.argsort(first_moment, kind='stable')
        faulty, first_moment = faulty[order], first_moment[order]
        chunk = max(1, TRAJECTORY_BUDGET // 2 ** n)
        trajectory_rng = random_stream(seed, "trajectories", salt)
        slots_by_moment: Dict[int, List[int]] = {}
        for s, (t, _) in enumerate(slots):
            slots_by_moment.setdefault(t, []).append(s)
        for start in range(0, faulty.size, chunk):
            rows = faulty[start:start + chunk]
            t0 = int(first_moment[start])
            batch = np.tile(cache[t0], (rows.size, 1))
            for t in range(t0, len(circuit.moments)):
                batch = _apply_native_moment(batch, circuit.moments[t], n, cphase)
                for s in slots_by_moment.get(t, ()):
                    struck = np.flatnonzero(hits[rows, s])
                    for index in np.unique(paulis[rows[struck], s]):
                        members = struck[paulis[rows[struck], s] == index]
                        batch[members] = apply_matrix(batch[members], two_qubit_pauli(int(index)), slots[s][1], n)
            outcomes[rows] = _sample_rows(batch, trajectory_rng)
        logger.debug("%d of %d shots carried Pauli errors", faulty.size, shots)

    if noise.readout_01 > 0 or noise.readout_10 > 0:
        readout_rng = random_stream(seed, "readout", salt)
        batch = ShotBatch(n, outcomes)
        bits = batch.bits()
        u = readout_rng.random(bits.shape)
        flips = np.where(bits == 0, u < noise.readout_01, u < noise.readout_10)
        weights = 1 << (n - 1 - np.arange(n, dtype=np.int64))
        outcomes = outcomes ^ (flips.astype(np.int64) @ weights)

    return ShotBatch(n, outcomes, seed, {'faulty_shots': int(faulty.size)})
