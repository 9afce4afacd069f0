"""
Data models for the statevector simulator
"""

from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from core.errors import SimulationInfeasibleError

SOFT_QUBIT_CAP = 16
HARD_QUBIT_CAP = 24


def check_register(n_qubits: int):
    if n_qubits < 1:
        raise ValueError(f"register needs at least one qubit, got {n_qubits}")
    if n_qubits > HARD_QUBIT_CAP:
        raise SimulationInfeasibleError(
            f"{n_qubits} qubits exceed the statevector cap of {HARD_QUBIT_CAP}")


@dataclass
class StateVector:
    """2^n complex amplitudes; qubit 0 is the most significant bit of the index"""
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        check_register(self.n_qubits)
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (2 ** self.n_qubits,):
            raise ValueError(f"expected {2 ** self.n_qubits} amplitudes, got shape {self.amplitudes.shape}")

    @classmethod
    def basis(cls, n_qubits: int, index: int = 0) -> 'StateVector':
        check_register(n_qubits)
        amplitudes = np.zeros(2 ** n_qubits, dtype=complex)
        amplitudes[index] = 1.0
        return cls(n_qubits, amplitudes)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> 'StateVector':
        bits = list(bits)
        index = int("".join(str(int(b)) for b in bits), 2) if bits else 0
        return cls.basis(len(bits), index)

    def copy(self) -> 'StateVector':
        return StateVector(self.n_qubits, self.amplitudes.copy())

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass
class ShotBatch:
    """Measured bitstrings stored as basis indices"""
    n_qubits: int
    outcomes: np.ndarray
    seed: Optional[int] = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.outcomes = np.asarray(self.outcomes, dtype=np.int64).ravel()

    @property
    def shots(self) -> int:
        return int(self.outcomes.size)

    def bits(self) -> np.ndarray:
        """(shots, n_qubits) array of 0/1, qubit 0 first"""
        shifts = self.n_qubits - 1 - np.arange(self.n_qubits)
        return ((self.outcomes[:, None] >> shifts) & 1).astype(np.int8)

    def bitstrings(self):
        return [format(int(o), f"0{self.n_qubits}b") for o in self.outcomes]

    def hamming_weights(self, qubits: Iterable[int]) -> np.ndarray:
        """Number of set bits among the given qubits, per shot"""
        mask = 0
        for q in qubits:
            mask |= 1 << (self.n_qubits - 1 - q)
        masked = self.outcomes & mask
        counts = np.zeros(self.shots, dtype=np.int64)
        for shift in range(self.n_qubits):
            counts += (masked >> shift) & 1
        return counts

    def select(self, keep: np.ndarray) -> 'ShotBatch':
        return ShotBatch(self.n_qubits, self.outcomes[np.asarray(keep, dtype=bool)], self.seed, dict(self.metadata))
