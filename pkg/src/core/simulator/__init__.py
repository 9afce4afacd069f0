"""
Statevector simulation, trajectory noise and energy estimation
"""

from .models import StateVector, ShotBatch, SOFT_QUBIT_CAP, HARD_QUBIT_CAP
from .noise import NoiseModel, NOISE_PRESETS
from .statevector import apply_gate, apply_circuit, simulate, expectation, sample
from .trajectories import run_noisy
from .energy import EnergyEstimate, GroupEstimate, estimate_energy, exact_energy, measure_groups

__all__ = [
    'StateVector',
    'ShotBatch',
    'SOFT_QUBIT_CAP',
    'HARD_QUBIT_CAP',
    'NoiseModel',
    'NOISE_PRESETS',
    'apply_gate',
    'apply_circuit',
    'simulate',
    'expectation',
    'sample',
    'run_noisy',
    'EnergyEstimate',
    'GroupEstimate',
    'estimate_energy',
    'exact_energy',
    'measure_groups',
]
