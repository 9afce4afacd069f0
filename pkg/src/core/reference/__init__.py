"""
Classical ground truth: exact diagonalization, noiseless ansatz optima,
FLO reference values and optimized Slater determinants
"""

from .exact import (
    SectorBasis,
    SectorState,
    sector_hamiltonian,
    exact_ground,
    exact_observables,
    exact_sweep,
    sector_stats,
)
from .vqe import AnsatzEvaluator, VqeOptimum, FloReference, simulate_vqe_optimum, flo_reference, require_flo
from .slater import SlaterParams, SlaterResult, optimal_slater, slater_energy, u0_slater_energy

__all__ = [
    'SectorBasis',
    'SectorState',
    'sector_hamiltonian',
    'exact_ground',
    'exact_observables',
    'exact_sweep',
    'sector_stats',
    'AnsatzEvaluator',
    'VqeOptimum',
    'FloReference',
    'simulate_vqe_optimum',
    'flo_reference',
    'require_flo',
    'SlaterParams',
    'SlaterResult',
    'optimal_slater',
    'slater_energy',
    'u0_slater_energy',
]
