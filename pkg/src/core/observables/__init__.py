"""
Physical observables from postselected shot data
"""

from .models import ObservableEstimate, ObservableKind, Stage
from .diagonal import (
    DiagonalStats,
    diagonal_observables,
    charge_correlation,
    spin_correlation,
    staggered_spin,
    chemical_potential,
    chemical_derivative,
    chemical_potentials,
)

__all__ = [
    'ObservableEstimate',
    'ObservableKind',
    'Stage',
    'DiagonalStats',
    'diagonal_observables',
    'charge_correlation',
    'spin_correlation',
    'staggered_spin',
    'chemical_potential',
    'chemical_derivative',
    'chemical_potentials',
]
