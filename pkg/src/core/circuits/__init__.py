"""
Circuit construction for the Fermi-Hubbard EHV ansatz
"""

from .gates import (
    Gate,
    GateKind,
    NativeTemplate,
    gate_unitary,
    decompose,
    native_template,
    equal_up_to_global_phase,
    givens,
    hopping,
    onsite,
    fswap,
    basis_change,
    fused,
)
from .circuit import (
    Circuit,
    CircuitStats,
    to_native,
    is_native,
    circuit_stats,
    apply_spin_echo,
    unitary,
)
from .ansatz import (
    build_initial_prep,
    build_ehv_layers,
    build_ehv_circuit,
    build_measurement_circuits,
    MeasurementCircuit,
    MeasurementSet,
    split_params,
    zero_onsite,
    onsite_indices,
    random_params,
    worst_case_stats,
)

__all__ = [
    'Gate',
    'GateKind',
    'NativeTemplate',
    'gate_unitary',
    'decompose',
    'native_template',
    'equal_up_to_global_phase',
    'givens',
    'hopping',
    'onsite',
    'fswap',
    'basis_change',
    'fused',
    'Circuit',
    'CircuitStats',
    'to_native',
    'is_native',
    'circuit_stats',
    'apply_spin_echo',
    'unitary',
    'build_initial_prep',
    'build_ehv_layers',
    'build_ehv_circuit',
    'build_measurement_circuits',
    'MeasurementCircuit',
    'MeasurementSet',
    'split_params',
    'zero_onsite',
    'onsite_indices',
    'random_params',
    'worst_case_stats',
]
