"""
Fermi-Hubbard model definition

Lattices, occupation sectors, fermionic term lists and the Jordan-Wigner
encoding used by every other module.
"""

from .lattice import (
    LatticeSpec,
    SectorSpec,
    FermionicTerm,
    Spin,
    TermKind,
    TermGroup,
    build_hamiltonian,
    iter_groups,
    single_particle_hamiltonian,
)
from .jordan_wigner import (
    JwLayout,
    LayoutMode,
    PauliTerm,
    ProjectorTerm,
    QubitOperator,
    jordan_wigner,
    exact_qubit_hamiltonian,
    number_operator,
)

__all__ = [
    'LatticeSpec',
    'SectorSpec',
    'FermionicTerm',
    'Spin',
    'TermKind',
    'TermGroup',
    'build_hamiltonian',
    'iter_groups',
    'single_particle_hamiltonian',
    'JwLayout',
    'LayoutMode',
    'PauliTerm',
    'ProjectorTerm',
    'QubitOperator',
    'jordan_wigner',
    'exact_qubit_hamiltonian',
    'number_operator',
]
