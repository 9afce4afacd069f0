"""
Jordan-Wigner encoding with snake ordering
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Tuple, Optional

import numpy as np
import scipy.sparse as sparse

from .lattice import LatticeSpec, Spin, FermionicTerm, TermKind, build_hamiltonian


class LayoutMode(Enum):
    """How the onsite layer reaches (site, up)/(site, down) pairs"""
    RECTANGLE = "rectangle"  # onsite gates act directly between the two lines
    ZIGZAG = "zigzag"        # FSWAP layers on the spin-down line bracket the onsite layer


@dataclass(frozen=True)
class JwLayout:
    """Bijection (site, spin) -> qubit; spin-down block follows the spin-up block"""
    lattice: LatticeSpec
    mode: LayoutMode = LayoutMode.ZIGZAG

    @property
    def n_qubits(self) -> int:
        return self.lattice.n_modes

    def mode_index(self, site: int, spin: Spin) -> int:
        return int(spin) * self.lattice.n_sites + self.lattice.snake_position(site)

    def site_of(self, qubit: int) -> Tuple[int, Spin]:
        """Inverse of mode_index"""
        n_sites = self.lattice.n_sites
        spin = Spin(qubit // n_sites)
        return int(self.position_sites[qubit % n_sites]), spin

    @property
    def position_sites(self) -> np.ndarray:
        """Site index at each snake position"""
        sites = np.empty(self.lattice.n_sites, dtype=int)
        for s in range(self.lattice.n_sites):
            sites[self.lattice.snake_position(s)] = s
        return sites

    @property
    def ordering(self) -> Dict[Tuple[int, Spin], int]:
        return {(s, spin): self.mode_index(s, spin) for spin in Spin for s in range(self.lattice.n_sites)}

    def spin_block(self, spin: Spin) -> range:
        n_sites = self.lattice.n_sites
        return range(int(spin) * n_sites, (int(spin) + 1) * n_sites)


@dataclass(frozen=True)
class PauliTerm:
    """coefficient * product of single-qubit Paulis"""
    coefficient: float
    paulis: Tuple[Tuple[int, str], ...]  # (qubit, 'X'|'Y'|'Z'), ascending qubit


@dataclass(frozen=True)
class ProjectorTerm:
    """coefficient * |1...1><1...1| on the listed qubits"""
    coefficient: float
    qubits: Tuple[int, ...]


@dataclass
class CompiledPauliAction:
    """P|j> = phase[j] |perm[j]> over the computational basis"""
    coefficient: float
    perm: np.ndarray
    phase: np.ndarray


@dataclass
class QubitOperator:
    """Hermitian operator as real-weighted Pauli strings plus diagonal projectors"""
    n_qubits: int
    pauli_terms: List[PauliTerm] = field(default_factory=list)
    projector_terms: List[ProjectorTerm] = field(default_factory=list)
    _compiled: Optional[List[CompiledPauliAction]] = field(default=None, init=False, repr=False, compare=False)

    def __add__(self, other: 'QubitOperator') -> 'QubitOperator':
        return QubitOperator(
            max(self.n_qubits, other.n_qubits),
            self.pauli_terms + other.pauli_terms,
            self.projector_terms + other.projector_terms,
        )

    def __mul__(self, scalar: float) -> 'QubitOperator':
        return QubitOperator(
            self.n_qubits,
            [PauliTerm(scalar * t.coefficient, t.paulis) for t in self.pauli_terms],
            [ProjectorTerm(scalar * t.coefficient, t.qubits) for t in self.projector_terms],
        )

    __rmul__ = __mul__

    def with_qubits(self, n_qubits: int) -> 'QubitOperator':
        """Same terms on a register of n_qubits"""
        if n_qubits < self.n_qubits and any(q >= n_qubits for q in self.support()):
            raise ValueError(f"operator support exceeds {n_qubits} qubits")
        return QubitOperator(n_qubits, list(self.pauli_terms), list(self.projector_terms))

    def support(self) -> set:
        qubits = {q for t in self.pauli_terms for q, _ in t.paulis}
        qubits.update(q for t in self.projector_terms for q in t.qubits)
        return qubits

    @property
    def is_hermitian(self) -> bool:
        coefficients = [t.coefficient for t in self.pauli_terms + self.projector_terms]
        return all(np.isreal(c) for c in coefficients)

    def compile(self) -> List[CompiledPauliAction]:
        if self._compiled is None:
            self._compiled = [_compile_pauli(t, self.n_qubits) for t in self.pauli_terms]
        return self._compiled

    def projector_diagonal(self) -> np.ndarray:
        """Diagonal of the projector part"""
        index = np.arange(2 ** self.n_qubits, dtype=np.int64)
        diagonal = np.zeros(index.size)
        for term in self.projector_terms:
            mask = _qubit_mask(term.qubits, self.n_qubits)
            diagonal += term.coefficient * ((index & mask) == mask)
        return diagonal

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        """O|psi>"""
        out = (self.projector_diagonal() * amplitudes).astype(complex)
        for action in self.compile():
            out[action.perm] += action.coefficient * action.phase * amplitudes
        return out

    def expectation(self, amplitudes: np.ndarray) -> float:
        """<psi|O|psi>, imaginary rounding residue discarded"""
        value = np.dot(self.projector_diagonal(), np.abs(amplitudes) ** 2)
        for action in self.compile():
            value += action.coefficient * np.vdot(amplitudes[action.perm], action.phase * amplitudes)
        return float(np.real(value))

    def to_sparse(self) -> sparse.csr_matrix:
        dim = 2 ** self.n_qubits
        index = np.arange(dim, dtype=np.int64)
        matrix = sparse.diags(self.projector_diagonal().astype(complex), format='csr')
        for action in self.compile():
            matrix = matrix + sparse.csr_matrix(
                (action.coefficient * action.phase, (action.perm, index)), shape=(dim, dim))
        return matrix.tocsr()

    def to_dense(self) -> np.ndarray:
        return self.to_sparse().toarray()


def _qubit_mask(qubits, n_qubits: int) -> int:
    mask = 0
    for q in qubits:
        mask |= 1 << (n_qubits - 1 - q)
    return mask


def _compile_pauli(term: PauliTerm, n_qubits: int) -> CompiledPauliAction:
    index = np.arange(2 ** n_qubits, dtype=np.int64)
    perm = index.copy()
    phase = np.ones(index.size, dtype=complex)
    for qubit, op in term.paulis:
        shift = n_qubits - 1 - qubit
        sign = 1 - 2 * ((index >> shift) & 1)
        if op == 'X':
            perm ^= 1 << shift
        elif op == 'Y':
            perm ^= 1 << shift
            phase *= 1j * sign
        elif op == 'Z':
            phase *= sign
        else:
            raise ValueError(f"Unsupported Pauli symbol '{op}'")
    return CompiledPauliAction(term.coefficient, perm, phase)


def jordan_wigner(term: FermionicTerm, layout: JwLayout) -> QubitOperator:
    """
    Map one fermionic term to qubits.

    Hopping between modes p < q becomes c/2 (X_p X_q + Y_p Y_q) Z_{p+1}...Z_{q-1};
    onsite becomes c |11><11| on the site's up and down qubits.
    """
    n_qubits = layout.n_qubits
    modes = term.modes(layout)
    if any(not 0 <= m < n_qubits for m in modes):
        raise ValueError(f"term modes {modes} outside 0..{n_qubits - 1}")
    if term.kind == TermKind.ONSITE:
        return QubitOperator(n_qubits, projector_terms=[ProjectorTerm(term.coefficient, modes)])

    p, q = modes
    string = tuple((k, 'Z') for k in range(p + 1, q))
    xx = PauliTerm(term.coefficient / 2, ((p, 'X'),) + string + ((q, 'X'),))
    yy = PauliTerm(term.coefficient / 2, ((p, 'Y'),) + string + ((q, 'Y'),))
    return QubitOperator(n_qubits, pauli_terms=[xx, yy])


def exact_qubit_hamiltonian(lattice: LatticeSpec, layout: JwLayout) -> QubitOperator:
    """Sum of all mapped Hamiltonian terms"""
    total = QubitOperator(layout.n_qubits)
    for term in build_hamiltonian(lattice):
        total = total + jordan_wigner(term, layout)
    return total


def number_operator(layout: JwLayout, spin: Spin) -> np.ndarray:
    """Diagonal of the per-spin number operator"""
    n_qubits = layout.n_qubits
    index = np.arange(2 ** n_qubits, dtype=np.int64)
    counts = np.zeros(index.size)
    for q in layout.spin_block(spin):
        counts += (index >> (n_qubits - 1 - q)) & 1
    return counts
