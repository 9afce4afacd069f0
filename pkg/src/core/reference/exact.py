"""
Sector-restricted exact diagonalization
"""

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sparse
from scipy.sparse.linalg import eigsh

from core.errors import SimulationInfeasibleError
from core.model.jordan_wigner import JwLayout
from core.model.lattice import LatticeSpec, SectorSpec, TermKind, build_hamiltonian
from core.observables.diagonal import DiagonalStats

logger = logging.getLogger(__name__)

DENSE_LIMIT = 400
DENSE_FALLBACK_LIMIT = 6000
SECTOR_CAP = 2 ** 16
RESIDUAL_TOLERANCE = 1e-9


def _popcount(values: np.ndarray) -> np.ndarray:
    counts = np.zeros(values.shape, dtype=np.int64)
    values = values.copy()
    while np.any(values):
        counts += values & 1
        values >>= 1
    return counts


@dataclass(frozen=True)
class SectorBasis:
    """Basis states of fixed per-spin Hamming weight, ascending by integer value"""
    lattice: LatticeSpec
    sector: SectorSpec
    states: np.ndarray

    @classmethod
    def build(cls, lattice: LatticeSpec, sector: SectorSpec) -> 'SectorBasis':
        sector.validate(lattice)
        n_sites = lattice.n_sites

        def block_masks(count: int) -> np.ndarray:
            masks = [sum(1 << (n_sites - 1 - p) for p in chosen) for chosen in combinations(range(n_sites), count)]
            return np.array(sorted(masks), dtype=np.int64)

        up, down = block_masks(sector.n_up), block_masks(sector.n_down)
        states = (up[:, None] << n_sites | down[None, :]).ravel()
        return cls(lattice, sector, np.sort(states))

    @property
    def dimension(self) -> int:
        return int(self.states.size)

    @property
    def n_qubits(self) -> int:
        return self.lattice.n_modes

    def index(self, states: np.ndarray) -> np.ndarray:
        """Positions of basis states (which must belong to the sector)"""
        return np.searchsorted(self.states, states)

    @property
    def index_map(self) -> Dict[int, int]:
        return {int(s): k for k, s in enumerate(self.states)}

    def embed(self, vector: np.ndarray) -> np.ndarray:
        """Full 2^n amplitude vector of a sector vector"""
        full = np.zeros(2 ** self.n_qubits, dtype=complex)
        full[self.states] = vector
        return full

    def restrict(self, amplitudes: np.ndarray) -> np.ndarray:
        return np.asarray(amplitudes)[self.states]


def sector_hamiltonian(basis: SectorBasis, layout: Optional[JwLayout] = None) -> sparse.csr_matrix:
    """Hamiltonian restricted to a sector, in the sector basis"""
    lattice = basis.lattice
    layout = layout or JwLayout(lattice)
    n = basis.n_qubits
    states = basis.states
    diagonal = np.zeros(basis.dimension)
    rows: List[np.ndarray] = []
    cols: List[np.ndarray] = []
    values: List[np.ndarray] = []

    for term in build_hamiltonian(lattice):
        if term.kind == TermKind.ONSITE:
            p, q = term.modes(layout)
            both = ((states >> (n - 1 - p)) & 1) & ((states >> (n - 1 - q)) & 1)
            diagonal += term.coefficient * both
            continue
        p, q = term.modes(layout)
        bit_p, bit_q = 1 << (n - 1 - p), 1 << (n - 1 - q)
        between = sum(1 << (n - 1 - k) for k in range(p + 1, q))
        movable = ((states & bit_p) != 0) ^ ((states & bit_q) != 0)
        source = np.flatnonzero(movable)
        target_states = states[source] ^ (bit_p | bit_q)
        sign = 1 - 2 * (_popcount(states[source] & between) & 1)
        rows.append(basis.index(target_states))
        cols.append(source)
        values.append(term.coefficient * sign)

    rows.append(np.arange(basis.dimension))
    cols.append(np.arange(basis.dimension))
    values.append(diagonal)
    dim = basis.dimension
    return sparse.csr_matrix((np.concatenate(values), (np.concatenate(rows), np.concatenate(cols))),
                             shape=(dim, dim))


@dataclass(frozen=True)
class SectorState:
    """Normalized vector in a sector basis"""
    basis: SectorBasis
    vector: np.ndarray

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.vector) ** 2

    def full_amplitudes(self) -> np.ndarray:
        return self.basis.embed(self.vector)


def _fix_sign(vector: np.ndarray) -> np.ndarray:
    pivot = vector[np.argmax(np.abs(vector))]
    return vector * (abs(pivot) / pivot)


def exact_ground(lattice: LatticeSpec, sector: SectorSpec, cap: int = SECTOR_CAP) -> Tuple[float, SectorState]:
    """
    Lowest eigenpair of the sector Hamiltonian.

    Dense eigh up to DENSE_LIMIT states, Lanczos above. A Lanczos result
    whose residual exceeds RESIDUAL_TOLERANCE is redone densely when the
    dimension allows it.

    Raises:
        SimulationInfeasibleError: sector dimension over the cap, or an
            unconverged Lanczos solve too large for the dense fallback
    """
    basis = SectorBasis.build(lattice, sector)
    dim = basis.dimension
    if dim > cap:
        raise SimulationInfeasibleError(f"sector {sector} of {lattice.label} has {dim} states, cap is {cap}")
    hamiltonian = sector_hamiltonian(basis)

    if dim <= DENSE_LIMIT:
        energy, vector = _dense_ground(hamiltonian)
    else:
        v0 = np.ones(dim) / np.sqrt(dim)
        values, vectors = eigsh(hamiltonian, k=1, which='SA', v0=v0, tol=1e-12)
        energy, vector = float(values[0]), vectors[:, 0]
        residual = np.linalg.norm(hamiltonian @ vector - energy * vector)
        if residual >= RESIDUAL_TOLERANCE:
            if dim > DENSE_FALLBACK_LIMIT:
                raise SimulationInfeasibleError(
                    f"Lanczos residual {residual:.2e} for sector {sector} and no dense fallback at dimension {dim}")
            logger.warning("Lanczos residual %.2e for %s %s; falling back to dense eigh", residual, lattice.label, sector)
            energy, vector = _dense_ground(hamiltonian)

    vector = _fix_sign(vector.astype(complex))
    logger.debug("E0(%s, U=%g, %s) = %.10f (dimension %d)", lattice.label, lattice.U, sector, energy, dim)
    return energy, SectorState(basis, vector)


def _dense_ground(hamiltonian: sparse.csr_matrix) -> Tuple[float, np.ndarray]:
    values, vectors = np.linalg.eigh(hamiltonian.toarray())
    return float(values[0]), vectors[:, 0]


def sector_stats(state: SectorState, layout: Optional[JwLayout] = None) -> DiagonalStats:
    """Exact diagonal statistics of a sector state"""
    layout = layout or JwLayout(state.basis.lattice)
    return DiagonalStats.from_distribution(state.basis.states, state.probabilities, state.basis.lattice, layout)


def exact_observables(state: SectorState, lattice: LatticeSpec, layout: Optional[JwLayout] = None) -> DiagonalStats:
    """Densities and charge/spin correlations of a sector state by direct contraction"""
    if state.basis.lattice != lattice:
        raise ValueError(f"state belongs to {state.basis.lattice.label}, not {lattice.label}")
    return sector_stats(state, layout)


def exact_sweep(lattice: LatticeSpec, occupations: Sequence[int]) -> Dict[int, float]:
    """Ground energies over total occupations (odd totals carry the extra spin-up particle)"""
    energies = {}
    for n_occ in occupations:
        energies[int(n_occ)], _ = exact_ground(lattice, SectorSpec.from_occupation(int(n_occ)))
        logger.info("exact %s U=%g N_occ=%d: E = %.6f", lattice.label, lattice.U, n_occ, energies[int(n_occ)])
    return energies

