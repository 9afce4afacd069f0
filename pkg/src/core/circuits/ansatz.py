"""
EHV ansatz construction: Givens state preparation, variational layers and
measurement circuits
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.errors import ParameterLengthError
from core.model import LatticeSpec, SectorSpec, Spin, TermGroup, JwLayout, LayoutMode
from core.model.lattice import single_particle_hamiltonian
from .gates import Gate, GateKind, givens, hopping, onsite, fswap, basis_change, pauli_x, fused
from .circuit import Circuit, CircuitStats, circuit_stats, to_native

logger = logging.getLogger(__name__)

GIVENS_TOLERANCE = 1e-8
DEGENERACY_TOLERANCE = 1e-9


# Initial state

def occupied_orbitals(lattice: LatticeSpec, n_particles: int) -> np.ndarray:
    """
    Lowest n_particles single-particle orbitals as rows (snake-ordered columns).

    Degenerate levels get a basis that depends only on their eigenspace:
    projected unit vectors orthonormalized in site order, first nonzero
    component positive, sorted lexicographically descending.
    """
    energies, vectors = np.linalg.eigh(single_particle_hamiltonian(lattice))
    rows: List[np.ndarray] = []
    start = 0
    while start < len(energies) and len(rows) < n_particles:
        stop = start + 1
        while stop < len(energies) and abs(energies[stop] - energies[start]) < DEGENERACY_TOLERANCE:
            stop += 1
        rows.extend(_canonical_basis(vectors[:, start:stop]))
        start = stop
    return np.array(rows[:n_particles]).reshape(n_particles, lattice.n_sites)


def _canonical_basis(subspace: np.ndarray) -> List[np.ndarray]:
    projector = subspace @ subspace.T
    basis: List[np.ndarray] = []
    for k in range(projector.shape[0]):
        v = projector[:, k].copy()
        for b in basis:
            v -= np.dot(b, v) * b
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            v /= norm
            lead = v[np.argmax(np.abs(v) > 1e-10)]
            basis.append(v if lead > 0 else -v)
        if len(basis) == subspace.shape[1]:
            break
    return sorted(basis, key=lambda v: tuple(np.round(v, 12)), reverse=True)


def givens_network(orbitals: np.ndarray) -> List[List[Tuple[int, int, float]]]:
    """
    Diagonal-sweep elimination of an m x n orbital matrix.

    Rows are first rotated among themselves to clear the top-right triangle,
    then n - 1 layers of column rotations reduce the matrix to [D | 0].
    Rotations whose target element already vanishes are omitted, and so are
    empty layers.

    Returns:
        Layers in elimination order; each rotation is (column j-1, column j, theta)
        with G(theta) the gate that realizes it on adjacent modes.
    """
    q = np.array(orbitals, dtype=float)
    m, n = q.shape
    if m == 0 or m == n:
        return []

    for k in reversed(range(n - m + 1, n)):
        for l in range(m - n + k):
            a, b = q[l, k], q[l + 1, k]
            if abs(a) > GIVENS_TOLERANCE:
                r = math.hypot(a, b)
                upper, lower = q[l].copy(), q[l + 1].copy()
                q[l] = (b * upper - a * lower) / r
                q[l + 1] = (a * upper + b * lower) / r

    layers: List[List[Tuple[int, int, float]]] = []
    max_simul = min(m, n - m)
    for k in range(n - 1):
        if k < max_simul - 1:
            start_row, end_row, start_column = 0, k + 1, n - m - k
        elif k > n - 1 - max_simul:
            start_row, end_row = m - (n - 1 - k), m
            start_column = m - (n - 1 - k) + 1
        elif max_simul == m:
            start_row, end_row, start_column = 0, m, n - m - k
        else:
            start_row, end_row = k + 1 - max_simul, k + 1
            start_column = k + 1 - max_simul + 1

        rotations = []
        for i, j in zip(range(start_row, end_row), range(start_column, n, 2)):
            b = q[i, j]
            if abs(b) <= GIVENS_TOLERANCE:
                continue
            a = q[i, j - 1]
            r = math.hypot(a, b)
            c, s = a / r, b / r
            left, right = q[:, j - 1].copy(), q[:, j].copy()
            q[:, j - 1] = c * left + s * right
            q[:, j] = -s * left + c * right
            rotations.append((j - 1, j, 2 * math.atan2(-s, c)))
        if rotations:
            layers.append(rotations)
    return layers


def build_initial_prep(lattice: LatticeSpec, sector: SectorSpec, layout: JwLayout) -> Circuit:
    """
    Ground state of the U = 0 Hamiltonian in a sector.

    X gates fill the first N_sigma modes of each spin block, then the Givens
    layers of both spins run in reversed elimination order side by side.
    """
    sector.validate(lattice)
    n_sites = lattice.n_sites
    fill: List[Gate] = []
    networks: List[List[List[Gate]]] = []
    for spin, count in ((Spin.UP, sector.n_up), (Spin.DOWN, sector.n_down)):
        offset = layout.spin_block(spin).start
        fill.extend(pauli_x(offset + k) for k in range(count))
        if 0 < count < n_sites:
            network = givens_network(occupied_orbitals(lattice, count))
        else:
            network = []
        networks.append([[givens(offset + a, offset + b, theta) for a, b, theta in rotations]
                         for rotations in reversed(network)])
        logger.debug("%s sector %d/%d: %d Givens rotations in %d layers", spin.name, count, n_sites,
                     sum(len(r) for r in network), len(network))

    circuit = Circuit(layout.n_qubits).with_moment(fill)
    for t in range(max(len(n) for n in networks)):
        moment = [g for network in networks if t < len(network) for g in network[t]]
        circuit = circuit.with_moment(moment)
    return circuit


# Variational layers

def expected_param_count(lattice: LatticeSpec, layers: int) -> int:
    return lattice.params_per_layer * layers


def split_params(lattice: LatticeSpec, params: Sequence[float], layers: int) -> np.ndarray:
    """Parameter vector as a (layers, params_per_layer) array"""
    params = np.asarray(params, dtype=float).ravel()
    expected = expected_param_count(lattice, layers)
    if params.size != expected:
        raise ParameterLengthError(
            f"{lattice.label} with {layers} layer(s) needs {expected} parameters, got {params.size}")
    return params.reshape(layers, lattice.params_per_layer)


def onsite_indices(lattice: LatticeSpec, layers: int) -> List[int]:
    """Positions of the onsite angles in the parameter vector"""
    return [k * lattice.params_per_layer for k in range(layers)]


def zero_onsite(lattice: LatticeSpec, params: Sequence[float], layers: int) -> np.ndarray:
    """Closest FLO parameters: onsite angles set to zero"""
    flo = split_params(lattice, params, layers).copy()
    flo[:, 0] = 0.0
    return flo.ravel()


def _zigzag_pairs(n_sites: int) -> List[Tuple[int, int]]:
    return [(2 * k, 2 * k + 1) for k in range(n_sites // 2)]


def _line_pairs(n_sites: int, first: int) -> List[Tuple[int, int]]:
    return [(p, p + 1) for p in range(first, n_sites - 1, 2)]


def _both_spins(layout: JwLayout, pairs: Sequence[Tuple[int, int]]) -> List[Tuple[int, int]]:
    n_sites = layout.lattice.n_sites
    return [(p + spin * n_sites, q + spin * n_sites) for spin in (0, 1) for p, q in pairs]


def _onsite_moments(layout: JwLayout, phi: float) -> List[List[Gate]]:
    n_sites = layout.lattice.n_sites
    if layout.mode == LayoutMode.RECTANGLE:
        return [[onsite(i, n_sites + i, phi) for i in range(n_sites)]]
    swaps = _zigzag_pairs(n_sites)
    partner = {p: q for pair in swaps for p, q in (pair, pair[::-1])}
    swap_layer = [fswap(n_sites + p, n_sites + q) for p, q in swaps]
    onsite_layer = [onsite(i, n_sites + partner.get(i, i), phi) for i in range(n_sites)]
    return [swap_layer, onsite_layer, swap_layer]


def build_ehv_layers(lattice: LatticeSpec, params: Sequence[float], layers: int, layout: JwLayout) -> Circuit:
    """
    Variational layers without the initial state.

    1xLy layer: onsite block, vertical-1 hopping (2k, 2k+1), vertical-2 hopping (2k+1, 2k+2).
    2xLy layer: onsite block, horizontal hopping fused with an FSWAP on every rung,
    vertical-1 hopping on (2y+1, 2y+2), rung FSWAPs, vertical-2 hopping on (2y+1, 2y+2).
    The zigzag onsite block brackets the onsite gates with FSWAPs on the down line.
    """
    table = split_params(lattice, params, layers)
    n_sites = lattice.n_sites
    circuit = Circuit(layout.n_qubits)
    for row in table:
        angles: Dict[TermGroup, float] = dict(zip(lattice.hopping_groups(), row[1:]))
        for moment in _onsite_moments(layout, row[0]):
            circuit = circuit.with_moment(moment)
        if lattice.Lx == 1:
            circuit = circuit.with_moment(
                hopping(p, q, angles[TermGroup.VERTICAL_1]) for p, q in _both_spins(layout, _line_pairs(n_sites, 0)))
            circuit = circuit.with_moment(
                hopping(p, q, angles[TermGroup.VERTICAL_2]) for p, q in _both_spins(layout, _line_pairs(n_sites, 1)))
            continue
        rungs = _both_spins(layout, _line_pairs(n_sites, 0))
        snake_vertical = _both_spins(layout, _line_pairs(n_sites, 1))
        circuit = circuit.with_moment(
            fused(hopping(p, q, angles[TermGroup.HORIZONTAL]), fswap(p, q)) for p, q in rungs)
        circuit = circuit.with_moment(hopping(p, q, angles[TermGroup.VERTICAL_1]) for p, q in snake_vertical)
        circuit = circuit.with_moment(fswap(p, q) for p, q in rungs)
        circuit = circuit.with_moment(hopping(p, q, angles[TermGroup.VERTICAL_2]) for p, q in snake_vertical)
    return circuit


def build_ehv_circuit(lattice: LatticeSpec, sector: SectorSpec, params: Sequence[float],
                      layers: int, layout: JwLayout) -> Circuit:
    """Initial Givens preparation followed by the variational layers"""
    prep = build_initial_prep(lattice, sector, layout)
    return prep + build_ehv_layers(lattice, params, layers, layout)


# Measurement circuits

@dataclass(frozen=True)
class MeasurementCircuit:
    """
    One term group's circuit and its readout rule.

    Onsite: pairs are (up qubit, down qubit) per site, value U * both-set count.
    Hopping: pairs (p, q), p < q, after a B gate; value -(b_q - b_p) per pair.
    """
    group: TermGroup
    circuit: Circuit
    pairs: Tuple[Tuple[int, int], ...]
    coefficient: float
    prefix_length: int

    @property
    def suffix(self) -> Tuple[Tuple[Gate, ...], ...]:
        """Moments after the prefix shared with the base circuit"""
        return self.circuit.moments[self.prefix_length:]

    def shot_values(self, bits: np.ndarray) -> np.ndarray:
        """Per-shot group energy from a (shots, n_qubits) 0/1 array"""
        bits = np.asarray(bits, dtype=np.int64)
        if not self.pairs:
            return np.zeros(bits.shape[0])
        p = np.array([a for a, _ in self.pairs])
        q = np.array([b for _, b in self.pairs])
        if self.group == TermGroup.ONSITE:
            return self.coefficient * np.sum(bits[:, p] & bits[:, q], axis=1)
        return self.coefficient * np.sum(bits[:, q] - bits[:, p], axis=1)

    def expectation(self, probabilities: np.ndarray, n_qubits: int) -> float:
        """Exact group energy from a computational-basis distribution"""
        index = np.arange(probabilities.size, dtype=np.int64)
        bits = (index[:, None] >> (n_qubits - 1 - np.arange(n_qubits))) & 1
        return float(np.dot(probabilities, self.shot_values(bits)))


@dataclass(frozen=True)
class MeasurementSet:
    """All measurement circuits of one base circuit"""
    base: Circuit
    circuits: Tuple[MeasurementCircuit, ...]
    lattice: LatticeSpec
    layout: JwLayout

    def __iter__(self):
        return iter(self.circuits)

    def __len__(self) -> int:
        return len(self.circuits)

    @property
    def groups(self) -> List[TermGroup]:
        return [m.group for m in self.circuits]

    @property
    def prefix(self) -> Circuit:
        return self.base.prefix(max(len(self.base) - 1, 0))

    def onsite(self) -> MeasurementCircuit:
        return next(m for m in self.circuits if m.group == TermGroup.ONSITE)


def _append_basis_change(base: Circuit, pairs: Sequence[Tuple[int, int]]) -> Circuit:
    """
    B on every pair, fused into the last moment where that moment already acts
    on exactly those pairs (or leaves them idle); otherwise a new moment.
    """
    if not base.moments:
        return base.with_moment(basis_change(p, q) for p, q in pairs)
    last = base.moments[-1]
    by_pair = {g.qubits: g for g in last if g.is_two_qubit}
    busy = {q for g in last for q in g.qubits}
    mergeable = all(
        (tuple(pair) in by_pair and by_pair[tuple(pair)].kind in (GateKind.G, GateKind.H, GateKind.FSWAP,
                                                                   GateKind.B, GateKind.FUSED))
        or not (set(pair) & busy)
        for pair in pairs
    )
    if not mergeable:
        return base.with_moment(basis_change(p, q) for p, q in pairs)
    merged = {g.qubits: g for g in last}
    for p, q in pairs:
        existing = merged.get((p, q))
        merged[(p, q)] = fused(existing, basis_change(p, q)) if existing is not None else basis_change(p, q)
    moment = tuple(sorted(merged.values(), key=lambda g: g.qubits[0]))
    return Circuit(base.n_qubits, base.moments[:-1] + (moment,))


def build_measurement_circuits(base: Circuit, lattice: LatticeSpec, layout: JwLayout) -> MeasurementSet:
    """
    Onsite, horizontal (2xLy) and two vertical measurement circuits for an EHV circuit.

    Groups without terms (vertical-2 of a 1x2 lattice) get no circuit.
    Every circuit shares all but the last moment of the base circuit.
    """
    n_sites = lattice.n_sites
    prefix_length = max(len(base) - 1, 0)
    circuits: List[MeasurementCircuit] = [MeasurementCircuit(
        TermGroup.ONSITE, base,
        tuple((i, n_sites + i) for i in range(n_sites)),
        float(lattice.U), prefix_length,
    )]

    def hopping_circuit(group: TermGroup, pairs: List[Tuple[int, int]], circuit: Circuit):
        if pairs:
            circuits.append(MeasurementCircuit(group, _append_basis_change(circuit, pairs),
                                               tuple(pairs), -1.0, prefix_length))

    first = _both_spins(layout, _line_pairs(n_sites, 0))
    second = _both_spins(layout, _line_pairs(n_sites, 1))
    if lattice.Lx == 1:
        hopping_circuit(TermGroup.VERTICAL_1, first, base)
        hopping_circuit(TermGroup.VERTICAL_2, second, base)
    else:
        hopping_circuit(TermGroup.HORIZONTAL, first, base)
        swapped = base.with_moment(fswap(p, q) for p, q in first)
        hopping_circuit(TermGroup.VERTICAL_1, second, swapped)
        hopping_circuit(TermGroup.VERTICAL_2, second, base)
    return MeasurementSet(base, tuple(circuits), lattice, layout)


def random_params(lattice: LatticeSpec, layers: int, rng: np.random.Generator,
                  scale: float = math.pi) -> np.ndarray:
    """Uniform parameters in [-scale, scale)"""
    return rng.uniform(-scale, scale, size=expected_param_count(lattice, layers))


def worst_case_stats(measurements: MeasurementSet, noise: Optional[object] = None) -> CircuitStats:
    """Largest depth and sqrt(iSWAP) counts over the measurement circuits"""
    stats = [circuit_stats(to_native(m.circuit, noise)) for m in measurements]
    return CircuitStats(
        depth=max(s.depth for s in stats),
        two_qubit_depth=max(s.two_qubit_depth for s in stats),
        two_qubit_count=max(s.two_qubit_count for s in stats),
    )
