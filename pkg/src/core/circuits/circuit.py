"""
Moment-structured circuits, native compilation, spin echo and statistics
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Sequence, Tuple

import numpy as np

from core.errors import NonNativeCircuitError
from .gates import (
    Gate, GateKind, SINGLE_QUBIT_KINDS, ANGLED_KINDS,
    native_template, map_angles, local, pauli_x, sqrt_iswap, gate_unitary,
)

logger = logging.getLogger(__name__)

MAX_UNITARY_QUBITS = 12


@dataclass(frozen=True)
class Circuit:
    """Ordered moments of gates acting on disjoint qubits"""
    n_qubits: int
    moments: Tuple[Tuple[Gate, ...], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'moments', tuple(tuple(m) for m in self.moments))
        for index, moment in enumerate(self.moments):
            touched = set()
            for g in moment:
                for q in g.qubits:
                    if not 0 <= q < self.n_qubits:
                        raise IndexError(f"moment {index}: qubit {q} outside 0..{self.n_qubits - 1}")
                    if q in touched:
                        raise ValueError(f"moment {index}: qubit {q} used twice")
                    touched.add(q)

    def __len__(self) -> int:
        return len(self.moments)

    def __add__(self, other: 'Circuit') -> 'Circuit':
        if other.n_qubits != self.n_qubits:
            raise ValueError(f"cannot join circuits on {self.n_qubits} and {other.n_qubits} qubits")
        return Circuit(self.n_qubits, self.moments + other.moments)

    def with_moment(self, gates: Iterable[Gate]) -> 'Circuit':
        gates = tuple(gates)
        if not gates:
            return self
        return Circuit(self.n_qubits, self.moments + (gates,))

    def prefix(self, n_moments: int) -> 'Circuit':
        return Circuit(self.n_qubits, self.moments[:n_moments])

    def gates(self) -> Iterator[Gate]:
        for moment in self.moments:
            yield from moment

    def count(self, kind: GateKind) -> int:
        return sum(1 for g in self.gates() if g.kind == kind)

    def to_text(self) -> str:
        """One moment per line; gates separated by ' | ', fused/local parts in brackets"""
        lines = [f"n_qubits {self.n_qubits}"]
        for moment in self.moments:
            lines.append(" | ".join(_gate_text(g) for g in moment) if moment else "-")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> 'Circuit':
        rows = [line.strip() for line in text.splitlines() if line.strip() and not line.startswith('#')]
        if not rows or not rows[0].startswith("n_qubits"):
            raise ValueError("circuit text must start with 'n_qubits N'")
        n_qubits = int(rows[0].split()[1])
        moments = []
        for row in rows[1:]:
            moments.append(() if row == "-" else tuple(_parse_gate(token) for token in row.split(" | ")))
        return cls(n_qubits, moments)


def _gate_text(g: Gate) -> str:
    fields = [g.kind.value] + [str(q) for q in g.qubits]
    if g.kind in ANGLED_KINDS:
        fields.append(repr(float(g.angle)))
    if g.parts:
        fields.append("[" + " ; ".join(_gate_text(p) for p in g.parts) + "]")
    return " ".join(fields)


def _parse_gate(token: str) -> Gate:
    token = token.strip()
    parts: Tuple[Gate, ...] = ()
    if token.endswith("]"):
        head, _, inner = token.partition("[")
        parts = tuple(_parse_gate(t) for t in inner[:-1].split(" ; "))
        token = head.strip()
    fields = token.split()
    try:
        kind = GateKind(fields[0])
    except ValueError:
        raise ValueError(f"unknown gate '{fields[0]}'")
    arity = 1 if kind in SINGLE_QUBIT_KINDS else 2
    qubits = tuple(int(f) for f in fields[1:1 + arity])
    angle = float(fields[1 + arity]) if kind in ANGLED_KINDS else 0.0
    return Gate(kind, qubits, angle, parts)


# Native form

class _LocalLayer:
    """Pending single-qubit rotations per qubit"""

    def __init__(self):
        self.rotations: Dict[int, List[Gate]] = {}

    def add(self, gates: Iterable[Gate]):
        for g in gates:
            if g.kind == GateKind.LOCAL:
                self.rotations.setdefault(g.qubits[0], []).extend(g.parts)
            else:
                self.rotations.setdefault(g.qubits[0], []).append(g)

    def moment(self) -> Tuple[Gate, ...]:
        merged = []
        for q in sorted(self.rotations):
            rotations = self.rotations[q]
            if len(rotations) == 1:
                merged.append(rotations[0])
            elif rotations:
                merged.append(local(q, rotations))
        return tuple(merged)


def to_native(circuit: Circuit, noise=None) -> Circuit:
    """
    Compile composite gates into alternating single-qubit / sqrt(iSWAP) moments.

    The dressing after one composite moment merges with the dressing before
    the next; moments holding only single-qubit gates merge into the pending
    single-qubit layer. Coherent angle errors of the noise model (overrotation,
    angle_offset) are applied to hopping and onsite angles here.

    Returns:
        Circuit [1q, 2q, 1q, ..., 2q, 1q]; total depth = 2 * (2q depth) + 1
    """
    transform = _angle_error(noise)
    moments: List[Tuple[Gate, ...]] = []
    pending = _LocalLayer()
    for moment in circuit.moments:
        two_qubit = [g for g in moment if g.is_two_qubit]
        one_qubit = [g for g in moment if not g.is_two_qubit]
        if not two_qubit:
            pending.add(one_qubit)
            continue
        if all(g.kind == GateKind.SQRT_ISWAP for g in two_qubit):
            pending.add(one_qubit)
            moments.append(pending.moment())
            moments.append(tuple(two_qubit))
            pending = _LocalLayer()
            continue
        mids = _LocalLayer()
        posts = _LocalLayer()
        pending.add(one_qubit)
        for g in two_qubit:
            if g.kind == GateKind.SQRT_ISWAP:
                raise NonNativeCircuitError("sqrt(iSWAP) mixed with composite gates in one moment")
            if transform is not None:
                g = map_angles(g, transform)
            template = native_template(g)
            pending.add(template.pre[0] + template.pre[1])
            mids.add(template.mid[0] + template.mid[1])
            posts.add(template.post[0] + template.post[1])
        entangling = tuple(sqrt_iswap(*g.qubits) for g in two_qubit)
        moments.extend([pending.moment(), entangling, mids.moment(), entangling])
        pending = posts
    final = pending.moment()
    if moments or final:
        moments.append(final)
    return Circuit(circuit.n_qubits, moments)


def _angle_error(noise):
    if noise is None:
        return None
    scale = 1.0 + float(getattr(noise, 'overrotation', 0.0))
    offset = float(getattr(noise, 'angle_offset', 0.0))
    if scale == 1.0 and offset == 0.0:
        return None
    return lambda angle: angle * scale + offset


def is_native(circuit: Circuit) -> bool:
    """Strictly alternating single-qubit / sqrt(iSWAP) moments, starting and ending single-qubit"""
    if not circuit.moments:
        return True
    if len(circuit.moments) % 2 == 0:
        return False
    for index, moment in enumerate(circuit.moments):
        if index % 2 == 0:
            if any(g.kind not in SINGLE_QUBIT_KINDS for g in moment):
                return False
        elif not moment or any(g.kind != GateKind.SQRT_ISWAP for g in moment):
            return False
    return True


def require_native(circuit: Circuit):
    if not is_native(circuit):
        raise NonNativeCircuitError("circuit is not in native alternating form; call to_native() first")


@dataclass(frozen=True)
class CircuitStats:
    depth: int
    two_qubit_depth: int
    two_qubit_count: int

    def to_dict(self) -> Dict[str, int]:
        return {
            'depth': self.depth,
            'two_qubit_depth': self.two_qubit_depth,
            'two_qubit_count': self.two_qubit_count,
        }


def circuit_stats(circuit: Circuit) -> CircuitStats:
    """Depth and sqrt(iSWAP) counts of the native form"""
    native = circuit if is_native(circuit) else to_native(circuit)
    two_qubit_moments = [m for m in native.moments if any(g.is_two_qubit for g in m)]
    return CircuitStats(
        depth=len(native.moments),
        two_qubit_depth=len(two_qubit_moments),
        two_qubit_count=sum(len(m) for m in two_qubit_moments),
    )


def apply_spin_echo(circuit: Circuit) -> Circuit:
    """
    Sandwich every other sqrt(iSWAP) moment (the first, third, ...) between
    full-width X layers, merged into the neighboring single-qubit moments.
    """
    require_native(circuit)
    if not circuit.moments:
        return circuit
    echo = [pauli_x(q) for q in range(circuit.n_qubits)]
    n_entangling = len(circuit.moments) // 2
    layers: List[_LocalLayer] = []
    for k, moment in enumerate(circuit.moments[0::2]):
        # entangling moment j sits between layers j and j + 1; even j are echoed
        layer = _LocalLayer()
        if k >= 1 and (k - 1) % 2 == 0:
            layer.add(echo)
        layer.add(moment)
        if k % 2 == 0 and k < n_entangling:
            layer.add(echo)
        layers.append(layer)
    moments: List[Tuple[Gate, ...]] = []
    for k, layer in enumerate(layers):
        moments.append(layer.moment())
        if 2 * k + 1 < len(circuit.moments):
            moments.append(circuit.moments[2 * k + 1])
    return Circuit(circuit.n_qubits, moments)


def unitary(circuit: Circuit) -> np.ndarray:
    """Dense 2^n matrix of a circuit (up to MAX_UNITARY_QUBITS qubits)"""
    from core.simulator.statevector import apply_matrix

    n = circuit.n_qubits
    if n > MAX_UNITARY_QUBITS:
        raise ValueError(f"dense unitary of {n} qubits exceeds the {MAX_UNITARY_QUBITS}-qubit limit")
    columns = np.eye(2 ** n, dtype=complex)
    for g in circuit.gates():
        columns = apply_matrix(columns, gate_unitary(g), g.qubits, n)
    return columns.T


def stack(n_qubits: int, sections: Sequence[Circuit]) -> Circuit:
    """Concatenate circuit sections moment-wise"""
    moments: List[Tuple[Gate, ...]] = []
    for section in sections:
        moments.extend(section.moments)
    return Circuit(n_qubits, moments)

