"""
Gate library: composite Fermi-Hubbard gates and their two-sqrt(iSWAP) decompositions

Two-qubit unitaries are written in the basis |q0 q1> with the first listed
qubit as the most significant bit. Standard decompositions (all correct up
to global phase, time order left to right):

    G(t)    -> sqrtISW; RZ(pi - t/2) x RZ(t/2); sqrtISW; Z x I
    H(t)    -> RZ(-pi/4) x RZ(pi/4); sqrtISW; RZ(pi + t/2) x RZ(-t/2); sqrtISW; RZ(5pi/4) x RZ(-pi/4)
    O(p)    -> RZ(p/2) RX(xi) Z x RZ(p/2) RX(-s pi/2); sqrtISW; Z RX(-2 eta) x I; sqrtISW; RX(xi) x RX(s pi/2)
    FSWAP   -> sqrtISW; sqrtISW; RZ(-pi/2) x RZ(-pi/2)
    B       -> G(-pi/2)
    FUSED   -> single-excitation block reduced to RZ . G(beta) . RZ plus a symmetric RZ pair
"""

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, List, Sequence, Tuple

import numpy as np

SQRT_HALF = 1.0 / math.sqrt(2.0)


class GateKind(Enum):
    """Gate names as they appear in circuit text"""
    G = "G"
    H = "H"
    O = "O"
    FSWAP = "FSWAP"
    B = "B"
    FUSED = "FUSED"
    X = "X"
    Z = "Z"
    RZ = "RZ"
    RX = "RX"
    LOCAL = "LOCAL"
    SQRT_ISWAP = "SQRT_ISWAP"


COMPOSITE_KINDS = frozenset({GateKind.G, GateKind.H, GateKind.O, GateKind.FSWAP, GateKind.B, GateKind.FUSED})
SINGLE_QUBIT_KINDS = frozenset({GateKind.X, GateKind.Z, GateKind.RZ, GateKind.RX, GateKind.LOCAL})
ANGLED_KINDS = frozenset({GateKind.G, GateKind.H, GateKind.O, GateKind.RZ, GateKind.RX})
VARIATIONAL_KINDS = frozenset({GateKind.H, GateKind.O})


@dataclass(frozen=True)
class Gate:
    """
    One gate instance.

    FUSED gates carry the composites they multiply (time order, same ordered
    qubit pair); LOCAL gates carry the single-qubit rotations they merge.
    """
    kind: GateKind
    qubits: Tuple[int, ...]
    angle: float = 0.0
    parts: Tuple['Gate', ...] = field(default=())

    def __post_init__(self):
        expected = 1 if self.kind in SINGLE_QUBIT_KINDS else 2
        if len(self.qubits) != expected:
            raise ValueError(f"{self.kind.value} acts on {expected} qubit(s), got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"{self.kind.value} qubits must be distinct, got {self.qubits}")

    @property
    def is_composite(self) -> bool:
        return self.kind in COMPOSITE_KINDS

    @property
    def is_two_qubit(self) -> bool:
        return len(self.qubits) == 2

    def on(self, *qubits: int) -> 'Gate':
        """Same gate moved to other qubits"""
        mapping = dict(zip(self.qubits, qubits))
        parts = tuple(p.on(*(mapping[q] for q in p.qubits)) for p in self.parts)
        return replace(self, qubits=tuple(qubits), parts=parts)


# Factories

def givens(q0: int, q1: int, theta: float) -> Gate:
    return Gate(GateKind.G, (q0, q1), float(theta))


def hopping(q0: int, q1: int, theta: float) -> Gate:
    """H(theta) = exp(-i theta (XX + YY) / 4); H(pi/2) is exp(-i pi (XX + YY) / 8)"""
    return Gate(GateKind.H, (q0, q1), float(theta))


def onsite(q0: int, q1: int, phi: float) -> Gate:
    return Gate(GateKind.O, (q0, q1), float(phi))


def fswap(q0: int, q1: int) -> Gate:
    return Gate(GateKind.FSWAP, (q0, q1))


def basis_change(q0: int, q1: int) -> Gate:
    return Gate(GateKind.B, (q0, q1))


def pauli_x(q: int) -> Gate:
    return Gate(GateKind.X, (q,))


def pauli_z(q: int) -> Gate:
    return Gate(GateKind.Z, (q,))


def rz(q: int, angle: float) -> Gate:
    return Gate(GateKind.RZ, (q,), float(angle))


def rx(q: int, angle: float) -> Gate:
    return Gate(GateKind.RX, (q,), float(angle))


def sqrt_iswap(q0: int, q1: int) -> Gate:
    return Gate(GateKind.SQRT_ISWAP, (q0, q1))


def local(q: int, rotations: Sequence[Gate]) -> Gate:
    """Single-qubit rotations merged into one gate (time order)"""
    parts = tuple(rotations)
    if any(p.qubits != (q,) for p in parts):
        raise ValueError(f"LOCAL on qubit {q} got rotations on other qubits")
    return Gate(GateKind.LOCAL, (q,), parts=parts)


def fused(*gates: Gate) -> Gate:
    """
    Product of composite gates on one ordered qubit pair (time order).

    Onsite gates are rejected: the two-sqrt(iSWAP) reduction needs
    det(block) = <00|U|00><11|U|11>, which O(phi) breaks.
    """
    flat: List[Gate] = []
    for g in gates:
        flat.extend(g.parts if g.kind == GateKind.FUSED else (g,))
    if not flat:
        raise ValueError("fused() needs at least one gate")
    qubits = flat[0].qubits
    for g in flat:
        if g.qubits != qubits:
            raise ValueError(f"fused gates must share the ordered pair {qubits}, got {g.qubits}")
        if g.kind not in (GateKind.G, GateKind.H, GateKind.FSWAP, GateKind.B):
            raise ValueError(f"{g.kind.value} cannot be fused")
    return Gate(GateKind.FUSED, qubits, parts=tuple(flat))


# Unitaries

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.diag([1, -1]).astype(complex)
_SQRT_ISWAP = np.array([
    [1, 0, 0, 0],
    [0, SQRT_HALF, 1j * SQRT_HALF, 0],
    [0, 1j * SQRT_HALF, SQRT_HALF, 0],
    [0, 0, 0, 1],
], dtype=complex)
_FSWAP = np.array([
    [1, 0, 0, 0],
    [0, 0, 1, 0],
    [0, 1, 0, 0],
    [0, 0, 0, -1],
], dtype=complex)


def rz_matrix(angle: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * angle), np.exp(0.5j * angle)])


def rx_matrix(angle: float) -> np.ndarray:
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def _excitation_block(block: np.ndarray, diagonal=(1.0, 1.0)) -> np.ndarray:
    u = np.zeros((4, 4), dtype=complex)
    u[0, 0], u[3, 3] = diagonal
    u[1:3, 1:3] = block
    return u


def givens_matrix(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return _excitation_block(np.array([[c, -s], [s, c]]))


def hopping_matrix(theta: float) -> np.ndarray:
    """exp(-i theta (XX + YY) / 4)"""
    return _excitation_block(rx_matrix(theta))


def onsite_matrix(phi: float) -> np.ndarray:
    return np.diag([1, 1, 1, np.exp(1j * phi)])


def cphase_matrix(chi: float) -> np.ndarray:
    return onsite_matrix(chi)


def gate_unitary(g: Gate) -> np.ndarray:
    """Exact 2x2 or 4x4 matrix of a gate"""
    kind = g.kind
    if kind == GateKind.X:
        return _X.copy()
    if kind == GateKind.Z:
        return _Z.copy()
    if kind == GateKind.RZ:
        return rz_matrix(g.angle)
    if kind == GateKind.RX:
        return rx_matrix(g.angle)
    if kind == GateKind.SQRT_ISWAP:
        return _SQRT_ISWAP.copy()
    if kind == GateKind.G:
        return givens_matrix(g.angle)
    if kind == GateKind.H:
        return hopping_matrix(g.angle)
    if kind == GateKind.O:
        return onsite_matrix(g.angle)
    if kind == GateKind.FSWAP:
        return _FSWAP.copy()
    if kind == GateKind.B:
        return givens_matrix(-math.pi / 2)
    if kind in (GateKind.FUSED, GateKind.LOCAL):
        dim = 2 ** len(g.qubits)
        u = np.eye(dim, dtype=complex)
        for part in g.parts:
            u = gate_unitary(part) @ u
        return u
    raise ValueError(f"no unitary for gate kind {kind}")


def equal_up_to_global_phase(a: np.ndarray, b: np.ndarray, atol: float = 1e-10) -> bool:
    """True when a = exp(i c) b for some real c, elementwise within atol"""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        return False
    idx = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(b[idx]) < atol:
        return bool(np.allclose(a, b, atol=atol, rtol=0))
    phase = a[idx] / b[idx]
    if abs(abs(phase) - 1) > atol * 10:
        return False
    phase /= abs(phase)
    return bool(np.max(np.abs(a - phase * b)) < atol)


# Native templates

@dataclass(frozen=True)
class NativeTemplate:
    """
    Single-qubit dressing of a composite around its two sqrt(iSWAP)s.

    Each field holds (rotations on qubits[0], rotations on qubits[1]) in time order.
    """
    pre: Tuple[Tuple[Gate, ...], Tuple[Gate, ...]]
    mid: Tuple[Tuple[Gate, ...], Tuple[Gate, ...]]
    post: Tuple[Tuple[Gate, ...], Tuple[Gate, ...]]


def _givens_template(a: int, b: int, theta: float, pre=((), ()), post=((), ())) -> NativeTemplate:
    return NativeTemplate(
        pre=pre,
        mid=((rz(a, math.pi - theta / 2),), (rz(b, theta / 2),)),
        post=((pauli_z(a),) + post[0], post[1]),
    )


def _hopping_template(a: int, b: int, theta: float) -> NativeTemplate:
    return NativeTemplate(
        pre=((rz(a, -math.pi / 4),), (rz(b, math.pi / 4),)),
        mid=((rz(a, math.pi + theta / 2),), (rz(b, -theta / 2),)),
        post=((rz(a, 5 * math.pi / 4),), (rz(b, -math.pi / 4),)),
    )


def _onsite_template(a: int, b: int, phi: float) -> NativeTemplate:
    phi = math.remainder(phi, 2 * math.pi)
    sign = 1.0 if phi >= 0 else -1.0
    eta = math.asin(math.sqrt(2) * math.sin(abs(phi) / 4))
    xi = math.atan(math.tan(eta) / math.sqrt(2))
    return NativeTemplate(
        pre=((rz(a, phi / 2), rx(a, xi), pauli_z(a)), (rz(b, phi / 2), rx(b, -sign * math.pi / 2))),
        mid=((pauli_z(a), rx(a, -2 * eta)), ()),
        post=((rx(a, xi),), (rx(b, sign * math.pi / 2),)),
    )


def _fswap_template(a: int, b: int) -> NativeTemplate:
    return NativeTemplate(
        pre=((), ()),
        mid=((), ()),
        post=((rz(a, -math.pi / 2),), (rz(b, -math.pi / 2),)),
    )


def _fused_template(g: Gate) -> NativeTemplate:
    """
    Reduce a number-conserving gate to RZ pairs around one Givens rotation.

    With W the single-excitation block rescaled into SU(2), W = Rz(alpha) Ry(beta) Rz(gamma);
    opposite RZ pairs act as Rz on the block, the equal pair restores <11|U|11> / <00|U|00>.
    """
    a, b = g.qubits
    u = gate_unitary(g)
    kappa = np.angle(u[3, 3]) - np.angle(u[0, 0])
    chi = np.angle(u[0, 0]) + kappa / 2
    w = np.exp(-1j * chi) * u[1:3, 1:3]
    beta = 2 * math.atan2(abs(w[1, 0]), abs(w[0, 0]))
    total = 2 * np.angle(w[1, 1]) if abs(w[0, 0]) > 1e-12 else 0.0
    diff = 2 * np.angle(w[1, 0]) if abs(w[1, 0]) > 1e-12 else 0.0
    alpha, gamma = (total + diff) / 2, (total - diff) / 2
    return _givens_template(
        a, b, beta,
        pre=((rz(a, gamma / 2),), (rz(b, -gamma / 2),)),
        post=((rz(a, alpha / 2), rz(a, kappa / 2)), (rz(b, -alpha / 2), rz(b, kappa / 2))),
    )


def native_template(g: Gate) -> NativeTemplate:
    """Dressing rotations of a composite gate"""
    a, b = g.qubits if g.is_two_qubit else (None, None)
    if g.kind == GateKind.G:
        return _givens_template(a, b, g.angle)
    if g.kind == GateKind.B:
        return _givens_template(a, b, -math.pi / 2)
    if g.kind == GateKind.H:
        return _hopping_template(a, b, g.angle)
    if g.kind == GateKind.O:
        return _onsite_template(a, b, g.angle)
    if g.kind == GateKind.FSWAP:
        return _fswap_template(a, b)
    if g.kind == GateKind.FUSED:
        return _fused_template(g)
    raise ValueError(f"{g.kind.value} is not a composite gate")


def decompose(g: Gate) -> List[Gate]:
    """
    Native sequence of a composite gate.

    Returns:
        Time-ordered gates: dressing, sqrt(iSWAP), dressing, sqrt(iSWAP), dressing.
        The product equals gate_unitary(g) up to global phase.
    """
    template = native_template(g)
    a, b = g.qubits
    sequence: List[Gate] = []
    sequence.extend(template.pre[0] + template.pre[1])
    sequence.append(sqrt_iswap(a, b))
    sequence.extend(template.mid[0] + template.mid[1])
    sequence.append(sqrt_iswap(a, b))
    sequence.extend(template.post[0] + template.post[1])
    return sequence


def sequence_unitary(sequence: Sequence[Gate], qubits: Tuple[int, int]) -> np.ndarray:
    """4x4 product of a time-ordered gate list on one qubit pair"""
    u = np.eye(4, dtype=complex)
    for g in sequence:
        m = gate_unitary(g)
        if g.is_two_qubit:
            if g.qubits != tuple(qubits):
                swap = _FSWAP.copy()
                swap[3, 3] = 1
                m = swap @ m @ swap
        else:
            m = np.kron(m, np.eye(2)) if g.qubits[0] == qubits[0] else np.kron(np.eye(2), m)
        u = m @ u
    return u


def map_angles(g: Gate, transform: Callable[[float], float]) -> Gate:
    """Apply transform to every variational (hopping/onsite) angle, including fused parts"""
    if g.kind in VARIATIONAL_KINDS:
        return replace(g, angle=float(transform(g.angle)))
    if g.kind == GateKind.FUSED:
        return replace(g, parts=tuple(map_angles(p, transform) for p in g.parts))
    return g
