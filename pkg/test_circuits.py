#!/usr/bin/env python3
"""
Test script for the gate library, native compilation and EHV circuits
"""

import sys
import os
import math

import numpy as np
import pytest

# Add the src directory to the Python path
sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), 'src'))

N_RANDOM_ANGLES = 1000


def _assert_decomposition(g):
    from core.circuits.gates import decompose, sequence_unitary, gate_unitary, equal_up_to_global_phase

    sequence = decompose(g)
    assert sum(1 for s in sequence if s.is_two_qubit) == 2
    assert equal_up_to_global_phase(sequence_unitary(sequence, g.qubits), gate_unitary(g), atol=1e-10), g


def test_fixed_gate_decompositions():
    from core.circuits import fswap, basis_change

    for a, b in ((0, 1), (1, 0)):
        _assert_decomposition(fswap(a, b))
        _assert_decomposition(basis_change(a, b))
    print("✓ FSWAP and B decompose into two sqrt(iSWAP)s")


def test_angled_gate_decompositions():
    from core.circuits import givens, hopping, onsite

    rng = np.random.default_rng(11)
    for factory in (givens, hopping, onsite):
        for angle in rng.uniform(-2 * math.pi, 2 * math.pi, N_RANDOM_ANGLES):
            _assert_decomposition(factory(0, 1, angle))
    for angle in (0.0, math.pi, -math.pi, math.pi / 2):
        _assert_decomposition(onsite(0, 1, angle))
    print(f"✓ G, H and O decompositions hold for {N_RANDOM_ANGLES} random angles each")


def test_fused_gate_decompositions():
    from core.circuits import givens, hopping, fswap, basis_change, fused

    rng = np.random.default_rng(12)
    for t1, t2 in rng.uniform(-2 * math.pi, 2 * math.pi, (N_RANDOM_ANGLES, 2)):
        _assert_decomposition(fused(hopping(0, 1, t1), fswap(0, 1)))
        _assert_decomposition(fused(givens(0, 1, t1), hopping(0, 1, t2), basis_change(0, 1)))
    print("✓ Fused gates reduce to two sqrt(iSWAP)s")


def test_fused_rejects_onsite_and_mixed_pairs():
    from core.circuits import hopping, onsite, fused

    with pytest.raises(ValueError):
        fused(hopping(0, 1, 0.3), onsite(0, 1, 0.2))
    with pytest.raises(ValueError):
        fused(hopping(0, 1, 0.3), hopping(1, 2, 0.2))
    print("✓ Invalid fusions are rejected")


def test_hopping_convention():
    """H(theta) = exp(-i theta (XX + YY) / 4)"""
    from scipy.linalg import expm
    from core.circuits import hopping, gate_unitary

    x = np.array([[0, 1], [1, 0]])
    y = np.array([[0, -1j], [1j, 0]])
    generator = (np.kron(x, x) + np.kron(y, y)) / 4
    for theta in (0.3, -1.1, 2.5):
        assert np.allclose(gate_unitary(hopping(0, 1, theta)), expm(-1j * theta * generator), atol=1e-12)
    quarter_turn = gate_unitary(hopping(0, 1, math.pi / 2))
    assert np.allclose(quarter_turn, expm(-1j * math.pi * generator / 2), atol=1e-12)
    assert not np.allclose(quarter_turn, expm(-1j * math.pi * generator), atol=1e-6)
    print("✓ Hopping gate convention")


def _ehv(shape, n_occ, layers, mode, seed=0, U=4.0):
    from core.model import LatticeSpec, SectorSpec, JwLayout, LayoutMode
    from core.circuits import build_ehv_circuit, random_params

    lattice = LatticeSpec(shape[0], shape[1], U)
    layout = JwLayout(lattice, LayoutMode(mode))
    params = random_params(lattice, layers, np.random.default_rng(seed))
    circuit = build_ehv_circuit(lattice, SectorSpec.from_occupation(n_occ), params, layers, layout)
    return lattice, layout, params, circuit


@pytest.mark.parametrize("shape, n_occ, layers, mode, count, depth2", [
    ((1, 4), 4, 2, "rectangle", 64, 20),
    ((1, 8), 8, 1, "zigzag", 140, 26),
    ((2, 4), 7, 1, "zigzag", 176, 32),
])
def test_complexity_table(shape, n_occ, layers, mode, count, depth2):
    from core.circuits import build_measurement_circuits, worst_case_stats

    for seed in (0, 1):
        lattice, layout, _, circuit = _ehv(shape, n_occ, layers, mode, seed)
        stats = worst_case_stats(build_measurement_circuits(circuit, lattice, layout))
        assert stats.two_qubit_count == count
        assert stats.two_qubit_depth == depth2
        assert stats.depth == 2 * depth2 + 1
    print(f"✓ {shape[0]}x{shape[1]} N_occ={n_occ}: {count} sqrt(iSWAP)s, two-qubit depth {depth2}")


def test_native_compilation_preserves_unitary():
    from core.circuits import to_native, is_native, unitary, equal_up_to_global_phase

    for shape, mode in (((1, 4), "rectangle"), ((1, 4), "zigzag"), ((2, 2), "zigzag")):
        _, _, _, circuit = _ehv(shape, 3, 1, mode)
        native = to_native(circuit)
        assert is_native(native)
        assert equal_up_to_global_phase(unitary(native), unitary(circuit), atol=1e-9)
    print("✓ Native compilation preserves the circuit unitary")


def test_spin_echo_preserves_unitary():
    from core.circuits import to_native, apply_spin_echo, is_native, unitary, equal_up_to_global_phase
    from core.circuits.gates import GateKind

    _, _, _, circuit = _ehv((1, 4), 4, 1, "zigzag")
    native = to_native(circuit)
    echoed = apply_spin_echo(native)
    assert is_native(echoed)
    assert len(echoed) == len(native)
    assert echoed.count(GateKind.SQRT_ISWAP) == native.count(GateKind.SQRT_ISWAP)
    assert equal_up_to_global_phase(unitary(echoed), unitary(native), atol=1e-10)
    print("✓ Spin echo leaves the 8-qubit unitary unchanged")


def test_spin_echo_preserves_energy():
    from core.circuits import to_native, apply_spin_echo
    from core.model import exact_qubit_hamiltonian
    from core.simulator import simulate, expectation

    lattice, layout, _, circuit = _ehv((1, 4), 4, 1, "rectangle", seed=3)
    h = exact_qubit_hamiltonian(lattice, layout)
    native = to_native(circuit)
    plain = expectation(simulate(native), h)
    echoed = expectation(simulate(apply_spin_echo(native)), h)
    assert abs(plain - echoed) < 1e-10
    print("✓ Spin echo leaves the EHV energy unchanged")


def test_spin_echo_edge_cases():
    from core.circuits import Circuit, apply_spin_echo, unitary, equal_up_to_global_phase
    from core.circuits.gates import sqrt_iswap, GateKind
    from core.errors import NonNativeCircuitError
    from core.circuits import hopping

    empty = Circuit(4)
    assert apply_spin_echo(empty) == empty

    single = Circuit(3, [(), (sqrt_iswap(0, 1),), ()])
    echoed = apply_spin_echo(single)
    assert echoed.count(GateKind.X) == 6
    assert equal_up_to_global_phase(unitary(echoed), unitary(single), atol=1e-12)

    with pytest.raises(NonNativeCircuitError):
        apply_spin_echo(Circuit(2, [(hopping(0, 1, 0.2),)]))
    print("✓ Spin echo handles empty and single-moment circuits")


def test_initial_prep_is_noninteracting_ground_state():
    from core.model import LatticeSpec, SectorSpec, JwLayout, Spin, exact_qubit_hamiltonian
    from core.model import number_operator, single_particle_hamiltonian
    from core.circuits import build_initial_prep
    from core.simulator import simulate, expectation

    for shape, sectors in (((1, 4), [(2, 2), (1, 0), (4, 3)]), ((2, 3), [(2, 1), (3, 3)]), ((1, 5), [(2, 2)])):
        lattice = LatticeSpec(shape[0], shape[1], 0.0)
        layout = JwLayout(lattice)
        levels = np.linalg.eigvalsh(single_particle_hamiltonian(lattice))
        h = exact_qubit_hamiltonian(lattice, layout)
        for n_up, n_down in sectors:
            state = simulate(build_initial_prep(lattice, SectorSpec(n_up, n_down), layout))
            probabilities = state.probabilities()
            assert abs(np.dot(probabilities, number_operator(layout, Spin.UP)) - n_up) < 1e-10
            assert abs(np.dot(probabilities, number_operator(layout, Spin.DOWN)) - n_down) < 1e-10
            expected = levels[:n_up].sum() + levels[:n_down].sum()
            assert abs(expectation(state, h) - expected) < 1e-9
    print("✓ Givens preparation reaches the U = 0 ground state")


def test_measurement_groups():
    from core.model import TermGroup

    lattice, layout, _, circuit = _ehv((1, 2), 2, 1, "zigzag")
    from core.circuits import build_measurement_circuits
    assert build_measurement_circuits(circuit, lattice, layout).groups == [TermGroup.ONSITE, TermGroup.VERTICAL_1]

    lattice, layout, _, circuit = _ehv((2, 3), 6, 1, "zigzag")
    ms = build_measurement_circuits(circuit, lattice, layout)
    assert ms.groups == [TermGroup.ONSITE, TermGroup.HORIZONTAL, TermGroup.VERTICAL_1, TermGroup.VERTICAL_2]
    for m in ms:
        assert m.circuit.moments[:m.prefix_length] == ms.prefix.moments
    print("✓ Measurement circuits share the base prefix")


def test_grouped_energy_matches_hamiltonian():
    from core.circuits import build_measurement_circuits
    from core.model import exact_qubit_hamiltonian
    from core.simulator import simulate, expectation, exact_energy

    for shape, n_occ in (((1, 4), 3), ((2, 2), 4), ((2, 3), 5)):
        lattice, layout, _, circuit = _ehv(shape, n_occ, 2, "zigzag", seed=5)
        ms = build_measurement_circuits(circuit, lattice, layout)
        grouped = exact_energy(simulate(ms.prefix), ms)
        direct = expectation(simulate(circuit), exact_qubit_hamiltonian(lattice, layout))
        assert abs(grouped - direct) < 1e-9
    print("✓ Summed group energies equal <H>")


def test_circuit_text_round_trip():
    from core.circuits import Circuit, to_native

    _, _, _, circuit = _ehv((2, 2), 3, 1, "zigzag", seed=2)
    for c in (circuit, to_native(circuit)):
        assert Circuit.from_text(c.to_text()) == c
    with pytest.raises(ValueError):
        Circuit.from_text("n_qubits 2\nCNOT 0 1\n")
    print("✓ Circuit text format round-trips")


def test_parameter_layout():
    from core.model import LatticeSpec
    from core.circuits import split_params, zero_onsite, onsite_indices
    from core.errors import ParameterLengthError

    lattice = LatticeSpec(2, 4, 4.0)
    params = np.arange(8, dtype=float) + 1
    assert split_params(lattice, params, 2).shape == (2, 4)
    assert onsite_indices(lattice, 2) == [0, 4]
    assert list(zero_onsite(lattice, params, 2)) == [0, 2, 3, 4, 0, 6, 7, 8]
    with pytest.raises(ParameterLengthError):
        split_params(lattice, params[:7], 2)
    print("✓ Parameter vectors are validated and split per layer")


def main():
    """Run all tests"""
    print("Hubbard VQE Lab - Circuit Test")
    print("=" * 30)

    tests = [
        ("Fixed Gate Decompositions", test_fixed_gate_decompositions),
        ("Angled Gate Decompositions", test_angled_gate_decompositions),
        ("Fused Gate Decompositions", test_fused_gate_decompositions),
        ("Invalid Fusions", test_fused_rejects_onsite_and_mixed_pairs),
        ("Hopping Convention", test_hopping_convention),
        ("Complexity 1x4", lambda: test_complexity_table((1, 4), 4, 2, "rectangle", 64, 20)),
        ("Complexity 1x8", lambda: test_complexity_table((1, 8), 8, 1, "zigzag", 140, 26)),
        ("Complexity 2x4", lambda: test_complexity_table((2, 4), 7, 1, "zigzag", 176, 32)),
        ("Native Compilation", test_native_compilation_preserves_unitary),
        ("Spin Echo Unitary", test_spin_echo_preserves_unitary),
        ("Spin Echo Energy", test_spin_echo_preserves_energy),
        ("Spin Echo Edge Cases", test_spin_echo_edge_cases),
        ("Initial Preparation", test_initial_prep_is_noninteracting_ground_state),
        ("Measurement Groups", test_measurement_groups),
        ("Grouped Energy", test_grouped_energy_matches_hamiltonian),
        ("Circuit Text", test_circuit_text_round_trip),
        ("Parameter Layout", test_parameter_layout),
    ]

    passed = 0
    for test_name, test_func in tests:
        print(f"\n{test_name}:")
        try:
            test_func()
            passed += 1
        except Exception as e:
            print(f"✗ {test_name} failed: {e}")

    print(f"\nTest Results: {passed}/{len(tests)} tests passed")
    return passed == len(tests)


if __name__ == "__main__":
    sys.exit(0 if main() else 1)
