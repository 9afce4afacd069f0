#!/usr/bin/env python3
"""
Test script for the Fermi-Hubbard model: lattices, sectors and the Jordan-Wigner encoding
"""

import sys
import os
import math

import numpy as np
import pytest

# Add the src directory to the Python path
sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), 'src'))


def test_lattice_edges_and_groups():
    from core.model import LatticeSpec, TermGroup

    chain = LatticeSpec(1, 4, 4.0)
    assert chain.n_sites == 4 and chain.n_modes == 8
    assert chain.edges() == [(0, 1), (1, 2), (2, 3)]
    assert [chain.edge_group(e) for e in chain.edges()] == [
        TermGroup.VERTICAL_1, TermGroup.VERTICAL_2, TermGroup.VERTICAL_1]
    assert chain.params_per_layer == 3

    ladder = LatticeSpec(2, 4, 4.0)
    assert len(ladder.horizontal_edges()) == 4
    assert len(ladder.vertical_edges()) == 6
    assert ladder.params_per_layer == 4
    groups = [ladder.edge_group(e) for e in ladder.vertical_edges()]
    assert groups.count(TermGroup.VERTICAL_1) == 3 and groups.count(TermGroup.VERTICAL_2) == 3
    print("✓ Lattice edges and groups are correct")


def test_snake_ordering():
    from core.model import LatticeSpec, JwLayout

    ladder = LatticeSpec(2, 3, 1.0)
    assert [ladder.snake_position(s) for s in range(6)] == [0, 1, 3, 2, 4, 5]
    # consecutive snake positions are lattice neighbors
    layout = JwLayout(ladder)
    sites = layout.position_sites
    edges = {tuple(sorted(e)) for e in ladder.edges()}
    for a, b in zip(sites[:-1], sites[1:]):
        assert tuple(sorted((int(a), int(b)))) in edges
    for q in range(layout.n_qubits):
        site, spin = layout.site_of(q)
        assert layout.mode_index(site, spin) == q
    print("✓ Snake ordering is a lattice path")


def test_unsupported_lattices():
    from core.errors import UnsupportedLatticeError, ConfigError
    from core.model import LatticeSpec

    for shape in ((3, 3), (1, 1), (0, 4), (2, 17)):
        with pytest.raises(UnsupportedLatticeError):
            LatticeSpec(shape[0], shape[1], 1.0)
    with pytest.raises(ConfigError):
        LatticeSpec(1, 4, float('nan'))
    print("✓ Unsupported lattices are rejected")


def test_sectors():
    from core.model import LatticeSpec, SectorSpec

    lattice = LatticeSpec(1, 4, 4.0)
    sector = SectorSpec.from_occupation(3)
    assert (sector.n_up, sector.n_down) == (2, 1)
    assert sector.dimension(lattice) == 6 * 4
    assert sector.particle_hole_partner(lattice) == SectorSpec(2, 3)
    assert sector.spin_flipped() == SectorSpec(1, 2)
    print("✓ Occupation sectors behave")


def test_hamiltonian_terms():
    from core.model import LatticeSpec, TermKind, build_hamiltonian, iter_groups

    lattice = LatticeSpec(2, 2, 3.0)
    terms = build_hamiltonian(lattice)
    hopping = [t for t in terms if t.kind == TermKind.HOPPING]
    onsite = [t for t in terms if t.kind == TermKind.ONSITE]
    assert len(hopping) == 2 * len(lattice.edges())
    assert len(onsite) == 4
    assert all(t.coefficient == -1.0 for t in hopping)
    assert all(t.coefficient == 3.0 for t in onsite)
    # terms of one group act on disjoint modes per spin
    from core.model import JwLayout
    layout = JwLayout(lattice)
    for _, group in iter_groups(terms):
        touched = [m for t in group for m in t.modes(layout)]
        assert len(touched) == len(set(touched))
    print("✓ Hamiltonian term lists are grouped")


def test_jordan_wigner_hermitian_and_number_conserving():
    from core.model import LatticeSpec, JwLayout, Spin, exact_qubit_hamiltonian, number_operator

    lattice = LatticeSpec(2, 2, 2.5)
    layout = JwLayout(lattice)
    h = exact_qubit_hamiltonian(lattice, layout).to_dense()
    assert np.allclose(h, h.conj().T, atol=1e-12)
    for spin in Spin:
        n = np.diag(number_operator(layout, spin))
        assert np.allclose(h @ n, n @ h, atol=1e-12)
    print("✓ Jordan-Wigner Hamiltonian is Hermitian and conserves N_up, N_down")


def test_jordan_wigner_two_site_spectrum():
    """Two sites at half filling: E0 = (U - sqrt(U^2 + 16)) / 2"""
    from core.model import LatticeSpec, JwLayout, exact_qubit_hamiltonian, number_operator, Spin

    for U in (0.0, 1.0, 4.0, 8.0):
        lattice = LatticeSpec(1, 2, U)
        layout = JwLayout(lattice)
        h = exact_qubit_hamiltonian(lattice, layout).to_dense()
        n_up, n_down = number_operator(layout, Spin.UP), number_operator(layout, Spin.DOWN)
        keep = np.flatnonzero((n_up == 1) & (n_down == 1))
        block = h[np.ix_(keep, keep)]
        e0 = np.linalg.eigvalsh(block)[0]
        assert abs(e0 - (U - math.sqrt(U * U + 16)) / 2) < 1e-10
    print("✓ Two-site spectrum matches the closed form")


def test_sector_hamiltonian_matches_full_operator():
    from core.model import LatticeSpec, SectorSpec, JwLayout, exact_qubit_hamiltonian
    from core.reference import SectorBasis, sector_hamiltonian

    lattice = LatticeSpec(1, 4, 4.0)
    layout = JwLayout(lattice)
    full = exact_qubit_hamiltonian(lattice, layout).to_dense()
    basis = SectorBasis.build(lattice, SectorSpec(2, 1))
    block = sector_hamiltonian(basis, layout).toarray()
    assert np.allclose(block, full[np.ix_(basis.states, basis.states)], atol=1e-12)
    print("✓ Sector Hamiltonian is the restriction of the full operator")


def test_noninteracting_ground_energy():
    """U = 0: exact energy equals the sum of the lowest single-particle levels"""
    from core.model import LatticeSpec, SectorSpec, single_particle_hamiltonian
    from core.reference import exact_ground

    lattice = LatticeSpec(2, 3, 0.0)
    levels = np.linalg.eigvalsh(single_particle_hamiltonian(lattice))
    for n_up, n_down in ((1, 1), (3, 2), (3, 3)):
        energy, _ = exact_ground(lattice, SectorSpec(n_up, n_down))
        assert abs(energy - (levels[:n_up].sum() + levels[:n_down].sum())) < 1e-9
    print("✓ Noninteracting energies match single-particle levels")


def test_random_streams_are_independent():
    from utils.random_streams import random_stream, derive_seed

    a = random_stream(1, "sampling").random(5)
    b = random_stream(1, "sampling").random(5)
    c = random_stream(1, "readout").random(5)
    d = random_stream(1, "sampling", 2).random(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)
    assert derive_seed(3, "x", 1) == derive_seed(3, "x", 1) != derive_seed(3, "x", 2)
    print("✓ Named random streams are reproducible and independent")


def main():
    """Run all tests"""
    print("Hubbard VQE Lab - Model Test")
    print("=" * 30)

    tests = [
        ("Lattice Edges", test_lattice_edges_and_groups),
        ("Snake Ordering", test_snake_ordering),
        ("Unsupported Lattices", test_unsupported_lattices),
        ("Sectors", test_sectors),
        ("Hamiltonian Terms", test_hamiltonian_terms),
        ("Jordan-Wigner Symmetries", test_jordan_wigner_hermitian_and_number_conserving),
        ("Two-Site Spectrum", test_jordan_wigner_two_site_spectrum),
        ("Sector Hamiltonian", test_sector_hamiltonian_matches_full_operator),
        ("Noninteracting Energies", test_noninteracting_ground_energy),
        ("Random Streams", test_random_streams_are_independent),
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
