"""
Fermi-Hubbard lattices, occupation sectors and fermionic term lists
"""

from dataclasses import dataclass
from enum import Enum, IntEnum
from math import comb
from typing import List, Tuple, Iterator

import numpy as np

from core.errors import UnsupportedLatticeError, ConfigError

MAX_MODES = 32  # soft cap for statevector feasibility


class Spin(IntEnum):
    """Spin label; the spin-down block follows the spin-up block"""
    UP = 0
    DOWN = 1


class TermKind(Enum):
    """Kinds of Hamiltonian terms"""
    HOPPING = "hopping"  # -t (a_i^dag a_j + h.c.), t = 1
    ONSITE = "onsite"    # U n_i_up n_i_down


class TermGroup(IntEnum):
    """Groups of mutually disjoint terms, one measurement circuit each"""
    ONSITE = 0
    HORIZONTAL = 1  # 2xLy rungs
    VERTICAL_1 = 2  # 1xLy bonds (2k, 2k+1); 2xLy bonds not adjacent in the snake
    VERTICAL_2 = 3  # 1xLy bonds (2k+1, 2k+2); 2xLy bonds adjacent in the snake


@dataclass(frozen=True)
class LatticeSpec:
    """Open-boundary Lx x Ly lattice with onsite interaction U (units of t)"""
    Lx: int
    Ly: int
    U: float

    def __post_init__(self):
        if self.Lx not in (1, 2):
            raise UnsupportedLatticeError(f"only Lx in (1, 2) is supported, got Lx={self.Lx}")
        if self.Ly < 1 or self.Lx * self.Ly < 2:
            raise UnsupportedLatticeError(f"lattice {self.Lx}x{self.Ly} needs at least 2 sites")
        if not np.isfinite(self.U):
            raise ConfigError(f"U must be finite, got {self.U}")
        if 2 * self.Lx * self.Ly > MAX_MODES:
            raise UnsupportedLatticeError(f"{2 * self.Lx * self.Ly} modes exceed the cap of {MAX_MODES}")

    @property
    def n_sites(self) -> int:
        return self.Lx * self.Ly

    @property
    def n_modes(self) -> int:
        return 2 * self.n_sites

    @property
    def label(self) -> str:
        return f"{self.Lx}x{self.Ly}"

    def site(self, x: int, y: int) -> int:
        """Row-major site index"""
        return y * self.Lx + x

    def coordinates(self, site: int) -> Tuple[int, int]:
        return site % self.Lx, site // self.Lx

    def snake_position(self, site: int) -> int:
        """Position of a site along the serpentine line of one spin sector"""
        x, y = self.coordinates(site)
        return y * self.Lx + (x if y % 2 == 0 else self.Lx - 1 - x)

    def horizontal_edges(self) -> List[Tuple[int, int]]:
        return [(self.site(0, y), self.site(1, y)) for y in range(self.Ly)] if self.Lx == 2 else []

    def vertical_edges(self) -> List[Tuple[int, int]]:
        return [(self.site(x, y), self.site(x, y + 1)) for y in range(self.Ly - 1) for x in range(self.Lx)]

    def edges(self) -> List[Tuple[int, int]]:
        """All nearest-neighbor bonds: horizontal before vertical, row-major"""
        return self.horizontal_edges() + self.vertical_edges()

    def edge_group(self, edge: Tuple[int, int]) -> TermGroup:
        """Measurement/ansatz group of a bond"""
        (x0, y0), (x1, y1) = self.coordinates(edge[0]), self.coordinates(edge[1])
        if y0 == y1:
            return TermGroup.HORIZONTAL
        y = min(y0, y1)
        if self.Lx == 1:
            return TermGroup.VERTICAL_1 if y % 2 == 0 else TermGroup.VERTICAL_2
        return TermGroup.VERTICAL_1 if x0 == y % 2 else TermGroup.VERTICAL_2

    def hopping_groups(self) -> List[TermGroup]:
        """Hopping groups in parameter order"""
        if self.Lx == 1:
            return [TermGroup.VERTICAL_1, TermGroup.VERTICAL_2]
        return [TermGroup.HORIZONTAL, TermGroup.VERTICAL_1, TermGroup.VERTICAL_2]

    @property
    def params_per_layer(self) -> int:
        return 1 + len(self.hopping_groups())

    def reflections(self) -> List[np.ndarray]:
        """Site permutations of the reflection group (identity first)"""
        images = []
        for flip_x in ((False, True) if self.Lx > 1 else (False,)):
            for flip_y in (False, True):
                perm = np.empty(self.n_sites, dtype=int)
                for s in range(self.n_sites):
                    x, y = self.coordinates(s)
                    perm[s] = self.site(self.Lx - 1 - x if flip_x else x, self.Ly - 1 - y if flip_y else y)
                images.append(perm)
        return images


@dataclass(frozen=True)
class SectorSpec:
    """Per-spin occupation numbers"""
    n_up: int
    n_down: int

    @property
    def n_occ(self) -> int:
        return self.n_up + self.n_down

    def validate(self, lattice: LatticeSpec):
        if not (0 <= self.n_up <= lattice.n_sites and 0 <= self.n_down <= lattice.n_sites):
            raise ConfigError(f"sector ({self.n_up}, {self.n_down}) outside 0..{lattice.n_sites}")

    def dimension(self, lattice: LatticeSpec) -> int:
        return comb(lattice.n_sites, self.n_up) * comb(lattice.n_sites, self.n_down)

    def particle_hole_partner(self, lattice: LatticeSpec) -> 'SectorSpec':
        return SectorSpec(lattice.n_sites - self.n_up, lattice.n_sites - self.n_down)

    def spin_flipped(self) -> 'SectorSpec':
        return SectorSpec(self.n_down, self.n_up)

    @classmethod
    def from_occupation(cls, n_occ: int) -> 'SectorSpec':
        """Odd totals carry the extra spin-up particle"""
        return cls((n_occ + 1) // 2, n_occ // 2)


@dataclass(frozen=True)
class FermionicTerm:
    """One Hamiltonian term on lattice sites (hopping pair or single onsite site)"""
    kind: TermKind
    sites: Tuple[int, ...]
    spin: Spin  # spin of a hopping term; UP for onsite terms
    coefficient: float
    group_id: int

    def modes(self, layout) -> Tuple[int, ...]:
        """Qubit indices touched by the term under a layout"""
        if self.kind == TermKind.ONSITE:
            return layout.mode_index(self.sites[0], Spin.UP), layout.mode_index(self.sites[0], Spin.DOWN)
        return tuple(sorted(layout.mode_index(s, self.spin) for s in self.sites))


def build_hamiltonian(lattice: LatticeSpec) -> List[FermionicTerm]:
    """
    Term list of the open-boundary Fermi-Hubbard Hamiltonian.

    One hopping term per bond per spin (coefficient -1) followed by one
    onsite term per site (coefficient U). Bonds are enumerated horizontal
    before vertical in row-major order.
    """
    terms = []
    for edge in lattice.edges():
        group = lattice.edge_group(edge)
        for spin in Spin:
            terms.append(FermionicTerm(TermKind.HOPPING, edge, spin, -1.0, int(group)))
    for site in range(lattice.n_sites):
        terms.append(FermionicTerm(TermKind.ONSITE, (site,), Spin.UP, float(lattice.U), int(TermGroup.ONSITE)))
    return terms


def iter_groups(terms: List[FermionicTerm]) -> Iterator[Tuple[int, List[FermionicTerm]]]:
    """Terms bucketed by group id, ascending"""
    for group in sorted({t.group_id for t in terms}):
        yield group, [t for t in terms if t.group_id == group]


def single_particle_hamiltonian(lattice: LatticeSpec) -> np.ndarray:
    """L x L hopping matrix of one spin sector, indexed by snake position"""
    h = np.zeros((lattice.n_sites, lattice.n_sites))
    for a, b in lattice.edges():
        p, q = lattice.snake_position(a), lattice.snake_position(b)
        h[p, q] = h[q, p] = -1.0
    return h
