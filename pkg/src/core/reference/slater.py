"""
Optimized Slater determinant energies via the Slater-Condon rules
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from core.model.lattice import LatticeSpec, SectorSpec, single_particle_hamiltonian
from utils.random_streams import random_stream

logger = logging.getLogger(__name__)

START_PERTURBATION = 0.5


@dataclass(frozen=True)
class SlaterParams:
    """Hermitian L x L matrix whose lowest eigenvectors define the determinant"""
    h: np.ndarray

    @classmethod
    def from_vector(cls, x: np.ndarray, n_sites: int) -> 'SlaterParams':
        """L diagonal entries, then real and imaginary upper-triangle parts"""
        upper = np.triu_indices(n_sites, k=1)
        n_upper = upper[0].size
        h = np.diag(x[:n_sites]).astype(complex)
        h[upper] = x[n_sites:n_sites + n_upper] + 1j * x[n_sites + n_upper:]
        h[(upper[1], upper[0])] = np.conj(h[upper])
        return cls(h)

    def to_vector(self) -> np.ndarray:
        n_sites = self.h.shape[0]
        upper = np.triu_indices(n_sites, k=1)
        return np.concatenate([np.real(np.diag(self.h)), np.real(self.h[upper]), np.imag(self.h[upper])])


def density_matrix(h: np.ndarray, n_particles: int) -> np.ndarray:
    """One-body density matrix of the n lowest eigenvectors of h"""
    if n_particles == 0:
        return np.zeros(h.shape, dtype=complex)
    _, vectors = np.linalg.eigh(h)
    occupied = vectors[:, :n_particles]
    return occupied.conj() @ occupied.T


def slater_energy(h: np.ndarray, lattice: LatticeSpec, sector: SectorSpec) -> float:
    """Hubbard energy of the determinant built from h (shared by both spins)"""
    hopping = single_particle_hamiltonian(lattice)
    rho_up = density_matrix(h, sector.n_up)
    rho_down = density_matrix(h, sector.n_down)
    kinetic = np.real(np.trace(hopping @ rho_up) + np.trace(hopping @ rho_down))
    interaction = lattice.U * float(np.real(np.sum(np.diag(rho_up) * np.diag(rho_down))))
    return float(kinetic + interaction)


@dataclass(frozen=True)
class SlaterResult:
    energy: float
    params: SlaterParams


def optimal_slater(lattice: LatticeSpec, sector: SectorSpec, restarts: int = 4, seed: int = 0) -> SlaterResult:
    """
    Lowest Slater-determinant energy found by BFGS over Hermitian h.

    The first start is the hopping matrix itself; the others perturb it
    with Hermitian Gaussian noise.
    """
    if restarts < 1:
        raise ValueError(f"restarts must be >= 1, got {restarts}")
    n_sites = lattice.n_sites
    base = SlaterParams(single_particle_hamiltonian(lattice).astype(complex)).to_vector()
    rng = random_stream(seed, "slater-restarts")

    def objective(x: np.ndarray) -> float:
        return slater_energy(SlaterParams.from_vector(x, n_sites).h, lattice, sector)

    best = None
    for k in range(restarts):
        x0 = base if k == 0 else base + START_PERTURBATION * rng.standard_normal(base.size)
        result = minimize(objective, x0, method='BFGS')
        energy, x = float(result.fun), result.x
        start = objective(x0)
        if start < energy:
            energy, x = start, x0
        if best is None or energy < best.energy:
            best = SlaterResult(energy, SlaterParams.from_vector(x, n_sites))
    logger.info("optimal Slater %s U=%g %s: E = %.6f", lattice.label, lattice.U, sector, best.energy)
    return best


def u0_slater_energy(lattice: LatticeSpec, sector: SectorSpec) -> float:
    """Energy of the noninteracting ground-state determinant"""
    return slater_energy(single_particle_hamiltonian(lattice).astype(complex), lattice, sector)
