"""
Noiseless ansatz evaluation, classical VQE optimum and FLO reference values
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from core.circuits.ansatz import (
    build_initial_prep, build_ehv_layers, expected_param_count, onsite_indices, split_params,
)
from core.errors import NotFloError
from core.model.jordan_wigner import JwLayout, LayoutMode
from core.model.lattice import LatticeSpec, SectorSpec
from core.observables.diagonal import DiagonalStats
from core.simulator.models import StateVector
from core.simulator.statevector import simulate, apply_moments
from utils.random_streams import random_stream
from .exact import SectorBasis, sector_hamiltonian

logger = logging.getLogger(__name__)


class AnsatzEvaluator:
    """
    Exact ansatz energies of one (lattice, sector, depth).

    The prepared state and the sector Hamiltonian are built once; each call
    only applies the variational layers.
    """

    def __init__(self, lattice: LatticeSpec, sector: SectorSpec, layers: int,
                 layout: Optional[JwLayout] = None):
        self.lattice = lattice
        self.sector = sector
        self.layers = layers
        self.layout = layout or JwLayout(lattice, LayoutMode.ZIGZAG)
        self.n_params = expected_param_count(lattice, layers)
        self.prep_state = simulate(build_initial_prep(lattice, sector, self.layout))
        self.basis = SectorBasis.build(lattice, sector)
        self.hamiltonian = sector_hamiltonian(self.basis, self.layout)
        self.evaluations = 0

    def state(self, params: Sequence[float]) -> StateVector:
        n = self.prep_state.n_qubits
        circuit = build_ehv_layers(self.lattice, params, self.layers, self.layout)
        return StateVector(n, apply_moments(self.prep_state.amplitudes, circuit.moments, n))

    def sector_vector(self, params: Sequence[float]) -> np.ndarray:
        return self.basis.restrict(self.state(params).amplitudes)

    def energy(self, params: Sequence[float]) -> float:
        self.evaluations += 1
        v = self.sector_vector(params)
        return float(np.real(np.vdot(v, self.hamiltonian @ v)))

    __call__ = energy

    def stats(self, params: Sequence[float]) -> DiagonalStats:
        """Exact diagonal statistics of the ansatz state"""
        probabilities = np.abs(self.sector_vector(params)) ** 2
        return DiagonalStats.from_distribution(self.basis.states, probabilities, self.lattice, self.layout)


@dataclass(frozen=True)
class VqeOptimum:
    params: np.ndarray
    energy: float
    evaluations: int


def simulate_vqe_optimum(lattice: LatticeSpec, sector: SectorSpec, layers: int, restarts: int = 8,
                         seed: int = 0, layout: Optional[JwLayout] = None) -> VqeOptimum:
    """
    Best local minimum of the exact ansatz energy.

    BFGS from the zero start and from `restarts` uniform random starts in
    [-pi, pi); the best point is polished once with Nelder-Mead. This is a
    local search and carries no global-optimality guarantee.
    """
    if layers < 1:
        raise ValueError(f"layers must be >= 1, got {layers}")
    evaluator = AnsatzEvaluator(lattice, sector, layers, layout)
    rng = random_stream(seed, "vqe-restarts")
    starts = [np.zeros(evaluator.n_params)]
    starts += [rng.uniform(-math.pi, math.pi, evaluator.n_params) for _ in range(restarts)]

    best_x, best_f = None, math.inf
    for k, x0 in enumerate(starts):
        result = minimize(evaluator, x0, method='BFGS', options={'gtol': 1e-8})
        logger.debug("restart %d: E = %.8f (%d evaluations)", k, result.fun, result.nfev)
        if result.fun < best_f:
            best_x, best_f = np.asarray(result.x), float(result.fun)

    polish = minimize(evaluator, best_x, method='Nelder-Mead',
                      options={'xatol': 1e-8, 'fatol': 1e-12, 'maxiter': 2000 * evaluator.n_params})
    if polish.fun < best_f:
        best_x, best_f = np.asarray(polish.x), float(polish.fun)
    logger.info("VQE optimum %s U=%g %s depth %d: E = %.6f", lattice.label, lattice.U, sector, layers, best_f)
    return VqeOptimum(best_x, best_f, evaluator.evaluations)


@dataclass(frozen=True)
class FloReference:
    """Exact energy and diagonal statistics of an FLO circuit"""
    energy: float
    stats: DiagonalStats


def require_flo(lattice: LatticeSpec, params: Sequence[float], layers: int):
    """Raise NotFloError unless every onsite angle is exactly zero"""
    onsite = split_params(lattice, params, layers)[:, 0]
    nonzero = [i for i, phi in zip(onsite_indices(lattice, layers), onsite) if phi != 0.0]
    if nonzero:
        raise NotFloError(f"onsite parameters {nonzero} are nonzero; circuit is not FLO")


def flo_reference(lattice: LatticeSpec, sector: SectorSpec, params: Sequence[float], layers: int,
                  evaluator: Optional[AnsatzEvaluator] = None) -> FloReference:
    """
    Exact values of an ansatz circuit with zero onsite angles.

    Evaluated by direct statevector simulation.

    Raises:
        NotFloError: some onsite angle is nonzero
    """
    require_flo(lattice, params, layers)
    evaluator = evaluator or AnsatzEvaluator(lattice, sector, layers)
    return FloReference(evaluator.energy(params), evaluator.stats(params))
