"""
Charge and spin observables from diagonal (onsite-circuit) measurements
"""

import logging
import math
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Union

import numpy as np

from core.errors import UndefinedCorrelationError, MissingEnergyError
from core.mitigation.postselection import postselected_variance
from core.model.jordan_wigner import JwLayout
from core.model.lattice import LatticeSpec, Spin
from .models import ObservableEstimate, ObservableKind

logger = logging.getLogger(__name__)

JACKKNIFE_BLOCKS = 20
CORRELATION_FLOOR = 1e-12


class DiagonalStats:
    """
    Weighted bitstrings of one occupation sector.

    Sampled data carries equal weights and a shot count, so every quantity
    gets a postselection-corrected standard error. Exact data (weights are
    basis-state probabilities) has no shot count and zero standard errors.
    """

    def __init__(self, lattice: LatticeSpec, layout: JwLayout, bits: np.ndarray, weights: np.ndarray,
                 shots: Optional[int] = None, retention: float = 1.0):
        bits = np.asarray(bits, dtype=np.int64)
        if bits.ndim != 2 or bits.shape[0] == 0:
            raise ValueError("diagonal statistics need at least one bitstring")
        self.lattice = lattice
        self.layout = layout
        self.bits = bits
        self.weights = np.asarray(weights, dtype=float) / np.sum(weights)
        self.shots = shots
        self.retention = retention

        n_sites = lattice.n_sites
        up = [layout.mode_index(s, Spin.UP) for s in range(n_sites)]
        down = [layout.mode_index(s, Spin.DOWN) for s in range(n_sites)]
        self.n_up = bits[:, up]
        self.n_down = bits[:, down]
        self.charge = self.n_up + self.n_down
        self.sz = self.n_up - self.n_down

    @classmethod
    def from_batch(cls, batch, lattice: LatticeSpec, layout: JwLayout,
                   total_shots: Optional[int] = None, retention: Optional[float] = None) -> 'DiagonalStats':
        """Statistics of a postselected onsite-circuit batch"""
        if batch.shots == 0:
            raise ValueError("empty shot batch")
        if retention is None:
            retention = batch.shots / total_shots if total_shots else 1.0
        total = total_shots or batch.shots
        return cls(lattice, layout, batch.bits(), np.ones(batch.shots), shots=total, retention=retention)

    @classmethod
    def from_distribution(cls, indices: np.ndarray, probabilities: np.ndarray,
                          lattice: LatticeSpec, layout: JwLayout) -> 'DiagonalStats':
        """Exact statistics of basis indices with probabilities"""
        indices = np.asarray(indices, dtype=np.int64)
        n = layout.n_qubits
        keep = probabilities > 0
        bits = (indices[keep, None] >> (n - 1 - np.arange(n))) & 1
        return cls(lattice, layout, bits, probabilities[keep])

    @property
    def is_exact(self) -> bool:
        return self.shots is None

    # estimation helpers

    def _linear(self, values: np.ndarray, kind: ObservableKind, sites: Sequence[int]) -> ObservableEstimate:
        mean = float(self.weights @ values)
        stderr = 0.0
        if not self.is_exact:
            kept = self.bits.shape[0]
            variance = float(self.weights @ (values - mean) ** 2) * (kept / (kept - 1) if kept > 1 else 0.0)
            stderr = math.sqrt(postselected_variance(variance, self.shots, self.retention))
        return ObservableEstimate(mean, stderr, kind, tuple(int(s) for s in sites))

    def _nonlinear(self, statistic: Callable[[np.ndarray], float], kind: ObservableKind,
                   sites: Sequence[int]) -> ObservableEstimate:
        """Weighted statistic with a delete-one-block jackknife error"""
        value = statistic(np.ones(self.bits.shape[0], dtype=bool))
        stderr = 0.0
        kept = self.bits.shape[0]
        if not self.is_exact and kept >= 2 * JACKKNIFE_BLOCKS:
            blocks = np.array_split(np.arange(kept), JACKKNIFE_BLOCKS)
            estimates = []
            for block in blocks:
                mask = np.ones(kept, dtype=bool)
                mask[block] = False
                try:
                    estimates.append(statistic(mask))
                except UndefinedCorrelationError:
                    continue
            if len(estimates) > 1:
                estimates = np.asarray(estimates)
                b = len(estimates)
                variance = (b - 1) / b * float(np.sum((estimates - estimates.mean()) ** 2))
                variance *= 1.0 + (1.0 - self.retention) / (self.retention * self.shots)
                stderr = math.sqrt(variance)
        return ObservableEstimate(float(value), stderr, kind, tuple(int(s) for s in sites))

    def _mean(self, values: np.ndarray, mask: np.ndarray) -> float:
        w = self.weights[mask]
        return float(w @ values[mask] / w.sum())

    # single-site quantities

    def density(self, site: int, spin: Optional[Spin] = None) -> ObservableEstimate:
        """<n_i> (both spins) or <n_i,sigma>"""
        if spin is None:
            values = self.charge[:, site]
        else:
            values = (self.n_up if spin == Spin.UP else self.n_down)[:, site]
        return self._linear(values, ObservableKind.DENSITY, (site,))

    def spin_density(self, site: int) -> ObservableEstimate:
        """<S^z_i> with S^z_i = n_i,up - n_i,down"""
        return self._linear(self.sz[:, site], ObservableKind.SPIN, (site,))

    def densities(self) -> List[ObservableEstimate]:
        return [self.density(i) for i in range(self.lattice.n_sites)]

    def spin_densities(self) -> List[ObservableEstimate]:
        return [self.spin_density(i) for i in range(self.lattice.n_sites)]

    def mode_densities(self) -> np.ndarray:
        """(2, L) array of <n_i,sigma>"""
        return np.vstack([self.weights @ self.n_up, self.weights @ self.n_down])

    def moment_matrix(self) -> np.ndarray:
        """<n_p n_q> over all 2L modes in qubit order"""
        return np.einsum('s,sp,sq->pq', self.weights, self.bits, self.bits)

    # correlations

    def charge_correlation(self, site: int, reference: int = 0) -> ObservableEstimate:
        """
        Normalized charge correlation C^c(reference, site).

        Raises:
            UndefinedCorrelationError: n at the reference site is deterministic
        """
        ref = self.charge[:, reference]
        other = self.charge[:, site]

        def statistic(mask: np.ndarray) -> float:
            mean_ref = self._mean(ref, mask)
            denominator = self._mean(ref * ref, mask) - mean_ref ** 2
            if denominator <= CORRELATION_FLOOR:
                raise UndefinedCorrelationError(
                    f"charge at site {reference} is deterministic; C^c({reference}, {site}) undefined")
            return (self._mean(ref * other, mask) - mean_ref * self._mean(other, mask)) / denominator

        return self._nonlinear(statistic, ObservableKind.CORR_CHARGE, (reference, site))

    def spin_correlation(self, i: int, j: int) -> ObservableEstimate:
        """C^s(i, j) = <S^z_i S^z_j> - <S^z_i><S^z_j>"""
        a, b = self.sz[:, i], self.sz[:, j]

        def statistic(mask: np.ndarray) -> float:
            return self._mean(a * b, mask) - self._mean(a, mask) * self._mean(b, mask)

        return self._nonlinear(statistic, ObservableKind.CORR_SPIN, (i, j))

    def staggered_spin(self) -> ObservableEstimate:
        """sum_s (-1)^s <S^z_s S^z_s+1> along the snake"""
        order = self.layout.position_sites
        signs = np.array([(-1) ** s for s in range(len(order) - 1)], dtype=float)
        values = np.sum(signs * self.sz[:, order[:-1]] * self.sz[:, order[1:]], axis=1)
        return self._linear(values, ObservableKind.STAGGERED, ())

    def table(self) -> Dict[str, ObservableEstimate]:
        """
        Every observable keyed by name: n_up/i, n_down/i, n/i, sz/i, cc/i
        (C^c(0, i), absent when undefined), cs/i/j for i <= j and staggered.
        """
        n_sites = self.lattice.n_sites
        table: Dict[str, ObservableEstimate] = {}
        for i in range(n_sites):
            table[f"n_up/{i}"] = self.density(i, Spin.UP)
            table[f"n_down/{i}"] = self.density(i, Spin.DOWN)
            table[f"n/{i}"] = self.density(i)
            table[f"sz/{i}"] = self.spin_density(i)
        try:
            for i in range(n_sites):
                table[f"cc/{i}"] = self.charge_correlation(i)
        except UndefinedCorrelationError as e:
            logger.warning(str(e))
        for i in range(n_sites):
            for j in range(i, n_sites):
                table[f"cs/{i}/{j}"] = self.spin_correlation(i, j)
        table["staggered"] = self.staggered_spin()
        return table


def diagonal_observables(batch, lattice: LatticeSpec, layout: JwLayout,
                         total_shots: Optional[int] = None) -> DiagonalStats:
    """Densities and correlations from a postselected onsite batch"""
    return DiagonalStats.from_batch(batch, lattice, layout, total_shots=total_shots)


def charge_correlation(stats: DiagonalStats, site: int) -> ObservableEstimate:
    return stats.charge_correlation(site)


def spin_correlation(stats: DiagonalStats, i: int, j: int) -> ObservableEstimate:
    return stats.spin_correlation(i, j)


def staggered_spin(stats: DiagonalStats) -> ObservableEstimate:
    return stats.staggered_spin()


EnergyLike = Union[float, ObservableEstimate]


def _as_estimate(value: EnergyLike) -> ObservableEstimate:
    if isinstance(value, ObservableEstimate):
        return value
    return ObservableEstimate(float(value), 0.0)


def chemical_potential(energies: Mapping[int, EnergyLike], n_occ: int) -> ObservableEstimate:
    """mu(N) = E(N) - E(N-1)"""
    for n in (n_occ, n_occ - 1):
        if n not in energies:
            raise MissingEnergyError(f"E({n}) missing for mu({n_occ})")
    upper, lower = _as_estimate(energies[n_occ]), _as_estimate(energies[n_occ - 1])
    return ObservableEstimate(upper.value - lower.value, math.hypot(upper.stderr, lower.stderr),
                              ObservableKind.MU, (n_occ,))


def chemical_derivative(energies: Mapping[int, EnergyLike], n_occ: int) -> ObservableEstimate:
    """mu'(N) = E(N+1) - 2E(N) + E(N-1)"""
    for n in (n_occ - 1, n_occ, n_occ + 1):
        if n not in energies:
            raise MissingEnergyError(f"E({n}) missing for mu'({n_occ})")
    above, centre, below = (_as_estimate(energies[n]) for n in (n_occ + 1, n_occ, n_occ - 1))
    stderr = math.sqrt(above.stderr ** 2 + 4 * centre.stderr ** 2 + below.stderr ** 2)
    return ObservableEstimate(above.value - 2 * centre.value + below.value, stderr,
                              ObservableKind.MU_PRIME, (n_occ,))


def chemical_potentials(energies: Mapping[int, EnergyLike]) -> Dict[str, Dict[int, ObservableEstimate]]:
    """
    mu for every N whose lower neighbor is present, mu' for every even N
    with both neighbors present. Error bars assume independent runs.
    """
    mu = {n: chemical_potential(energies, n) for n in sorted(energies) if n - 1 in energies}
    mu_prime = {
        n: chemical_derivative(energies, n)
        for n in sorted(energies)
        if n % 2 == 0 and n - 1 in energies and n + 1 in energies
    }
    return {'mu': mu, 'mu_prime': mu_prime}
