"""
Energy estimation from measurement-circuit shot batches
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from core.circuits.ansatz import MeasurementCircuit, MeasurementSet
from core.circuits.circuit import to_native, apply_spin_echo
from core.mitigation.postselection import postselect, postselected_variance
from core.model.lattice import SectorSpec, TermGroup
from core.observables.models import ObservableEstimate, ObservableKind, Stage
from utils.random_streams import derive_seed
from .models import StateVector, ShotBatch
from .noise import NoiseModel
from .statevector import simulate, apply_moments, sample
from .trajectories import run_noisy

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GroupEstimate:
    """Sample mean of one measurement group"""
    group: TermGroup
    mean: float
    variance: float
    stderr: float
    retention: float
    shots: int

    def to_dict(self) -> Dict[str, float]:
        return {
            'group': self.group.name.lower(),
            'mean': self.mean,
            'variance': self.variance,
            'stderr': self.stderr,
            'retention': self.retention,
            'shots': self.shots,
        }


@dataclass
class EnergyEstimate:
    """Energy of one parameter point with the data diagonal observables need"""
    energy: ObservableEstimate
    groups: List[GroupEstimate]
    onsite_batch: ShotBatch
    shots_used: int
    metadata: Dict[str, object] = field(default_factory=dict)

    @property
    def value(self) -> float:
        return self.energy.value

    @property
    def stderr(self) -> float:
        return self.energy.stderr

    @property
    def retention(self) -> Dict[str, float]:
        return {g.group.name.lower(): g.retention for g in self.groups}

    def to_dict(self) -> Dict[str, object]:
        return {
            'energy': self.energy.to_dict(),
            'groups': [g.to_dict() for g in self.groups],
            'shots_used': self.shots_used,
        }


def _group_estimate(m: MeasurementCircuit, batch: ShotBatch, kept: ShotBatch, retention: float) -> GroupEstimate:
    values = m.shot_values(kept.bits())
    variance = float(np.var(values, ddof=1)) if values.size > 1 else 0.0
    stderr = math.sqrt(postselected_variance(variance, batch.shots, retention))
    return GroupEstimate(m.group, float(values.mean()), variance, stderr, retention, kept.shots)


def measure_groups(measurements: MeasurementSet, shots: int, seed: int,
                   noise: Optional[NoiseModel] = None, echo: bool = False) -> Dict[TermGroup, ShotBatch]:
    """
    Raw shot batch of every measurement circuit.

    Without noise the shared prefix is simulated once and each circuit only
    adds its own final moment. Noisy circuits are compiled to native form
    (optionally spin-echoed) and sampled by trajectories.
    """
    if shots < 1:
        raise ValueError(f"shots per group must be >= 1, got {shots}")
    batches: Dict[TermGroup, ShotBatch] = {}
    if noise is None or noise.is_noiseless:
        prefix = simulate(measurements.prefix).amplitudes
        n = measurements.base.n_qubits
        for m in measurements:
            final = StateVector(n, apply_moments(prefix, m.suffix, n))
            batches[m.group] = sample(final, shots, derive_seed(seed, "group", int(m.group)))
        return batches

    for m in measurements:
        native = to_native(m.circuit, noise)
        if echo:
            native = apply_spin_echo(native)
        batches[m.group] = run_noisy(native, noise, shots, derive_seed(seed, "group", int(m.group)))
    return batches


def estimate_energy(measurements: MeasurementSet, sector: SectorSpec, shots: int, seed: int,
                    noise: Optional[NoiseModel] = None, echo: bool = False) -> EnergyEstimate:
    """
    Postselected energy estimate summed over measurement groups.

    Args:
        measurements: circuits from build_measurement_circuits
        sector: occupation used for postselection
        shots: shots per measurement circuit
        seed: master seed; each group draws from its own derived seed
        noise: trajectory noise model (None for the exact sampler)
        echo: spin-echo the native circuits

    Raises:
        EmptyPostselectionError: every shot of some group was rejected
    """
    batches = measure_groups(measurements, shots, seed, noise, echo)
    groups: List[GroupEstimate] = []
    onsite_batch = None
    for m in measurements:
        batch = batches[m.group]
        kept, retention = postselect(batch, sector, measurements.layout)
        groups.append(_group_estimate(m, batch, kept, retention))
        if m.group == TermGroup.ONSITE:
            onsite_batch = kept

    value = sum(g.mean for g in groups)
    stderr = math.sqrt(sum(g.stderr ** 2 for g in groups))
    energy = ObservableEstimate(value, stderr, ObservableKind.ENERGY,
                                stages=(Stage.RAW.value, Stage.PS.value))
    logger.debug("E = %.6f +- %.6f over %d groups", value, stderr, len(groups))
    return EnergyEstimate(energy, groups, onsite_batch, shots * len(groups),
                          {'faulty_shots': sum(int(b.metadata.get('faulty_shots', 0)) for b in batches.values())})


def exact_energy(state: StateVector, measurements: MeasurementSet) -> float:
    """Noiseless grouped-Hamiltonian energy of the state reached after measurements.prefix"""
    n = measurements.base.n_qubits
    total = 0.0
    for m in measurements:
        final = apply_moments(state.amplitudes, m.suffix, n)
        total += m.expectation(np.abs(final) ** 2, n)
    return total
