"""
Symmetry-based mitigation: time reversal, particle-hole, reflections and run selection
"""

import logging
import math
from typing import Dict, Mapping, Sequence, Tuple, Union

import numpy as np

from core.model.lattice import LatticeSpec, SectorSpec
from core.observables.models import ObservableEstimate, Stage

logger = logging.getLogger(__name__)

Table = Dict[str, ObservableEstimate]


def _average(a: ObservableEstimate, b: ObservableEstimate, stage: Stage) -> ObservableEstimate:
    """Mean of two estimates; identical inputs come back unchanged"""
    if a == b:
        return a.staged(stage, a.value, a.stderr)
    return a.staged(stage, 0.5 * (a.value + b.value), 0.5 * math.hypot(a.stderr, b.stderr))


def time_reversal_average(plus: ObservableEstimate, minus: ObservableEstimate) -> ObservableEstimate:
    """
    Average of the estimates at theta and -theta.

    The standard error is half the root-sum-square of the inputs. Identical
    inputs (theta = 0 runs the same circuit twice) pass through unchanged.
    """
    return _average(plus, minus, Stage.SYM)


def time_reversal_table(plus: Table, minus: Table) -> Table:
    return {key: time_reversal_average(plus[key], minus[key]) for key in plus if key in minus}


def negated(params: Sequence[float]) -> np.ndarray:
    return -np.asarray(params, dtype=float)


# Particle-hole

def ph_value(key: str, value: float, lattice: LatticeSpec, sector: SectorSpec) -> float:
    """Image of one observable under n -> 1 - n, taking sector to its partner"""
    name = key.split("/")[0]
    if name == "energy":
        return value + lattice.U * (lattice.n_sites - sector.n_occ)
    if name in ("n_up", "n_down"):
        return 1.0 - value
    if name == "n":
        return 2.0 - value
    if name == "sz":
        return -value
    # connected correlations and the staggered sum are invariant
    return value


def spin_flip_key(key: str) -> str:
    name, _, rest = key.partition("/")
    swapped = {"n_up": "n_down", "n_down": "n_up"}.get(name, name)
    return f"{swapped}/{rest}" if rest else swapped


def spin_flip(table: Table) -> Table:
    """Exchange spin labels: n_up <-> n_down and S^z -> -S^z"""
    flipped: Table = {}
    for key, estimate in table.items():
        value = -estimate.value if key.split("/")[0] == "sz" else estimate.value
        flipped[spin_flip_key(key)] = ObservableEstimate(
            value, estimate.stderr, estimate.kind, estimate.sites, estimate.stages, estimate.flags)
    return flipped


def ph_transform(table: Table, lattice: LatticeSpec, sector: SectorSpec) -> Tuple[SectorSpec, Table]:
    """
    Observables of sector (n_up, n_down) mapped to (L - n_up, L - n_down).

    Energies shift by U (L - N_occ); densities map n -> 1 - n per spin.
    """
    partner = sector.particle_hole_partner(lattice)
    mapped = {
        key: ObservableEstimate(ph_value(key, e.value, lattice, sector), e.stderr, e.kind, e.sites, e.stages, e.flags)
        for key, e in table.items()
    }
    return partner, mapped


def partner_table(table: Table, partner: SectorSpec, lattice: LatticeSpec, target: SectorSpec) -> Table:
    """
    Transform a partner cell's observables onto the target sector, applying
    a spin flip when the particle-hole image has its spins reversed.
    """
    image, mapped = ph_transform(table, lattice, partner)
    if image == target:
        return mapped
    if image.spin_flipped() == target:
        return spin_flip(mapped)
    raise ValueError(f"sector {partner} is not a particle-hole partner of {target}")


def ph_average(estimate: ObservableEstimate, transformed: ObservableEstimate) -> ObservableEstimate:
    """Mean of an estimate and its transformed particle-hole partner"""
    return _average(estimate, transformed, Stage.PHS)


def ph_average_table(own: Table, transformed: Table) -> Table:
    return {key: ph_average(own[key], transformed[key]) if key in transformed else own[key] for key in own}


# Reflections

def reflection_average(values: np.ndarray, lattice: LatticeSpec) -> np.ndarray:
    """Average of site-indexed values (vector or site x site matrix) over lattice reflections"""
    values = np.asarray(values, dtype=float)
    images = lattice.reflections()
    if values.ndim == 1:
        return np.mean([values[perm] for perm in images], axis=0)
    return np.mean([values[np.ix_(perm, perm)] for perm in images], axis=0)


def reflection_table(table: Table, lattice: LatticeSpec) -> Table:
    """
    Reflection-average the single-site and spin-correlation entries.

    C^c(0, i) is tied to a fixed reference site and is left unchanged.
    """
    n_sites = lattice.n_sites
    result = {key: estimate.staged(Stage.REFLECTION, estimate.value) for key, estimate in table.items()}
    for name in ("n_up", "n_down", "n", "sz"):
        keys = [f"{name}/{i}" for i in range(n_sites)]
        if not all(k in table for k in keys):
            continue
        averaged = reflection_average(np.array([table[k].value for k in keys]), lattice)
        for k, value in zip(keys, averaged):
            result[k] = table[k].staged(Stage.REFLECTION, value)

    if all(f"cs/{i}/{j}" in table for i in range(n_sites) for j in range(i, n_sites)):
        matrix = np.zeros((n_sites, n_sites))
        for i in range(n_sites):
            for j in range(i, n_sites):
                matrix[i, j] = matrix[j, i] = table[f"cs/{i}/{j}"].value
        averaged = reflection_average(matrix, lattice)
        for i in range(n_sites):
            for j in range(i, n_sites):
                key = f"cs/{i}/{j}"
                result[key] = table[key].staged(Stage.REFLECTION, averaged[i, j])
    return result


def select_run(energies: Sequence[Union[float, ObservableEstimate]]) -> int:
    """Index of the lowest raw energy; ties go to the earliest run"""
    if not energies:
        raise ValueError("select_run needs at least one run")
    values = [e.value if isinstance(e, ObservableEstimate) else float(e) for e in energies]
    return int(np.argmin(values))


def sweep_partners(sectors: Mapping[int, SectorSpec], lattice: LatticeSpec) -> Dict[int, int]:
    """N_occ -> 2L - N_occ for every cell whose partner is also present"""
    total = 2 * lattice.n_sites
    return {n: total - n for n in sectors if total - n in sectors}

