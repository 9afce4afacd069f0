"""
Training with fermionic linear optics (TFLO)

Circuits with every onsite angle set to zero are classically simulable.
Their exact and noisy values train a linear noisy -> exact map that is
applied to the target estimate, followed by a coherent correction that
removes the map's residual error at the target's closest FLO point.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Sequence, Tuple

import numpy as np

from core.circuits.ansatz import expected_param_count, onsite_indices, zero_onsite
from core.model.lattice import LatticeSpec, SectorSpec
from core.observables.models import ObservableEstimate, Stage
from utils.random_streams import random_stream
from .errorbars import monte_carlo_errorbars

logger = logging.getLogger(__name__)

GRID_SIZE = 16
RANDOM_CANDIDATES = 256
TRAINING_POINTS = 16
SPREAD_THRESHOLD = 0.05
R2_THRESHOLD = 0.7
SLOPE_TOLERANCE = 1e-12


class TfloPath(Enum):
    """Correction actually applied to an observable"""
    FULL = "full"
    COHERENT_ONLY = "coherent-only"
    PASSTHROUGH = "noisy-passthrough"
    EMPTY = "empty-training"


# Training points

def flo_candidates(lattice: LatticeSpec, layers: int, seed: int = 0,
                   grid: int = GRID_SIZE, random_count: int = RANDOM_CANDIDATES) -> np.ndarray:
    """
    Candidate FLO parameter vectors (onsite angles zero).

    Depth 1: every point of a grid over [-pi, pi) in each hopping angle.
    Deeper circuits: uniform random draws.
    """
    if layers < 1:
        raise ValueError(f"layers must be >= 1, got {layers}")
    n_params = expected_param_count(lattice, layers)
    hopping = [i for i in range(n_params) if i not in set(onsite_indices(lattice, layers))]
    if layers == 1:
        axis = np.linspace(-math.pi, math.pi, grid, endpoint=False)
        candidates = np.zeros((grid ** len(hopping), n_params))
        for row, angles in enumerate(itertools.product(axis, repeat=len(hopping))):
            candidates[row, hopping] = angles
        return candidates
    rng = random_stream(seed, "tflo-candidates")
    candidates = rng.uniform(-math.pi, math.pi, size=(random_count, n_params))
    for k in onsite_indices(lattice, layers):
        candidates[:, k] = 0.0
    return candidates


def select_spread(values: Sequence[float], count: int) -> Tuple[List[int], bool]:
    """
    Greedy farthest-point selection on the value axis.

    Starts from the minimum and maximum and repeatedly adds the candidate
    farthest from everything chosen (earliest index on ties).

    Returns:
        (indices sorted by value, True when all values coincide)
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return [], False
    if np.ptp(values) <= SLOPE_TOLERANCE:
        logger.warning("all %d candidate values coincide; training spread collapsed", values.size)
        return list(range(min(count, values.size))), True

    chosen = [int(np.argmin(values)), int(np.argmax(values))][:count]
    distance = np.min(np.abs(values[:, None] - values[chosen][None, :]), axis=1)
    while len(chosen) < min(count, values.size):
        nxt = int(np.argmax(distance))
        chosen.append(nxt)
        distance = np.minimum(distance, np.abs(values - values[nxt]))
    return sorted(chosen, key=lambda i: (values[i], i)), False


@dataclass
class TfloPoint:
    """One FLO circuit with its exact values and (once measured) noisy estimates"""
    params: np.ndarray
    exact: Dict[str, float]
    noisy: Dict[str, ObservableEstimate] = field(default_factory=dict)


@dataclass
class TfloTrainingSet:
    points: List[TfloPoint]
    closest: TfloPoint
    collapsed: bool = False

    def series(self, key: str) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(exact, noisy, noisy stderr) of one observable over the training points"""
        points = [p for p in self.points if key in p.exact and key in p.noisy]
        exact = np.array([p.exact[key] for p in points])
        noisy = np.array([p.noisy[key].value for p in points])
        stderr = np.array([p.noisy[key].stderr for p in points])
        return exact, noisy, stderr


def choose_flo_points(lattice: LatticeSpec, sector: SectorSpec, layers: int, target_params: Sequence[float],
                      count: int = TRAINING_POINTS, seed: int = 0, evaluator=None) -> TfloTrainingSet:
    """
    Training set of FLO circuits with well-spread exact energies, plus the
    target's closest FLO point (its onsite angles zeroed).
    """
    from core.reference.vqe import AnsatzEvaluator, flo_reference

    evaluator = evaluator or AnsatzEvaluator(lattice, sector, layers)
    candidates = flo_candidates(lattice, layers, seed)
    energies = np.array([evaluator.energy(c) for c in candidates])
    indices, collapsed = select_spread(energies, count)
    points = []
    for i in indices:
        reference = flo_reference(lattice, sector, candidates[i], layers, evaluator)
        points.append(TfloPoint(candidates[i], _exact_table(reference)))
    closest_params = zero_onsite(lattice, target_params, layers)
    closest = TfloPoint(closest_params, _exact_table(flo_reference(lattice, sector, closest_params, layers, evaluator)))
    logger.info("TFLO training: %d points, exact energies %.4f .. %.4f",
                len(points), points[0].exact['energy'], points[-1].exact['energy'])
    return TfloTrainingSet(points, closest, collapsed)


def _exact_table(reference) -> Dict[str, float]:
    table = {key: estimate.value for key, estimate in reference.stats.table().items()}
    table['energy'] = reference.energy
    return table


# Fitting

def theil_sen(xs: Sequence[float], ys: Sequence[float]) -> Tuple[float, float]:
    """
    Median pairwise slope and median-residual intercept.

    Pairs with equal x are skipped.

    Raises:
        ValueError: fewer than two distinct x values
    """
    xs, ys = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
    i, j = np.triu_indices(xs.size, k=1)
    dx = xs[j] - xs[i]
    valid = np.abs(dx) > SLOPE_TOLERANCE * max(1.0, float(np.max(np.abs(xs))) if xs.size else 1.0)
    if not np.any(valid):
        raise ValueError("Theil-Sen fit needs at least two distinct x values")
    slope = float(np.median((ys[j] - ys[i])[valid] / dx[valid]))
    intercept = float(np.median(ys - slope * xs))
    return slope, intercept


def r_squared(xs: np.ndarray, ys: np.ndarray, slope: float, intercept: float) -> float:
    """Coefficient of determination of y ~ slope * x + intercept"""
    residual = np.sum((ys - (slope * xs + intercept)) ** 2)
    total = np.sum((ys - np.mean(ys)) ** 2)
    return 1.0 - residual / total if total > 0 else 0.0


@dataclass(frozen=True)
class TfloFit:
    slope: float
    intercept: float
    r2: float
    spread: float

    def __call__(self, noisy: float) -> float:
        return self.slope * noisy + self.intercept


def fit_training(training: TfloTrainingSet, key: str = 'energy') -> TfloFit:
    exact, noisy, _ = training.series(key)
    slope, intercept = theil_sen(noisy, exact)
    return TfloFit(slope, intercept, r_squared(noisy, exact, slope, intercept), float(np.ptp(exact)))


def _corrected(path: TfloPath, train_noisy: np.ndarray, train_exact: np.ndarray,
               closest_noisy: float, closest_exact: float, target: float, coherent: bool) -> float:
    """Deterministic correction along an already chosen path"""
    if path == TfloPath.COHERENT_ONLY:
        return target - (closest_noisy - closest_exact) if coherent else target
    if path != TfloPath.FULL:
        return target
    slope, intercept = theil_sen(train_noisy, train_exact)
    mapped = slope * target + intercept
    if not coherent:
        return mapped
    return mapped - (slope * closest_noisy + intercept - closest_exact)


def choose_path(training: TfloTrainingSet, key: str, rules: bool = True) -> TfloPath:
    """
    Correction path of an observable.

    Without rules (the energy) a nonempty training set always gets the full
    correction. With rules: exact spread <= 0.05 -> coherent correction only;
    fit R^2 <= 0.7 -> noisy value passed through; otherwise full.
    """
    exact, noisy, _ = training.series(key)
    if exact.size == 0 or key not in training.closest.noisy or key not in training.closest.exact:
        return TfloPath.EMPTY
    if not rules:
        return TfloPath.FULL
    if np.ptp(exact) <= SPREAD_THRESHOLD:
        return TfloPath.COHERENT_ONLY
    try:
        slope, intercept = theil_sen(noisy, exact)
    except ValueError:
        return TfloPath.PASSTHROUGH
    if r_squared(noisy, exact, slope, intercept) <= R2_THRESHOLD:
        return TfloPath.PASSTHROUGH
    return TfloPath.FULL


def tflo_correct(training: TfloTrainingSet, target: ObservableEstimate, key: str = 'energy',
                 coherent: bool = True, rules: bool = False, resamples: int = 1000,
                 seed: int = 0) -> ObservableEstimate:
    """
    TFLO estimate of one observable with a Monte Carlo standard error.

    The error propagates the noisy training values, the closest-FLO value
    and the target through the same deterministic correction.
    """
    path = choose_path(training, key, rules)
    stage = Stage.COH if coherent else Stage.TFLO
    if path == TfloPath.EMPTY:
        logger.warning("no TFLO training data for '%s'; passing the estimate through", key)
        return target.staged(stage, target.value, flag=path.value)
    if path == TfloPath.PASSTHROUGH:
        logger.warning("TFLO fit for '%s' has R^2 <= %.1f; keeping the noisy value", key, R2_THRESHOLD)
        return target.staged(stage, target.value, flag=path.value)

    exact, noisy, stderr = training.series(key)
    closest_exact = training.closest.exact[key]
    closest = training.closest.noisy[key]
    k = noisy.size

    def pipeline(sample: np.ndarray) -> float:
        return _corrected(path, sample[:k], exact, sample[k], closest_exact, sample[k + 1], coherent)

    means = np.concatenate([noisy, [closest.value, target.value]])
    stderrs = np.concatenate([stderr, [closest.stderr, target.stderr]])
    value = pipeline(means)
    error = monte_carlo_errorbars(pipeline, means, stderrs, resamples=resamples, seed=seed)
    flag = path.value if path == TfloPath.COHERENT_ONLY else None
    return target.staged(stage, value, error, flag=flag)


def tflo_energy(training: TfloTrainingSet, target: ObservableEstimate, resamples: int = 1000,
                seed: int = 0) -> ObservableEstimate:
    """Fully corrected energy: linear map, then the residual at the closest FLO point"""
    return tflo_correct(training, target, 'energy', coherent=True, rules=False, resamples=resamples, seed=seed)


def tflo_observable(training: TfloTrainingSet, target: ObservableEstimate, key: str,
                    resamples: int = 1000, seed: int = 0) -> ObservableEstimate:
    """Corrected non-energy observable following the spread and R^2 rules"""
    return tflo_correct(training, target, key, coherent=True, rules=True, resamples=resamples, seed=seed)

