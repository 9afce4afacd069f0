"""
Shots-matched optimizer comparison on synthetic noisy quadratics
"""

import logging
import math
from dataclasses import replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from utils.random_streams import derive_seed, random_stream
from .base_optimizer import NoisyObjective
from .hyperparams import PRESETS, points_per_iteration
from .optimizer_factory import OptimizerFactory

logger = logging.getLogger(__name__)

EIGENVALUE_RANGE = (0.5, 2.0)
START_DISTANCE = 1.0


class SyntheticQuadratic(NoisyObjective):
    """
    f(theta) = f0 + (theta - theta*)^T H (theta - theta*) / 2 with a random
    positive definite H, observed with Gaussian shot noise sigma / sqrt(shots).
    """

    def __init__(self, n_params: int, seed: int = 0, sigma_per_shot: float = 1.0, shots: int = 1000,
                 offset: float = -1.0):
        if n_params < 1:
            raise ValueError(f"n_params must be >= 1, got {n_params}")
        if shots < 1:
            raise ValueError(f"shots must be >= 1, got {shots}")
        rng = random_stream(seed, "synthetic-instance")
        rotation, _ = np.linalg.qr(rng.standard_normal((n_params, n_params)))
        eigenvalues = rng.uniform(*EIGENVALUE_RANGE, size=n_params)
        self.hessian = rotation @ np.diag(eigenvalues) @ rotation.T
        self.minimizer = rng.uniform(-0.5, 0.5, size=n_params)
        self.offset = offset
        self.seed = seed
        self.sigma_per_shot = sigma_per_shot
        self.shots = shots

    @property
    def dimension(self) -> int:
        return self.minimizer.size

    @property
    def noise(self) -> float:
        return self.sigma_per_shot / math.sqrt(self.shots)

    def with_shots(self, shots: int) -> 'SyntheticQuadratic':
        return SyntheticQuadratic(self.dimension, self.seed, self.sigma_per_shot, shots, self.offset)

    def exact(self, theta: np.ndarray) -> float:
        d = np.asarray(theta, dtype=float) - self.minimizer
        return float(self.offset + 0.5 * d @ self.hessian @ d)

    def evaluate(self, theta: np.ndarray, seed: int) -> Tuple[float, float]:
        noise = self.noise
        value = self.exact(theta) + noise * random_stream(seed, "synthetic-noise").standard_normal()
        return float(value), noise

    def start(self) -> np.ndarray:
        """Starting point at a fixed distance from the minimizer"""
        direction = random_stream(self.seed, "synthetic-start").standard_normal(self.dimension)
        return self.minimizer + START_DISTANCE * direction / np.linalg.norm(direction)


def run_comparison(config, seed: int = 0) -> List[Dict[str, Any]]:
    """
    Seeded head-to-head runs with the same number of shots per iteration.

    Model-gradient optimizers split shots_per_iteration over their
    ceil(eta * n_m) points; SPSA splits it over its two points and does not
    depend on eta (its rows carry eta = None).

    Returns:
        trace rows: optimizer, eta, seed, iter, evals, exact, predicted, stderr
    """
    rows: List[Dict[str, Any]] = []
    for name in config.optimizers:
        etas = [None] if name == 'spsa' else list(config.etas)
        for eta in etas:
            for s in range(config.seeds):
                problem = SyntheticQuadratic(config.n_params, derive_seed(seed, "synthetic", s),
                                             config.sigma_per_shot)
                if name == 'spsa':
                    per_iteration = 2
                    hyperparams = replace(PRESETS['spsa-paper'], max_iterations=config.iterations,
                                          max_evals=2 * config.iterations)
                else:
                    per_iteration = points_per_iteration(config.n_params, eta)
                    hyperparams = replace(PRESETS['mgd'], eta=eta, max_iterations=config.iterations,
                                          max_evals=per_iteration * config.iterations)
                shots = max(1, config.shots_per_iteration // per_iteration)
                optimizer = OptimizerFactory.get_provider(name)(hyperparams)
                result = optimizer.minimize(problem.with_shots(shots), problem.start(),
                                            seed=derive_seed(seed, "compare-run", s))
                for row in result.trace:
                    rows.append({
                        'optimizer': name, 'eta': eta, 'seed': s, 'iter': row['iter'], 'evals': row['evals'],
                        'exact': row['exact'], 'predicted': row['predicted'], 'stderr': row['stderr'],
                    })
                logger.info("%s eta=%s seed %d: final exact %.6f after %d iterations (%d shots/point)",
                            name, eta, s, problem.exact(result.x), result.nit, shots)
    return rows


def final_values(rows: Sequence[Dict[str, Any]]) -> Dict[Tuple[str, Optional[float]], List[float]]:
    """Last exact value of every (optimizer, eta) run, ordered by seed"""
    last: Dict[Tuple[str, Optional[float], int], Dict[str, Any]] = {}
    for row in rows:
        key = (row['optimizer'], row['eta'], row['seed'])
        if key not in last or row['iter'] > last[key]['iter']:
            last[key] = row
    finals: Dict[Tuple[str, Optional[float]], List[float]] = {}
    for (name, eta, s) in sorted(last, key=lambda k: (k[0], -1 if k[1] is None else k[1], k[2])):
        finals.setdefault((name, eta), []).append(last[(name, eta, s)]['exact'])
    return finals


def compare_summary(rows: Sequence[Dict[str, Any]]) -> Dict[Tuple[str, Optional[float]], Dict[str, float]]:
    """Median and inter-seed spread (sample std) of the final exact values"""
    summary = {}
    for key, values in final_values(rows).items():
        values = np.asarray(values, dtype=float)
        summary[key] = {
            'median': float(np.median(values)),
            'spread': float(np.std(values, ddof=1)) if values.size > 1 else 0.0,
            'runs': int(values.size),
        }
    return summary
