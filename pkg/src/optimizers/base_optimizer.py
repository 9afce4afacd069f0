"""
Base classes for noisy black-box optimizers
"""

import logging
import math
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import OptimizeResult

from utils.random_streams import derive_seed

logger = logging.getLogger(__name__)


class NoisyObjective(ABC):
    """
    Function estimated from shots: evaluate(theta, seed) -> (y, sigma_y).

    Evaluation must be deterministic for a given seed. cost_per_call is the
    number of budget units one evaluation consumes.
    """

    cost_per_call: int = 1

    @property
    @abstractmethod
    def dimension(self) -> int:
        pass

    @abstractmethod
    def evaluate(self, theta: np.ndarray, seed: int) -> Tuple[float, float]:
        pass

    def exact(self, theta: np.ndarray) -> Optional[float]:
        """Noiseless value for traces, when one is available"""
        return None


class FunctionObjective(NoisyObjective):
    """Deterministic callable wrapped as a zero-noise objective"""

    def __init__(self, func: Callable[[np.ndarray], float], dimension: int):
        self.func = func
        self._dimension = dimension

    @property
    def dimension(self) -> int:
        return self._dimension

    def evaluate(self, theta: np.ndarray, seed: int) -> Tuple[float, float]:
        return float(self.func(theta)), 0.0

    def exact(self, theta: np.ndarray) -> Optional[float]:
        return float(self.func(theta))


class OptimizationAborted(Exception):
    """Objective failure carrying the trace recorded so far"""

    def __init__(self, message: str, trace: List[Dict[str, Any]]):
        super().__init__(message)
        self.trace = trace


class BaseOptimizer(ABC):
    """Base class for all optimizers"""

    name = "base"

    def __init__(self, hyperparams, workers: int = 1):
        self.hyperparams = hyperparams
        self.workers = max(1, int(workers))
        self._evaluations = 0

    @abstractmethod
    def minimize(self, objective: NoisyObjective, x0: Sequence[float], seed: int = 0) -> OptimizeResult:
        """Run to completion and return an OptimizeResult"""
        pass

    def get_optimizer_info(self) -> Dict[str, Any]:
        """Name and hyperparameters, echoed into results files"""
        return {'name': self.name, 'hyperparams': self.hyperparams.to_dict()}

    # helpers shared by the concrete optimizers

    def _evaluate_batch(self, objective: NoisyObjective, points: np.ndarray, seed: int,
                        iteration: int) -> Tuple[np.ndarray, np.ndarray]:
        """
        Evaluate independent points, concurrently when workers > 1.

        Each point gets its own seed derived from (seed, iteration, index), so
        results do not depend on the number of workers.
        """
        seeds = [derive_seed(seed, "evaluation", iteration, k) for k in range(len(points))]

        def one(k: int) -> Tuple[float, float]:
            return objective.evaluate(points[k], seeds[k])

        if self.workers > 1 and len(points) > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                results = list(pool.map(one, range(len(points))))
        else:
            results = [one(k) for k in range(len(points))]
        self._evaluations += len(points) * objective.cost_per_call
        values = np.array([r[0] for r in results], dtype=float)
        sigmas = np.array([r[1] for r in results], dtype=float)
        if not np.all(np.isfinite(values)) or not np.all(np.isfinite(sigmas)):
            raise ValueError(f"objective returned non-finite values at iteration {iteration}")
        return values, sigmas

    @staticmethod
    def _trace_row(iteration: int, evaluations: int, theta: np.ndarray, predicted: float,
                   stderr: float, objective: NoisyObjective, step: float) -> Dict[str, Any]:
        exact = objective.exact(theta)
        return {
            'iter': iteration,
            'evals': evaluations,
            'x': [float(v) for v in theta],
            'predicted': float(predicted),
            'stderr': float(stderr),
            'exact': None if exact is None else float(exact),
            'step': float(step),
        }

    @staticmethod
    def _result(theta: np.ndarray, value: float, stderr: float, nit: int, nfev: int,
                trace: List[Dict[str, Any]], message: str, **extra) -> OptimizeResult:
        return OptimizeResult(x=np.asarray(theta, dtype=float), fun=float(value), stderr=float(stderr),
                              nit=nit, nfev=nfev, trace=trace, message=message,
                              success=math.isfinite(value), **extra)


def uniform_ball(rng: np.random.Generator, count: int, dimension: int, radius: float) -> np.ndarray:
    """count points uniform over the solid ball of the given radius at the origin"""
    directions = rng.standard_normal((count, dimension))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = radius * rng.uniform(size=count) ** (1.0 / dimension)
    return directions * radii[:, None]
