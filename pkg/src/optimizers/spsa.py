"""
Simultaneous-perturbation stochastic approximation
"""

import logging
import math
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import OptimizeResult

from utils.random_streams import random_stream
from .base_optimizer import BaseOptimizer, NoisyObjective, OptimizationAborted
from .hyperparams import SpsaHyperparams

logger = logging.getLogger(__name__)


class SPSA(BaseOptimizer):
    """Two evaluations per iteration at theta +- c_k Delta with Rademacher Delta"""

    name = "spsa"

    def __init__(self, hyperparams: Optional[SpsaHyperparams] = None, workers: int = 1):
        super().__init__(hyperparams or SpsaHyperparams(), workers)

    def minimize(self, objective: NoisyObjective, x0: Sequence[float], seed: int = 0) -> OptimizeResult:
        hp = self.hyperparams
        theta = np.asarray(x0, dtype=float).copy()
        n_params = theta.size
        if n_params != objective.dimension:
            raise ValueError(f"x0 has {n_params} entries, objective expects {objective.dimension}")
        cost = 2 * objective.cost_per_call
        self._evaluations = 0
        trace = []
        message = "maximum number of iterations reached"
        value, stderr = math.nan, math.nan
        nit = 0

        for k in range(1, hp.max_iterations + 1):
            if self._evaluations + cost > hp.max_evals:
                message = "evaluation budget exhausted"
                break
            a_k = hp.a / (k + hp.A) ** hp.alpha
            c_k = hp.c / k ** hp.gamma
            delta = random_stream(seed, "perturbation", k).choice([-1.0, 1.0], size=n_params)
            points = np.vstack([theta + c_k * delta, theta - c_k * delta])
            try:
                values, sigmas = self._evaluate_batch(objective, points, seed, k)
            except Exception as e:
                raise OptimizationAborted(f"objective failed at iteration {k}: {str(e)}", trace) from e

            gradient = (values[0] - values[1]) / (2.0 * c_k) * delta
            theta = theta - a_k * gradient
            value = 0.5 * (values[0] + values[1])
            stderr = 0.5 * math.hypot(sigmas[0], sigmas[1])
            step = a_k * float(np.linalg.norm(gradient))
            nit = k
            trace.append(self._trace_row(k, self._evaluations, theta, value, stderr, objective, step))
            logger.debug("SPSA iter %d: f = %.6f, step %.2e", k, value, step)

        logger.info("SPSA finished after %d iterations (%s)", nit, message)
        return self._result(theta, value, stderr, nit, self._evaluations, trace, message)


def spsa_run(objective: NoisyObjective, x0: Sequence[float], hyperparams: Optional[SpsaHyperparams] = None,
             seed: int = 0) -> OptimizeResult:
    return SPSA(hyperparams).minimize(objective, x0, seed=seed)
