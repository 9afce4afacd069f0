"""
Model gradient descent with a least-squares quadratic fit over a trust region
"""

import logging
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import OptimizeResult

from utils.random_streams import random_stream
from .base_optimizer import BaseOptimizer, NoisyObjective, OptimizationAborted, uniform_ball
from .hyperparams import Hyperparams, points_per_iteration
from .surrogate import design_matrix, model_features, surrogate_gradient

logger = logging.getLogger(__name__)


def weighted_fit(points: np.ndarray, values: np.ndarray, sigmas: np.ndarray):
    """
    Weighted least-squares quadratic fit.

    Underdetermined systems get the minimum-norm solution. Returns the
    coefficients and their (pseudo-inverse) covariance.
    """
    X = design_matrix(points)
    weighted = bool(np.all(sigmas > 0))
    scale = 1.0 / sigmas if weighted else np.ones_like(values)
    A = X * scale[:, None]
    beta, *_ = np.linalg.lstsq(A, values * scale, rcond=None)
    if not weighted:
        return beta, np.zeros((X.shape[1], X.shape[1]))
    return beta, np.linalg.pinv(A.T @ A)


class MGD(BaseOptimizer):
    """
    Same schedules as BayesMGD, but each iteration refits the surrogate from
    scratch using every point that lies in the current trust region, including
    points sampled in earlier iterations. There is no prior and no length scale.
    """

    name = "mgd"

    def __init__(self, hyperparams: Optional[Hyperparams] = None, workers: int = 1):
        super().__init__(hyperparams or Hyperparams(), workers)

    def minimize(self, objective: NoisyObjective, x0: Sequence[float], seed: int = 0) -> OptimizeResult:
        hp = self.hyperparams
        theta = np.asarray(x0, dtype=float).copy()
        n_params = theta.size
        if n_params != objective.dimension:
            raise ValueError(f"x0 has {n_params} entries, objective expects {objective.dimension}")
        p = points_per_iteration(n_params, hp.eta)
        cost = p * objective.cost_per_call
        self._evaluations = 0
        memory_x = np.zeros((0, n_params))
        memory_y = np.zeros(0)
        memory_s = np.zeros(0)
        trace = []
        message = "maximum number of iterations reached"
        nit = 0
        beta = np.zeros(len(model_features(theta)))
        covariance = np.zeros((beta.size, beta.size))

        for m in range(1, hp.max_iterations + 1):
            if self._evaluations + cost > hp.max_evals:
                message = "evaluation budget exhausted"
                break
            radius = hp.delta / m ** hp.xi
            rate = hp.gamma / (m + hp.A) ** hp.alpha
            points = theta + uniform_ball(random_stream(seed, "ball", m), p, n_params, radius)
            try:
                values, sigmas = self._evaluate_batch(objective, points, seed, m)
            except Exception as e:
                raise OptimizationAborted(f"objective failed at iteration {m}: {str(e)}", trace) from e

            memory_x = np.vstack([memory_x, points])
            memory_y = np.concatenate([memory_y, values])
            memory_s = np.concatenate([memory_s, sigmas])
            inside = np.linalg.norm(memory_x - theta, axis=1) <= radius * (1 + 1e-12)
            beta, covariance = weighted_fit(memory_x[inside], memory_y[inside], memory_s[inside])

            gradient = surrogate_gradient(beta, theta)
            step = rate * float(np.linalg.norm(gradient))
            theta = theta - rate * gradient
            nit = m

            phi = model_features(theta)
            predicted = float(beta @ phi)
            stderr = float(np.sqrt(max(phi @ covariance @ phi, 0.0)))
            trace.append(self._trace_row(m, self._evaluations, theta, predicted, stderr, objective, step))
            logger.info("MGD iter %d: %d points in region, f_s = %.6f, step %.2e",
                        m, int(inside.sum()), predicted, step)
            if step < hp.epsilon:
                message = "step below tolerance"
                break

        phi = model_features(theta)
        predicted = float(beta @ phi)
        stderr = float(np.sqrt(max(phi @ covariance @ phi, 0.0)))
        return self._result(theta, predicted, stderr, nit, self._evaluations, trace, message)


def mgd_run(objective: NoisyObjective, x0: Sequence[float], hyperparams: Optional[Hyperparams] = None,
            seed: int = 0) -> OptimizeResult:
    return MGD(hyperparams).minimize(objective, x0, seed=seed)
