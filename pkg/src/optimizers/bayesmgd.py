"""
BayesMGD: gradient descent on a quadratic surrogate with a Gaussian belief
"""

import logging
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import OptimizeResult

from utils.random_streams import random_stream
from .base_optimizer import BaseOptimizer, NoisyObjective, OptimizationAborted, uniform_ball
from .hyperparams import Hyperparams, points_per_iteration
from .surrogate import SurrogateBelief, bayes_update, prior_belief, surrogate_gradient, surrogate_predict

logger = logging.getLogger(__name__)

# zero-noise measurements are weighted as if they had this standard error
SIGMA_FLOOR = 1e-3


class BayesMGD(BaseOptimizer):
    """
    Model gradient descent whose surrogate is refined by Bayesian updates.

    Each iteration samples points in a shrinking ball around the iterate,
    updates the belief, steps along the surrogate gradient and then inflates
    the covariance by (step / length_scale)^2 so older data is trusted less
    as the iterate moves away from it.
    """

    name = "bayesmgd"

    def __init__(self, hyperparams: Optional[Hyperparams] = None, workers: int = 1):
        super().__init__(hyperparams or Hyperparams(), workers)

    def initial_belief(self, n_params: int) -> SurrogateBelief:
        hp = self.hyperparams
        return prior_belief(n_params, hp.prior_linear, hp.prior_quadratic)

    def minimize(self, objective: NoisyObjective, x0: Sequence[float], seed: int = 0,
                 belief: Optional[SurrogateBelief] = None) -> OptimizeResult:
        hp = self.hyperparams
        theta = np.asarray(x0, dtype=float).copy()
        n_params = theta.size
        if n_params != objective.dimension:
            raise ValueError(f"x0 has {n_params} entries, objective expects {objective.dimension}")
        belief = belief or self.initial_belief(n_params)
        p = points_per_iteration(n_params, hp.eta)
        cost = p * objective.cost_per_call
        self._evaluations = 0
        trace = []
        message = "maximum number of iterations reached"
        nit = 0

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

            belief = bayes_update(belief, points, values, np.maximum(sigmas, SIGMA_FLOOR))
            gradient = surrogate_gradient(belief.beta, theta)
            step = rate * float(np.linalg.norm(gradient))
            theta = theta - rate * gradient
            belief = belief.inflated((step / hp.length_scale) ** 2)
            nit = m

            predicted, stderr = surrogate_predict(belief, theta)
            trace.append(self._trace_row(m, self._evaluations, theta, predicted, stderr, objective, step))
            logger.info("BayesMGD iter %d: f_s = %.6f +- %.6f, step %.2e, %d evals",
                        m, predicted, stderr, step, self._evaluations)
            if step < hp.epsilon:
                message = "step below tolerance"
                break

        predicted, stderr = surrogate_predict(belief, theta)
        return self._result(theta, predicted, stderr, nit, self._evaluations, trace, message, belief=belief)


def bayesmgd_run(objective: NoisyObjective, x0: Sequence[float], hyperparams: Optional[Hyperparams] = None,
                 belief: Optional[SurrogateBelief] = None, seed: int = 0) -> OptimizeResult:
    return BayesMGD(hyperparams).minimize(objective, x0, seed=seed, belief=belief)
