"""
Noisy black-box optimizers for variational energies
"""

from .hyperparams import (
    Hyperparams, SpsaHyperparams, PRESETS, load_preset, n_features, points_per_iteration,
)
from .surrogate import (
    SurrogateBelief, KalmanFilter, model_features, design_matrix, prior_belief, bayes_update,
    surrogate_value, surrogate_predict, surrogate_gradient,
)
from .base_optimizer import BaseOptimizer, NoisyObjective, FunctionObjective, OptimizationAborted, uniform_ball
from .bayesmgd import BayesMGD, bayesmgd_run
from .mgd import MGD, mgd_run, weighted_fit
from .spsa import SPSA, spsa_run
from .optimizer_factory import OptimizerFactory
from .harness import SyntheticQuadratic, run_comparison, final_values, compare_summary

__all__ = [
    'Hyperparams', 'SpsaHyperparams', 'PRESETS', 'load_preset', 'n_features', 'points_per_iteration',
    'SurrogateBelief', 'KalmanFilter', 'model_features', 'design_matrix', 'prior_belief', 'bayes_update',
    'surrogate_value', 'surrogate_predict', 'surrogate_gradient',
    'BaseOptimizer', 'NoisyObjective', 'FunctionObjective', 'OptimizationAborted', 'uniform_ball',
    'BayesMGD', 'bayesmgd_run', 'MGD', 'mgd_run', 'weighted_fit', 'SPSA', 'spsa_run',
    'OptimizerFactory',
    'SyntheticQuadratic', 'run_comparison', 'final_values', 'compare_summary',
]
