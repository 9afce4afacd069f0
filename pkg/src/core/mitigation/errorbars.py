"""
Monte Carlo propagation of standard errors through deterministic pipelines
"""

import logging
from typing import Callable, Sequence

import numpy as np

from utils.random_streams import random_stream

logger = logging.getLogger(__name__)

DEFAULT_RESAMPLES = 1000


def monte_carlo_errorbars(pipeline: Callable[[np.ndarray], float], means: Sequence[float],
                          stderrs: Sequence[float], resamples: int = DEFAULT_RESAMPLES, seed: int = 0) -> float:
    """
    Standard error of pipeline(inputs) with independent Gaussian inputs.

    Each resample draws every input from N(mean, stderr^2) and reruns the
    pipeline; the result is the sample standard deviation of the outputs.
    """
    means = np.asarray(means, dtype=float)
    stderrs = np.asarray(stderrs, dtype=float)
    if means.shape != stderrs.shape:
        raise ValueError(f"{means.size} means but {stderrs.size} standard errors")
    if not np.all(np.isfinite(stderrs)) or np.any(stderrs < 0):
        raise ValueError("standard errors must be finite and non-negative")
    if resamples < 2:
        raise ValueError(f"resamples must be >= 2, got {resamples}")
    if not np.any(stderrs):
        return 0.0
    rng = random_stream(seed, "errorbars")
    draws = means + stderrs * rng.standard_normal((resamples, means.size))
    outputs = np.array([pipeline(row) for row in draws])
    return float(np.std(outputs, ddof=1))
