"""
Optimizer hyperparameters and named presets
"""

import logging
import math
from dataclasses import dataclass, asdict, fields, replace
from typing import Any, Dict, Optional, Union

from core.errors import ConfigError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Hyperparams:
    """
    BayesMGD / MGD settings.

    Step size gamma / (m + A)^alpha, sampling radius delta / m^xi and
    ceil(eta * n_m) points per iteration; length_scale sets the covariance
    inflation after each step (BayesMGD only).
    """
    gamma: float = 0.3
    alpha: float = 0.602
    A: float = 1.0
    delta: float = 0.6
    xi: float = 0.101
    eta: float = 1.5
    length_scale: float = 0.2
    epsilon: float = 1e-4
    max_evals: int = 300
    max_iterations: int = 10
    prior_linear: float = 1e7
    prior_quadratic: float = 1e5

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) <= 0:
                raise ConfigError(f"hyperparameter {f.name} must be positive, got {getattr(self, f.name)}")
        for name in ('alpha', 'xi'):
            if getattr(self, name) > 1:
                raise ConfigError(f"hyperparameter {name} must lie in (0, 1], got {getattr(self, name)}")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class SpsaHyperparams:
    """Gain sequences a / (k + A)^alpha and c / k^gamma"""
    a: float = 0.2
    c: float = 0.15
    alpha: float = 0.602
    gamma: float = 0.101
    A: float = 1.0
    max_evals: int = 300
    max_iterations: int = 150

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) <= 0:
                raise ConfigError(f"hyperparameter {f.name} must be positive, got {getattr(self, f.name)}")
        for name in ('alpha', 'gamma'):
            if getattr(self, name) > 1:
                raise ConfigError(f"hyperparameter {name} must lie in (0, 1], got {getattr(self, name)}")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


AnyHyperparams = Union[Hyperparams, SpsaHyperparams]

PRESETS: Dict[str, AnyHyperparams] = {
    'bayesmgd-1x8': Hyperparams(gamma=0.3, A=1.0, max_evals=300, max_iterations=10),
    'bayesmgd-1x4': Hyperparams(gamma=0.3, A=1.0, max_evals=2520, max_iterations=30),
    'bayesmgd-2x4': Hyperparams(gamma=0.6, A=2.0, max_evals=600, max_iterations=14),
    'mgd': Hyperparams(gamma=0.3, A=1.0, max_evals=300, max_iterations=10),
    'spsa-paper': SpsaHyperparams(),
}
# short alias
PRESETS['spsa'] = PRESETS['spsa-paper']


def load_preset(name: str, overrides: Optional[Dict[str, Any]] = None) -> AnyHyperparams:
    """Named preset with free-form overrides applied on top"""
    if name not in PRESETS:
        raise ConfigError(f"unknown optimizer preset '{name}', expected one of {sorted(PRESETS)}")
    params = PRESETS[name]
    if overrides:
        known = {f.name for f in fields(params)}
        unknown = set(overrides) - known
        if unknown:
            raise ConfigError(f"unknown hyperparameter override(s) for '{name}': {sorted(unknown)}")
        params = replace(params, **overrides)
        logger.info("Optimizer preset '%s' with overrides %s", name, overrides)
    return params


def n_features(n_params: int) -> int:
    """Coefficients of a full quadratic model: (n + 1)(n + 2) / 2"""
    return (n_params + 1) * (n_params + 2) // 2


def points_per_iteration(n_params: int, eta: float) -> int:
    return max(1, math.ceil(eta * n_features(n_params) - 1e-9))
