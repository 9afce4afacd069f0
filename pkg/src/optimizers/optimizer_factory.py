"""
Optimizer factory for creating optimizers by name
"""

import logging
from typing import Any, Dict, List, Optional, Type

from core.errors import ConfigError
from .base_optimizer import BaseOptimizer
from .bayesmgd import BayesMGD
from .hyperparams import Hyperparams, SpsaHyperparams, load_preset
from .mgd import MGD
from .spsa import SPSA

logger = logging.getLogger(__name__)


class OptimizerFactory:
    """Factory class for creating optimizers"""

    _providers: Dict[str, Type[BaseOptimizer]] = {
        'bayesmgd': BayesMGD,
        'mgd': MGD,
        'spsa': SPSA,
    }

    _default_presets: Dict[str, str] = {
        'bayesmgd': 'bayesmgd-1x8',
        'mgd': 'mgd',
        'spsa': 'spsa-paper',
    }

    @classmethod
    def create_optimizer(cls, name: str, preset: Optional[str] = None,
                         overrides: Optional[Dict[str, Any]] = None, workers: int = 1) -> BaseOptimizer:
        """
        Create an optimizer from its name and a hyperparameter preset.

        Raises:
            ConfigError: unknown optimizer, unknown preset, or a preset of the
                wrong family (an SPSA preset for BayesMGD and vice versa)
        """
        name = name.lower()
        if name not in cls._providers:
            raise ConfigError(f"Unsupported optimizer: {name}. Available: {cls.get_available_providers()}")
        preset = preset or cls._default_presets.get(name)
        hyperparams = load_preset(preset, overrides)
        expected = SpsaHyperparams if name == 'spsa' else Hyperparams
        if not isinstance(hyperparams, expected):
            raise ConfigError(f"preset '{preset}' does not configure optimizer '{name}'")
        logger.info("Creating %s optimizer from preset '%s'", name, preset)
        return cls._providers[name](hyperparams, workers=workers)

    @classmethod
    def create_optimizer_from_config(cls, config, workers: int = 1) -> BaseOptimizer:
        """Create from an OptimizerConfig section"""
        preset = config.preset
        if config.name == 'spsa' and not preset.startswith('spsa'):
            # MGD shares the model-gradient presets; SPSA has its own
            preset = cls._default_presets[config.name]
        return cls.create_optimizer(config.name, preset, config.overrides, workers)

    @classmethod
    def get_provider(cls, name: str) -> Type[BaseOptimizer]:
        if name not in cls._providers:
            raise ConfigError(f"Unsupported optimizer: {name}. Available: {cls.get_available_providers()}")
        return cls._providers[name]

    @classmethod
    def get_available_providers(cls) -> List[str]:
        return list(cls._providers.keys())

    @classmethod
    def register_provider(cls, name: str, optimizer_class: Type[BaseOptimizer],
                          default_preset: Optional[str] = None):
        """Register a new optimizer class"""
        cls._providers[name] = optimizer_class
        if default_preset:
            cls._default_presets[name] = default_preset
