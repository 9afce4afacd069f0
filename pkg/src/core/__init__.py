"""
Core functionality modules for Hubbard VQE Lab
"""

from .base_module import ExperimentModule
from .config import Config, ExperimentConfig

__all__ = ['ExperimentModule', 'Config', 'ExperimentConfig']
