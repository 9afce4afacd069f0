"""
Command-line experiment runner
"""

from .app import main, build_parser, exit_code
from .runners import (
    VqeObjective, CellRunner, VqeRunner, MeasureRunner, MitigateRunner, ExactRunner, CompareRunner,
)

__all__ = [
    'main',
    'build_parser',
    'exit_code',
    'VqeObjective',
    'CellRunner',
    'VqeRunner',
    'MeasureRunner',
    'MitigateRunner',
    'ExactRunner',
    'CompareRunner',
]
