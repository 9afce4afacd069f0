"""
Shared utilities for Hubbard VQE Lab
"""

from .random_streams import random_stream, derive_seed, stream_key

__all__ = ['random_stream', 'derive_seed', 'stream_key']
