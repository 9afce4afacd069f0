"""
Named, counter-based random streams
"""

import zlib

import numpy as np


def stream_key(name: str) -> int:
    """Stable 32-bit identifier for a stream name"""
    return zlib.crc32(name.encode("utf-8"))


def random_stream(seed: int, purpose: str, *counters: int) -> np.random.Generator:
    """
    Generator for one purpose of one seeded evaluation.

    Streams with different purposes (or counters) never share state, so adding
    draws to one purpose leaves every other purpose bit-identical.

    Args:
        seed: master seed of the evaluation
        purpose: stream name such as "sampling", "kraus" or "readout"
        counters: extra integers (evaluation index, group id, ...) mixed into the key

    Returns:
        numpy Generator over a Philox bit generator
    """
    entropy = [int(seed) & 0xFFFFFFFF, int(seed) >> 32 & 0xFFFFFFFF, stream_key(purpose)]
    entropy.extend(int(c) & 0xFFFFFFFF for c in counters)
    sequence = np.random.SeedSequence(entropy)
    return np.random.Generator(np.random.Philox(sequence))


def derive_seed(seed: int, purpose: str, *counters: int) -> int:
    """Child seed for a sub-evaluation, drawn from its own named stream"""
    rng = random_stream(seed, purpose, *counters)
    return int(rng.integers(0, 2**63 - 1))
