"""
Occupation-number postselection and its variance correction
"""

import logging
from typing import Tuple, TYPE_CHECKING

import numpy as np

from core.errors import EmptyPostselectionError
from core.model import SectorSpec, Spin, JwLayout

if TYPE_CHECKING:
    from core.simulator.models import ShotBatch

logger = logging.getLogger(__name__)


def postselect(batch: 'ShotBatch', sector: SectorSpec, layout: JwLayout) -> Tuple['ShotBatch', float]:
    """
    Keep shots whose per-spin Hamming weights equal (n_up, n_down).

    Returns:
        (filtered batch, retention p = kept / total)
    """
    keep = np.ones(batch.shots, dtype=bool)
    for spin, count in ((Spin.UP, sector.n_up), (Spin.DOWN, sector.n_down)):
        keep &= batch.hamming_weights(layout.spin_block(spin)) == count
    kept = int(keep.sum())
    if kept == 0:
        raise EmptyPostselectionError(
            f"all {batch.shots} shots rejected for sector ({sector.n_up}, {sector.n_down})")
    retention = kept / batch.shots
    return batch.select(keep), retention


def postselected_variance(variance: float, shots: int, retention: float) -> float:
    """
    Variance of a postselected sample mean.

    The number of kept shots is binomial(N, p); to second order in 1/(pN)
    the mean has variance sigma^2 / (pN) * (1 + (1 - p) / (pN)).
    """
    if not 0.0 < retention <= 1.0:
        raise ValueError(f"retention must be in (0, 1], got {retention}")
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    kept = retention * shots
    return variance / kept * (1.0 + (1.0 - retention) / kept)
