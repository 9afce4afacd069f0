"""
Error mitigation: postselection, symmetry averaging, TFLO and error propagation
"""

from .postselection import postselect, postselected_variance
from .errorbars import monte_carlo_errorbars
from .symmetries import (
    time_reversal_average,
    ph_transform,
    ph_average,
    spin_flip,
    partner_table,
    reflection_average,
    reflection_table,
    select_run,
)
from .tflo import (
    TfloPoint,
    TfloTrainingSet,
    TfloPath,
    flo_candidates,
    select_spread,
    choose_flo_points,
    theil_sen,
    r_squared,
    tflo_energy,
    tflo_observable,
)
from .pipeline import MitigationFlags, MitigationPipeline, MitigationResult, RunRecord

__all__ = [
    'postselect',
    'postselected_variance',
    'monte_carlo_errorbars',
    'time_reversal_average',
    'ph_transform',
    'ph_average',
    'spin_flip',
    'partner_table',
    'reflection_average',
    'reflection_table',
    'select_run',
    'TfloPoint',
    'TfloTrainingSet',
    'TfloPath',
    'flo_candidates',
    'select_spread',
    'choose_flo_points',
    'theil_sen',
    'r_squared',
    'tflo_energy',
    'tflo_observable',
    'MitigationFlags',
    'MitigationPipeline',
    'MitigationResult',
    'RunRecord',
]
