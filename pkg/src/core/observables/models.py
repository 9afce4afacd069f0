"""
Data models for physical observables
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np


class ObservableKind(Enum):
    """Kinds of reported quantities"""
    ENERGY = "energy"
    DENSITY = "density"
    SPIN = "spin"
    CORR_CHARGE = "corr_charge"
    CORR_SPIN = "corr_spin"
    MU = "mu"
    MU_PRIME = "mu_prime"
    STAGGERED = "staggered"


class Stage(Enum):
    """Mitigation stages in application order"""
    RAW = "raw"
    PS = "PS"
    SYM = "Sym"
    TFLO = "TFLO"
    COH = "Coh"
    PHS = "PHS"
    REFLECTION = "Refl"


@dataclass(frozen=True)
class ObservableEstimate:
    """Value with standard error and the stages that produced it"""
    value: float
    stderr: float = 0.0
    kind: ObservableKind = ObservableKind.ENERGY
    sites: Tuple[int, ...] = ()
    stages: Tuple[str, ...] = (Stage.RAW.value,)
    flags: Tuple[str, ...] = ()
    metadata: Dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not np.isfinite(self.stderr) or self.stderr < 0:
            raise ValueError(f"stderr must be finite and non-negative, got {self.stderr}")

    @property
    def stage(self) -> str:
        return self.stages[-1]

    def staged(self, stage: Stage, value: float, stderr: Optional[float] = None,
               flag: Optional[str] = None) -> 'ObservableEstimate':
        """Estimate after one more mitigation stage"""
        return ObservableEstimate(
            value=float(value),
            stderr=float(self.stderr if stderr is None else stderr),
            kind=self.kind,
            sites=self.sites,
            stages=self.stages + (stage.value,),
            flags=self.flags + ((flag,) if flag else ()),
            metadata=dict(self.metadata),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            'value': float(self.value),
            'stderr': float(self.stderr),
            'kind': self.kind.value,
            'sites': list(self.sites),
            'stages': list(self.stages),
            'flags': list(self.flags),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ObservableEstimate':
        return cls(
            value=float(data['value']),
            stderr=float(data.get('stderr', 0.0)),
            kind=ObservableKind(data.get('kind', 'energy')),
            sites=tuple(data.get('sites', ())),
            stages=tuple(data.get('stages', (Stage.RAW.value,))),
            flags=tuple(data.get('flags', ())),
        )
