"""
Noise model of the trajectory simulator
"""

import logging
from dataclasses import dataclass, asdict, fields, replace
from typing import Dict, Any, Optional

from core.errors import ConfigError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NoiseModel:
    """
    Error channels emulating a sqrt(iSWAP) device.

    depolarizing_2q: probability of a uniformly random non-identity two-qubit Pauli after each 2-qubit gate
    readout_01 / readout_10: P(read 1 | 0) and P(read 0 | 1), independent per qubit
    parasitic_cphase: CPHASE angle applied after every sqrt(iSWAP)
    overrotation: multiplicative error on hopping and onsite angles
    angle_offset: additive error on hopping and onsite angles
    stream: prefix of the random stream names
    """
    depolarizing_2q: float = 0.0
    readout_01: float = 0.0
    readout_10: float = 0.0
    parasitic_cphase: float = 0.0
    overrotation: float = 0.0
    angle_offset: float = 0.0
    stream: str = "noise"

    def __post_init__(self):
        for name in ('depolarizing_2q', 'readout_01', 'readout_10'):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"noise.{name} must be a probability, got {value}")

    @property
    def has_stochastic(self) -> bool:
        return self.depolarizing_2q > 0 or self.readout_01 > 0 or self.readout_10 > 0

    @property
    def has_coherent(self) -> bool:
        return self.parasitic_cphase != 0 or self.overrotation != 0 or self.angle_offset != 0

    @property
    def is_noiseless(self) -> bool:
        return not (self.has_stochastic or self.has_coherent)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_preset(cls, name: str, overrides: Optional[Dict[str, Any]] = None) -> 'NoiseModel':
        """Named preset with per-field overrides"""
        if name not in NOISE_PRESETS:
            raise ConfigError(f"unknown noise preset '{name}', expected one of {sorted(NOISE_PRESETS)}")
        model = NOISE_PRESETS[name]
        if overrides:
            known = {f.name for f in fields(cls)}
            unknown = set(overrides) - known
            if unknown:
                raise ConfigError(f"unknown noise override(s): {sorted(unknown)}")
            model = replace(model, **overrides)
            logger.info("Noise preset '%s' with overrides %s", name, overrides)
        return model


NOISE_PRESETS: Dict[str, NoiseModel] = {
    'none': NoiseModel(),
    'readout': NoiseModel(readout_01=0.01, readout_10=0.05),
    'depolarizing': NoiseModel(depolarizing_2q=0.005),
    'hardware-like': NoiseModel(
        depolarizing_2q=0.005,
        readout_01=0.01,
        readout_10=0.05,
        parasitic_cphase=0.138,
        overrotation=0.01,
    ),
}
