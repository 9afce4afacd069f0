"""
Configuration management for Hubbard VQE Lab
"""

import json
import logging
from typing import Dict, Any, Optional, List, Tuple
from dataclasses import dataclass, asdict, field, fields
from pathlib import Path

from .errors import ConfigError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
LAYOUT_MODES = ("rectangle", "zigzag")


@dataclass
class LatticeConfig:
    """Fermi-Hubbard instance"""
    Lx: int = 1
    Ly: int = 8
    U: float = 4.0


@dataclass
class SectorConfig:
    """Occupation sectors to run; n_occ entries follow the n_up = n_down + 1 convention"""
    n_occ: List[int] = field(default_factory=list)
    n_up: Optional[int] = None
    n_down: Optional[int] = None
    sweep: bool = False  # every N_occ in 1..2L-1

    def resolve(self, n_sites: int) -> List[Tuple[int, int]]:
        """Expand into explicit (n_up, n_down) pairs"""
        if self.n_up is not None or self.n_down is not None:
            if self.n_up is None or self.n_down is None:
                raise ConfigError("sectors: n_up and n_down must be given together")
            return [(int(self.n_up), int(self.n_down))]
        occupations = list(range(1, 2 * n_sites)) if self.sweep else list(self.n_occ)
        if not occupations:
            occupations = [n_sites]
        return [split_occupation(n) for n in occupations]


@dataclass
class OptimizerConfig:
    """Optimizer selection; overrides are applied on top of the named preset"""
    name: str = "bayesmgd"  # bayesmgd, mgd, spsa
    preset: str = "bayesmgd-1x8"
    overrides: Dict[str, float] = field(default_factory=dict)
    initial_params: Optional[List[float]] = None


@dataclass
class NoiseConfig:
    """Noise model by preset name plus per-field overrides"""
    preset: str = "none"
    overrides: Dict[str, float] = field(default_factory=dict)


@dataclass
class ShotBudget:
    """Shots per measurement circuit for each stage"""
    per_eval: int = 1000
    final: int = 100000
    tflo_closest: int = 100000
    tflo_training: int = 20000
    tflo_points: int = 16


@dataclass
class MitigationConfig:
    """Mitigation stages; postselection always runs first"""
    postselect: bool = True
    time_reversal: bool = True
    tflo: bool = True
    coherent_correction: bool = True
    particle_hole: bool = True
    reflection: bool = True
    spin_echo: bool = True


@dataclass
class CompareConfig:
    """Synthetic optimizer comparison settings"""
    optimizers: List[str] = field(default_factory=lambda: ["bayesmgd", "mgd", "spsa"])
    n_params: int = 6
    etas: List[float] = field(default_factory=lambda: [0.05, 0.7, 1.5])
    seeds: int = 10
    iterations: int = 30
    shots_per_iteration: int = 6000
    sigma_per_shot: float = 1.0


@dataclass
class ExactConfig:
    """Oracle sweep settings"""
    vqe_layers: int = 1
    vqe_restarts: int = 8
    slater_restarts: int = 4
    include_vqe: bool = True
    include_slater: bool = True


@dataclass
class ExperimentConfig:
    """Complete, re-runnable description of one experiment"""
    schema_version: int = SCHEMA_VERSION
    lattice: LatticeConfig = field(default_factory=LatticeConfig)
    sectors: SectorConfig = field(default_factory=SectorConfig)
    layers: int = 1
    layout: str = "zigzag"
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    shots: ShotBudget = field(default_factory=ShotBudget)
    repetitions: int = 3
    mitigation: MitigationConfig = field(default_factory=MitigationConfig)
    seed: int = 1234
    output: str = "results.json"
    params: Optional[List[float]] = None
    compare: CompareConfig = field(default_factory=CompareConfig)
    exact: ExactConfig = field(default_factory=ExactConfig)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ExperimentConfig':
        """Create ExperimentConfig from dictionary, rejecting unknown keys"""
        if not isinstance(data, dict):
            raise ConfigError(f"configuration must be an object, got {type(data).__name__}")
        sections = {
            'lattice': LatticeConfig,
            'sectors': SectorConfig,
            'optimizer': OptimizerConfig,
            'noise': NoiseConfig,
            'shots': ShotBudget,
            'mitigation': MitigationConfig,
            'compare': CompareConfig,
            'exact': ExactConfig,
        }
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")

        kwargs: Dict[str, Any] = {}
        for key, value in data.items():
            if key in sections:
                kwargs[key] = _build_section(key, sections[key], value)
            else:
                kwargs[key] = value
        config = cls(**kwargs)
        config.validate()
        return config

    def validate(self):
        """Raise ConfigError on any inconsistent value"""
        if self.schema_version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema_version {self.schema_version}")
        if self.lattice.Lx not in (1, 2):
            raise ConfigError(f"lattice.Lx must be 1 or 2, got {self.lattice.Lx}")
        if self.lattice.Ly < 1 or self.lattice.Lx * self.lattice.Ly < 2:
            raise ConfigError(f"lattice {self.lattice.Lx}x{self.lattice.Ly} has fewer than 2 sites")
        if self.layers < 0:
            raise ConfigError(f"layers must be >= 0, got {self.layers}")
        if self.layout not in LAYOUT_MODES:
            raise ConfigError(f"layout must be one of {LAYOUT_MODES}, got '{self.layout}'")
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        for name in ('per_eval', 'final', 'tflo_closest', 'tflo_training', 'tflo_points'):
            if getattr(self.shots, name) < 1:
                raise ConfigError(f"shots.{name} must be >= 1")
        if not self.mitigation.postselect:
            raise ConfigError("mitigation.postselect cannot be disabled")
        if self.mitigation.coherent_correction and not self.mitigation.tflo:
            raise ConfigError("mitigation.coherent_correction requires mitigation.tflo")
        if self.optimizer.name not in ("bayesmgd", "mgd", "spsa"):
            raise ConfigError(f"unknown optimizer '{self.optimizer.name}'")
        from optimizers.hyperparams import PRESETS
        if self.optimizer.preset not in PRESETS:
            raise ConfigError(f"unknown optimizer preset '{self.optimizer.preset}', expected one of {sorted(PRESETS)}")
        n_sites = self.lattice.Lx * self.lattice.Ly
        for n_up, n_down in self.sectors.resolve(n_sites):
            if not (0 <= n_up <= n_sites and 0 <= n_down <= n_sites):
                raise ConfigError(f"sector ({n_up}, {n_down}) outside 0..{n_sites}")


def split_occupation(n_occ: int) -> Tuple[int, int]:
    """(n_up, n_down) for a total occupation; odd totals carry the extra spin-up particle"""
    n_occ = int(n_occ)
    if n_occ < 0:
        raise ConfigError(f"occupation must be non-negative, got {n_occ}")
    return (n_occ + 1) // 2, n_occ // 2


def _build_section(key: str, section_cls, value: Any):
    if not isinstance(value, dict):
        raise ConfigError(f"section '{key}' must be an object")
    try:
        return section_cls(**value)
    except TypeError as e:
        raise ConfigError(f"invalid section '{key}': {str(e)}")


class Config:
    """Main configuration manager (file-backed)"""

    def __init__(self, config_file: str = "config.json", create_missing: bool = True):
        self.config_file = Path(config_file)
        self.experiment = ExperimentConfig()

        # Load from file or create default
        if self.config_file.exists():
            self.load()
        elif create_missing:
            logger.info("Configuration file %s not found. Creating default configuration...", config_file)
            self._create_default_config()
            self.save()
        else:
            raise ConfigError(f"configuration file {config_file} not found")

    def get_lattice(self) -> LatticeConfig:
        """Get lattice section"""
        return self.experiment.lattice

    def get_sectors(self) -> List[Tuple[int, int]]:
        """Get resolved (n_up, n_down) sectors"""
        return self.experiment.sectors.resolve(self.experiment.lattice.Lx * self.experiment.lattice.Ly)

    def get_optimizer_config(self) -> OptimizerConfig:
        """Get optimizer section"""
        return self.experiment.optimizer

    def get_noise_config(self) -> NoiseConfig:
        """Get noise section"""
        return self.experiment.noise

    def get(self, key: str, default: Any = None) -> Any:
        """Get a top-level experiment value"""
        return getattr(self.experiment, key, default)

    def set(self, key: str, value: Any):
        """Set a top-level experiment value and revalidate"""
        if not hasattr(self.experiment, key):
            raise ConfigError(f"unknown configuration key '{key}'")
        setattr(self.experiment, key, value)
        self.experiment.validate()

    def save(self):
        """Save configuration to file"""
        with open(self.config_file, 'w', encoding='utf-8') as f:
            json.dump(self.experiment.to_dict(), f, indent=2, ensure_ascii=False)

    def load(self):
        """Load configuration from file"""
        try:
            with open(self.config_file, 'r', encoding='utf-8') as f:
                config_data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read {self.config_file}: {str(e)}")
        self.experiment = ExperimentConfig.from_dict(config_data)

    def _create_default_config(self):
        """Default: noiseless 1x8 half filling with the 1x8 BayesMGD preset"""
        self.experiment = ExperimentConfig(
            lattice=LatticeConfig(Lx=1, Ly=8, U=4.0),
            sectors=SectorConfig(n_occ=[8]),
            optimizer=OptimizerConfig(name="bayesmgd", preset="bayesmgd-1x8"),
        )
