"""
Ordered mitigation pipeline: PS -> Sym -> TFLO -> Coh, then PHS and reflections across cells
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from core.errors import ConfigError
from core.model.lattice import LatticeSpec, SectorSpec
from core.observables.models import ObservableEstimate, Stage
from utils.random_streams import derive_seed
from .symmetries import Table, time_reversal_table, partner_table, ph_average_table, reflection_table
from .tflo import TfloTrainingSet, tflo_correct

logger = logging.getLogger(__name__)


@dataclass
class MitigationFlags:
    """Enabled stages; postselection is always on"""
    time_reversal: bool = True
    tflo: bool = True
    coherent_correction: bool = True
    particle_hole: bool = True
    reflection: bool = True

    def __post_init__(self):
        if self.coherent_correction and not self.tflo:
            raise ConfigError("coherent correction requires TFLO")

    @classmethod
    def from_config(cls, config: Any) -> 'MitigationFlags':
        return cls(
            time_reversal=bool(config.time_reversal),
            tflo=bool(config.tflo),
            coherent_correction=bool(config.coherent_correction),
            particle_hole=bool(config.particle_hole),
            reflection=bool(config.reflection),
        )


@dataclass
class RunRecord:
    """Postselected estimates of one sector: at theta, at -theta and TFLO training data"""
    sector: SectorSpec
    plus: Table
    minus: Optional[Table] = None
    training: Optional[TfloTrainingSet] = None


@dataclass
class MitigationResult:
    """Observable tables after each applied stage, in application order"""
    sector: SectorSpec
    stages: Dict[str, Table] = field(default_factory=dict)

    @property
    def final(self) -> Table:
        return self.stages[next(reversed(self.stages))]

    @property
    def stage_names(self) -> List[str]:
        return list(self.stages)

    def add(self, stage: Stage, table: Table):
        self.stages[stage.value] = table

    def breakdown(self, key: str = 'energy') -> List[ObservableEstimate]:
        """One estimate of an observable per stage"""
        return [table[key] for table in self.stages.values() if key in table]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'sector': [self.sector.n_up, self.sector.n_down],
            'stages': {name: {key: e.to_dict() for key, e in table.items()} for name, table in self.stages.items()},
        }


class MitigationPipeline:
    """
    Applies the enabled stages in their fixed order.

    apply() handles the per-cell stages; particle_hole() and reflect() act
    on finished cells of an occupation sweep.
    """

    def __init__(self, flags: Optional[MitigationFlags] = None, resamples: int = 1000, seed: int = 0):
        self.flags = flags or MitigationFlags()
        self.resamples = resamples
        self.seed = seed

    def apply(self, record: RunRecord) -> MitigationResult:
        result = MitigationResult(record.sector)
        result.add(Stage.PS, dict(record.plus))

        if self.flags.time_reversal:
            if record.minus is None:
                logger.warning("time reversal enabled but no -theta estimates for %s", record.sector)
            else:
                result.add(Stage.SYM, time_reversal_table(result.final, record.minus))

        if self.flags.tflo:
            if record.training is None:
                logger.warning("TFLO enabled but no training set for %s", record.sector)
            else:
                self._apply_tflo(result, record.training)

        logger.info("%s: E = %.6f +- %.6f after %s", record.sector, result.final['energy'].value,
                    result.final['energy'].stderr, "/".join(result.stage_names))
        return result

    def _apply_tflo(self, result: MitigationResult, training: TfloTrainingSet):
        source = result.final
        trained: Table = {}
        corrected: Table = {}
        for key, estimate in source.items():
            rules = key != 'energy'
            seed = derive_seed(self.seed, key)
            trained[key] = tflo_correct(training, estimate, key, coherent=False, rules=rules,
                                        resamples=self.resamples, seed=seed)
            if self.flags.coherent_correction:
                # same path as the TFLO stage, so its flag is already recorded
                coh = tflo_correct(training, estimate, key, coherent=True, rules=rules,
                                   resamples=self.resamples, seed=seed)
                corrected[key] = trained[key].staged(Stage.COH, coh.value, coh.stderr)
        result.add(Stage.TFLO, trained)
        if self.flags.coherent_correction:
            result.add(Stage.COH, corrected)

    def particle_hole(self, cells: Dict[int, MitigationResult], lattice: LatticeSpec) -> Dict[int, MitigationResult]:
        """
        Average each cell with the transformed cell at 2L - N_occ.

        The half-filled cell is its own partner and passes through; cells
        without a measured partner get no particle-hole stage.
        """
        if not self.flags.particle_hole:
            return cells
        total = 2 * lattice.n_sites
        snapshots = {n: cell.final for n, cell in cells.items()}
        for n, cell in cells.items():
            partner = total - n
            if partner == n:
                cell.add(Stage.PHS, {k: e.staged(Stage.PHS, e.value) for k, e in snapshots[n].items()})
            elif partner in snapshots:
                transformed = partner_table(snapshots[partner], cells[partner].sector, lattice, cell.sector)
                cell.add(Stage.PHS, ph_average_table(snapshots[n], transformed))
        return cells

    def reflect(self, cell: MitigationResult, lattice: LatticeSpec) -> MitigationResult:
        if self.flags.reflection:
            cell.add(Stage.REFLECTION, reflection_table(cell.final, lattice))
        return cell
