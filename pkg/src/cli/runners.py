"""
Experiment runners behind the command-line subcommands

Each runner is an ExperimentModule: run() wraps process(), records failures
and keeps whatever partial result was stored before the failure.
"""

import logging
import math
import threading
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.base_module import ExperimentModule
from core.circuits.ansatz import (
    build_ehv_circuit, build_measurement_circuits, expected_param_count, worst_case_stats, MeasurementSet,
)
from core.config import ExperimentConfig
from core.errors import SimulationInfeasibleError, ParameterLengthError
from core.mitigation.pipeline import MitigationFlags, MitigationPipeline, MitigationResult, RunRecord
from core.mitigation.symmetries import Table, select_run, time_reversal_table
from core.mitigation.tflo import TfloTrainingSet, choose_flo_points
from core.model.jordan_wigner import JwLayout, LayoutMode
from core.model.lattice import LatticeSpec, SectorSpec
from core.observables.diagonal import DiagonalStats, chemical_potentials
from core.observables.models import Stage
from core.reference.exact import exact_ground, exact_sweep
from core.reference.slater import optimal_slater
from core.reference.vqe import AnsatzEvaluator, simulate_vqe_optimum
from core.simulator.energy import EnergyEstimate, estimate_energy
from core.simulator.noise import NoiseModel
from optimizers.base_optimizer import NoisyObjective
from optimizers.harness import compare_summary, run_comparison
from optimizers.optimizer_factory import OptimizerFactory
from utils.random_streams import derive_seed, random_stream

logger = logging.getLogger(__name__)

INITIAL_SCALE = 0.5


# Configuration helpers

def lattice_from_config(config: ExperimentConfig) -> LatticeSpec:
    return LatticeSpec(config.lattice.Lx, config.lattice.Ly, float(config.lattice.U))


def layout_from_config(config: ExperimentConfig, lattice: LatticeSpec) -> JwLayout:
    return JwLayout(lattice, LayoutMode(config.layout))


def noise_from_config(config: ExperimentConfig) -> Optional[NoiseModel]:
    """Configured noise model, or None when it has no error channel"""
    model = NoiseModel.from_preset(config.noise.preset, config.noise.overrides)
    return None if model.is_noiseless else model


def sectors_from_config(config: ExperimentConfig) -> List[SectorSpec]:
    n_sites = config.lattice.Lx * config.lattice.Ly
    return [SectorSpec(n_up, n_down) for n_up, n_down in config.sectors.resolve(n_sites)]


def measurement_set(lattice: LatticeSpec, sector: SectorSpec, params: Sequence[float], layers: int,
                    layout: JwLayout) -> MeasurementSet:
    base = build_ehv_circuit(lattice, sector, params, layers, layout)
    return build_measurement_circuits(base, lattice, layout)


def observable_table(estimate: EnergyEstimate, lattice: LatticeSpec, layout: JwLayout, shots: int) -> Table:
    """Energy plus every diagonal observable of one postselected measurement"""
    stats = DiagonalStats.from_batch(estimate.onsite_batch, lattice, layout, total_shots=shots)
    table = {key: e.staged(Stage.PS, e.value) for key, e in stats.table().items()}
    table['energy'] = estimate.energy
    return table


def table_to_dict(table: Optional[Table]) -> Optional[Dict[str, Any]]:
    if table is None:
        return None
    return {key: e.to_dict() for key, e in table.items()}


# Objective

class VqeObjective(NoisyObjective):
    """
    Shot-based ansatz energy averaged over theta and -theta.

    Each call measures every group at both parameter points, so one call
    costs two evaluations of the budget.
    """

    cost_per_call = 2

    def __init__(self, lattice: LatticeSpec, sector: SectorSpec, layers: int, layout: JwLayout, shots: int,
                 noise: Optional[NoiseModel] = None, echo: bool = False,
                 evaluator: Optional[AnsatzEvaluator] = None):
        self.lattice = lattice
        self.sector = sector
        self.layers = layers
        self.layout = layout
        self.shots = shots
        self.noise = noise
        self.echo = echo
        self.evaluator = evaluator
        self.shots_used = 0
        self.calls = 0
        self._lock = threading.Lock()

    @property
    def dimension(self) -> int:
        return expected_param_count(self.lattice, self.layers)

    def measure(self, params: Sequence[float], seed: int) -> EnergyEstimate:
        measurements = measurement_set(self.lattice, self.sector, params, self.layers, self.layout)
        estimate = estimate_energy(measurements, self.sector, self.shots, seed, self.noise, self.echo)
        with self._lock:
            self.shots_used += estimate.shots_used
        return estimate

    def evaluate(self, theta: np.ndarray, seed: int) -> Tuple[float, float]:
        theta = np.asarray(theta, dtype=float)
        plus = self.measure(theta, derive_seed(seed, "plus"))
        minus = self.measure(-theta, derive_seed(seed, "minus"))
        with self._lock:
            self.calls += 1
        return 0.5 * (plus.value + minus.value), 0.5 * math.hypot(plus.stderr, minus.stderr)

    def exact(self, theta: np.ndarray) -> Optional[float]:
        if self.evaluator is None:
            return None
        return self.evaluator.energy(theta)


# One (lattice, sector) cell

@dataclass
class RepetitionResult:
    params: np.ndarray
    record: RunRecord
    optimizer: Optional[Dict[str, Any]] = None
    ansatz_energy: Optional[float] = None
    evaluations: int = 0

    def to_dict(self) -> Dict[str, Any]:
        training = None
        if self.record.training is not None:
            training = {
                'points': [{'params': p.params, 'exact_energy': p.exact['energy'],
                            'noisy_energy': p.noisy['energy'].to_dict() if 'energy' in p.noisy else None}
                           for p in self.record.training.points],
                'closest': {'params': self.record.training.closest.params,
                            'exact_energy': self.record.training.closest.exact['energy']},
                'collapsed': self.record.training.collapsed,
            }
        return {
            'params': self.params,
            'optimizer': self.optimizer,
            'ansatz_energy': self.ansatz_energy,
            'evaluations': self.evaluations,
            'plus': table_to_dict(self.record.plus),
            'minus': table_to_dict(self.record.minus),
            'training': training,
        }


@dataclass
class CellResult:
    sector: SectorSpec
    seed: int
    repetitions: List[RepetitionResult] = field(default_factory=list)
    selected: Optional[int] = None
    mitigation: Optional[MitigationResult] = None
    exact_energy: Optional[float] = None
    circuit_stats: Optional[Dict[str, int]] = None
    shots_used: int = 0
    shots_budget: int = 0

    @property
    def n_occ(self) -> int:
        return self.sector.n_occ

    def to_dict(self) -> Dict[str, Any]:
        return {
            'n_occ': self.n_occ,
            'sector': [self.sector.n_up, self.sector.n_down],
            'seed': self.seed,
            'repetitions': [r.to_dict() for r in self.repetitions],
            'selected': self.selected,
            'mitigation': self.mitigation.to_dict() if self.mitigation else None,
            'exact_energy': self.exact_energy,
            'circuit_stats': self.circuit_stats,
            'shots_used': self.shots_used,
            'shots_budget': self.shots_budget,
        }


class CellRunner:
    """
    VQE part (paired +-theta optimization, no PHS or TFLO) followed by the
    state-preparation part (final, closest-FLO and training measurements)
    for one sector, repeated and reduced to the lowest-energy run.
    """

    def __init__(self, config: ExperimentConfig, lattice: LatticeSpec, layout: JwLayout, sector: SectorSpec,
                 noise: Optional[NoiseModel], seed: int, workers: int = 1):
        sector.validate(lattice)
        self.config = config
        self.lattice = lattice
        self.layout = layout
        self.sector = sector
        self.noise = noise
        self.seed = seed
        self.workers = workers
        self.layers = config.layers
        self.echo = bool(config.mitigation.spin_echo) and noise is not None
        self.flags = MitigationFlags.from_config(config.mitigation)
        self.evaluator = AnsatzEvaluator(lattice, sector, self.layers, layout)
        self.shots_used = 0
        self.n_groups = len(measurement_set(lattice, sector, np.zeros(self.evaluator.n_params),
                                            self.layers, layout))

    # measurements

    def measure_table(self, params: Sequence[float], shots: int, seed: int) -> Table:
        measurements = measurement_set(self.lattice, self.sector, params, self.layers, self.layout)
        estimate = estimate_energy(measurements, self.sector, shots, seed, self.noise, self.echo)
        self.shots_used += estimate.shots_used
        return observable_table(estimate, self.lattice, self.layout, shots)

    def measure_paired(self, params: Sequence[float], shots: int, seed: int) -> Tuple[Table, Optional[Table]]:
        """Tables at theta and, when time reversal is enabled, at -theta"""
        params = np.asarray(params, dtype=float)
        plus = self.measure_table(params, shots, derive_seed(seed, "plus"))
        minus = None
        if self.flags.time_reversal:
            minus = self.measure_table(-params, shots, derive_seed(seed, "minus"))
        return plus, minus

    # parts of one repetition

    def initial_params(self, repetition: int) -> np.ndarray:
        configured = self.config.optimizer.initial_params
        if configured is not None:
            params = np.asarray(configured, dtype=float)
            if params.size != self.evaluator.n_params:
                raise ParameterLengthError(f"initial parameters have {params.size} entries, "
                                      f"ansatz expects {self.evaluator.n_params}")
            return params
        rng = random_stream(self.seed, "initial-params", repetition)
        return rng.uniform(-INITIAL_SCALE, INITIAL_SCALE, size=self.evaluator.n_params)

    def optimize(self, repetition: int) -> Tuple[np.ndarray, Optional[Dict[str, Any]], int]:
        x0 = self.initial_params(repetition)
        if x0.size == 0:
            return x0, None, 0
        objective = VqeObjective(self.lattice, self.sector, self.layers, self.layout, self.config.shots.per_eval,
                                 self.noise, self.echo, self.evaluator)
        optimizer = OptimizerFactory.create_optimizer_from_config(self.config.optimizer, workers=self.workers)
        result = optimizer.minimize(objective, x0, seed=derive_seed(self.seed, "optimizer", repetition))
        self.shots_used += objective.shots_used
        info = optimizer.get_optimizer_info()
        info.update({'x0': x0, 'x': result.x, 'fun': result.fun, 'stderr': result.stderr, 'nit': result.nit,
                     'nfev': result.nfev, 'message': result.message, 'trace': result.trace})
        return np.asarray(result.x, dtype=float), info, objective.calls

    def training_set(self, params: np.ndarray, repetition: int) -> Optional[TfloTrainingSet]:
        if not self.flags.tflo:
            return None
        if self.layers < 1:
            logger.warning("TFLO needs at least one ansatz layer; skipping it for %s", self.sector)
            return None
        shots = self.config.shots
        seed = derive_seed(self.seed, "tflo", repetition)
        training = choose_flo_points(self.lattice, self.sector, self.layers, params, count=shots.tflo_points,
                                     seed=seed, evaluator=self.evaluator)
        for k, point in enumerate(training.points):
            point.noisy = self._paired_table(point.params, shots.tflo_training, derive_seed(seed, "training", k))
        training.closest.noisy = self._paired_table(training.closest.params, shots.tflo_closest,
                                                    derive_seed(seed, "closest"))
        return training

    def _paired_table(self, params: np.ndarray, shots: int, seed: int) -> Table:
        plus, minus = self.measure_paired(params, shots, seed)
        return time_reversal_table(plus, minus) if minus is not None else plus

    def repetition(self, index: int) -> RepetitionResult:
        params, info, calls = self.optimize(index)
        plus, minus = self.measure_paired(params, self.config.shots.final, derive_seed(self.seed, "final", index))
        training = self.training_set(params, index)
        record = RunRecord(self.sector, plus, minus, training)
        return RepetitionResult(params, record, info, self.evaluator.energy(params), calls)

    # budget

    def shot_budget(self, repetitions: Sequence[RepetitionResult]) -> int:
        """Closed-form shot count implied by the configuration and the evaluations performed"""
        shots = self.config.shots
        pair = 2 if self.flags.time_reversal else 1
        total = sum(r.evaluations for r in repetitions) * shots.per_eval * 2
        for r in repetitions:
            total += pair * shots.final
            if r.record.training is not None:
                total += pair * (shots.tflo_closest + len(r.record.training.points) * shots.tflo_training)
        return total * self.n_groups

    def run(self, pipeline: MitigationPipeline) -> CellResult:
        cell = CellResult(self.sector, self.seed)
        try:
            cell.exact_energy, _ = exact_ground(self.lattice, self.sector)
        except SimulationInfeasibleError as e:
            logger.warning(str(e))
        measurements = measurement_set(self.lattice, self.sector, np.zeros(self.evaluator.n_params),
                                       self.layers, self.layout)
        cell.circuit_stats = worst_case_stats(measurements, self.noise).to_dict()

        for r in range(self.config.repetitions):
            logger.info("%s %s: repetition %d/%d", self.lattice.label, self.sector, r + 1, self.config.repetitions)
            cell.repetitions.append(self.repetition(r))
        cell.selected = select_run([rep.record.plus['energy'] for rep in cell.repetitions])
        cell.mitigation = pipeline.apply(cell.repetitions[cell.selected].record)
        cell.shots_used = self.shots_used
        cell.shots_budget = self.shot_budget(cell.repetitions)
        return cell


# Runners

class VqeRunner(ExperimentModule):
    """Full VQE over every configured sector, with sweep-level mitigation and mu(N)"""

    def __init__(self, config: ExperimentConfig, workers: int = 1):
        super().__init__("VQE", config)
        self.workers = max(1, int(workers))

    def process(self, input_data: Any = None) -> Dict[str, Any]:
        config: ExperimentConfig = self.config
        lattice = lattice_from_config(config)
        layout = layout_from_config(config, lattice)
        noise = noise_from_config(config)
        sectors = sectors_from_config(config)
        pipeline = MitigationPipeline(MitigationFlags.from_config(config.mitigation), seed=config.seed)
        cell_seeds = {s.n_occ: derive_seed(config.seed, "cell", s.n_up, s.n_down) for s in sectors}

        partial: Dict[str, Any] = {'cells': [], 'errors': []}
        self.set_partial_result(partial)

        def run_cell(sector: SectorSpec) -> CellResult:
            runner = CellRunner(config, lattice, layout, sector, noise, cell_seeds[sector.n_occ], self.workers)
            return runner.run(pipeline)

        cells: List[CellResult] = []
        if self.workers > 1 and len(sectors) > 1:
            finished: Dict[int, CellResult] = {}
            failure: Optional[Exception] = None
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                futures = {pool.submit(run_cell, s): k for k, s in enumerate(sectors)}
                for future in as_completed(futures):
                    k = futures[future]
                    try:
                        finished[k] = future.result()
                    except Exception as e:
                        partial['errors'].append(f"{sectors[k]}: {str(e)}")
                        failure = failure or e
                        continue
                    partial['cells'].append(finished[k].to_dict())
                    self.update_progress(int(80 * len(finished) / len(sectors)), f"cell {sectors[k]} done")
            if failure is not None:
                raise failure
            cells = [finished[k] for k in range(len(sectors))]
        else:
            for k, sector in enumerate(sectors):
                cells.append(run_cell(sector))
                partial['cells'].append(cells[-1].to_dict())
                self.update_progress(int(80 * (k + 1) / len(sectors)), f"cell {sector} done")

        by_n = {c.n_occ: c.mitigation for c in cells}
        pipeline.particle_hole(by_n, lattice)
        for c in cells:
            pipeline.reflect(c.mitigation, lattice)

        energies = {c.n_occ: c.mitigation.final['energy'] for c in cells}
        potentials = chemical_potentials(energies) if len(energies) > 1 else {'mu': {}, 'mu_prime': {}}
        body = {
            'cells': [c.to_dict() for c in cells],
            'noise': noise.to_dict() if noise else None,
            'seeds': {'master': config.seed, 'cells': {str(n): s for n, s in sorted(cell_seeds.items())}},
            'sweep': {
                'energies': {str(n): e.to_dict() for n, e in sorted(energies.items())},
                'mu': {str(n): e.to_dict() for n, e in potentials['mu'].items()},
                'mu_prime': {str(n): e.to_dict() for n, e in potentials['mu_prime'].items()},
            },
            'shots_used': sum(c.shots_used for c in cells),
            'shots_budget': sum(c.shots_budget for c in cells),
        }
        return body


class MeasureRunner(ExperimentModule):
    """Postselected energy and diagonal observables at fixed parameters"""

    def __init__(self, config: ExperimentConfig, params: Sequence[float]):
        super().__init__("Measure", config)
        self.params = np.asarray(params, dtype=float)

    def process(self, input_data: Any = None) -> Dict[str, Any]:
        config: ExperimentConfig = self.config
        lattice = lattice_from_config(config)
        layout = layout_from_config(config, lattice)
        noise = noise_from_config(config)
        echo = bool(config.mitigation.spin_echo) and noise is not None
        cells = []
        for sector in sectors_from_config(config):
            seed = derive_seed(config.seed, "measure", sector.n_up, sector.n_down)
            measurements = measurement_set(lattice, sector, self.params, config.layers, layout)
            estimate = estimate_energy(measurements, sector, config.shots.final, seed, noise, echo)
            table = observable_table(estimate, lattice, layout, config.shots.final)
            evaluator = AnsatzEvaluator(lattice, sector, config.layers, layout)
            cells.append({
                'n_occ': sector.n_occ,
                'sector': [sector.n_up, sector.n_down],
                'params': self.params,
                'groups': [g.to_dict() for g in estimate.groups],
                'observables': table_to_dict(table),
                'ansatz_energy': evaluator.energy(self.params),
                'circuit_stats': worst_case_stats(measurements, noise).to_dict(),
                'shots_used': estimate.shots_used,
            })
        return {'cells': cells, 'noise': noise.to_dict() if noise else None, 'seeds': {'master': config.seed}}


class MitigateRunner(ExperimentModule):
    """State-preparation part with every enabled mitigation stage at fixed parameters"""

    def __init__(self, config: ExperimentConfig, params: Sequence[float]):
        super().__init__("Mitigate", config)
        self.params = np.asarray(params, dtype=float)

    def process(self, input_data: Any = None) -> Dict[str, Any]:
        config: ExperimentConfig = self.config
        lattice = lattice_from_config(config)
        layout = layout_from_config(config, lattice)
        noise = noise_from_config(config)
        pipeline = MitigationPipeline(MitigationFlags.from_config(config.mitigation), seed=config.seed)
        results: Dict[int, MitigationResult] = {}
        cells = []
        for sector in sectors_from_config(config):
            seed = derive_seed(config.seed, "mitigate", sector.n_up, sector.n_down)
            runner = CellRunner(config, lattice, layout, sector, noise, seed)
            plus, minus = runner.measure_paired(self.params, config.shots.final, derive_seed(seed, "final", 0))
            training = runner.training_set(self.params, 0)
            results[sector.n_occ] = pipeline.apply(RunRecord(sector, plus, minus, training))
            cells.append((sector, runner))
        pipeline.particle_hole(results, lattice)
        body_cells = []
        for sector, runner in cells:
            mitigated = pipeline.reflect(results[sector.n_occ], lattice)
            body_cells.append({
                'n_occ': sector.n_occ,
                'sector': [sector.n_up, sector.n_down],
                'params': self.params,
                'ansatz_energy': runner.evaluator.energy(self.params),
                'mitigation': mitigated.to_dict(),
                'shots_used': runner.shots_used,
            })
        return {'cells': body_cells, 'noise': noise.to_dict() if noise else None, 'seeds': {'master': config.seed}}


class ExactRunner(ExperimentModule):
    """Exact ground energies, noiseless ansatz optima and optimal Slater energies over occupations"""

    def __init__(self, config: ExperimentConfig):
        super().__init__("Exact", config)

    def process(self, input_data: Any = None) -> Dict[str, Any]:
        config: ExperimentConfig = self.config
        settings = config.exact
        lattice = lattice_from_config(config)
        layout = layout_from_config(config, lattice)
        sectors = sectors_from_config(config)
        if all(s == SectorSpec.from_occupation(s.n_occ) for s in sectors):
            energies = exact_sweep(lattice, [s.n_occ for s in sectors])
        else:
            energies = {s.n_occ: exact_ground(lattice, s)[0] for s in sectors}
        rows = []
        for k, sector in enumerate(sectors):
            row: Dict[str, Any] = {'N_occ': sector.n_occ, 'sector': [sector.n_up, sector.n_down],
                                   'E_exact': energies[sector.n_occ], 'E_vqe': None, 'E_slater': None}
            if settings.include_vqe:
                optimum = simulate_vqe_optimum(lattice, sector, settings.vqe_layers, settings.vqe_restarts,
                                               seed=derive_seed(config.seed, "exact-vqe", sector.n_occ),
                                               layout=layout)
                row['E_vqe'] = optimum.energy
                row['vqe_params'] = optimum.params
            if settings.include_slater:
                row['E_slater'] = optimal_slater(lattice, sector, settings.slater_restarts,
                                                 seed=derive_seed(config.seed, "exact-slater", sector.n_occ)).energy
            rows.append(row)
            self.update_progress(int(100 * (k + 1) / len(sectors)), f"N_occ={sector.n_occ} done")
        return {'rows': rows, 'vqe_layers': settings.vqe_layers, 'seeds': {'master': config.seed}}


class CompareRunner(ExperimentModule):
    """Seeded BayesMGD / MGD / SPSA trials on synthetic noisy quadratics"""

    def __init__(self, config: ExperimentConfig):
        super().__init__("CompareOptimizers", config)

    def process(self, input_data: Any = None) -> Dict[str, Any]:
        config: ExperimentConfig = self.config
        rows = run_comparison(config.compare, seed=config.seed)
        summary = compare_summary(rows)
        return {
            'rows': rows,
            'summary': [{'optimizer': name, 'eta': eta, **values}
                        for (name, eta), values in summary.items()],
            'seeds': {'master': config.seed},
        }
