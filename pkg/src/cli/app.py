"""
Command-line front-end: subcommands, config overrides, outputs and exit codes
"""

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from core.config import Config, ExperimentConfig
from core.errors import (
    ConfigError, EmptyPostselectionError, HubbardVqeError, ParameterLengthError, SimulationInfeasibleError,
    UnsupportedLatticeError,
)
from core.simulator.noise import NOISE_PRESETS
from .results import (
    COMPARE_COLUMNS, EXACT_COLUMNS, MITIGATE_COLUMNS, SWEEP_COLUMNS,
    csv_path, format_table, load_results, results_document, sweep_rows, write_csv, write_results,
)
from .runners import (
    CompareRunner, ExactRunner, MeasureRunner, MitigateRunner, VqeRunner,
    lattice_from_config, layout_from_config, measurement_set, noise_from_config, sectors_from_config,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_POSTSELECTION = 4


def exit_code(error: BaseException) -> int:
    if isinstance(error, (ConfigError, UnsupportedLatticeError, ParameterLengthError)):
        return EXIT_CONFIG
    if isinstance(error, SimulationInfeasibleError):
        return EXIT_INFEASIBLE
    if isinstance(error, EmptyPostselectionError):
        return EXIT_POSTSELECTION
    return EXIT_FAILURE


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON experiment configuration")
    common.add_argument("--seed", type=int, help="Master seed (overrides the config)")
    common.add_argument("--out", metavar="PATH", help="Results file (overrides the config); CSV goes next to it")
    common.add_argument("--noise", metavar="PRESET", choices=sorted(NOISE_PRESETS),
                        help="Noise preset (overrides the config)")
    common.add_argument("-v", "--verbose", action="store_true", help="Log progress at INFO level")

    parser = argparse.ArgumentParser(prog="hubbard-vqe",
                                     description="Fermi-Hubbard VQE simulation, optimization and error mitigation.")
    sub = parser.add_subparsers(dest="command", required=True)

    vqe = sub.add_parser("vqe", parents=[common], help="Optimize, prepare and mitigate every configured sector")
    vqe.add_argument("--workers", type=int, default=1, help="Threads for independent evaluations and cells")
    vqe.add_argument("--dump-circuit", nargs="?", const="-", metavar="PATH",
                     help="Write the measurement circuits at zero parameters (stdout without PATH)")

    sub.add_parser("exact", parents=[common], help="Exact, noiseless-VQE and Slater energies over occupations")

    for name, text in (("measure", "Energy and diagonal observables at fixed parameters"),
                       ("mitigate", "Mitigation stage breakdown at fixed parameters")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--params", help="Comma-separated parameters")
        p.add_argument("--from-results", metavar="PATH", help="Take the selected optimum of a vqe results file")
        p.add_argument("--dump-circuit", nargs="?", const="-", metavar="PATH",
                       help="Write the measurement circuits (stdout without PATH)")

    sub.add_parser("compare-optimizers", parents=[common], help="Shots-matched optimizer comparison")

    stats = sub.add_parser("stats", parents=[common], help="Summarize a vqe results file")
    stats.add_argument("--results", metavar="PATH", help="vqe results file (defaults to the configured output)")
    stats.add_argument("--plot", metavar="PATH", help="Write E(N) and mu(N) panels")
    return parser


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    """Configuration file (or defaults) with command-line overrides applied"""
    config = Config(args.config, create_missing=False).experiment if args.config else ExperimentConfig()
    if args.seed is not None:
        config.seed = args.seed
    if args.out is not None:
        config.output = args.out
    if args.noise is not None:
        config.noise = replace(config.noise, preset=args.noise)
    config.validate()
    return config


def parse_params(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",") if v.strip()], dtype=float)
    except ValueError as e:
        raise ConfigError(f"cannot parse --params '{text}': {str(e)}")


def resolve_params(args: argparse.Namespace, config: ExperimentConfig) -> np.ndarray:
    if args.params:
        return parse_params(args.params)
    if args.from_results:
        document = load_results(args.from_results)
        cells = document.get('cells') or []
        if not cells or cells[0].get('selected') is None:
            raise ConfigError(f"{args.from_results} holds no optimized parameters")
        return np.asarray(cells[0]['repetitions'][cells[0]['selected']]['params'], dtype=float)
    if config.params is not None:
        return np.asarray(config.params, dtype=float)
    raise ConfigError("parameters required: pass --params, --from-results or set 'params' in the config")


def dump_circuits(config: ExperimentConfig, params: Sequence[float], target: str):
    lattice = lattice_from_config(config)
    layout = layout_from_config(config, lattice)
    chunks = []
    for sector in sectors_from_config(config):
        for m in measurement_set(lattice, sector, params, config.layers, layout):
            chunks.append(f"# sector {sector.n_up} {sector.n_down} group {m.group.name.lower()}\n")
            chunks.append(m.circuit.to_text())
    text = "".join(chunks)
    if target == "-":
        sys.stdout.write(text)
    else:
        Path(target).write_text(text, encoding='utf-8')
        logger.info("Circuits written to %s", target)


# Subcommands

def cmd_vqe(args, config: ExperimentConfig) -> Dict[str, Any]:
    if args.dump_circuit:
        n_params = lattice_from_config(config).params_per_layer * config.layers
        dump_circuits(config, np.zeros(n_params), args.dump_circuit)
    body = _run(VqeRunner(config, workers=args.workers), config, "vqe")
    rows = sweep_rows(body['sweep'])
    write_csv(rows, SWEEP_COLUMNS, csv_path(config.output))
    print(format_table(rows, SWEEP_COLUMNS))
    return body


def cmd_exact(args, config: ExperimentConfig) -> Dict[str, Any]:
    body = _run(ExactRunner(config), config, "exact")
    write_csv(body['rows'], EXACT_COLUMNS, csv_path(config.output))
    print(format_table(body['rows'], EXACT_COLUMNS))
    return body


def cmd_measure(args, config: ExperimentConfig) -> Dict[str, Any]:
    params = resolve_params(args, config)
    if args.dump_circuit:
        dump_circuits(config, params, args.dump_circuit)
    body = _run(MeasureRunner(config, params), config, "measure")
    rows = [{'N_occ': c['n_occ'], 'E': c['observables']['energy']['value'],
             'stderr': c['observables']['energy']['stderr'], 'E_ansatz': c['ansatz_energy']}
            for c in body['cells']]
    print(format_table(rows, ['N_occ', 'E', 'stderr', 'E_ansatz']))
    return body


def cmd_mitigate(args, config: ExperimentConfig) -> Dict[str, Any]:
    params = resolve_params(args, config)
    if args.dump_circuit:
        dump_circuits(config, params, args.dump_circuit)
    body = _run(MitigateRunner(config, params), config, "mitigate")
    rows = []
    for cell in body['cells']:
        for stage, table in cell['mitigation']['stages'].items():
            if 'energy' in table:
                rows.append({'N_occ': cell['n_occ'], 'stage': stage, 'value': table['energy']['value'],
                             'stderr': table['energy']['stderr']})
    write_csv(rows, MITIGATE_COLUMNS, csv_path(config.output))
    print(format_table(rows, MITIGATE_COLUMNS))
    return body


def cmd_compare(args, config: ExperimentConfig) -> Dict[str, Any]:
    body = _run(CompareRunner(config), config, "compare-optimizers")
    write_csv(body['rows'], COMPARE_COLUMNS, csv_path(config.output))
    print(format_table(body['summary'], ['optimizer', 'eta', 'median', 'spread', 'runs']))
    return body


def cmd_stats(args, config: ExperimentConfig) -> Dict[str, Any]:
    path = args.results or config.output
    document = load_results(path)
    if 'sweep' not in document:
        raise ConfigError(f"{path} is not a vqe results file")
    rows = sweep_rows(document['sweep'])
    print(format_table(rows, SWEEP_COLUMNS))
    if args.plot:
        from .plotting import plot_sweep
        exact = {c['n_occ']: c['exact_energy'] for c in document.get('cells', []) if c.get('exact_energy') is not None}
        plot_sweep(document['sweep'], args.plot, exact=exact or None)
    return document


COMMANDS = {
    'vqe': cmd_vqe,
    'exact': cmd_exact,
    'measure': cmd_measure,
    'mitigate': cmd_mitigate,
    'compare-optimizers': cmd_compare,
    'stats': cmd_stats,
}


def _run(runner, config: ExperimentConfig, command: str) -> Dict[str, Any]:
    """
    Run a module and write its results file. On failure the partial result
    and the recorded errors are written before the exception propagates.
    """
    try:
        body = runner.run()
    except Exception:
        partial = dict(runner.result or {})
        partial['errors'] = runner.errors
        write_results(results_document(command, config.to_dict(), partial), config.output)
        raise
    write_results(results_document(command, config.to_dict(), body), config.output)
    return body


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        config = load_config(args)
        COMMANDS[args.command](args, config)
    except HubbardVqeError as e:
        logger.error(str(e))
        print(f"error: {e}", file=sys.stderr)
        return exit_code(e)
    return EXIT_OK
