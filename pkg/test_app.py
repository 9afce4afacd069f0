#!/usr/bin/env python3
"""
Test script for Hubbard VQE Lab application: configuration, runners and command line
"""

import sys
import os
import json
import tempfile
from pathlib import Path

import pytest

# Add the src directory to the Python path
sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), 'src'))

TINY_CONFIG = {
    "lattice": {"Lx": 1, "Ly": 2, "U": 4.0},
    "sectors": {"n_occ": [2]},
    "layers": 1,
    "optimizer": {"name": "bayesmgd", "preset": "bayesmgd-1x8",
                  "overrides": {"max_evals": 60, "max_iterations": 2}},
    "shots": {"per_eval": 200, "final": 2000, "tflo_closest": 2000, "tflo_training": 500, "tflo_points": 4},
    "repetitions": 1,
    "seed": 7,
}


def _write_config(directory: str, data: dict, name: str = "config.json") -> str:
    path = os.path.join(directory, name)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(data, f)
    return path


def test_imports():
    """Test that all modules can be imported"""
    from core.config import Config, ExperimentConfig
    from core.base_module import ExperimentModule
    from optimizers.optimizer_factory import OptimizerFactory
    from cli.app import main, build_parser
    assert Config and ExperimentConfig and ExperimentModule and OptimizerFactory and main and build_parser
    print("✓ All core modules imported successfully")


def test_config_round_trip():
    """Configuration file is created, saved and reloaded unchanged"""
    from core.config import Config

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "config.json")
        config = Config(path)
        assert Path(path).exists()
        assert config.get_lattice().Ly == 8
        assert config.get_sectors() == [(4, 4)]

        config.set('layers', 2)
        config.save()
        reloaded = Config(path)
        assert reloaded.experiment.to_dict() == config.experiment.to_dict()
        assert reloaded.get('layers') == 2
    print("✓ Configuration round trip works")


def test_config_template_is_valid():
    from core.config import ExperimentConfig

    template = Path(__file__).parent / "config_template.json"
    data = json.loads(template.read_text(encoding='utf-8'))
    config = ExperimentConfig.from_dict(data)
    assert config.to_dict() == data
    print("✓ config_template.json documents every key")


def test_config_rejects_bad_values():
    from core.config import ExperimentConfig
    from core.errors import ConfigError

    bad = [
        {"unknown_key": 1},
        {"lattice": {"Lx": 3, "Ly": 2, "U": 1.0}},
        {"lattice": {"Lx": 1, "Ly": 4, "U": 1.0, "t": 2.0}},
        {"layout": "spiral"},
        {"mitigation": {"postselect": False}},
        {"mitigation": {"tflo": False, "coherent_correction": True}},
        {"optimizer": {"name": "adam"}},
        {"optimizer": {"name": "spsa", "preset": "spsa-fast"}},
        {"sectors": {"n_up": 9, "n_down": 0}},
        {"sectors": {"n_up": 1}},
        {"shots": {"per_eval": 0}},
    ]
    for data in bad:
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict(data)
    spsa = ExperimentConfig.from_dict({"optimizer": {"name": "spsa", "preset": "spsa-paper"}})
    assert spsa.optimizer.preset == "spsa-paper"
    print("✓ Invalid configurations are rejected")


def test_sector_resolution():
    from core.config import SectorConfig, split_occupation

    assert split_occupation(7) == (4, 3)
    assert split_occupation(8) == (4, 4)
    assert SectorConfig(n_occ=[3, 4]).resolve(4) == [(2, 1), (2, 2)]
    assert SectorConfig(sweep=True).resolve(2) == [(1, 0), (1, 1), (2, 1)]
    assert SectorConfig().resolve(4) == [(2, 2)]
    assert SectorConfig(n_up=3, n_down=1).resolve(4) == [(3, 1)]
    print("✓ Sector resolution works")


def test_optimizer_factory():
    from core.config import OptimizerConfig
    from core.errors import ConfigError
    from optimizers import BayesMGD, MGD, SPSA, OptimizerFactory

    assert set(OptimizerFactory.get_available_providers()) >= {'bayesmgd', 'mgd', 'spsa'}
    optimizer = OptimizerFactory.create_optimizer('bayesmgd', 'bayesmgd-2x4', {'eta': 0.7})
    assert isinstance(optimizer, BayesMGD)
    assert optimizer.hyperparams.gamma == 0.6 and optimizer.hyperparams.eta == 0.7
    assert optimizer.get_optimizer_info()['name'] == 'bayesmgd'

    assert isinstance(OptimizerFactory.create_optimizer('mgd'), MGD)
    assert isinstance(OptimizerFactory.create_optimizer_from_config(OptimizerConfig(name='spsa')), SPSA)
    assert isinstance(OptimizerFactory.create_optimizer_from_config(OptimizerConfig(name='mgd')), MGD)
    standard = OptimizerFactory.create_optimizer_from_config(OptimizerConfig(name='spsa', preset='spsa-paper'))
    assert isinstance(standard, SPSA) and standard.hyperparams.a == 0.2

    with pytest.raises(ConfigError):
        OptimizerFactory.create_optimizer('adam')
    with pytest.raises(ConfigError):
        OptimizerFactory.create_optimizer('spsa', 'bayesmgd-1x8')
    with pytest.raises(ConfigError):
        OptimizerFactory.create_optimizer('bayesmgd', 'bayesmgd-1x8', {'momentum': 0.9})
    print("✓ Optimizer factory works")


def test_register_provider():
    from optimizers import OptimizerFactory
    from optimizers.mgd import MGD

    class DampedMGD(MGD):
        name = "damped-mgd"

    OptimizerFactory.register_provider('damped-mgd', DampedMGD, default_preset='mgd')
    try:
        optimizer = OptimizerFactory.create_optimizer('damped-mgd')
        assert isinstance(optimizer, DampedMGD)
    finally:
        OptimizerFactory._providers.pop('damped-mgd', None)
        OptimizerFactory._default_presets.pop('damped-mgd', None)
    print("✓ Custom optimizers can be registered")


def test_experiment_module_records_failures():
    from core.base_module import ExperimentModule

    class Failing(ExperimentModule):
        def process(self, input_data):
            self.set_partial_result({'cells': [1]})
            raise RuntimeError("boom")

    progress = []
    module = Failing("Failing", {'seed': 3})
    module.add_progress_callback(lambda pct, msg: progress.append(pct))
    with pytest.raises(RuntimeError):
        module.run()
    assert module.result == {'cells': [1]}
    assert module.errors == ["Error in Failing: boom"]
    assert not module.is_running
    assert progress == [0]
    assert module.get_config('seed') == 3
    print("✓ Runner failures keep partial results")


def test_parallel_sweep_keeps_finished_cells():
    """A failing cell in a parallel sweep leaves the finished cells in the partial result"""
    from unittest import mock
    from core.config import ExperimentConfig
    from cli.runners import VqeRunner, CellRunner, CellResult

    def run_or_fail(self, pipeline):
        if self.sector.n_occ == 3:
            raise RuntimeError("cell failed")
        return CellResult(self.sector, seed=1)

    config = ExperimentConfig.from_dict(dict(TINY_CONFIG, sectors={"n_occ": [1, 2, 3]}))
    runner = VqeRunner(config, workers=2)
    with mock.patch.object(CellRunner, 'run', run_or_fail):
        with pytest.raises(RuntimeError):
            runner.run()
    assert sorted(cell['n_occ'] for cell in runner.result['cells']) == [1, 2]
    assert len(runner.result['errors']) == 1
    print("✓ Parallel sweeps keep finished cells on failure")


def test_exit_codes():
    from cli.app import exit_code
    from core.errors import (
        ConfigError, EmptyPostselectionError, ParameterLengthError, SimulationInfeasibleError,
        UnsupportedLatticeError,
    )

    assert exit_code(ConfigError("x")) == 2
    assert exit_code(UnsupportedLatticeError("x")) == 2
    assert exit_code(ParameterLengthError("x")) == 2
    assert exit_code(SimulationInfeasibleError("x")) == 3
    assert exit_code(EmptyPostselectionError("x")) == 4
    assert exit_code(RuntimeError("x")) == 1
    print("✓ Exceptions map to exit codes")


def test_cli_config_errors():
    from cli.app import main

    with tempfile.TemporaryDirectory() as tmp:
        assert main(["exact", "--config", os.path.join(tmp, "missing.json")]) == 2
        path = _write_config(tmp, {"lattice": {"Lx": 1, "Ly": 4, "U": 4.0}, "typo": 1})
        assert main(["exact", "--config", path]) == 2

        path = _write_config(tmp, dict(TINY_CONFIG, output=os.path.join(tmp, "m.json")), "tiny.json")
        assert main(["measure", "--config", path, "--params", "0.1,0.2"]) == 2
    print("✓ Configuration errors exit with status 2")


def test_cli_infeasible_exit_code():
    from cli.app import main

    with tempfile.TemporaryDirectory() as tmp:
        config = {"lattice": {"Lx": 2, "Ly": 7, "U": 4.0}, "sectors": {"n_occ": [2]},
                  "output": os.path.join(tmp, "big.json")}
        path = _write_config(tmp, config)
        assert main(["measure", "--config", path, "--params", "0,0,0,0"]) == 3
    print("✓ Oversized registers exit with status 3")


def test_cli_exact_writes_results():
    from cli.app import main
    from cli.results import load_results, read_csv

    with tempfile.TemporaryDirectory() as tmp:
        out = os.path.join(tmp, "exact.json")
        config = {"lattice": {"Lx": 1, "Ly": 2, "U": 4.0}, "sectors": {"sweep": True},
                  "exact": {"vqe_layers": 1, "vqe_restarts": 2, "slater_restarts": 2}}
        path = _write_config(tmp, config)
        assert main(["exact", "--config", path, "--out", out, "--seed", "5"]) == 0

        document = load_results(out)
        assert document['command'] == "exact"
        assert document['config']['seed'] == 5
        assert [row['N_occ'] for row in document['rows']] == [1, 2, 3]
        for row in document['rows']:
            assert row['E_vqe'] >= row['E_exact'] - 1e-8
            assert row['E_slater'] >= row['E_exact'] - 1e-8
        rows = read_csv(os.path.join(tmp, "exact.csv"))
        assert [r['N_occ'] for r in rows] == ['1', '2', '3']
    print("✓ exact subcommand writes JSON and CSV")


@pytest.mark.slow
def test_cli_vqe_deterministic_and_budgeted():
    """Identical seeds give byte-identical results; shots match the closed-form budget"""
    from cli.app import main
    from cli.results import load_results

    with tempfile.TemporaryDirectory() as tmp:
        outputs = []
        for name in ("a.json", "b.json"):
            out = os.path.join(tmp, name)
            path = _write_config(tmp, dict(TINY_CONFIG, output=out), "c_" + name)
            assert main(["vqe", "--config", path]) == 0
            outputs.append(Path(out).read_text(encoding='utf-8'))
        first = json.loads(outputs[0])
        second = json.loads(outputs[1])
        first.pop('config')
        second.pop('config')
        assert first == second

        document = load_results(os.path.join(tmp, "a.json"))
        assert document['shots_used'] == document['shots_budget']
        cell = document['cells'][0]
        stages = list(cell['mitigation']['stages'])
        assert stages == ["PS", "Sym", "TFLO", "Coh", "PHS", "Refl"]
        assert cell['repetitions'][0]['optimizer']['name'] == "bayesmgd"
        assert os.path.exists(os.path.join(tmp, "a.csv"))

        plot = os.path.join(tmp, "sweep.png")
        assert main(["stats", "--results", os.path.join(tmp, "a.json"), "--plot", plot]) == 0
        assert os.path.getsize(plot) > 0
    print("✓ vqe subcommand is deterministic and within budget")


@pytest.mark.slow
def test_cli_vqe_chain_reaches_depth_one_optimum():
    """Noiseless 1x8 BayesMGD runs land within 0.05 of -3.478 in at least 8 of 10 seeds"""
    from cli.app import main
    from cli.results import load_results

    hits = 0
    with tempfile.TemporaryDirectory() as tmp:
        for seed in range(10):
            out = os.path.join(tmp, f"chain_{seed}.json")
            config = {
                "lattice": {"Lx": 1, "Ly": 8, "U": 4.0},
                "sectors": {"n_occ": [8]},
                "layers": 1,
                "optimizer": {"name": "bayesmgd", "preset": "bayesmgd-1x8"},
                "shots": {"per_eval": 1000, "final": 1000, "tflo_closest": 1000, "tflo_training": 1000,
                          "tflo_points": 4},
                "mitigation": {"tflo": False, "coherent_correction": False},
                "repetitions": 1,
                "seed": seed,
                "output": out,
            }
            path = _write_config(tmp, config, f"chain_{seed}.config.json")
            assert main(["vqe", "--config", path]) == 0
            repetition = load_results(out)['cells'][0]['repetitions'][0]
            assert repetition['optimizer']['nit'] <= 10
            if abs(repetition['ansatz_energy'] - (-3.478)) < 0.05:
                hits += 1
    assert hits >= 8
    print(f"✓ {hits}/10 seeded CLI runs within 0.05 of the depth-1 optimum")


def test_cli_mitigate_and_dump_circuit():
    from cli.app import main
    from cli.results import load_results
    from core.circuits.circuit import Circuit

    with tempfile.TemporaryDirectory() as tmp:
        out = os.path.join(tmp, "mit.json")
        dump = os.path.join(tmp, "circuits.txt")
        config = dict(TINY_CONFIG, output=out)
        config["mitigation"] = {"tflo": False, "coherent_correction": False}
        path = _write_config(tmp, config)
        assert main(["mitigate", "--config", path, "--params", "0.3,0.2,-0.1", "--dump-circuit", dump]) == 0
        document = load_results(out)
        stages = list(document['cells'][0]['mitigation']['stages'])
        assert stages == ["PS", "Sym", "PHS", "Refl"]

        sections = Path(dump).read_text(encoding='utf-8').split("# sector")
        circuits = [Circuit.from_text(s.split("\n", 1)[1]) for s in sections if s.strip()]
        assert len(circuits) == 2
        assert all(c.n_qubits == 4 for c in circuits)
    print("✓ mitigate subcommand reports every enabled stage")


def main():
    """Run all tests"""
    print("Hubbard VQE Lab - System Test")
    print("=" * 30)

    tests = [
        ("Import Test", test_imports),
        ("Configuration Round Trip", test_config_round_trip),
        ("Configuration Template", test_config_template_is_valid),
        ("Configuration Validation", test_config_rejects_bad_values),
        ("Sector Resolution", test_sector_resolution),
        ("Optimizer Factory", test_optimizer_factory),
        ("Provider Registration", test_register_provider),
        ("Runner Failures", test_experiment_module_records_failures),
        ("Parallel Partial Results", test_parallel_sweep_keeps_finished_cells),
        ("Exit Codes", test_exit_codes),
        ("CLI Configuration Errors", test_cli_config_errors),
        ("CLI Infeasible Lattice", test_cli_infeasible_exit_code),
        ("CLI Exact", test_cli_exact_writes_results),
        ("CLI Mitigate", test_cli_mitigate_and_dump_circuit),
    ]

    passed = 0
    total = len(tests)

    for test_name, test_func in tests:
        print(f"\n{test_name}:")
        try:
            test_func()
            passed += 1
        except Exception as e:
            print(f"✗ {test_name} failed: {e}")

    print(f"\nTest Results: {passed}/{total} tests passed")

    if passed == total:
        print("🎉 All tests passed! The system is ready to use.")
        print("\nNext steps:")
        print("1. Copy config_template.json to config.json and pick a lattice")
        print("2. Run 'python main.py vqe --config config.json -v'")
    else:
        print("❌ Some tests failed. Check the error messages above.")
    return passed == total


if __name__ == "__main__":
    sys.exit(0 if main() else 1)
