#!/usr/bin/env python3
"""
Test script for the surrogate belief, BayesMGD, MGD and SPSA
"""

import sys
import os

import numpy as np
import pytest

# Add the src directory to the Python path
sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), 'src'))

TARGET = np.array([0.5, -0.3])


def _bowl(theta):
    return float(np.sum((np.asarray(theta) - TARGET) ** 2))


def test_feature_counts():
    from optimizers import n_features, points_per_iteration, model_features

    assert [n_features(n) for n in (0, 1, 3, 6)] == [1, 3, 10, 28]
    assert points_per_iteration(3, 1.5) == 15
    assert points_per_iteration(4, 1.5) == 23
    assert points_per_iteration(6, 1.5) == 42
    assert points_per_iteration(6, 0.01) == 1
    phi = model_features([2.0, 3.0])
    assert phi.tolist() == [1.0, 2.0, 3.0, 4.0, 6.0, 9.0]
    print("✓ Quadratic feature counts and ordering")


def test_scalar_posterior():
    """Constant model: posterior mean is the precision-weighted average"""
    from optimizers import prior_belief, bayes_update

    prior = prior_belief(0, prior_linear=4.0)
    values = np.array([1.0, 2.0, 4.0])
    sigmas = np.array([1.0, 0.5, 2.0])
    posterior = bayes_update(prior, np.zeros((3, 0)), values, sigmas)
    precision = np.sum(1 / sigmas ** 2) + 1 / 4.0
    assert abs(posterior.sigma[0, 0] - 1 / precision) < 1e-12
    assert abs(posterior.beta[0] - np.sum(values / sigmas ** 2) / precision) < 1e-12
    assert bayes_update(prior, np.zeros((0, 0)), [], []) is prior
    print("✓ Scalar Gaussian update")


def test_update_order_independence():
    from optimizers import prior_belief, bayes_update

    rng = np.random.default_rng(5)
    points = rng.uniform(-1, 1, (20, 2))
    values = rng.normal(size=20)
    sigmas = rng.uniform(0.1, 0.5, 20)
    prior = prior_belief(2, prior_linear=10.0, prior_quadratic=2.0)
    joint = bayes_update(prior, points, values, sigmas)
    ab = bayes_update(bayes_update(prior, points[:8], values[:8], sigmas[:8]), points[8:], values[8:], sigmas[8:])
    ba = bayes_update(bayes_update(prior, points[8:], values[8:], sigmas[8:]), points[:8], values[:8], sigmas[:8])
    for belief in (ab, ba):
        assert np.allclose(belief.beta, joint.beta, atol=1e-9)
        assert np.allclose(belief.sigma, joint.sigma, atol=1e-9)
    print("✓ Sequential updates equal the joint update")


def test_update_validation():
    from optimizers import prior_belief, bayes_update

    prior = prior_belief(1)
    with pytest.raises(ValueError):
        bayes_update(prior, np.zeros((2, 1)), [1.0, 2.0], [0.1])
    with pytest.raises(ValueError):
        bayes_update(prior, np.zeros((1, 1)), [1.0], [0.0])
    print("✓ Invalid measurements are rejected")


def test_kalman_equivalence():
    """Bayes update plus covariance inflation tracks a random-walk Kalman filter"""
    from optimizers import prior_belief, bayes_update, design_matrix, KalmanFilter

    rng = np.random.default_rng(11)
    belief = prior_belief(2, prior_linear=10.0, prior_quadratic=1.0)
    kalman = KalmanFilter(belief.beta, belief.sigma)
    for _ in range(50):
        points = rng.uniform(-1, 1, (4, 2))
        values = rng.normal(size=4)
        sigmas = rng.uniform(0.2, 1.0, 4)
        inflation = (rng.uniform(0.0, 0.05) / 0.2) ** 2
        belief = bayes_update(belief, points, values, sigmas).inflated(inflation)
        kalman.update(values, design_matrix(points), np.diag(sigmas ** 2))
        kalman.predict(Q=inflation * np.eye(belief.beta.size))
    assert np.allclose(kalman.belief.beta, belief.beta, atol=1e-8)
    assert np.allclose(kalman.belief.sigma, belief.sigma, atol=1e-8)
    print("✓ Kalman filter and Bayes update agree over 50 steps")


def test_surrogate_gradient():
    from optimizers import surrogate_value, surrogate_gradient, n_features

    rng = np.random.default_rng(2)
    beta = rng.normal(size=n_features(3))
    theta = rng.normal(size=3)
    h = 1e-6
    numeric = np.array([
        (surrogate_value(beta, theta + h * e) - surrogate_value(beta, theta - h * e)) / (2 * h)
        for e in np.eye(3)
    ])
    assert np.allclose(surrogate_gradient(beta, theta), numeric, atol=1e-6)
    print("✓ Surrogate gradient matches finite differences")


def test_surrogate_predict():
    from optimizers import prior_belief, surrogate_predict

    belief = prior_belief(1, prior_linear=4.0, prior_quadratic=1.0)
    mean, stderr = surrogate_predict(belief, [2.0])
    # phi = [1, 2, 4]
    assert mean == 0.0
    assert abs(stderr - np.sqrt(4.0 + 16.0 + 16.0)) < 1e-12
    print("✓ Surrogate prediction uncertainty")


def test_uniform_ball():
    from optimizers import uniform_ball

    points = uniform_ball(np.random.default_rng(0), 4000, 3, 0.5)
    radii = np.linalg.norm(points, axis=1)
    assert radii.max() <= 0.5 + 1e-12
    # uniform in volume: P(r < R/2) = 1/8
    assert abs(np.mean(radii < 0.25) - 0.125) < 0.02
    print("✓ Uniform sampling inside the trust ball")


def test_weighted_fit_recovers_quadratic():
    from optimizers import weighted_fit, design_matrix

    rng = np.random.default_rng(8)
    points = rng.uniform(-1, 1, (12, 2))
    beta = np.array([1.0, -2.0, 0.5, 3.0, -1.0, 0.25])
    values = design_matrix(points) @ beta
    fitted, covariance = weighted_fit(points, values, np.full(12, 0.1))
    assert np.allclose(fitted, beta, atol=1e-9)
    assert np.all(np.diag(covariance) > 0)
    fitted, covariance = weighted_fit(points, values, np.zeros(12))
    assert np.allclose(fitted, beta, atol=1e-9)
    assert not covariance.any()
    print("✓ Weighted least squares recovers an exact quadratic")


def test_bayesmgd_converges():
    from optimizers import BayesMGD, Hyperparams, FunctionObjective

    optimizer = BayesMGD(Hyperparams(gamma=0.5, max_evals=10000, max_iterations=30))
    result = optimizer.minimize(FunctionObjective(_bowl, 2), np.zeros(2), seed=1)
    assert np.linalg.norm(result.x - TARGET) < 1e-2
    assert result.nfev == 9 * result.nit
    assert result.trace[-1]['exact'] == _bowl(result.x)
    assert result.belief.n_params == 2
    print(f"✓ BayesMGD reaches {result.x} in {result.nit} iterations")


def test_bayesmgd_respects_budget():
    from optimizers import BayesMGD, Hyperparams, FunctionObjective

    result = BayesMGD(Hyperparams(max_evals=20, max_iterations=30)).minimize(
        FunctionObjective(_bowl, 2), np.zeros(2))
    assert result.nit == 2 and result.nfev == 18
    assert result.message == "evaluation budget exhausted"
    with pytest.raises(ValueError):
        BayesMGD().minimize(FunctionObjective(_bowl, 2), np.zeros(3))
    print("✓ Iterations stop before the budget is exceeded")


def test_worker_count_does_not_change_results():
    from optimizers import BayesMGD, Hyperparams, SyntheticQuadratic

    problem = SyntheticQuadratic(3, seed=4, shots=500)
    hyperparams = Hyperparams(max_iterations=5, max_evals=1000)
    serial = BayesMGD(hyperparams).minimize(problem, problem.start(), seed=9)
    threaded = BayesMGD(hyperparams, workers=4).minimize(problem, problem.start(), seed=9)
    assert np.array_equal(serial.x, threaded.x)
    assert serial.fun == threaded.fun
    print("✓ Parallel evaluation is seed-deterministic")


def test_aborted_run_keeps_trace():
    from optimizers import BayesMGD, Hyperparams, NoisyObjective, OptimizationAborted

    class Failing(NoisyObjective):
        calls = 0

        @property
        def dimension(self):
            return 1

        def evaluate(self, theta, seed):
            Failing.calls += 1
            if Failing.calls > 5:
                raise RuntimeError("device offline")
            return float(theta[0] ** 2), 0.01

    with pytest.raises(OptimizationAborted) as info:
        BayesMGD(Hyperparams(max_evals=1000)).minimize(Failing(), [1.0])
    # five points per iteration in one dimension
    assert len(info.value.trace) == 1
    print("✓ Objective failures surface with the partial trace")


def test_mgd_converges():
    from optimizers import MGD, Hyperparams, FunctionObjective

    result = MGD(Hyperparams(gamma=0.5, max_evals=10000, max_iterations=30)).minimize(
        FunctionObjective(_bowl, 2), np.zeros(2), seed=2)
    assert np.linalg.norm(result.x - TARGET) < 1e-2
    print("✓ MGD converges on a noiseless bowl")


def test_spsa_converges():
    from optimizers import SPSA, SpsaHyperparams, FunctionObjective

    result = SPSA(SpsaHyperparams()).minimize(FunctionObjective(_bowl, 2), np.zeros(2), seed=3)
    assert result.nit == 150 and result.nfev == 300
    assert _bowl(result.x) < 0.01
    print(f"✓ SPSA final value {_bowl(result.x):.2e}")


def test_presets():
    from optimizers import load_preset, Hyperparams, SpsaHyperparams
    from core.errors import ConfigError

    assert load_preset('bayesmgd-1x4').max_evals == 2520
    assert isinstance(load_preset('spsa-paper'), SpsaHyperparams)
    assert load_preset('spsa') == load_preset('spsa-paper')
    tuned = load_preset('bayesmgd-2x4', {'eta': 0.7})
    assert tuned.eta == 0.7 and tuned.gamma == 0.6
    with pytest.raises(ConfigError):
        load_preset('adam')
    with pytest.raises(ConfigError):
        load_preset('mgd', {'momentum': 0.9})
    with pytest.raises(ConfigError):
        Hyperparams(gamma=-1.0)
    with pytest.raises(ConfigError):
        Hyperparams(alpha=1.5)
    print("✓ Presets, overrides and validation")


def test_optimizer_factory():
    from optimizers import OptimizerFactory, BayesMGD, MGD, SPSA
    from core.errors import ConfigError

    assert isinstance(OptimizerFactory.create_optimizer('BayesMGD'), BayesMGD)
    assert isinstance(OptimizerFactory.create_optimizer('mgd'), MGD)
    spsa = OptimizerFactory.create_optimizer('spsa', overrides={'a': 0.1})
    assert isinstance(spsa, SPSA) and spsa.hyperparams.a == 0.1
    assert spsa.get_optimizer_info()['name'] == 'spsa'
    with pytest.raises(ConfigError):
        OptimizerFactory.create_optimizer('spsa', preset='mgd')
    with pytest.raises(ConfigError):
        OptimizerFactory.create_optimizer('nelder-mead')
    assert set(OptimizerFactory.get_available_providers()) >= {'bayesmgd', 'mgd', 'spsa'}
    print("✓ Optimizer factory")


def test_synthetic_quadratic():
    from optimizers import SyntheticQuadratic

    problem = SyntheticQuadratic(4, seed=3, shots=100)
    assert problem.exact(problem.minimizer) == -1.0
    assert np.all(np.linalg.eigvalsh(problem.hessian) > 0.49)
    assert abs(np.linalg.norm(problem.start() - problem.minimizer) - 1.0) < 1e-12
    assert problem.noise == 0.1 and problem.with_shots(400).noise == 0.05
    assert problem.evaluate(problem.minimizer, 7) == problem.evaluate(problem.minimizer, 7)
    print("✓ Synthetic noisy quadratic")


@pytest.mark.slow
def test_shots_matched_comparison():
    from core.config import CompareConfig
    from optimizers import run_comparison, compare_summary, SyntheticQuadratic
    from utils.random_streams import derive_seed

    config = CompareConfig(n_params=3, etas=[1.5], seeds=3, iterations=10)
    rows = run_comparison(config, seed=1)
    assert rows == run_comparison(config, seed=1)
    summary = compare_summary(rows)
    assert set(summary) == {('bayesmgd', 1.5), ('mgd', 1.5), ('spsa', None)}
    assert all(entry['runs'] == 3 for entry in summary.values())
    start = np.median([
        SyntheticQuadratic(3, derive_seed(1, "synthetic", s)).exact(
            SyntheticQuadratic(3, derive_seed(1, "synthetic", s)).start())
        for s in range(3)
    ])
    assert summary[('bayesmgd', 1.5)]['median'] < start
    print(f"✓ Comparison summary {summary}")


def main():
    """Run all tests"""
    print("Hubbard VQE Lab - Optimizers Test")
    print("=" * 30)

    tests = [
        ("Feature Counts", test_feature_counts),
        ("Scalar Posterior", test_scalar_posterior),
        ("Update Order", test_update_order_independence),
        ("Update Validation", test_update_validation),
        ("Kalman Equivalence", test_kalman_equivalence),
        ("Surrogate Gradient", test_surrogate_gradient),
        ("Surrogate Prediction", test_surrogate_predict),
        ("Uniform Ball", test_uniform_ball),
        ("Weighted Fit", test_weighted_fit_recovers_quadratic),
        ("BayesMGD Convergence", test_bayesmgd_converges),
        ("BayesMGD Budget", test_bayesmgd_respects_budget),
        ("Worker Determinism", test_worker_count_does_not_change_results),
        ("Aborted Run", test_aborted_run_keeps_trace),
        ("MGD Convergence", test_mgd_converges),
        ("SPSA Convergence", test_spsa_converges),
        ("Presets", test_presets),
        ("Optimizer Factory", test_optimizer_factory),
        ("Synthetic Quadratic", test_synthetic_quadratic),
        ("Shots-Matched Comparison", test_shots_matched_comparison),
    ]

    passed = 0
    for test_name, test_func in tests:
        print(f"\n{test_name}:")
        try:
            test_func()
            passed += 1
        except Exception as e:
            print(f"✗ {test_name} failed: {e}")

    print(f"\nTest Results: {passed}/{len(tests)} tests passed")
    return passed == len(tests)


if __name__ == "__main__":
    sys.exit(0 if main() else 1)
