import math

import numpy as np
import pytest
from scipy.optimize import linprog

from multiport_bell.quantum import ExperimentConfig, correlation_matrix, joint_probabilities
from multiport_bell.simplex import check_certificate, solve
from multiport_bell.strategies import StrategyMatrix
from multiport_bell.threshold import (
    builtin_config,
    correlation_lp,
    correlation_threshold,
    probability_lp,
    probability_threshold,
    scan,
)

V_QUTRIT = (6 * math.sqrt(3) - 9) / 2
F_QUTRIT = (11 - 6 * math.sqrt(3)) / 2
V_QUBIT = 1 / math.sqrt(2)


def random_config(rng, dimension):
    phases = rng.uniform(0, 2 * np.pi, size=(4, dimension))
    return ExperimentConfig(dimension, tuple(map(tuple, phases[:2])), tuple(map(tuple, phases[2:])))


def test_builtin_configs_exact_phases():
    qutrit = builtin_config("paper-qutrit")
    assert qutrit.dimension == 3
    assert set(qutrit.alice_settings) == {
        (0.0, 0.0, 0.0),
        (0.0, math.pi / 3, -math.pi / 3),
    }
    assert qutrit.bob_settings == (
        (0.0, math.pi / 6, -math.pi / 6),
        (0.0, -math.pi / 6, math.pi / 6),
    )
    qubit = builtin_config("chsh-qubit")
    assert qubit.dimension == 2
    with pytest.raises(ValueError):
        builtin_config("nonsense")


def test_qutrit_correlation_threshold():
    result = correlation_threshold(builtin_config("paper-qutrit"))
    assert abs(result.v_thr - V_QUTRIT) <= 1e-9
    assert abs(result.f_thr - F_QUTRIT) <= 1e-9
    assert result.method == "correlation"
    assert result.dimension == 3


def test_zero_phase_config_is_classical():
    for dimension in (2, 3):
        cfg = ExperimentConfig(
            dimension, ((0.0,) * dimension,) * 2, ((0.0,) * dimension,) * 2
        )
        assert correlation_threshold(cfg).v_thr == pytest.approx(1.0, abs=1e-9)


def test_chsh_qubit_both_methods():
    cfg = builtin_config("chsh-qubit")
    assert abs(correlation_threshold(cfg).v_thr - V_QUBIT) <= 1e-9
    assert abs(probability_threshold(cfg).v_thr - V_QUBIT) <= 1e-9


def test_probability_matches_correlation_at_qutrit_settings():
    cfg = builtin_config("paper-qutrit")
    assert abs(probability_threshold(cfg).v_thr - correlation_threshold(cfg).v_thr) <= 1e-6


def test_probability_never_exceeds_correlation():
    rng = np.random.default_rng(33)
    for _ in range(25):
        cfg = random_config(rng, 3)
        v_corr = correlation_threshold(cfg).v_thr
        v_prob = probability_threshold(cfg).v_thr
        assert v_prob <= v_corr + 1e-7


def test_threshold_result_invariants():
    for method in (correlation_threshold, probability_threshold):
        result = method(builtin_config("paper-qutrit"))
        weights = np.array(list(result.weights.values()))
        assert weights.min() >= 0.0
        assert abs(weights.sum() - 1.0) <= 1e-9
        assert 0.0 <= result.v_thr <= 1.0 + 1e-12
        assert result.residual <= 1e-8
        assert result.f_thr == pytest.approx(1.0 - result.v_thr, abs=1e-15)


def test_correlation_weights_reconstruct_scaled_matrix():
    cfg = builtin_config("paper-qutrit")
    result = correlation_threshold(cfg)
    reconstruction = np.zeros((2, 2), dtype=complex)
    for strategy, weight in result.weights.items():
        reconstruction += weight * StrategyMatrix(3, strategy).values
    target = result.v_thr * correlation_matrix(cfg)
    assert np.max(np.abs(reconstruction - target)) <= 1e-8


def test_probability_weights_reconstruct_mixed_tables():
    cfg = builtin_config("paper-qutrit")
    result = probability_threshold(cfg)
    n = cfg.dimension
    for i in range(2):
        for j in range(2):
            table = np.zeros((n, n))
            for strategy, weight in result.weights.items():
                table[strategy.alice[i], strategy.bob[j]] += weight
            pure = joint_probabilities(cfg, i, j)
            target = result.v_thr * pure + (1 - result.v_thr) / n**2
            assert np.max(np.abs(table - target)) <= 1e-8


def test_visibility_pinned_above_threshold_is_infeasible():
    cfg = builtin_config("paper-qutrit")
    v_thr = correlation_threshold(cfg).v_thr
    pinned, _ = correlation_lp(cfg, pin_visibility=v_thr + 1e-4)
    assert solve(pinned).status == "infeasible"
    achievable, _ = correlation_lp(cfg, pin_visibility=v_thr - 1e-6)
    assert solve(achievable).status == "optimal"


def test_certificate_at_threshold_optimum():
    lp, _ = correlation_lp(builtin_config("paper-qutrit"))
    solution = solve(lp)
    report = check_certificate(lp, solution)
    assert report.passed
    assert report.max_residual <= 1e-8


def test_uniform_statistics_admit_full_visibility():
    # phase differences of pi/2 everywhere make every coincidence table uniform
    cfg = ExperimentConfig(
        2,
        ((0.0, 0.0), (0.0, -math.pi)),
        ((0.0, -math.pi / 2), (0.0, math.pi / 2)),
    )
    assert probability_threshold(cfg).v_thr == pytest.approx(1.0, abs=1e-9)
    assert correlation_threshold(cfg).v_thr == pytest.approx(1.0, abs=1e-9)


def test_thresholds_match_scipy_reference():
    for name in ("paper-qutrit", "chsh-qubit"):
        cfg = builtin_config(name)
        for build in (correlation_lp, probability_lp):
            lp, _ = build(cfg)
            mine = solve(lp)
            reference = linprog(
                -lp.objective,
                A_eq=lp.constraint_matrix,
                b_eq=lp.rhs,
                bounds=(0, None),
                method="highs",
            )
            assert mine.status == "optimal" and reference.status == 0
            assert mine.objective_value == pytest.approx(-reference.fun, abs=1e-7)


def test_scan_validation():
    with pytest.raises(ValueError):
        scan(7, 1, 0)
    with pytest.raises(ValueError):
        scan(3, 0, 0)
    with pytest.raises(ValueError):
        scan(3, 1, 0, method="nope")


def test_scan_deterministic_repeat():
    first = scan(2, 1, 3)
    second = scan(2, 1, 3)
    assert first.best_f_thr == second.best_f_thr
    assert first.history == second.history
    assert first.best_config == second.best_config


def test_scan_qubit_recovers_chsh_threshold():
    result = scan(2, 10, 7)
    assert result.best_f_thr >= (2 - math.sqrt(2)) / 2 - 1e-4
    assert result.restarts == 10
    assert len(result.history) == 10
    assert result.best_f_thr == max(f for _, f in result.history if not math.isnan(f))
    best_again = correlation_threshold(result.best_config).f_thr
    assert best_again == pytest.approx(result.best_f_thr, abs=1e-12)
