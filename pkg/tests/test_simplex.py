import math

import numpy as np
import pytest
from scipy.optimize import linprog

from multiport_bell.simplex import (
    LinearProgram,
    check_certificate,
    solve,
)
from multiport_bell.threshold import builtin_config, correlation_lp

from _properties import lp_random_failures, random_feasible_lp


def scipy_value(lp):
    result = linprog(
        -lp.objective,
        A_eq=lp.constraint_matrix,
        b_eq=lp.rhs,
        bounds=(0, None),
        method="highs",
    )
    return result.status, (-result.fun if result.status == 0 else math.nan)


def test_simple_optimal():
    lp = LinearProgram([1.0, 0.0], [[1.0, 1.0]], [1.0])
    sol = solve(lp)
    assert sol.status == "optimal"
    assert sol.objective_value == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(sol.x, [1.0, 0.0], atol=1e-12)


def test_contradictory_equalities_infeasible():
    lp = LinearProgram([1.0], [[1.0], [1.0]], [2.0, 3.0])
    assert solve(lp).status == "infeasible"


def test_unbounded():
    lp = LinearProgram([1.0, 0.0], [[1.0, -1.0]], [1.0])
    assert solve(lp).status == "unbounded"


def test_zero_constraint_lp():
    bounded = LinearProgram([-1.0, -2.0], np.zeros((0, 2)), [])
    sol = solve(bounded)
    assert sol.status == "optimal"
    assert sol.objective_value == 0.0
    assert check_certificate(bounded, sol).passed
    unbounded = LinearProgram([1.0], np.zeros((0, 1)), [])
    assert solve(unbounded).status == "unbounded"


def test_redundant_rows_tolerated():
    lp = LinearProgram([1.0, 1.0], [[1.0, 2.0], [1.0, 2.0], [2.0, 4.0]], [3.0, 3.0, 6.0])
    sol = solve(lp)
    assert sol.status == "optimal"
    assert sol.objective_value == pytest.approx(3.0, abs=1e-9)
    assert check_certificate(lp, sol).passed


def test_rejects_nonfinite_input():
    with pytest.raises(ValueError):
        LinearProgram([math.nan], [[1.0]], [1.0])
    with pytest.raises(ValueError):
        LinearProgram([1.0], [[math.inf]], [1.0])


def test_rejects_shape_mismatch():
    with pytest.raises(ValueError):
        LinearProgram([1.0, 2.0], [[1.0]], [1.0])


def test_iteration_cap_reports_failure():
    lp, _ = correlation_lp(builtin_config("paper-qutrit"))
    sol = solve(lp, iteration_cap=2)
    assert sol.status == "failed"
    assert "cap" in sol.detail or "iteration" in sol.detail


def test_determinism():
    lp, _ = correlation_lp(builtin_config("paper-qutrit"))
    first, second = solve(lp), solve(lp)
    assert first.iterations == second.iterations
    assert np.array_equal(first.x, second.x)
    assert first.objective_value == second.objective_value


def test_row_scaling_leaves_status_and_objective():
    lp, _ = correlation_lp(builtin_config("paper-qutrit"))
    scaled_a = lp.constraint_matrix.copy()
    scaled_b = lp.rhs.copy()
    scaled_a[0] *= 1e3
    scaled_b[0] *= 1e3
    scaled = LinearProgram(lp.objective, scaled_a, scaled_b)
    base, alt = solve(lp), solve(scaled)
    assert base.status == alt.status == "optimal"
    assert abs(base.objective_value - alt.objective_value) <= 1e-7


def test_certificate_detects_perturbation():
    lp, _ = correlation_lp(builtin_config("paper-qutrit"))
    sol = solve(lp)
    assert check_certificate(lp, sol).passed
    tampered_x = sol.x.copy()
    tampered_x[0] += 1e-3
    tampered = type(sol)(
        sol.status, sol.objective_value, tampered_x, sol.max_residual, sol.iterations
    )
    report = check_certificate(lp, tampered)
    assert not report.passed
    assert report.max_residual > 1e-8


def test_certificate_requires_optimal():
    lp = LinearProgram([1.0], [[1.0], [1.0]], [2.0, 3.0])
    with pytest.raises(ValueError):
        check_certificate(lp, solve(lp))


def test_degenerate_cycling_prone_lp_terminates():
    # Beale's classic example, rewritten in equality form with slacks
    a = np.array(
        [
            [0.25, -60.0, -1 / 25, 9.0, 1.0, 0.0, 0.0],
            [0.5, -90.0, -1 / 50, 3.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
        ]
    )
    c = np.array([0.75, -150.0, 1 / 50, -6.0, 0.0, 0.0, 0.0])
    b = np.array([0.0, 0.0, 1.0])
    lp = LinearProgram(c, a, b)
    sol = solve(lp)
    assert sol.status == "optimal"
    status, reference = scipy_value(lp)
    assert status == 0
    assert sol.objective_value == pytest.approx(reference, abs=1e-9)
    assert check_certificate(lp, sol).passed


def test_random_feasible_property_suite():
    assert lp_random_failures() == 0


def test_against_scipy_on_random_instances():
    rng = np.random.default_rng(20260815)
    for _ in range(100):
        lp, _, _ = random_feasible_lp(rng)
        sol = solve(lp)
        status, reference = scipy_value(lp)
        assert sol.status == "optimal" and status == 0
        assert sol.objective_value == pytest.approx(reference, abs=1e-7)
