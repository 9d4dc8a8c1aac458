"""Noise thresholds for local realism via linear programming.

A local model reproduces the noise-scaled quantum point iff some mixture of
deterministic strategies matches it.  Both formulations maximize the
visibility V = 1 - F as an LP variable capped at 1:

* correlation matching equates the complex correlation matrix entrywise
  (real and imaginary parts) with V times the noiseless quantum matrix;
* probability matching equates the full coincidence tables with the
  noise-mixed quantum tables V*P0 + (1 - V)/N**2.

Thresholds always mix from the noiseless quantum point; pre-mixed targets
are not accepted anywhere.  ``scan`` searches phase settings for the
largest threshold with seeded random restarts and coordinate descent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .quantum import ExperimentConfig, correlation_matrix, joint_probabilities
from .simplex import LinearProgram, LPSolution, SolverFailure, solve
from .strategies import (
    DeterministicStrategy,
    StrategyMatrix,
    distinct_matrices,
    enumerate_strategies,
)

_METHOD_NAMES = {
    "corr": "correlation",
    "correlation": "correlation",
    "prob": "probability",
    "probability": "probability",
}

SCAN_STEP_START = math.pi / 2
SCAN_STEP_STOP = 1e-4
SCAN_IMPROVEMENT_STOP = 1e-7

BUILTINS: dict[str, ExperimentConfig] = {
    # Two-setting qutrit configuration with the maximal threshold.  Alice's
    # all-zero setting comes first so that the correlation matrix commutes
    # with the symmetry operator used by the analytic derivation replay.
    "paper-qutrit": ExperimentConfig(
        3,
        ((0.0, 0.0, 0.0), (0.0, math.pi / 3, -math.pi / 3)),
        ((0.0, math.pi / 6, -math.pi / 6), (0.0, -math.pi / 6, math.pi / 6)),
    ),
    # Standard CHSH qubit settings (visibility threshold 1/sqrt(2)).
    "chsh-qubit": ExperimentConfig(
        2,
        ((0.0, 0.0), (0.0, -math.pi / 2)),
        ((0.0, math.pi / 4), (0.0, -math.pi / 4)),
    ),
}


def builtin_config(name: str) -> ExperimentConfig:
    """Look up a named built-in configuration."""
    try:
        return BUILTINS[name]
    except KeyError:
        known = ", ".join(sorted(BUILTINS))
        raise ValueError(f"unknown builtin {name!r} (known: {known})") from None


@dataclass(frozen=True)
class ThresholdResult:
    method: str  # "correlation" | "probability"
    dimension: int
    v_thr: float
    f_thr: float
    weights: dict[DeterministicStrategy, float]
    residual: float
    lp_iterations: int


@dataclass(frozen=True)
class ScanResult:
    best_config: ExperimentConfig
    best_f_thr: float
    restarts: int
    seed: int
    history: tuple[tuple[int, float], ...]


@lru_cache(maxsize=None)
def _correlation_data(
    dimension: int, n_alice: int, n_bob: int
) -> tuple[tuple[StrategyMatrix, ...], np.ndarray, np.ndarray]:
    mats = tuple(
        distinct_matrices(enumerate_strategies(dimension, n_alice, n_bob), dimension)
    )
    stack = np.stack([m.values for m in mats])  # (K, n_alice, n_bob)
    flat = stack.reshape(len(mats), -1).T  # (n_alice*n_bob, K)
    block = np.vstack([flat.real, flat.imag])
    for arr in (stack, block):
        arr.setflags(write=False)
    return mats, stack, block


@lru_cache(maxsize=None)
def _probability_data(
    dimension: int, n_alice: int, n_bob: int
) -> tuple[tuple[DeterministicStrategy, ...], np.ndarray]:
    strategies = tuple(enumerate_strategies(dimension, n_alice, n_bob))
    n = dimension
    indicator = np.zeros((n_alice * n_bob * n * n, len(strategies)))
    for idx, strat in enumerate(strategies):
        for i in range(n_alice):
            for j in range(n_bob):
                row = ((i * n_bob + j) * n + strat.alice[i]) * n + strat.bob[j]
                indicator[row, idx] = 1.0
    indicator.setflags(write=False)
    return strategies, indicator


def _assemble(
    block: np.ndarray,
    v_column: np.ndarray,
    rhs_match: np.ndarray,
    pin_visibility: float | None,
) -> LinearProgram:
    """Stack matching rows with the normalization and the visibility cap.

    Variables are [p_1 .. p_K, V, slack]; the cap row reads V + slack = 1.
    """
    rows, k = block.shape
    extra = 2 + (pin_visibility is not None)
    a = np.zeros((rows + extra, k + 2))
    a[:rows, :k] = block
    a[:rows, k] = v_column
    a[rows, :k] = 1.0
    a[rows + 1, k] = 1.0
    a[rows + 1, k + 1] = 1.0
    b = np.zeros(rows + extra)
    b[:rows] = rhs_match
    b[rows] = 1.0
    b[rows + 1] = 1.0
    if pin_visibility is not None:
        a[rows + 2, k] = 1.0
        b[rows + 2] = pin_visibility
    c = np.zeros(k + 2)
    c[k] = 1.0
    return LinearProgram(c, a, b)


def correlation_lp(
    config: ExperimentConfig, pin_visibility: float | None = None
) -> tuple[LinearProgram, tuple[StrategyMatrix, ...]]:
    """LP matching the noiseless correlation matrix scaled by V."""
    mats, _, block = _correlation_data(config.dimension, config.n_alice, config.n_bob)
    q = correlation_matrix(config).reshape(-1)
    target = np.concatenate([q.real, q.imag])
    lp = _assemble(block, -target, np.zeros(target.size), pin_visibility)
    return lp, mats


def probability_lp(
    config: ExperimentConfig, pin_visibility: float | None = None
) -> tuple[LinearProgram, tuple[DeterministicStrategy, ...]]:
    """LP matching every coincidence table of the noise-mixed state."""
    strategies, indicator = _probability_data(
        config.dimension, config.n_alice, config.n_bob
    )
    uniform = 1.0 / config.dimension**2
    pure = np.concatenate(
        [
            joint_probabilities(config, i, j).reshape(-1)
            for i in range(config.n_alice)
            for j in range(config.n_bob)
        ]
    )
    rhs = np.full(pure.size, uniform)
    lp = _assemble(indicator, -(pure - uniform), rhs, pin_visibility)
    return lp, strategies


def _solved(lp: LinearProgram) -> LPSolution:
    solution = solve(lp)
    if solution.status != "optimal":
        raise SolverFailure(
            f"threshold LP ended with status {solution.status}: {solution.detail}"
        )
    return solution


def correlation_threshold(config: ExperimentConfig) -> ThresholdResult:
    """Critical visibility and noise threshold from correlation matching."""
    lp, mats = correlation_lp(config)
    solution = _solved(lp)
    _, stack, _ = _correlation_data(config.dimension, config.n_alice, config.n_bob)
    k = len(mats)
    weights_vec = solution.x[:k]
    v = float(min(max(solution.x[k], 0.0), 1.0))
    reconstruction = np.tensordot(weights_vec, stack, axes=1)
    residual = float(np.max(np.abs(reconstruction - v * correlation_matrix(config))))
    weights = {
        mat.strategy: max(float(w), 0.0) for mat, w in zip(mats, weights_vec)
    }
    return ThresholdResult(
        "correlation", config.dimension, v, 1.0 - v, weights, residual, solution.iterations
    )


def probability_threshold(config: ExperimentConfig) -> ThresholdResult:
    """Critical visibility and noise threshold from full-statistics matching."""
    lp, strategies = probability_lp(config)
    solution = _solved(lp)
    _, indicator = _probability_data(config.dimension, config.n_alice, config.n_bob)
    k = len(strategies)
    weights_vec = solution.x[:k]
    v = float(min(max(solution.x[k], 0.0), 1.0))
    uniform = 1.0 / config.dimension**2
    pure = np.concatenate(
        [
            joint_probabilities(config, i, j).reshape(-1)
            for i in range(config.n_alice)
            for j in range(config.n_bob)
        ]
    )
    target = v * pure + (1.0 - v) * uniform
    residual = float(np.max(np.abs(indicator @ weights_vec - target)))
    weights = {
        strat: max(float(w), 0.0) for strat, w in zip(strategies, weights_vec)
    }
    return ThresholdResult(
        "probability", config.dimension, v, 1.0 - v, weights, residual, solution.iterations
    )


def _threshold_function(method: str):
    try:
        name = _METHOD_NAMES[method]
    except KeyError:
        raise ValueError(f"unknown method {method!r}") from None
    return correlation_threshold if name == "correlation" else probability_threshold


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _line_max(objective, x: np.ndarray, k: int, step: float, current: float):
    """Golden-section maximization of coordinate k over +-step around x[k]."""
    center = x[k]

    def evaluate(t: float) -> float:
        x[k] = t
        return objective(x)

    lo, hi = center - step, center + step
    tol = max(step / 4.0, 2e-5)
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc, fd = evaluate(c), evaluate(d)
    best_t, best_value = center, current
    if fc > best_value:
        best_t, best_value = c, fc
    if fd > best_value:
        best_t, best_value = d, fd
    while (hi - lo) > tol:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _INVPHI * (hi - lo)
            fc = evaluate(c)
            if fc > best_value:
                best_t, best_value = c, fc
        else:
            lo, c, fc = c, d, fd
            d = lo + _INVPHI * (hi - lo)
            fd = evaluate(d)
            if fd > best_value:
                best_t, best_value = d, fd
    x[k] = best_t
    return best_t, best_value


def _descend(objective, x: np.ndarray) -> tuple[float, np.ndarray]:
    """Coordinate descent with a halving step schedule."""
    best = objective(x)
    step = SCAN_STEP_START
    while step >= SCAN_STEP_STOP:
        cycle_start = best
        for k in range(x.size):
            _, best = _line_max(objective, x, k, step, best)
        if best - cycle_start < SCAN_IMPROVEMENT_STOP:
            break
        step /= 2.0
    return best, x


def _vector_config(dimension: int, vector: np.ndarray) -> ExperimentConfig:
    """Two settings per party, first phase of every setting pinned to zero."""
    rows = np.asarray(vector, dtype=float).reshape(4, dimension - 1)
    settings = tuple((0.0, *map(float, row)) for row in rows)
    return ExperimentConfig(dimension, settings[:2], settings[2:])


def scan(
    dimension: int, restarts: int, seed: int, method: str = "correlation"
) -> ScanResult:
    """Search phase settings maximizing the noise threshold.

    Each restart draws its start from a generator seeded by (seed, restart
    index), so runs are reproducible and restarts are order-independent;
    ties keep the lowest restart index.  A restart that trips the LP solver
    is recorded as NaN in the history and skipped.
    """
    if not 2 <= dimension <= 6:
        raise ValueError(f"scan supports dimensions 2..6, got {dimension}")
    if restarts < 1:
        raise ValueError("need at least one restart")
    threshold = _threshold_function(method)

    def objective(vector: np.ndarray) -> float:
        return threshold(_vector_config(dimension, vector)).f_thr

    history: list[tuple[int, float]] = []
    best_value = -math.inf
    best_vector: np.ndarray | None = None
    for index in range(restarts):
        rng = np.random.default_rng([seed, index])
        vector = rng.uniform(0.0, 2.0 * math.pi, size=4 * (dimension - 1))
        try:
            value, vector = _descend(objective, vector)
        except SolverFailure:
            history.append((index, math.nan))
            continue
        history.append((index, value))
        if value > best_value:
            best_value, best_vector = value, vector.copy()
    if best_vector is None:
        raise SolverFailure("every scan restart failed")
    return ScanResult(
        best_config=_vector_config(dimension, best_vector),
        best_f_thr=best_value,
        restarts=restarts,
        seed=seed,
        history=tuple(history),
    )
