"""Quantum side of the multiport Bell experiment.

Two observers share the maximally entangled pair (1/sqrt(N)) sum_m |m>|m>.
Each one sends their particle through a phase shifter on every input port
followed by an unbiased N-port beamsplitter, whose transition matrix is the
unitary Fourier matrix.  Detectors are indexed 0..N-1 and detector ``a`` is
ascribed the complex outcome value gamma**a with gamma = exp(2j*pi/N), so
the two-party correlation function is the gamma**(a+b) weighted sum of the
coincidence probabilities.

Noise enters only as the fraction F of the totally chaotic (uniform) state
mixed into the pure pair; it rescales every correlation value by 1 - F and
pulls every joint probability towards 1/N**2.

All operations are pure and deterministic; returned arrays are fresh.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

PhaseVector = tuple[float, ...]

UNITARITY_TOL = 1e-12


def _require_dimension(dimension: int) -> None:
    if not isinstance(dimension, (int, np.integer)) or isinstance(dimension, bool):
        raise ValueError(f"dimension must be an integer, got {dimension!r}")
    if dimension < 2:
        raise ValueError(f"dimension must be at least 2, got {dimension}")


def _require_noise(noise: float) -> None:
    if not (0.0 <= noise <= 1.0):
        raise ValueError(f"noise fraction must lie in [0, 1], got {noise!r}")


def _coerce_setting(setting: Sequence[float], dimension: int, label: str) -> PhaseVector:
    phases = tuple(float(p) for p in setting)
    if len(phases) != dimension:
        raise ValueError(
            f"{label}: expected {dimension} phases, got {len(phases)}"
        )
    if not all(math.isfinite(p) for p in phases):
        raise ValueError(f"{label}: phases must be finite, got {phases}")
    return phases


@dataclass(frozen=True)
class ExperimentConfig:
    """Dimension N plus the lists of phase-shift settings of both observers.

    Every setting is one phase per input port, in radians.  Values outside
    [0, 2*pi) are fine; only phase differences matter.
    """

    dimension: int
    alice_settings: tuple[PhaseVector, ...]
    bob_settings: tuple[PhaseVector, ...]

    def __post_init__(self) -> None:
        _require_dimension(self.dimension)
        for name in ("alice_settings", "bob_settings"):
            raw = getattr(self, name)
            settings = tuple(
                _coerce_setting(s, self.dimension, f"{name}[{k}]")
                for k, s in enumerate(raw)
            )
            if not settings:
                raise ValueError(f"{name}: need at least one setting")
            object.__setattr__(self, name, settings)

    @property
    def n_alice(self) -> int:
        return len(self.alice_settings)

    @property
    def n_bob(self) -> int:
        return len(self.bob_settings)


def root_of_unity(dimension: int) -> complex:
    """Primitive dimension-th root of unity, exp(2j*pi/dimension)."""
    _require_dimension(dimension)
    return complex(np.exp(2j * np.pi / dimension))


def fourier_matrix(dimension: int) -> np.ndarray:
    """Transition matrix of an unbiased multiport: (k, l) -> gamma**(k*l)/sqrt(N)."""
    _require_dimension(dimension)
    k = np.arange(dimension)
    return np.exp(2j * np.pi / dimension * np.outer(k, k)) / math.sqrt(dimension)


def observable_unitary(setting: Sequence[float]) -> np.ndarray:
    """Multiport preceded by per-port phase shifters: U[k, l] = T[k, l] * exp(i*phi_l)."""
    raw = tuple(setting)
    _require_dimension(len(raw))
    phases = _coerce_setting(raw, len(raw), "setting")
    return fourier_matrix(len(phases)) * np.exp(1j * np.asarray(phases))[None, :]


def _setting_pair(
    config: ExperimentConfig, alice_index: int, bob_index: int
) -> tuple[np.ndarray, np.ndarray]:
    if not 0 <= alice_index < config.n_alice:
        raise IndexError(f"alice setting index {alice_index} out of range")
    if not 0 <= bob_index < config.n_bob:
        raise IndexError(f"bob setting index {bob_index} out of range")
    return (
        np.asarray(config.alice_settings[alice_index]),
        np.asarray(config.bob_settings[bob_index]),
    )


def joint_probabilities(
    config: ExperimentConfig, alice_index: int, bob_index: int, noise: float = 0.0
) -> np.ndarray:
    """N x N coincidence table for one settings pair.

    Entry (a, b) is the probability that Alice's detector a and Bob's
    detector b fire.  The pure-state term is
    |sum_m gamma**(m*(a+b)) * exp(i*(phi_m + theta_m))|**2 / N**3,
    mixed with the uniform table by the chaotic fraction ``noise``.
    """
    _require_noise(noise)
    phi, theta = _setting_pair(config, alice_index, bob_index)
    n = config.dimension
    local = np.exp(1j * (phi + theta))
    m = np.arange(n)
    amplitudes = np.exp(2j * np.pi / n * np.outer(m, m)) @ local
    pure = np.abs(amplitudes) ** 2 / n**3
    table = (1.0 - noise) * pure[np.add.outer(m, m) % n] + noise / n**2
    return np.maximum(table, 0.0)


def correlation_value(
    config: ExperimentConfig, alice_index: int, bob_index: int, noise: float = 0.0
) -> complex:
    """Complex correlation for one settings pair.

    Closed form of sum_{a,b} gamma**(a+b) P(a, b): the cyclic phase sum
    (1 - F)/N * sum_m exp(i*(phi_m - phi_{m+1} + theta_m - theta_{m+1}))
    with indices mod N.
    """
    _require_noise(noise)
    phi, theta = _setting_pair(config, alice_index, bob_index)
    delta = (phi - np.roll(phi, -1)) + (theta - np.roll(theta, -1))
    return (1.0 - noise) * complex(np.exp(1j * delta).sum() / config.dimension)


def correlation_matrix(config: ExperimentConfig, noise: float = 0.0) -> np.ndarray:
    """All correlation values arranged as an n_alice x n_bob complex matrix."""
    _require_noise(noise)
    return np.array(
        [
            [correlation_value(config, i, j, noise) for j in range(config.n_bob)]
            for i in range(config.n_alice)
        ]
    )
