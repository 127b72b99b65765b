"""Rodeo cycles: closed-form success probabilities and a seeded shot sampler.

A cycle applies H, controlled ``exp(-i H_obj t_k)``, ``P(E t_k)`` and H to
the ancilla and then measures it.  A run succeeds when all ``N`` recorded
ancilla bits are 0.  Readout error flips the recorded classical bit only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import rng as rng_mod
from .errors import InvalidInputError
from .pauli import PauliHamiltonian, evolution_unitaries, spectral_weights
from .statevector import (
    ancilla_zero_probability,
    joint_state,
    project_and_reset,
    rodeo_cycle,
)


@dataclass(frozen=True)
class ReadoutNoise:
    """Classical readout flips: ``p01`` reads a true 0 as 1, ``p10`` a true 1 as 0."""

    p01: float = 0.0
    p10: float = 0.0

    def __post_init__(self):
        for name in ("p01", "p10"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise InvalidInputError(f"{name}={value} outside [0, 1]")

    @property
    def is_noiseless(self) -> bool:
        return self.p01 == 0.0 and self.p10 == 0.0

    def read_zero_probability(self, p_true_zero):
        return (1.0 - self.p01) * p_true_zero + self.p10 * (1.0 - p_true_zero)

    def apply(self, true_bits: np.ndarray, draws: np.ndarray) -> np.ndarray:
        """Recorded bits given true bits and uniform draws of the same shape."""
        flip_prob = np.where(true_bits, self.p10, self.p01)
        return true_bits ^ (draws < flip_prob)


@dataclass(frozen=True)
class RodeoConfig:
    n_cycles: int
    sigma: float
    e_target: float
    n_time_sets: int = 25
    shots_per_set: int = 100
    seed: int = 0
    noise: ReadoutNoise = field(default_factory=ReadoutNoise)
    analytic: bool = False

    def __post_init__(self):
        if self.n_cycles < 1:
            raise InvalidInputError("n_cycles must be >= 1")
        if not self.sigma > 0:
            raise InvalidInputError("sigma must be > 0")
        if self.n_time_sets < 1 or self.shots_per_set < 1:
            raise InvalidInputError("shot budget must be positive")
        if not 0 <= self.seed <= rng_mod.SEED_MASK:
            raise InvalidInputError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class RodeoOutcome:
    success_fraction: float
    stderr: float
    per_set_fractions: tuple[float, ...]
    post_success_state: np.ndarray | None = None


def sample_times(sigma: float, n_cycles: int, rng: np.random.Generator) -> np.ndarray:
    """Gaussian evolution times, mean 0 and rms ``sigma``."""
    if not sigma > 0:
        raise InvalidInputError("sigma must be > 0")
    return rng.normal(0.0, sigma, size=n_cycles)


def success_prob_fixed_times(h: PauliHamiltonian, psi_i, e_target: float, times) -> float:
    """Probability of the all-zero record for fixed times.

    Each eigencomponent contributes its overlap weight times
    ``prod_k cos^2(t_k (E_n - E) / 2)``; the cycles are diagonal in the
    eigenbasis so the components never interfere.
    """
    energies, weights = spectral_weights(h, psi_i)
    times = np.asarray(times, dtype=float)
    detuning = energies - e_target
    factors = np.cos(np.outer(detuning, times) / 2.0) ** 2
    return float(np.sum(weights * np.prod(factors, axis=1)))


def expected_success_prob(h: PauliHamiltonian, psi_i, e_target, sigma: float, n_cycles: int):
    """Success probability averaged over Gaussian times.

    ``e_target`` may be an array; the result then has the same shape.
    """
    if not sigma > 0:
        raise InvalidInputError("sigma must be > 0")
    energies, weights = spectral_weights(h, psi_i)
    e = np.asarray(e_target, dtype=float)
    detuning = energies[:, None] - e.reshape(1, -1)
    per_level = ((1.0 + np.exp(-(detuning**2) * sigma**2 / 2.0)) / 2.0) ** n_cycles
    out = weights @ per_level
    return float(out[0]) if e.ndim == 0 else out.reshape(e.shape)


def _set_draws(config: RodeoConfig, with_shots: bool):
    times = np.empty((config.n_time_sets, config.n_cycles))
    draws = None
    if with_shots:
        draws = np.empty((config.n_time_sets, config.n_cycles, 2, config.shots_per_set))
    for s in range(config.n_time_sets):
        gen = rng_mod.stream(config.seed, s)
        times[s] = sample_times(config.sigma, config.n_cycles, gen)
        if with_shots:
            draws[s] = gen.random((config.n_cycles, 2, config.shots_per_set))
    return times, draws


def _summarize(per_set: np.ndarray, shots: int) -> tuple[float, float]:
    mean = float(np.mean(per_set))
    if per_set.size > 1:
        stderr = float(np.std(per_set, ddof=1) / math.sqrt(per_set.size))
    else:
        # one set: fall back to the binomial error of its shots
        stderr = math.sqrt(max(mean * (1.0 - mean), 0.0) / shots)
    return mean, stderr


def run_shots(h: PauliHamiltonian, psi_i, config: RodeoConfig) -> RodeoOutcome:
    """Simulate ``n_time_sets`` draws of the times, each repeated ``shots_per_set`` times.

    Every shot evolves the joint statevector, samples the ancilla, applies
    readout noise to the recorded bit, collapses, renormalizes and resets.
    With ``config.analytic`` the measurements are projected onto 0 instead,
    giving the exact per-set success probability (noiseless only).
    """
    if config.analytic and not config.noise.is_noiseless:
        raise InvalidInputError("analytic mode models a noiseless readout only")
    times, draws = _set_draws(config, with_shots=not config.analytic)
    unitaries = evolution_unitaries(h, times)  # (S, N, 2, 2)
    phases = config.e_target * times

    if config.analytic:
        state = joint_state(psi_i, (config.n_time_sets,))
        p_success = np.ones(config.n_time_sets)
        for k in range(config.n_cycles):
            state = rodeo_cycle(state, unitaries[:, k], phases[:, k])
            state, prob = project_and_reset(state, np.zeros(config.n_time_sets, dtype=bool))
            p_success *= prob
        post = None
        if config.n_time_sets == 1 and p_success[0] > 0:
            post = state[0, :, 0].copy()
        mean, stderr = _summarize(p_success, 1)
        if config.n_time_sets == 1:
            stderr = 0.0
        return RodeoOutcome(mean, stderr, tuple(float(p) for p in p_success), post)

    shape = (config.n_time_sets, config.shots_per_set)
    state = joint_state(psi_i, shape)
    alive = np.ones(shape, dtype=bool)
    for k in range(config.n_cycles):
        state = rodeo_cycle(state, unitaries[:, k, None], phases[:, k, None])
        p0 = ancilla_zero_probability(state)
        true_bits = draws[:, k, 0] >= p0
        read_bits = config.noise.apply(true_bits, draws[:, k, 1])
        state, _ = project_and_reset(state, true_bits)
        alive &= ~read_bits
    per_set = alive.mean(axis=1)
    mean, stderr = _summarize(per_set, config.shots_per_set)
    return RodeoOutcome(mean, stderr, tuple(float(f) for f in per_set))
