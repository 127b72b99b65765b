from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import KET0, hamiltonians, random_hamiltonian, random_state, states
from rodeo import rng as rng_mod
from rodeo.engine import (
    ReadoutNoise,
    RodeoConfig,
    expected_success_prob,
    run_shots,
    sample_times,
    success_prob_fixed_times,
)
from rodeo.errors import InvalidInputError
from rodeo.pauli import H0_REFERENCE, PAULI_X, PAULI_Y, PAULI_Z, PauliHamiltonian, eigendecompose
from rodeo.statevector import apply_controlled, apply_hadamard, apply_phase, joint_state, norm, project_and_reset

_HAD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def brute_force(h: PauliHamiltonian, psi, e, times) -> float:
    """Kronecker-product simulation with the ancilla as the high qubit."""
    m = h.c_i * np.eye(2) + h.c_x * PAULI_X + h.c_y * PAULI_Y + h.c_z * PAULI_Z
    w, v = np.linalg.eigh(m)
    p0 = np.diag([1.0, 0.0])
    state = np.kron([1.0, 0.0], psi).astype(complex)
    prob = 1.0
    for t in times:
        u = v @ np.diag(np.exp(-1j * w * t)) @ v.conj().T
        cu = np.kron(p0, np.eye(2)) + np.kron(np.diag([0.0, 1.0]), u)
        phase = np.kron(np.diag([1.0, np.exp(1j * e * t)]), np.eye(2))
        had = np.kron(_HAD, np.eye(2))
        state = had @ phase @ cu @ had @ state
        kept = np.kron(p0, np.eye(2)) @ state
        p = float(np.vdot(kept, kept).real)
        prob *= p
        if p == 0:
            return 0.0
        state = kept / math.sqrt(p)
    return prob


class TestSampler:
    def test_rms(self):
        t = sample_times(2.0, 10**6, np.random.default_rng(1))
        assert 1.99 <= math.sqrt(np.mean(t**2)) <= 2.01

    def test_rejects_zero_sigma(self):
        with pytest.raises(InvalidInputError):
            sample_times(0.0, 3, np.random.default_rng(0))
        with pytest.raises(InvalidInputError):
            RodeoConfig(n_cycles=3, sigma=0.0, e_target=0.0)

    def test_deterministic(self):
        a = sample_times(7.0, 50, rng_mod.stream(99, 4))
        b = sample_times(7.0, 50, rng_mod.stream(99, 4))
        assert a.tobytes() == b.tobytes()

    def test_streams_differ_by_key(self):
        assert rng_mod.derive_seed(5, 0) != rng_mod.derive_seed(5, 1)
        assert not np.array_equal(rng_mod.stream(5, 0).random(4), rng_mod.stream(5, 1).random(4))


class TestFixedTimes:
    @given(hamiltonians, st.lists(st.floats(-30, 30), min_size=1, max_size=5))
    def test_eigenstate_at_resonance(self, h, ts):
        spec = eigendecompose(h)
        assert success_prob_fixed_times(h, spec.v_high, spec.e_high, ts) == pytest.approx(1.0, abs=1e-12)

    @given(hamiltonians, states(), st.floats(-3, 3))
    def test_zero_times(self, h, psi, e):
        assert success_prob_fixed_times(h, psi, e, [0.0, 0.0, 0.0]) == pytest.approx(1.0, abs=1e-12)

    def test_matches_statevector_thousand_cases(self):
        rng = np.random.default_rng(2024)
        for case in range(1000):
            h, psi = random_hamiltonian(rng), random_state(rng)
            n = int(rng.integers(1, 6))
            sigma = rng.uniform(0.1, 15)
            e = rng.uniform(-2, 2)
            cfg = RodeoConfig(n, sigma, e, n_time_sets=1, seed=case, analytic=True)
            ts = sample_times(sigma, n, rng_mod.stream(case, 0))  # the times run_shots draws
            closed = success_prob_fixed_times(h, psi, e, ts)
            assert abs(closed - run_shots(h, psi, cfg).success_fraction) <= 1e-12
            assert abs(closed - brute_force(h, psi, e, ts)) <= 1e-12

    def test_post_success_state_is_normalized(self):
        out = run_shots(H0_REFERENCE, KET0, RodeoConfig(3, 12.0, 1.0, n_time_sets=1, analytic=True, seed=4))
        assert out.post_success_state is not None
        assert np.linalg.norm(out.post_success_state) == pytest.approx(1.0, abs=1e-12)


class TestStatevector:
    @given(hamiltonians, states(), st.floats(-10, 10), st.floats(-10, 10))
    def test_norm_preserved(self, h, psi, t, lam):
        from rodeo.pauli import evolution_unitary

        state = joint_state(psi)
        for op in (apply_hadamard, lambda s: apply_controlled(s, evolution_unitary(h, t)), lambda s: apply_phase(s, lam)):
            state = op(state)
            assert abs(float(norm(state)) - 1.0) <= 1e-12
        for bit in (False, True):
            post, prob = project_and_reset(state, bit)
            if prob > 1e-12:
                assert abs(float(norm(post)) - 1.0) <= 1e-12


class TestExpected:
    @given(hamiltonians, st.floats(0.1, 20), st.integers(1, 6))
    def test_eigenstate_at_resonance(self, h, sigma, n):
        spec = eigendecompose(h)
        assert expected_success_prob(h, spec.v_low, spec.e_low, sigma, n) == pytest.approx(1.0, abs=1e-12)

    def test_far_detuned_background(self):
        spec = eigendecompose(H0_REFERENCE)
        p = expected_success_prob(H0_REFERENCE, spec.v_high, spec.e_high + 10.0, 12.0, 3)
        assert p == pytest.approx(0.125, abs=1e-12)

    @given(hamiltonians, st.floats(0.05, 3.0), st.floats(0.1, 10), st.floats(0.01, 5), st.integers(1, 5))
    def test_monotone_magnification(self, h, detuning, sigma, dsigma, n):
        spec = eigendecompose(h)
        e = spec.e_high + detuning
        lo = expected_success_prob(h, spec.v_high, e, sigma, n)
        hi = expected_success_prob(h, spec.v_high, e, sigma + dsigma, n)
        assert hi <= lo
        if lo - 0.5**n > 1e-9:  # strict wherever double precision resolves the tail
            assert hi < lo

    @given(hamiltonians, st.floats(-5, 5), st.floats(0.1, 20), st.integers(1, 6))
    def test_bounds(self, h, e, sigma, n):
        spec = eigendecompose(h)
        p = expected_success_prob(h, spec.v_high, e, sigma, n)
        assert 0.5**n - 1e-15 <= p <= 1.0 + 1e-15

    @given(hamiltonians, states(), st.floats(-3, 3), st.floats(0.1, 20), st.integers(1, 6))
    def test_spectral_additivity(self, h, psi, e, sigma, n):
        spec = eigendecompose(h)
        total = expected_success_prob(h, psi, e, sigma, n)
        parts = sum(
            abs(np.vdot(v, psi)) ** 2 * expected_success_prob(h, v, e, sigma, n) for v in spec.vectors
        )
        assert abs(total - parts) <= 1e-12

    def test_vectorized_matches_scalar(self):
        es = np.linspace(-2, 2, 11)
        vec = expected_success_prob(H0_REFERENCE, KET0, es, 7.0, 3)
        assert vec.shape == es.shape
        np.testing.assert_allclose(vec, [expected_success_prob(H0_REFERENCE, KET0, e, 7.0, 3) for e in es], atol=1e-15)


class TestRunShots:
    def test_resonant_eigenstate_noiseless(self):
        spec = eigendecompose(H0_REFERENCE)
        out = run_shots(H0_REFERENCE, spec.v_high, RodeoConfig(3, 12.0, spec.e_high, 5, 100, seed=3))
        assert out.success_fraction == 1.0

    def test_reference_point_agrees_with_expectation(self):
        spec = eigendecompose(H0_REFERENCE)
        cfg = RodeoConfig(3, 12.0, spec.e_high, n_time_sets=50, shots_per_set=100, seed=8)
        out = run_shots(H0_REFERENCE, KET0, cfg)
        exact = expected_success_prob(H0_REFERENCE, KET0, spec.e_high, 12.0, 3)
        assert abs(out.success_fraction - exact) <= 4 * out.stderr

    def test_noise_asymmetry(self):
        spec = eigendecompose(H0_REFERENCE)
        noise = ReadoutNoise(p01=0.01, p10=0.05)
        far = RodeoConfig(3, 12.0, spec.e_high + 5.0, 40, 500, seed=1, noise=noise)
        on = RodeoConfig(3, 12.0, spec.e_high, 40, 500, seed=1, noise=noise)
        p_far = run_shots(H0_REFERENCE, spec.v_high, far)
        p_on = run_shots(H0_REFERENCE, spec.v_high, on)
        # per-cycle closed form: P(read 0) = (1 - p01) P0 + p10 P1
        far_exact = noise.read_zero_probability(0.5) ** 3
        on_exact = noise.read_zero_probability(1.0) ** 3
        assert p_far.success_fraction > 0.125
        assert p_on.success_fraction < 1.0
        assert abs(p_far.success_fraction - far_exact) <= 4 * p_far.stderr
        assert abs(p_on.success_fraction - on_exact) <= 4 * p_on.stderr

    def test_deterministic(self):
        cfg = RodeoConfig(3, 7.0, 0.9, 10, 50, seed=77, noise=ReadoutNoise(0.02, 0.03))
        a, b = run_shots(H0_REFERENCE, KET0, cfg), run_shots(H0_REFERENCE, KET0, cfg)
        assert a == b

    def test_per_set_fractions(self):
        out = run_shots(H0_REFERENCE, KET0, RodeoConfig(3, 2.0, 1.0, 7, 40, seed=2))
        assert len(out.per_set_fractions) == 7
        assert out.success_fraction == pytest.approx(np.mean(out.per_set_fractions))
        assert out.stderr == pytest.approx(np.std(out.per_set_fractions, ddof=1) / math.sqrt(7))

    def test_analytic_rejects_noise(self):
        with pytest.raises(InvalidInputError):
            run_shots(H0_REFERENCE, KET0, RodeoConfig(3, 2.0, 1.0, analytic=True, noise=ReadoutNoise(0.1, 0.0)))

    @pytest.mark.parametrize("p01, p10", [(-0.1, 0.0), (0.0, 1.5)])
    def test_noise_range(self, p01, p10):
        with pytest.raises(InvalidInputError):
            ReadoutNoise(p01, p10)
