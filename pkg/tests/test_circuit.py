from __future__ import annotations

import math
import re
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given

from conftest import KET0, hamiltonians, random_hamiltonian, random_state, states, times
from rodeo import rng as rng_mod
from rodeo.circuit import (
    ANCILLA,
    CONTROLLED_U,
    HADAMARD,
    MEASURE_RESET,
    OBJECT,
    PHASE,
    CircuitIR,
    GateRecord,
    build_rodeo_circuit,
    emit_circuit_text,
    euler_decompose,
    reconstruct,
)
from rodeo.engine import sample_times, success_prob_fixed_times
from rodeo.errors import InvalidInputError
from rodeo.pauli import H0_REFERENCE, PauliHamiltonian, evolution_unitary
from rodeo.statevector import apply_controlled, execute_ir, joint_state

GOLDEN = Path(__file__).parent / "golden" / "h0_E1.0_s12_seed2021.qasm"


def golden_times() -> np.ndarray:
    # the times the compile command draws for energy index 0, set 0
    return sample_times(12.0, 3, rng_mod.stream(rng_mod.derive_seed(2021, 0), 0))


def assert_same_unitary(a, b, tol):
    assert np.max(np.abs(a - b)) <= tol


class TestEulerDecompose:
    def test_pure_z(self):
        ang = euler_decompose(PauliHamiltonian(0, 0, 0, 1), 1.0)
        assert ang.gamma == pytest.approx(0.0, abs=1e-15)
        assert ang.beta + ang.delta == pytest.approx(2.0, abs=1e-14)
        assert ang.xi == pytest.approx(-1.0, abs=1e-14)

    @given(hamiltonians)
    def test_zero_time_is_identity(self, h):
        assert_same_unitary(reconstruct(euler_decompose(h, 0.0)), np.eye(2), 1e-12)

    def test_thousand_random_cases(self):
        rng = np.random.default_rng(11)
        worst = 0.0
        for _ in range(1000):
            h = random_hamiltonian(rng)
            t = rng.uniform(-20, 20)
            worst = max(worst, np.max(np.abs(reconstruct(euler_decompose(h, t)) - evolution_unitary(h, t))))
        assert worst <= 1e-10

    @pytest.mark.parametrize(
        "h",
        [
            PauliHamiltonian(0.3, 0.7, 0.0, -0.4),  # n_Y = 0
            PauliHamiltonian(-0.2, -0.5, 0.0, 0.0),  # n_Y = n_Z = 0
            PauliHamiltonian(0.1, 0.0, 0.0, 0.9),  # n_X = n_Y = 0
            PauliHamiltonian(0.1, 0.0, 0.0, -0.9),
            PauliHamiltonian(0.0, 0.0, 0.6, 0.0),  # n_X = 0
            PauliHamiltonian(0.4, 0.0, 0.0, 0.0),  # identity
        ],
    )
    def test_edge_axes(self, h):
        for t in (-7.3, -1.0, 0.0, 0.37, 2.0, 13.1):
            assert_same_unitary(reconstruct(euler_decompose(h, t)), evolution_unitary(h, t), 1e-10)

    @pytest.mark.parametrize("h", [H0_REFERENCE, PauliHamiltonian(0, 0.7, 0.0, -0.4), PauliHamiltonian(0.2, 0, 0, 1.0)])
    @pytest.mark.parametrize("turns", [1, 2, 3, -1])
    def test_theta_odd_multiples_of_pi(self, h, turns):
        # theta = 2 t |c| = turns * pi puts theta/2 on the tan singularity
        t = turns * math.pi / (2 * h.rotation_norm)
        ang = euler_decompose(h, t)
        assert all(math.isfinite(v) for v in (ang.gamma, ang.beta, ang.delta, ang.xi))
        assert_same_unitary(reconstruct(ang), evolution_unitary(h, t), 1e-10)

    @given(hamiltonians, times)
    def test_property_reconstruction(self, h, t):
        ang = euler_decompose(h, t)
        assert 0.0 <= ang.gamma <= math.pi
        assert_same_unitary(reconstruct(ang), evolution_unitary(h, t), 1e-10)

    def test_rejects_nonfinite_time(self):
        with pytest.raises(InvalidInputError):
            euler_decompose(H0_REFERENCE, math.inf)


class TestIR:
    def test_one_cycle_order(self):
        ir = build_rodeo_circuit(H0_REFERENCE, 1.0, [0.5], 1)
        assert [r.kind for r in ir.records] == [HADAMARD, CONTROLLED_U, PHASE, HADAMARD, MEASURE_RESET]

    def test_three_cycles(self):
        ir = build_rodeo_circuit(H0_REFERENCE, 1.0, [0.5, -1.0, 2.0], 3)
        assert len(ir) == 15
        assert ir.count(MEASURE_RESET) == 3

    @given(hamiltonians, times, times, times)
    def test_phase_parameter(self, h, e, t1, t2):
        ir = build_rodeo_circuit(h, e, [t1, t2], 2)
        phases = [r.params[0] for r in ir.records if r.kind == PHASE]
        assert phases == [e * t1, e * t2]

    def test_measure_targets_ancilla_only(self):
        ir = build_rodeo_circuit(H0_REFERENCE, 0.3, [1.0, 2.0], 2)
        assert all(r.wires == (ANCILLA,) for r in ir.records if r.kind == MEASURE_RESET)
        with pytest.raises(InvalidInputError):
            CircuitIR((GateRecord(MEASURE_RESET, (OBJECT,), (), 0),), 1)

    def test_no_gate_after_measurement_in_same_cycle(self):
        recs = (GateRecord(MEASURE_RESET, (ANCILLA,), (), 0), GateRecord(HADAMARD, (ANCILLA,), (), 0))
        with pytest.raises(InvalidInputError):
            CircuitIR(recs, 1)

    def test_time_count_mismatch(self):
        with pytest.raises(InvalidInputError):
            build_rodeo_circuit(H0_REFERENCE, 1.0, [0.5, 1.0], 3)

    @given(hamiltonians, states(), times)
    def test_controlled_block_idle_on_ancilla_zero(self, h, psi, t):
        ang = euler_decompose(h, t)
        state = apply_controlled(joint_state(psi), reconstruct(ang))
        np.testing.assert_allclose(state[:, 0], psi, atol=1e-12)
        np.testing.assert_allclose(state[:, 1], 0.0, atol=1e-12)

    def test_ir_matches_closed_form(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            h, psi = random_hamiltonian(rng), random_state(rng)
            n = int(rng.integers(1, 5))
            ts = rng.normal(0, rng.uniform(0.5, 12), n)
            e = rng.uniform(-2, 2)
            p, _ = execute_ir(build_rodeo_circuit(h, e, ts, n), psi)
            assert abs(p - success_prob_fixed_times(h, psi, e, ts)) <= 1e-12


# --- independent reading of the emitted text -------------------------------

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def _u3(theta, phi, lam):
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -np.exp(1j * lam) * s], [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c]])


def _on(q, m):
    # basis index = 2 * q[1] + q[0]
    return np.kron(m, np.eye(2)) if q == 1 else np.kron(np.eye(2), m)


def _cx(c, t):
    out = np.zeros((4, 4), dtype=complex)
    for b in range(4):
        bits = [b & 1, b >> 1]
        if bits[c]:
            bits[t] ^= 1
        out[bits[0] + 2 * bits[1], b] = 1
    return out


def run_qasm_all_zero(text: str, psi: np.ndarray) -> float:
    """Probability that every measurement reads 0, using the qelib1 gate definitions."""
    state = np.kron(np.array([1, 0], dtype=complex), psi)
    p = 1.0
    qubit = r"q\[(\d)\]"
    for line in text.splitlines()[3:]:
        if line.startswith("creg"):
            continue
        if m := re.fullmatch(rf"h {qubit};", line):
            state = _on(int(m[1]), _H) @ state
        elif m := re.fullmatch(rf"u1\(([^)]*)\) {qubit};", line):
            state = _on(int(m[2]), np.diag([1, np.exp(1j * float(m[1]))])) @ state
        elif m := re.fullmatch(rf"cu3\(([^,]*),([^,]*),([^)]*)\) {qubit},{qubit};", line):
            th, ph, la = map(float, m.groups()[:3])
            c, t = int(m[4]), int(m[5])
            for op in (
                _on(c, np.diag([1, np.exp(1j * (la + ph) / 2)])),
                _on(t, np.diag([1, np.exp(1j * (la - ph) / 2)])),
                _cx(c, t),
                _on(t, _u3(-th / 2, 0, -(ph + la) / 2)),
                _cx(c, t),
                _on(t, _u3(th / 2, ph, 0)),
            ):
                state = op @ state
        elif m := re.fullmatch(rf"measure {qubit} -> c\[\d+\];", line):
            assert m[1] == "1"
            zero = state[:2]
            prob = float(np.vdot(zero, zero).real)
            p *= prob
            state = np.concatenate([zero / math.sqrt(prob), np.zeros(2)])
        elif re.fullmatch(rf"reset {qubit};", line):
            pass  # the ancilla is already |0> after the all-zero projection
        else:
            raise AssertionError(f"unexpected line {line!r}")
    return p


class TestEmitter:
    def test_empty_ir_is_header_only(self):
        assert emit_circuit_text(CircuitIR()) == 'OPENQASM 2.0;\ninclude "qelib1.inc";\nqreg q[2];\n'

    def test_one_measure_statement(self):
        text = emit_circuit_text(build_rodeo_circuit(H0_REFERENCE, 1.0, [0.7], 1))
        assert text.count("measure ") == 1
        assert "creg c[1];" in text

    def test_unknown_gate_kind(self):
        with pytest.raises(InvalidInputError):
            emit_circuit_text(CircuitIR((GateRecord("swap", (ANCILLA,), (), 0),), 1))

    def test_golden_file(self):
        ir = build_rodeo_circuit(H0_REFERENCE, 1.0, golden_times(), 3)
        assert emit_circuit_text(ir) == GOLDEN.read_text(encoding="utf-8")

    def test_text_semantics_match_closed_form(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            h, psi = random_hamiltonian(rng), random_state(rng)
            ts = rng.normal(0, 5, 3)
            e = rng.uniform(-2, 2)
            text = emit_circuit_text(build_rodeo_circuit(h, e, ts, 3))
            assert abs(run_qasm_all_zero(text, psi) - success_prob_fixed_times(h, psi, e, ts)) <= 1e-12

    def test_golden_semantics(self):
        p = run_qasm_all_zero(GOLDEN.read_text(encoding="utf-8"), KET0)
        assert p == pytest.approx(success_prob_fixed_times(H0_REFERENCE, KET0, 1.0, golden_times()), abs=1e-12)
