"""Compile rodeo cycles into native one-qubit gate parameters and QASM text.

The controlled time evolution ``exp(-i H t)`` is written as

    exp(i xi) * U3(gamma, beta, delta),  U3 = exp(i (beta+delta)/2) Rz(beta) Ry(gamma) Rz(delta)

so the hardware only needs a controlled ``U3`` plus a phase on the control
qubit.  Object qubit is wire ``q[0]``, ancilla is ``q[1]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidInputError
from .pauli import PauliHamiltonian, axis_angle

OBJECT = "object"
ANCILLA = "ancilla"
WIRE_INDEX = {OBJECT: 0, ANCILLA: 1}

HADAMARD = "hadamard"
PHASE = "phase"
CONTROLLED_U = "controlled-u"
MEASURE_RESET = "measure-reset"
GATE_KINDS = (HADAMARD, PHASE, CONTROLLED_U, MEASURE_RESET)


@dataclass(frozen=True)
class EulerAngles:
    gamma: float
    beta: float
    delta: float
    xi: float


def u3_matrix(gamma: float, beta: float, delta: float) -> np.ndarray:
    c = math.cos(gamma / 2)
    s = math.sin(gamma / 2)
    return np.array(
        [
            [c, -np.exp(1j * delta) * s],
            [np.exp(1j * beta) * s, np.exp(1j * (beta + delta)) * c],
        ]
    )


def reconstruct(angles: EulerAngles) -> np.ndarray:
    """The 2x2 unitary that a controlled block with these angles applies."""
    return np.exp(1j * angles.xi) * u3_matrix(angles.gamma, angles.beta, angles.delta)


def euler_decompose(h: PauliHamiltonian, t: float) -> EulerAngles:
    """Euler angles with ``reconstruct(euler_decompose(h, t)) == exp(-i H t)``.

    ``gamma`` lies in ``[0, pi]``; the sum ``beta + delta`` comes from a
    two-argument arctangent so that ``theta/2 = pi/2`` stays finite, and the
    difference from ``atan2(n_X, n_Y)`` (scaled by ``sin(theta/2)``) so that
    ``n_Y = 0`` is well defined.  A pure identity compiles to a phase only.
    """
    if not math.isfinite(t):
        raise InvalidInputError(f"time {t!r} is not finite")
    if h.is_identity:
        return EulerAngles(0.0, 0.0, 0.0, -h.c_i * t)

    aa = axis_angle(h, t)
    c = math.cos(aa.theta / 2)
    s = math.sin(aa.theta / 2)
    half_sum = math.atan2(aa.n_z * s, c)
    half_diff = math.atan2(aa.n_x * s, aa.n_y * s)  # (delta - beta) / 2
    transverse = abs(s) * math.hypot(aa.n_x, aa.n_y)
    gamma = 2.0 * math.atan2(transverse, math.hypot(c, aa.n_z * s))
    delta = half_sum + half_diff
    beta = half_sum - half_diff
    xi = -h.c_i * t - half_sum
    return EulerAngles(gamma=gamma, beta=beta, delta=delta, xi=xi)


@dataclass(frozen=True)
class GateRecord:
    kind: str
    wires: tuple[str, ...]
    params: tuple[float, ...] = ()
    cycle: int = 0


@dataclass(frozen=True)
class CircuitIR:
    records: tuple[GateRecord, ...] = ()
    n_cycles: int = 0
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        measured = set()
        for rec in self.records:
            if any(w not in WIRE_INDEX for w in rec.wires):
                raise InvalidInputError(f"unknown wire in {rec}")
            if rec.kind == MEASURE_RESET:
                if rec.wires != (ANCILLA,):
                    raise InvalidInputError("measurements must target the ancilla")
                measured.add(rec.cycle)
            elif rec.cycle in measured:
                raise InvalidInputError(f"gate after the measurement of cycle {rec.cycle}")

    def __len__(self) -> int:
        return len(self.records)

    def count(self, kind: str) -> int:
        return sum(1 for rec in self.records if rec.kind == kind)


def build_rodeo_circuit(
    h: PauliHamiltonian, e_target: float, times: Sequence[float], n_cycles: int
) -> CircuitIR:
    """N cycles of [H, controlled exp(-iHt_k), P(E t_k), H, measure+reset] on the ancilla."""
    times = [float(t) for t in times]
    if len(times) != n_cycles:
        raise InvalidInputError(f"{len(times)} times supplied for {n_cycles} cycles")
    records = []
    for k, t in enumerate(times):
        ang = euler_decompose(h, t)
        records += [
            GateRecord(HADAMARD, (ANCILLA,), (), k),
            GateRecord(CONTROLLED_U, (ANCILLA, OBJECT), (ang.gamma, ang.beta, ang.delta, ang.xi), k),
            GateRecord(PHASE, (ANCILLA,), (e_target * t,), k),
            GateRecord(HADAMARD, (ANCILLA,), (), k),
            GateRecord(MEASURE_RESET, (ANCILLA,), (), k),
        ]
    meta = {"hamiltonian": h.as_mapping(), "e_target": float(e_target), "times": times}
    return CircuitIR(tuple(records), n_cycles, meta)


def _num(x: float) -> str:
    return repr(float(x))


def emit_circuit_text(ir: CircuitIR) -> str:
    """OpenQASM 2.0 program; the controlled block becomes ``cu3`` plus ``u1(xi)`` on the control."""
    q = {w: f"q[{i}]" for w, i in WIRE_INDEX.items()}
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', "qreg q[2];"]
    if ir.n_cycles:
        lines.append(f"creg c[{ir.n_cycles}];")
    for rec in ir.records:
        if rec.kind == HADAMARD:
            lines.append(f"h {q[rec.wires[0]]};")
        elif rec.kind == PHASE:
            lines.append(f"u1({_num(rec.params[0])}) {q[rec.wires[0]]};")
        elif rec.kind == CONTROLLED_U:
            gamma, beta, delta, xi = rec.params
            ctrl, tgt = rec.wires
            lines.append(f"cu3({_num(gamma)},{_num(beta)},{_num(delta)}) {q[ctrl]},{q[tgt]};")
            lines.append(f"u1({_num(xi)}) {q[ctrl]};")
        elif rec.kind == MEASURE_RESET:
            lines.append(f"measure {q[rec.wires[0]]} -> c[{rec.cycle}];")
            lines.append(f"reset {q[rec.wires[0]]};")
        else:
            raise InvalidInputError(f"unsupported gate kind {rec.kind!r}")
    return "\n".join(lines) + "\n"
