"""Two-qubit statevector backend with mid-circuit ancilla measurement.

States are complex arrays of shape ``(..., 2, 2)`` indexed ``[object, ancilla]``,
i.e. amplitude ``psi[o, a]`` belongs to basis state ``|o>|a>``.  Leading axes
are batch axes (time sets, shots) so whole ensembles advance together.
"""

from __future__ import annotations

import numpy as np

from .circuit import (
    CONTROLLED_U,
    HADAMARD,
    MEASURE_RESET,
    PHASE,
    CircuitIR,
    u3_matrix,
)
from .errors import InvalidInputError
from .pauli import check_normalized

HADAMARD_MATRIX = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def joint_state(psi_object: np.ndarray, batch_shape: tuple[int, ...] = ()) -> np.ndarray:
    """``|psi_object>|0>`` broadcast over ``batch_shape``."""
    psi = check_normalized(psi_object)
    state = np.zeros(batch_shape + (2, 2), dtype=complex)
    state[..., :, 0] = psi
    return state


def norm(state: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(np.abs(state) ** 2, axis=(-2, -1)))


def apply_hadamard(state: np.ndarray) -> np.ndarray:
    return state @ HADAMARD_MATRIX


def apply_phase(state: np.ndarray, lam) -> np.ndarray:
    """P(lam) = diag(1, e^{i lam}) on the ancilla; ``lam`` broadcasts over batch axes."""
    out = state.copy()
    phase = np.exp(1j * np.asarray(lam, dtype=float))
    out[..., :, 1] *= phase[..., None]
    return out


def apply_controlled(state: np.ndarray, unitary: np.ndarray) -> np.ndarray:
    """Apply ``unitary`` to the object when the ancilla is |1>.

    ``unitary`` has shape ``(..., 2, 2)`` broadcasting against the batch axes.
    """
    out = state.copy()
    out[..., :, 1] = np.einsum("...ij,...j->...i", unitary, state[..., :, 1])
    return out


def ancilla_zero_probability(state: np.ndarray) -> np.ndarray:
    return np.sum(np.abs(state[..., :, 0]) ** 2, axis=-1)


def project_and_reset(state: np.ndarray, bit) -> tuple[np.ndarray, np.ndarray]:
    """Collapse the ancilla onto ``bit`` and reset it to |0>.

    Returns the normalized post-measurement state and the branch probability.
    """
    bit = np.asarray(bit, dtype=bool)
    branch = np.where(bit[..., None], state[..., :, 1], state[..., :, 0])
    prob = np.sum(np.abs(branch) ** 2, axis=-1)
    length = np.sqrt(prob)
    safe = np.where(length > 0, length, 1.0)
    out = np.zeros_like(state)
    out[..., :, 0] = branch / safe[..., None]
    return out, prob


def rodeo_cycle(state: np.ndarray, unitary: np.ndarray, lam) -> np.ndarray:
    """H, controlled-U, P(lam), H on the ancilla; no measurement."""
    state = apply_hadamard(state)
    state = apply_controlled(state, unitary)
    state = apply_phase(state, lam)
    return apply_hadamard(state)


def execute_ir(ir: CircuitIR, psi_object: np.ndarray) -> tuple[float, np.ndarray | None]:
    """Probability that every mid-circuit measurement reads 0, by projection.

    Also returns the normalized object state conditioned on that outcome
    (``None`` when the probability vanishes).
    """
    state = joint_state(psi_object)
    p_success = 1.0
    for rec in ir.records:
        if rec.kind == HADAMARD:
            state = apply_hadamard(state)
        elif rec.kind == PHASE:
            state = apply_phase(state, rec.params[0])
        elif rec.kind == CONTROLLED_U:
            gamma, beta, delta, xi = rec.params
            state = apply_controlled(state, u3_matrix(gamma, beta, delta))
            state = apply_phase(state, xi)
        elif rec.kind == MEASURE_RESET:
            state, prob = project_and_reset(state, False)
            p_success *= float(prob)
            if p_success == 0.0:
                return 0.0, None
        else:
            raise InvalidInputError(f"unsupported gate kind {rec.kind!r}")
    return p_success, state[:, 0].copy()
