"""Exact algebra for one-qubit Hamiltonians written in the Pauli basis.

Everything here is closed form and serves as ground truth for the
simulator, the compiler and the scan/fit pipelines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

IDENTITY = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = {"X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}

_NORM_TOL = 1e-9
_IMAG_TOL = 1e-12


@dataclass(frozen=True)
class PauliHamiltonian:
    """``c_I I + c_X X + c_Y Y + c_Z Z`` with real coefficients."""

    c_i: float
    c_x: float
    c_y: float
    c_z: float

    def __post_init__(self):
        for name in ("c_i", "c_x", "c_y", "c_z"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InvalidInputError(f"coefficient {name}={value!r} is not finite")
            object.__setattr__(self, name, float(value))

    @classmethod
    def from_sequence(cls, coeffs) -> "PauliHamiltonian":
        c_i, c_x, c_y, c_z = coeffs
        return cls(c_i, c_x, c_y, c_z)

    @classmethod
    def from_mapping(cls, mapping) -> "PauliHamiltonian":
        extra = set(mapping) - {"c_I", "c_X", "c_Y", "c_Z"}
        if extra:
            raise InvalidInputError(f"unknown Hamiltonian coefficients {sorted(extra)}")
        try:
            return cls(*(float(mapping[k]) for k in ("c_I", "c_X", "c_Y", "c_Z")))
        except KeyError as exc:
            raise InvalidInputError(f"missing Hamiltonian coefficient {exc.args[0]}") from None

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.c_i, self.c_x, self.c_y, self.c_z)

    def as_mapping(self) -> dict[str, float]:
        return dict(zip(("c_I", "c_X", "c_Y", "c_Z"), self.as_tuple()))

    @property
    def axis_vector(self) -> np.ndarray:
        return np.array([self.c_x, self.c_y, self.c_z])

    @property
    def rotation_norm(self) -> float:
        """Half the spectral gap, ``sqrt(c_X^2 + c_Y^2 + c_Z^2)``."""
        return math.sqrt(self.c_x**2 + self.c_y**2 + self.c_z**2)

    @property
    def is_identity(self) -> bool:
        return self.c_x == 0.0 and self.c_y == 0.0 and self.c_z == 0.0

    def __add__(self, other: "PauliHamiltonian") -> "PauliHamiltonian":
        return PauliHamiltonian(*(a + b for a, b in zip(self.as_tuple(), other.as_tuple())))

    def __mul__(self, scale: float) -> "PauliHamiltonian":
        return PauliHamiltonian(*(scale * a for a in self.as_tuple()))

    __rmul__ = __mul__


# Coefficient sets used throughout the demonstration runs.
H0_REFERENCE = PauliHamiltonian(-0.08496, -0.89134, 0.26536, 0.57205)
H1_REFERENCE = PauliHamiltonian(-0.84537, 0.00673, -0.29354, 0.18477)


def coupled(h0: PauliHamiltonian, h1: PauliHamiltonian, phi: float) -> PauliHamiltonian:
    """The one-parameter family ``h0 + phi * h1``."""
    return h0 + phi * h1


@dataclass(frozen=True)
class Spectrum:
    e_low: float
    e_high: float
    v_low: np.ndarray
    v_high: np.ndarray
    degenerate: bool = False

    @property
    def energies(self) -> tuple[float, float]:
        """Eigenvalues ordered from high to low."""
        return (self.e_high, self.e_low)

    @property
    def vectors(self) -> tuple[np.ndarray, np.ndarray]:
        return (self.v_high, self.v_low)


@dataclass(frozen=True)
class AxisAngle:
    theta: float
    n_x: float
    n_y: float
    n_z: float


def matrix_of(h: PauliHamiltonian) -> np.ndarray:
    return h.c_i * IDENTITY + h.c_x * PAULI_X + h.c_y * PAULI_Y + h.c_z * PAULI_Z


def _fix_phase(v: np.ndarray) -> np.ndarray:
    # first nonzero component real and positive
    idx = 0 if abs(v[0]) > 1e-14 else 1
    v = v * (abs(v[idx]) / v[idx])
    v = v / np.linalg.norm(v)
    v[idx] = abs(v[idx])
    return v


def eigendecompose(h: PauliHamiltonian) -> Spectrum:
    """Closed-form eigenpairs.

    A pure identity returns the canonical basis with ``degenerate=True``.
    """
    r = h.rotation_norm
    if r == 0.0:
        e1 = np.array([1, 0], dtype=complex)
        e2 = np.array([0, 1], dtype=complex)
        return Spectrum(h.c_i, h.c_i, e2, e1, degenerate=True)

    n_x, n_y, n_z = h.c_x / r, h.c_y / r, h.c_z / r
    # (1 + n_z, n_x + i n_y) is the +1 eigenvector of n.sigma; choose the
    # better-conditioned representative of each eigenline.
    if n_z >= 0:
        v_high = np.array([1 + n_z, n_x + 1j * n_y])
        v_low = np.array([-(n_x - 1j * n_y), 1 + n_z])
    else:
        v_high = np.array([n_x - 1j * n_y, 1 - n_z])
        v_low = np.array([1 - n_z, -(n_x + 1j * n_y)])
    return Spectrum(
        e_low=h.c_i - r,
        e_high=h.c_i + r,
        v_low=_fix_phase(v_low.astype(complex)),
        v_high=_fix_phase(v_high.astype(complex)),
    )


def axis_angle(h: PauliHamiltonian, t: float) -> AxisAngle:
    """Rotation part of ``exp(-i H t)`` as an angle about a unit axis.

    For a pure identity the axis is arbitrary; ``+z`` with ``theta = 0`` is used.
    """
    r = h.rotation_norm
    if r == 0.0:
        return AxisAngle(0.0, 0.0, 0.0, 1.0)
    return AxisAngle(2.0 * t * r, h.c_x / r, h.c_y / r, h.c_z / r)


def rotation_matrix(aa: AxisAngle) -> np.ndarray:
    c = math.cos(aa.theta / 2)
    s = math.sin(aa.theta / 2)
    return np.array(
        [
            [c - 1j * s * aa.n_z, -1j * s * (aa.n_x - 1j * aa.n_y)],
            [-1j * s * (aa.n_x + 1j * aa.n_y), c + 1j * s * aa.n_z],
        ]
    )


def evolution_unitary(h: PauliHamiltonian, t: float) -> np.ndarray:
    """``exp(-i H t)`` as global phase ``exp(-i c_I t)`` times an SU(2) rotation."""
    if not math.isfinite(t):
        raise InvalidInputError(f"time {t!r} is not finite")
    return np.exp(-1j * h.c_i * t) * rotation_matrix(axis_angle(h, t))


def evolution_unitaries(h: PauliHamiltonian, times) -> np.ndarray:
    """Vectorized :func:`evolution_unitary` over an array of times, shape ``times.shape + (2, 2)``."""
    times = np.asarray(times, dtype=float)
    aa = axis_angle(h, 1.0)
    half = 0.5 * aa.theta * times
    c = np.cos(half)
    s = np.sin(half)
    out = np.empty(times.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = c - 1j * s * aa.n_z
    out[..., 0, 1] = -1j * s * (aa.n_x - 1j * aa.n_y)
    out[..., 1, 0] = -1j * s * (aa.n_x + 1j * aa.n_y)
    out[..., 1, 1] = c + 1j * s * aa.n_z
    return np.exp(-1j * h.c_i * times)[..., None, None] * out


def check_normalized(state: np.ndarray, tol: float = _NORM_TOL) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    if state.shape != (2,):
        raise InvalidInputError(f"expected a 2-component state, got shape {state.shape}")
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > tol:
        raise InvalidInputError(f"state norm {norm:.12g} deviates from 1")
    return state


def expectation(state: np.ndarray, h: PauliHamiltonian) -> float:
    state = check_normalized(state)
    value = np.vdot(state, matrix_of(h) @ state)
    if abs(value.imag) > _IMAG_TOL:
        raise InvalidInputError(f"expectation has imaginary part {value.imag:.3g}")
    return float(value.real)


def spectral_weights(h: PauliHamiltonian, state: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (high, low) and overlaps ``|<v_n|psi>|^2`` of ``state``."""
    state = check_normalized(state)
    spec = eigendecompose(h)
    energies = np.array(spec.energies)
    weights = np.array([abs(np.vdot(v, state)) ** 2 for v in spec.vectors])
    return energies, weights
