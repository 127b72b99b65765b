"""Directly prepared eigenstates: Pauli expectation values under readout
noise, with and without confusion-matrix mitigation."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from . import rng as rng_mod
from .engine import ReadoutNoise
from .errors import InvalidInputError
from .pauli import PauliHamiltonian, check_normalized, eigendecompose, expectation

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_SDG = np.diag([1, -1j])

# Basis change applied before a Z-basis readout; reading 0 means eigenvalue +1.
BASIS_ROTATIONS = {
    "X": _H,
    "Y": _H @ _SDG,  # S-dagger, then H
    "Z": np.eye(2, dtype=complex),
}
OBSERVABLES = ("X", "Y", "Z", "H0", "H1")
DEFAULT_NOISE = ReadoutNoise(p01=0.01, p10=0.04)

# stream tags under the root seed
_PAULI_TAG = 1
_CONFUSION_TAG = 2


@dataclass(frozen=True)
class ConfusionMatrix:
    """``matrix[i, j]`` is the probability of reading ``i`` given prepared ``j``."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (2, 2):
            raise InvalidInputError("confusion matrix must be 2x2")
        if np.any(m < 0) or np.any(m > 1) or not np.allclose(m.sum(axis=0), 1.0, atol=1e-12):
            raise InvalidInputError("confusion matrix columns must be probability vectors")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_noise(cls, noise: ReadoutNoise) -> "ConfusionMatrix":
        return cls(np.array([[1 - noise.p01, noise.p10], [noise.p01, 1 - noise.p10]]))

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.matrix))

    def inverse(self) -> np.ndarray:
        if abs(self.det) < 1e-9:
            raise InvalidInputError(f"confusion matrix is singular (det={self.det:.3g})")
        return np.linalg.inv(self.matrix)


def average_confusion(matrices) -> ConfusionMatrix:
    return ConfusionMatrix(np.mean([c.matrix for c in matrices], axis=0))


def _read_zeros(p_zero: float, shots: int, noise: ReadoutNoise, gen: np.random.Generator) -> int:
    true_bits = gen.random(shots) >= p_zero
    read_bits = noise.apply(true_bits, gen.random(shots))
    return int(shots - read_bits.sum())


@dataclass(frozen=True)
class PauliMeasurement:
    pauli: str
    mean: float
    stderr: float
    values: tuple[float, ...]
    zero_counts: tuple[int, ...]
    shots: int


def _mean_stderr(values) -> tuple[float, float]:
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return float(values.mean()), 0.0
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(values.size))


def measure_pauli(
    state,
    pauli: str,
    shots: int,
    trials: int,
    noise: ReadoutNoise = ReadoutNoise(),
    seed: int = 0,
) -> PauliMeasurement:
    """Estimate ``<pauli>`` as ``p(0) - p(1)`` of the rotated, noisily read state, per trial."""
    if pauli not in BASIS_ROTATIONS:
        raise InvalidInputError(f"unknown observable {pauli!r}; expected X, Y or Z")
    if shots < 1 or trials < 1:
        raise InvalidInputError("shots and trials must be positive")
    rotated = BASIS_ROTATIONS[pauli] @ check_normalized(state)
    p_zero = float(abs(rotated[0]) ** 2)
    zeros = []
    for k in range(trials):
        zeros.append(_read_zeros(p_zero, shots, noise, rng_mod.stream(seed, k)))
    values = [(2 * z - shots) / shots for z in zeros]
    mean, stderr = _mean_stderr(values)
    return PauliMeasurement(pauli, mean, stderr, tuple(values), tuple(zeros), shots)


def estimate_confusion(noise: ReadoutNoise, shots: int, seed: int = 0) -> ConfusionMatrix:
    """Empirical matrix from ``shots`` preparations each of |0> and |1>."""
    if shots < 1:
        raise InvalidInputError("shots must be >= 1")
    gen = rng_mod.stream(seed)
    read0_given0 = _read_zeros(1.0, shots, noise, gen) / shots
    read0_given1 = _read_zeros(0.0, shots, noise, gen) / shots
    return ConfusionMatrix(np.array([[read0_given0, read0_given1], [1 - read0_given0, 1 - read0_given1]]))


@dataclass(frozen=True)
class MitigatedProbabilities:
    probabilities: np.ndarray  # (p0, p1)
    clipped: bool

    @property
    def expectation(self) -> float:
        return float(self.probabilities[0] - self.probabilities[1])


def mitigate_counts(counts, cm: ConfusionMatrix) -> MitigatedProbabilities:
    """``cm^-1 p_raw``, projected back onto the probability simplex if needed."""
    counts = np.asarray(counts, dtype=float)
    total = counts.sum()
    if total <= 0:
        raise InvalidInputError("no counts to mitigate")
    p = cm.inverse() @ (counts / total)
    clipped = bool(np.any(p < 0) or np.any(p > 1))
    if clipped:
        p = np.clip(p, 0.0, None)
        p = p / p.sum()
    return MitigatedProbabilities(p, clipped)


@dataclass(frozen=True)
class ObservableEstimate:
    raw: float
    raw_err: float
    mitigated: float
    mitigated_err: float
    exact: float


@dataclass(frozen=True)
class ExpectationReport:
    """Per eigenstate (highest energy first), per observable estimates."""

    states: tuple[str, ...]
    estimates: tuple[dict, ...]  # one {observable: ObservableEstimate} per state
    confusion: ConfusionMatrix
    clipped: int = 0

    def table(self, mitigated: bool) -> list[list]:
        header = ["observable"]
        for name in self.states:
            header += [name, f"{name}_err", f"{name}_exact"]
        rows = [header]
        for obs in OBSERVABLES:
            row = [obs]
            for est in self.estimates:
                e = est[obs]
                if mitigated:
                    row += [e.mitigated, e.mitigated_err, e.exact]
                else:
                    row += [e.raw, e.raw_err, e.exact]
            rows.append(row)
        return rows

    def to_csv(self, mitigated: bool) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for row in self.table(mitigated):
            writer.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])
        return buf.getvalue()

    def to_text(self, mitigated: bool) -> str:
        rows = self.table(mitigated)
        title = "with" if mitigated else "without"
        lines = [f"Prepared eigenvector results {title} readout mitigation"]
        lines.append(f"{'':6s}" + "".join(f"{n:>24s}{'exact':>10s}" for n in self.states))
        for row in rows[1:]:
            cells = ""
            for i in range(len(self.states)):
                v, err, exact = row[1 + 3 * i : 4 + 3 * i]
                cells += f"{v:>15.5f} ± {err:<6.4f}{exact:>10.4f}"
            lines.append(f"{row[0]:6s}{cells}")
        return "\n".join(lines) + "\n"


def _combine(h: PauliHamiltonian, per_pauli: dict) -> np.ndarray:
    """Per-trial ``c_I + sum_a c_a <sigma_a>``."""
    return h.c_i + h.c_x * per_pauli["X"] + h.c_y * per_pauli["Y"] + h.c_z * per_pauli["Z"]


def benchmark_report(
    h0: PauliHamiltonian,
    h1: PauliHamiltonian,
    noise: ReadoutNoise = DEFAULT_NOISE,
    shots: int = 5000,
    trials: int = 10,
    seed: int = 0,
) -> ExpectationReport:
    """Raw and mitigated expectation values in both eigenstates of ``h0``.

    A confusion matrix is calibrated in every trial and the average is
    inverted once.
    """
    spec = eigendecompose(h0)
    confusions = [
        estimate_confusion(noise, shots, rng_mod.derive_seed(seed, _CONFUSION_TAG, k)) for k in range(trials)
    ]
    cm = average_confusion(confusions)
    n_clipped = 0
    estimates = []
    for s, vec in enumerate(spec.vectors):
        raw, mit = {}, {}
        for a, pauli in enumerate("XYZ"):
            m = measure_pauli(vec, pauli, shots, trials, noise, rng_mod.derive_seed(seed, _PAULI_TAG, s, a))
            raw[pauli] = np.array(m.values)
            corrected = [mitigate_counts((z, shots - z), cm) for z in m.zero_counts]
            n_clipped += sum(c.clipped for c in corrected)
            mit[pauli] = np.array([c.expectation for c in corrected])
        raw["H0"], mit["H0"] = _combine(h0, raw), _combine(h0, mit)
        raw["H1"], mit["H1"] = _combine(h1, raw), _combine(h1, mit)
        exact = {p: expectation(vec, PauliHamiltonian(0, *(1.0 if q == p else 0.0 for q in "XYZ"))) for p in "XYZ"}
        exact["H0"] = expectation(vec, h0)
        exact["H1"] = expectation(vec, h1)
        table = {}
        for obs in OBSERVABLES:
            rm, re = _mean_stderr(raw[obs])
            mm, me = _mean_stderr(mit[obs])
            table[obs] = ObservableEstimate(rm, re, mm, me, exact[obs])
        estimates.append(table)
    return ExpectationReport(("psi1", "psi2"), tuple(estimates), cm, n_clipped)
