"""Rodeo-algorithm simulation for one-qubit Hamiltonians written in the Pauli basis.

Typical use::

    from rodeo import H0_REFERENCE, ANALYTIC_BUDGET, default_schedule, multi_resolution_scan

    psi = np.array([1, 0], dtype=complex)
    peaks = multi_resolution_scan(H0_REFERENCE, psi, default_schedule(H0_REFERENCE), ANALYTIC_BUDGET)
"""

from __future__ import annotations

from .benchmark import ConfusionMatrix, benchmark_report, measure_pauli, mitigate_counts
from .circuit import build_rodeo_circuit, emit_circuit_text, euler_decompose
from .engine import ReadoutNoise, RodeoConfig, expected_success_prob, run_shots, success_prob_fixed_times
from .errors import ConfigError, FitError, InsufficientDataError, InvalidInputError, PeakNotFoundError, RodeoError
from .hf import hf_report, sweep_phi
from .pauli import H0_REFERENCE, H1_REFERENCE, PauliHamiltonian, eigendecompose, evolution_unitary, expectation
from .scan import ANALYTIC_BUDGET, DEFAULT_BUDGET, ShotBudget, multi_resolution_scan, default_schedule, scan_schedule

__version__ = "0.1.0"

__all__ = [
    "ANALYTIC_BUDGET",
    "ConfigError",
    "ConfusionMatrix",
    "FitError",
    "H0_REFERENCE",
    "H1_REFERENCE",
    "InsufficientDataError",
    "InvalidInputError",
    "DEFAULT_BUDGET",
    "PauliHamiltonian",
    "PeakNotFoundError",
    "ReadoutNoise",
    "RodeoConfig",
    "RodeoError",
    "ShotBudget",
    "benchmark_report",
    "build_rodeo_circuit",
    "eigendecompose",
    "emit_circuit_text",
    "euler_decompose",
    "evolution_unitary",
    "expectation",
    "expected_success_prob",
    "hf_report",
    "measure_pauli",
    "mitigate_counts",
    "multi_resolution_scan",
    "default_schedule",
    "run_shots",
    "scan_schedule",
    "success_prob_fixed_times",
    "sweep_phi",
]
