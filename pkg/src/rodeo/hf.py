"""Expectation values from eigenvalue slopes (Hellmann-Feynman).

For ``H(phi) = H0 + phi H1`` the slope ``dE_n/dphi`` at ``phi = 0`` equals
``<psi_n|H1|psi_n>``.  Each level is tracked across a phi grid with rodeo
scans and fitted with a quadratic; the linear coefficient is the estimate.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InsufficientDataError, InvalidInputError, PeakNotFoundError
from .fitting import PolynomialFit, fit_polynomial
from .pauli import PauliHamiltonian, coupled, eigendecompose, expectation
from .scan import (
    DEFAULT_BUDGET,
    PeakEstimate,
    ScanResult,
    ScanStage,
    ShotBudget,
    default_schedule,
    peaks_in_scan,
    refine_window,
    scan_schedule,
)

log = logging.getLogger(__name__)

DEFAULT_PHI_GRID = tuple(float(x) for x in np.round(np.linspace(-0.2, 0.2, 9), 12))
SWEEP_KEY = 7  # separates sweep-window seeds from the phi = 0 schedule seeds
LEVEL_NAMES = ("E1", "E2")


@dataclass(frozen=True)
class SweepPoint:
    phi: float
    energy: float
    error: float
    peak: PeakEstimate | None = None


@dataclass(frozen=True)
class PhiSweep:
    phi_values: tuple[float, ...]
    levels: tuple[tuple[SweepPoint, ...], ...]  # highest level first, points in phi order
    scans: dict = field(default_factory=dict, compare=False)  # (phi, level) -> ScanResult

    def __post_init__(self):
        phis = self.phi_values
        if any(b <= a for a, b in zip(phis, phis[1:])):
            raise InvalidInputError("phi values must strictly increase")
        if 0.0 not in phis:
            raise InvalidInputError("phi grid must contain 0")

    def level_arrays(self, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        pts = self.levels[n]
        return (
            np.array([p.phi for p in pts]),
            np.array([p.energy for p in pts]),
            np.array([p.error for p in pts]),
        )

    def to_csv(self, n: int) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["phi", "energy", "error"])
        for p in self.levels[n]:
            writer.writerow([repr(p.phi), repr(p.energy), repr(p.error)])
        return buf.getvalue()


QuadraticFit = PolynomialFit


def _closest(peaks: list[PeakEstimate], target: float) -> PeakEstimate | None:
    return min(peaks, key=lambda p: abs(p.center - target)) if peaks else None


def sweep_phi(
    h0: PauliHamiltonian,
    h1: PauliHamiltonian,
    phi_values: Sequence[float] = DEFAULT_PHI_GRID,
    psi_i=None,
    schedule: Sequence[ScanStage] | None = None,
    budget: ShotBudget = DEFAULT_BUDGET,
    threshold: float | None = None,
) -> PhiSweep:
    """Track every level found at ``phi = 0`` across the phi grid.

    ``phi = 0`` gets the full multi-resolution scan.  Other phi values are
    visited outward from 0 and only rerun the last (finest) stage, in a
    window centered on the neighbouring phi's fitted level.
    """
    phis = tuple(sorted(float(p) for p in phi_values))
    if 0.0 not in phis:
        raise InvalidInputError("phi grid must contain 0")
    if len(set(phis)) != len(phis):
        raise InvalidInputError("duplicate phi values")
    psi = np.array([1.0, 0.0], dtype=complex) if psi_i is None else np.asarray(psi_i, dtype=complex)
    if schedule is None:
        schedule = default_schedule(h0)
    finest = schedule[-1]

    j0 = phis.index(0.0)
    # same seeds as a plain scan of h0, so phi = 0 reproduces it bit for bit
    base = scan_schedule(h0, psi, schedule, budget, threshold)
    base_peaks = base.peaks
    n_levels = len(base_peaks)
    points: dict[tuple[int, int], SweepPoint] = {}
    scans: dict[tuple[float, int], ScanResult] = {}
    for n, p in enumerate(base_peaks):
        points[(j0, n)] = SweepPoint(0.0, p.center, p.center_err, p)

    order = list(range(j0 + 1, len(phis))) + list(range(j0 - 1, -1, -1))
    for j in order:
        prev = j - 1 if j > j0 else j + 1
        h = coupled(h0, h1, phis[j])
        for n in range(n_levels):
            guess = points[(prev, n)].energy
            scan = refine_window(h, psi, finest, guess, budget, (j, SWEEP_KEY, n), budget.sets_for_peak(n))
            scans[(phis[j], n)] = scan
            peak = _closest(peaks_in_scan(scan, budget, threshold), guess)
            if peak is None:
                raise PeakNotFoundError(
                    f"lost level {n} ({LEVEL_NAMES[n] if n < 2 else n}) at phi={phis[j]:g}", [scan]
                )
            points[(j, n)] = SweepPoint(phis[j], peak.center, peak.center_err, peak)

    levels = tuple(tuple(points[(j, n)] for j in range(len(phis))) for n in range(n_levels))
    return PhiSweep(phis, levels, scans)


def fit_quadratic(phi, energy, error) -> QuadraticFit:
    """Error-weighted quadratic ``c0 + c1 phi + c2 phi^2``.

    ``c0`` estimates the level at ``phi = 0`` and ``c1`` the expectation of
    the perturbation in that eigenstate.
    """
    phi = np.asarray(phi, dtype=float)
    if phi.size < 4:
        raise InsufficientDataError(f"quadratic fit needs at least 4 points, got {phi.size}")
    if len(np.unique(phi)) != phi.size:
        raise InvalidInputError("singular normal equations: duplicated phi values")
    return fit_polynomial(phi, energy, error, degree=2)


def _sweep_errors(err: np.ndarray) -> np.ndarray:
    # exact scans can give vanishing residual errors; fall back to equal weights
    if np.all(err > 0) and np.all(np.isfinite(err)):
        return err
    return np.ones_like(err)


@dataclass(frozen=True)
class LevelResult:
    name: str
    energy: float
    energy_err: float
    energy_exact: float
    slope: float
    slope_err: float
    slope_exact: float
    fit: QuadraticFit


@dataclass(frozen=True)
class HFReport:
    levels: tuple[LevelResult, ...]
    sweep: PhiSweep

    def rows(self) -> list[list]:
        header = ["quantity"]
        for lv in self.levels:
            header += [lv.name, f"{lv.name}_err", f"{lv.name}_exact"]
        e_row = ["H0"]
        s_row = ["H1"]
        for lv in self.levels:
            e_row += [lv.energy, lv.energy_err, lv.energy_exact]
            s_row += [lv.slope, lv.slope_err, lv.slope_exact]
        return [header, e_row, s_row]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for row in self.rows():
            writer.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])
        return buf.getvalue()

    def to_text(self) -> str:
        lines = [f"{'':10s}" + "".join(f"{lv.name + ' (RA)':>22s}{'exact':>12s}" for lv in self.levels)]
        for label, attr in (("<H0>", "energy"), ("<H1>", "slope")):
            cells = ""
            for lv in self.levels:
                value, err, exact = getattr(lv, attr), getattr(lv, attr + "_err"), getattr(lv, attr + "_exact")
                cells += f"{value:>13.5f} ± {err:<6.5f}{exact:>12.5f}"
            lines.append(f"{label:10s}{cells}")
        return "\n".join(lines) + "\n"

    def summary(self) -> dict:
        return {
            "phi_values": list(self.sweep.phi_values),
            "levels": [
                {
                    "name": lv.name,
                    "coefficients": [float(c) for c in lv.fit.coefficients],
                    "covariance": [[float(c) for c in row] for row in lv.fit.covariance],
                    "chi2": lv.fit.chi2,
                    "dof": lv.fit.dof,
                    "energy": lv.energy,
                    "energy_err": lv.energy_err,
                    "energy_exact": lv.energy_exact,
                    "h1_expectation": lv.slope,
                    "h1_expectation_err": lv.slope_err,
                    "h1_expectation_exact": lv.slope_exact,
                }
                for lv in self.levels
            ],
        }


def hf_report(
    h0: PauliHamiltonian,
    h1: PauliHamiltonian,
    phi_values: Sequence[float] = DEFAULT_PHI_GRID,
    psi_i=None,
    schedule: Sequence[ScanStage] | None = None,
    budget: ShotBudget = DEFAULT_BUDGET,
    threshold: float | None = None,
) -> HFReport:
    """``<H0>`` and ``<H1>`` in each eigenstate of ``H0`` with exact references."""
    sweep = sweep_phi(h0, h1, phi_values, psi_i, schedule, budget, threshold)
    spec = eigendecompose(h0)
    exact_e = spec.energies
    exact_v = spec.vectors
    results = []
    for n in range(len(sweep.levels)):
        phi, energy, err = sweep.level_arrays(n)
        fit = fit_quadratic(phi, energy, _sweep_errors(err))
        # match the tracked level to the nearest exact eigenvalue for the reference columns
        k = int(np.argmin([abs(fit.coefficients[0] - e) for e in exact_e]))
        name = LEVEL_NAMES[n] if n < len(LEVEL_NAMES) else f"E{n + 1}"
        results.append(
            LevelResult(
                name=name,
                energy=float(fit.coefficients[0]),
                energy_err=float(fit.errors[0]),
                energy_exact=float(exact_e[k]),
                slope=float(fit.coefficients[1]),
                slope_err=float(fit.errors[1]),
                slope_exact=expectation(exact_v[k], h1),
                fit=fit,
            )
        )
    return HFReport(tuple(results), sweep)
