"""Energy scans: sweep the target energy, find success-probability peaks,
fit Gaussians to them and refine through a schedule of growing sigma."""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import rng as rng_mod
from .engine import ReadoutNoise, RodeoConfig, expected_success_prob, run_shots
from .errors import FitError, InsufficientDataError, InvalidInputError, PeakNotFoundError
from .fitting import fit_gaussian
from .pauli import PauliHamiltonian

log = logging.getLogger(__name__)

FIT_HALF_WIDTH = 2.5  # in units of 1/sigma
WINDOW_HALF_WIDTH = 4.0  # in units of 1/sigma of the refining stage
MERGE_DISTANCE = 2.0  # in units of 1/sigma
PEAK_THRESHOLD_ABOVE_BACKGROUND = 0.15
RANGE_PADDING = 0.2


@dataclass(frozen=True)
class ScanStage:
    sigma: float
    e_min: float
    e_max: float
    n_points: int

    def __post_init__(self):
        if not self.sigma > 0:
            raise InvalidInputError("sigma must be > 0")
        if not self.e_min < self.e_max:
            raise InvalidInputError(f"empty energy range [{self.e_min}, {self.e_max}]")
        if self.n_points < 4:
            raise InvalidInputError("a scan stage needs at least 4 points")

    def grid(self) -> np.ndarray:
        return np.linspace(self.e_min, self.e_max, self.n_points)

    def centered(self, center: float, half_width: float) -> "ScanStage":
        return replace(self, e_min=center - half_width, e_max=center + half_width)


@dataclass(frozen=True)
class ShotBudget:
    """How each grid point is evaluated.

    ``peak_time_sets`` optionally assigns a time-set count to refinement
    windows, ordered from the highest-energy peak down; other scans use
    ``n_time_sets``.
    """

    n_cycles: int = 3
    n_time_sets: int = 25
    shots_per_set: int = 100
    peak_time_sets: tuple[int, ...] = ()
    noise: ReadoutNoise = field(default_factory=ReadoutNoise)
    seed: int = 0
    analytic: bool = False

    def sets_for_peak(self, rank: int) -> int:
        if rank < len(self.peak_time_sets):
            return self.peak_time_sets[rank]
        return self.n_time_sets

    @property
    def background(self) -> float:
        """Off-resonance success probability of a noiseless readout, ``2^-N``."""
        return 0.5**self.n_cycles


# 25 sets x 100 shots around the upper level, 50 x 100 around the lower one.
DEFAULT_BUDGET = ShotBudget(n_cycles=3, n_time_sets=25, shots_per_set=100, peak_time_sets=(25, 50))
ANALYTIC_BUDGET = ShotBudget(n_cycles=3, analytic=True)


@dataclass(frozen=True)
class ScanResult:
    stage: ScanStage
    points: tuple[tuple[float, float, float], ...]  # (e_target, success_fraction, stderr)

    @property
    def energies(self) -> np.ndarray:
        return np.array([p[0] for p in self.points])

    @property
    def fractions(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])

    @property
    def errors(self) -> np.ndarray:
        return np.array([p[2] for p in self.points])

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["e_target", "success_fraction", "stderr"])
        for e, f, s in self.points:
            writer.writerow([repr(float(e)), repr(float(f)), repr(float(s))])
        return buf.getvalue()


@dataclass(frozen=True)
class PeakEstimate:
    center: float
    center_err: float
    width: float
    height: float
    background: float
    fit_window: tuple[float, float]
    sigma: float
    width_err: float = 0.0
    background_err: float = 0.0
    n_points: int = 0

    @property
    def amplitude(self) -> float:
        return self.height - self.background

    def as_dict(self) -> dict:
        return {
            "center": self.center,
            "center_err": self.center_err,
            "width": self.width,
            "width_err": self.width_err,
            "height": self.height,
            "background": self.background,
            "background_err": self.background_err,
            "fit_window": list(self.fit_window),
            "sigma": self.sigma,
            "n_points": self.n_points,
        }


def energy_bounds(h: PauliHamiltonian, padding: float = RANGE_PADDING) -> tuple[float, float]:
    """Symmetric scan range from the operator-norm bound ``|c_I| + |c|``, padded."""
    bound = (abs(h.c_i) + h.rotation_norm) * (1.0 + padding)
    if bound == 0.0:
        bound = 1.0
    return -bound, bound


def default_schedule(
    h: PauliHamiltonian, sigmas: Sequence[float] = (2.0, 7.0, 12.0), points: Sequence[int] = (40, 20, 20)
) -> list[ScanStage]:
    """Stage templates; only the first stage's energy range is used as given."""
    e_min, e_max = energy_bounds(h)
    return [ScanStage(float(s), e_min, e_max, int(n)) for s, n in zip(sigmas, points)]


def scan_stage(
    h: PauliHamiltonian,
    psi_i,
    stage: ScanStage,
    budget: ShotBudget,
    keys: Sequence[int] = (),
    n_time_sets: int | None = None,
) -> ScanResult:
    """Evaluate the success probability on the stage's uniform grid.

    Point ``i`` draws from the seed derived from ``(budget.seed, *keys, i)``.
    """
    grid = stage.grid()
    if budget.analytic:
        probs = expected_success_prob(h, psi_i, grid, stage.sigma, budget.n_cycles)
        return ScanResult(stage, tuple((float(e), float(p), 0.0) for e, p in zip(grid, probs)))
    sets = n_time_sets or budget.n_time_sets
    points = []
    for i, e in enumerate(grid):
        config = RodeoConfig(
            n_cycles=budget.n_cycles,
            sigma=stage.sigma,
            e_target=float(e),
            n_time_sets=sets,
            shots_per_set=budget.shots_per_set,
            seed=rng_mod.derive_seed(budget.seed, *keys, i),
            noise=budget.noise,
        )
        out = run_shots(h, psi_i, config)
        points.append((float(e), out.success_fraction, out.stderr))
    return ScanResult(stage, tuple(points))


def detect_peaks(result: ScanResult, background: float, threshold: float) -> list[float]:
    """Interior local maxima above ``threshold``, merged within ``2/sigma``.

    Higher maxima win a merge.  Centers are returned in increasing energy.
    """
    if not threshold > background:
        raise InvalidInputError("threshold must exceed the background")
    e = result.energies
    y = result.fractions
    found = []
    for i in range(1, len(y) - 1):
        # >= on the left, > on the right picks one point of a flat top
        if y[i] > threshold and y[i] >= y[i - 1] and y[i] > y[i + 1]:
            found.append(i)
    merge = MERGE_DISTANCE / result.stage.sigma
    kept: list[int] = []
    for i in sorted(found, key=lambda j: -y[j]):
        if all(abs(e[i] - e[j]) >= merge for j in kept):
            kept.append(i)
    return sorted(float(e[i]) for i in kept)


def fit_gaussian_peak(
    result: ScanResult, candidate: float, background: float = 0.125, half_width: float | None = None
) -> PeakEstimate:
    """Gaussian-plus-offset fit to the points within ``2.5/sigma`` of ``candidate``.

    Points with a positive stderr are weighted by it and the center error
    comes straight from the weighted covariance; exact (zero-error) scans
    are fitted unweighted with a residual-scaled covariance.
    """
    sigma = result.stage.sigma
    hw = FIT_HALF_WIDTH / sigma if half_width is None else half_width
    lo, hi = candidate - hw, candidate + hw
    e = result.energies
    mask = (e >= lo) & (e <= hi)
    if mask.sum() < 4:
        raise InsufficientDataError(
            f"only {int(mask.sum())} scan points in fit window [{lo:.5g}, {hi:.5g}]"
        )
    x, y, err = e[mask], result.fractions[mask], result.errors[mask]

    sigma_y = None
    if np.any(err > 0):
        floor = err[err > 0].min()
        sigma_y = np.where(err > 0, err, floor)

    p0 = (max(y.max() - background, 1e-3), candidate, 1.0 / sigma, background)
    fit = fit_gaussian(x, y, p0, sigma_y=sigma_y)
    amplitude, center, width, offset = fit.params
    errs = fit.errors
    if not lo <= center <= hi:
        raise FitError(
            f"fitted center {center:.6g} left the window [{lo:.6g}, {hi:.6g}]",
            {"params": fit.params, "candidate": candidate},
        )
    if amplitude <= 0:
        raise FitError("fitted peak has non-positive amplitude", {"params": fit.params})
    return PeakEstimate(
        center=float(center),
        center_err=float(errs[1]),
        width=float(width),
        height=float(amplitude + offset),
        background=float(offset),
        fit_window=(float(lo), float(hi)),
        sigma=sigma,
        width_err=float(errs[2]),
        background_err=float(errs[3]),
        n_points=int(mask.sum()),
    )


@dataclass(frozen=True)
class ScheduleResult:
    """Every stage's scans and fitted peaks; ``peaks`` is the final stage's."""

    scans: tuple[tuple[ScanResult, ...], ...]
    stage_peaks: tuple[tuple[PeakEstimate, ...], ...]

    @property
    def peaks(self) -> list[PeakEstimate]:
        return list(self.stage_peaks[-1])


def _dedupe(peaks: list[PeakEstimate], sigma: float) -> list[PeakEstimate]:
    merge = MERGE_DISTANCE / sigma
    kept: list[PeakEstimate] = []
    for p in sorted(peaks, key=lambda q: q.center_err):
        if all(abs(p.center - q.center) >= merge for q in kept):
            kept.append(p)
    return sorted(kept, key=lambda q: -q.center)


def peaks_in_scan(
    result: ScanResult, budget: ShotBudget, threshold: float | None = None
) -> list[PeakEstimate]:
    """Detect and fit; a candidate whose fit fails is treated as noise and dropped."""
    background = budget.background
    if threshold is None:
        threshold = background + PEAK_THRESHOLD_ABOVE_BACKGROUND
    peaks = []
    for c in detect_peaks(result, background, threshold):
        try:
            peaks.append(fit_gaussian_peak(result, c, background))
        except (FitError, InsufficientDataError) as exc:
            log.info("dropping candidate %.6g (sigma=%g): %s", c, result.stage.sigma, exc)
    return peaks


def refine_window(
    h: PauliHamiltonian,
    psi_i,
    template: ScanStage,
    center: float,
    budget: ShotBudget,
    keys: Sequence[int],
    n_time_sets: int | None = None,
    bounds: tuple[float, float] | None = None,
) -> ScanResult:
    """Scan ``template``'s grid size and sigma on a window centered at ``center``."""
    hw = WINDOW_HALF_WIDTH / template.sigma
    lo, hi = center - hw, center + hw
    if bounds is not None:
        lo, hi = max(lo, bounds[0]), min(hi, bounds[1])
    stage = replace(template, e_min=lo, e_max=hi)
    return scan_stage(h, psi_i, stage, budget, keys, n_time_sets)


def scan_schedule(
    h: PauliHamiltonian,
    psi_i,
    schedule: Sequence[ScanStage],
    budget: ShotBudget,
    threshold: float | None = None,
    keys: Sequence[int] = (),
) -> ScheduleResult:
    """Run the first stage over its full range, then refine around each peak.

    Windows for stage ``s+1`` are centered on stage-``s`` fitted peaks with
    half-width ``4/sigma_{s+1}``, clipped to the first stage's range.
    """
    if not schedule:
        raise InvalidInputError("empty schedule")
    sigmas = [s.sigma for s in schedule]
    if any(b <= a for a, b in zip(sigmas, sigmas[1:])):
        raise InvalidInputError(f"schedule sigmas must strictly increase, got {sigmas}")

    first = schedule[0]
    bounds = (first.e_min, first.e_max)
    result = scan_stage(h, psi_i, first, budget, (*keys, 0, 0))
    peaks = _dedupe(peaks_in_scan(result, budget, threshold), first.sigma)
    if not peaks:
        raise PeakNotFoundError("stage 0 (sigma=%g) found no peaks" % first.sigma, [result])
    all_scans = [(result,)]
    all_peaks = [tuple(peaks)]

    for s, template in enumerate(schedule[1:], start=1):
        scans, found = [], []
        for rank, prev in enumerate(peaks):
            scan = refine_window(
                h, psi_i, template, prev.center, budget, (*keys, s, rank), budget.sets_for_peak(rank), bounds
            )
            scans.append(scan)
            window_peaks = peaks_in_scan(scan, budget, threshold)
            if not window_peaks:
                log.warning("stage %d lost the peak near %.6g", s, prev.center)
            found.extend(window_peaks)
        peaks = _dedupe(found, template.sigma)
        if not peaks:
            raise PeakNotFoundError(f"stage {s} (sigma={template.sigma:g}) found no peaks", scans)
        all_scans.append(tuple(scans))
        all_peaks.append(tuple(peaks))
    return ScheduleResult(tuple(all_scans), tuple(all_peaks))


def multi_resolution_scan(
    h: PauliHamiltonian,
    psi_i,
    schedule: Sequence[ScanStage],
    budget: ShotBudget,
    threshold: float | None = None,
) -> list[PeakEstimate]:
    """Final-stage peaks of :func:`scan_schedule`, highest energy first."""
    return scan_schedule(h, psi_i, schedule, budget, threshold).peaks


def relative_error(estimate: float, exact: float) -> float:
    return abs(estimate - exact) / abs(exact) if exact else math.inf
