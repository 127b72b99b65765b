"""Run configuration: a TOML file plus command-line overrides.

Example (every key except the Hamiltonian is optional)::

    seed = 2021
    analytic = false

    [hamiltonian.h0]
    c_I = -0.08496
    c_X = -0.89134
    c_Y = 0.26536
    c_Z = 0.57205

    [hamiltonian.h1]          # needed by the hf pipeline
    c_I = -0.84537
    ...

    [scan]
    sigmas = [2, 7, 12]
    points = [40, 20, 20]
    n_cycles = 3

    [shots]
    sets = 25
    shots_per_set = 100
    peak_sets = [25, 50]

    [noise]                   # readout flips used by spectrum/hf/compile
    p01 = 0.0
    p10 = 0.0

    [hf]
    phi = [-0.2, -0.15, ..., 0.2]

    [benchmark]
    shots = 5000
    trials = 10
    p01 = 0.01
    p10 = 0.04

    [compile]
    energies = [1.0]          # or e_min / e_max / n_points
    sigma = 12
    sets = 1
"""

from __future__ import annotations

import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError, InvalidInputError
from .engine import ReadoutNoise
from .hf import DEFAULT_PHI_GRID
from .pauli import PauliHamiltonian
from .rng import SEED_MASK
from .scan import ShotBudget

DEFAULT_SEED = 2021
_SECTIONS = {"hamiltonian", "scan", "shots", "noise", "hf", "benchmark", "compile"}
_TOP_KEYS = {"seed", "analytic", "out"} | _SECTIONS


@dataclass(frozen=True)
class RunConfig:
    h0: PauliHamiltonian
    h1: PauliHamiltonian | None = None
    seed: int = DEFAULT_SEED
    analytic: bool = False
    out: str = "out"
    sigmas: tuple[float, ...] = (2.0, 7.0, 12.0)
    points: tuple[int, ...] = (40, 20, 20)
    n_cycles: int = 3
    threshold: float | None = None
    sets: int = 25
    shots_per_set: int = 100
    peak_sets: tuple[int, ...] = (25, 50)
    noise: ReadoutNoise = field(default_factory=ReadoutNoise)
    phi: tuple[float, ...] = DEFAULT_PHI_GRID
    bench_shots: int = 5000
    bench_trials: int = 10
    bench_noise: ReadoutNoise = field(default_factory=lambda: ReadoutNoise(0.01, 0.04))
    compile_energies: tuple[float, ...] = (1.0,)
    compile_sigma: float = 12.0
    compile_sets: int = 1

    def budget(self) -> ShotBudget:
        return ShotBudget(
            n_cycles=self.n_cycles,
            n_time_sets=self.sets,
            shots_per_set=self.shots_per_set,
            peak_time_sets=self.peak_sets,
            noise=self.noise,
            seed=self.seed,
            analytic=self.analytic,
        )

    def to_dict(self) -> dict:
        """Fully resolved, JSON-ready view (sidecar for every artifact)."""
        d = asdict(self)
        d["h0"] = self.h0.as_mapping()
        d["h1"] = self.h1.as_mapping() if self.h1 else None
        for key in ("sigmas", "points", "peak_sets", "phi", "compile_energies"):
            d[key] = list(d[key])
        return d


def _section(raw: dict, name: str) -> dict:
    value = raw.get(name, {})
    if not isinstance(value, dict):
        raise ConfigError(f"[{name}] must be a table")
    return value


def _noise(table: dict, default: ReadoutNoise) -> ReadoutNoise:
    try:
        return ReadoutNoise(float(table.get("p01", default.p01)), float(table.get("p10", default.p10)))
    except (InvalidInputError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad noise parameters: {exc}") from None


def _floats(value, name) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a list of numbers") from None


def _ints(value, name) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a list of integers") from None


def parse_config(raw: dict, overrides: dict | None = None) -> RunConfig:
    """Validate a parsed TOML mapping; ``overrides`` (from flags) win over file values."""
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    ham = _section(raw, "hamiltonian")
    if "h0" not in ham:
        raise ConfigError("missing [hamiltonian.h0] section")
    try:
        h0 = PauliHamiltonian.from_mapping(ham["h0"])
        h1 = PauliHamiltonian.from_mapping(ham["h1"]) if "h1" in ham else None
    except (InvalidInputError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad Hamiltonian: {exc}") from None

    scan = _section(raw, "scan")
    shots = _section(raw, "shots")
    hf = _section(raw, "hf")
    bench = _section(raw, "benchmark")
    comp = _section(raw, "compile")
    defaults = RunConfig(h0=h0)

    sigmas = _floats(scan.get("sigmas", defaults.sigmas), "scan.sigmas")
    points = _ints(scan.get("points", defaults.points), "scan.points")
    if len(points) != len(sigmas):
        raise ConfigError("scan.sigmas and scan.points must have the same length")
    if any(b <= a for a, b in zip(sigmas, sigmas[1:])) or any(s <= 0 for s in sigmas):
        raise ConfigError("scan.sigmas must be positive and strictly increasing")
    if any(n < 4 for n in points):
        raise ConfigError("every scan stage needs at least 4 points")

    if "energies" in comp:
        energies = _floats(comp["energies"], "compile.energies")
    elif {"e_min", "e_max", "n_points"} <= set(comp):
        energies = tuple(float(e) for e in np.linspace(comp["e_min"], comp["e_max"], int(comp["n_points"])))
    else:
        energies = defaults.compile_energies

    noise = _noise(_section(raw, "noise"), defaults.noise)
    if "p01" in overrides or "p10" in overrides:
        noise = _noise({"p01": overrides.get("p01", noise.p01), "p10": overrides.get("p10", noise.p10)}, noise)
    bench_noise = _noise(bench, defaults.bench_noise)
    if "p01" in overrides or "p10" in overrides:
        bench_noise = noise

    seed = int(overrides.get("seed", raw.get("seed", defaults.seed)))
    if not 0 <= seed <= SEED_MASK:
        raise ConfigError("seed must be an unsigned 64-bit integer")

    cfg = RunConfig(
        h0=h0,
        h1=h1,
        seed=seed,
        analytic=bool(overrides.get("analytic", raw.get("analytic", defaults.analytic))),
        out=str(overrides.get("out", raw.get("out", defaults.out))),
        sigmas=sigmas,
        points=points,
        n_cycles=int(scan.get("n_cycles", defaults.n_cycles)),
        threshold=float(scan["threshold"]) if "threshold" in scan else None,
        sets=int(overrides.get("sets", shots.get("sets", defaults.sets))),
        shots_per_set=int(overrides.get("shots", shots.get("shots_per_set", defaults.shots_per_set))),
        # a --sets flag means a uniform budget everywhere
        peak_sets=() if "sets" in overrides else _ints(shots.get("peak_sets", defaults.peak_sets), "shots.peak_sets"),
        noise=noise,
        phi=_floats(hf.get("phi", defaults.phi), "hf.phi"),
        bench_shots=int(overrides.get("shots", bench.get("shots", defaults.bench_shots))),
        bench_trials=int(bench.get("trials", defaults.bench_trials)),
        bench_noise=bench_noise,
        compile_energies=energies,
        compile_sigma=float(comp.get("sigma", defaults.compile_sigma)),
        compile_sets=int(overrides.get("sets", comp.get("sets", defaults.compile_sets))),
    )
    if cfg.n_cycles < 1:
        raise ConfigError("scan.n_cycles must be >= 1")
    if min(cfg.sets, cfg.shots_per_set, cfg.bench_shots, cfg.bench_trials, cfg.compile_sets) < 1:
        raise ConfigError("shot budgets must be positive")
    if cfg.compile_sigma <= 0:
        raise ConfigError("compile.sigma must be > 0")
    return cfg


def load_config(path: str | Path, overrides: dict | None = None) -> RunConfig:
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from None
    return parse_config(raw, overrides)
