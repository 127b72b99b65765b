"""Command-line front end.

    rodeo spectrum  --config cfg.toml [--analytic] [--seed N] [--out DIR]
    rodeo hf        --config cfg.toml ...
    rodeo benchmark --config cfg.toml ...
    rodeo compile   --config cfg.toml ...

Exit codes: 0 success, 1 pipeline failure, 2 usage or configuration error.

Artifacts (all under ``--out``):

    spectrum   stage{s}_window{w}.csv  (e_target,success_fraction,stderr)
               spectrum_heatmap.svg, spectrum_scans.svg, peaks.json
    hf         sweep_E1.csv, sweep_E2.csv  (phi,energy,error)
               fit_summary.json, hf_sweep.svg, table1.csv, table1.txt
    benchmark  table2.csv (raw), table3.csv (mitigated), tables.txt,
               benchmark.json
    compile    rodeo_E<E>_s<sigma>_seed<seed>_set<k>.qasm, manifest.json

Every run also writes ``config.json`` with the fully resolved configuration.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import rng as rng_mod
from .benchmark import benchmark_report
from .circuit import build_rodeo_circuit, emit_circuit_text
from .config import RunConfig, load_config
from .engine import expected_success_prob, sample_times
from .errors import ConfigError, RodeoError
from .hf import hf_report
from .pauli import coupled, eigendecompose
from .plots import phi_sweep_svg, scan_curves_svg, scan_heatmap_svg
from .scan import default_schedule, scan_schedule

log = logging.getLogger("rodeo")

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2


def _write(out: Path, name: str, text: str) -> Path:
    path = out / name
    path.write_text(text, encoding="utf-8")
    return path


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _prepare(config: RunConfig, command: str) -> Path:
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    _write(out, "config.json", _dump({"command": command, "config": config.to_dict()}))
    return out


def _schedule(config: RunConfig):
    return default_schedule(config.h0, config.sigmas, config.points)


def cmd_spectrum(config: RunConfig) -> int:
    out = _prepare(config, "spectrum")
    psi = np.array([1.0, 0.0], dtype=complex)
    schedule = _schedule(config)
    result = scan_schedule(config.h0, psi, schedule, config.budget(), config.threshold)
    for s, scans in enumerate(result.scans):
        for w, scan in enumerate(scans):
            _write(out, f"stage{s}_window{w}.csv", scan.to_csv())
    e_range = (schedule[0].e_min, schedule[0].e_max)

    def exact(e, sigma):
        return expected_success_prob(config.h0, psi, e, sigma, config.n_cycles)

    _write(out, "spectrum_heatmap.svg", scan_heatmap_svg(result.scans, e_range, "Sequential energy scans"))
    _write(out, "spectrum_scans.svg", scan_curves_svg(result.scans, e_range, exact, "Energy scans"))
    spec = eigendecompose(config.h0)
    peaks = {
        "config": config.to_dict(),
        "exact_eigenvalues": list(spec.energies),
        "stages": [[p.as_dict() for p in stage] for stage in result.stage_peaks],
        "peaks": [p.as_dict() for p in result.peaks],
    }
    _write(out, "peaks.json", _dump(peaks))
    for p in result.peaks:
        print(f"E = {p.center:.6f} ± {p.center_err:.6f}")
    return EXIT_OK


def cmd_hf(config: RunConfig) -> int:
    if config.h1 is None:
        raise ConfigError("the hf pipeline needs a [hamiltonian.h1] section")
    out = _prepare(config, "hf")
    report = hf_report(config.h0, config.h1, config.phi, None, _schedule(config), config.budget(), config.threshold)
    sweep = report.sweep
    e_high = eigendecompose(config.h0).e_high
    panels = []
    for n, level in enumerate(report.levels):
        _write(out, f"sweep_{level.name}.csv", sweep.to_csv(n))
        phi, energy, error = sweep.level_arrays(n)
        branch = 0 if level.energy_exact == e_high else 1
        exact = np.array([eigendecompose(coupled(config.h0, config.h1, f)).energies[branch] for f in phi])
        exact_fit = np.polynomial.polynomial.Polynomial.fit(phi, exact, 2)
        panels.append(
            {
                "name": level.name,
                "phi": phi,
                "energy": energy,
                "error": error,
                "fit": level.fit,
                "fit_band": level.fit.band,
                "exact": exact,
                "exact_fit": exact_fit,
            }
        )
    _write(out, "hf_sweep.svg", phi_sweep_svg(panels, "Level energies against φ"))
    _write(out, "table1.csv", report.to_csv())
    _write(out, "table1.txt", report.to_text())
    _write(out, "fit_summary.json", _dump({"config": config.to_dict(), **report.summary()}))
    print(report.to_text(), end="")
    return EXIT_OK


def cmd_benchmark(config: RunConfig) -> int:
    out = _prepare(config, "benchmark")
    h1 = config.h1 if config.h1 is not None else config.h0
    report = benchmark_report(config.h0, h1, config.bench_noise, config.bench_shots, config.bench_trials, config.seed)
    _write(out, "table2.csv", report.to_csv(mitigated=False))
    _write(out, "table3.csv", report.to_csv(mitigated=True))
    text = report.to_text(False) + "\n" + report.to_text(True)
    _write(out, "tables.txt", text)
    _write(
        out,
        "benchmark.json",
        _dump(
            {
                "config": config.to_dict(),
                "confusion_matrix": report.confusion.matrix.tolist(),
                "clipped_trials": report.clipped,
            }
        ),
    )
    print(text, end="")
    return EXIT_OK


def circuit_filename(e_target: float, sigma: float, seed: int, set_index: int) -> str:
    return f"rodeo_E{e_target:+.6f}_s{sigma:g}_seed{seed}_set{set_index}.qasm"


def cmd_compile(config: RunConfig) -> int:
    """One QASM program per (E, sigma, time set).

    Energy ``i`` uses point seed ``derive_seed(seed, i)`` and set ``k`` the
    stream ``(point seed, k)`` -- the same times the shot sampler would draw
    for a one-stage scan over these energies.
    """
    if not config.compile_energies:
        raise ConfigError("compile needs at least one target energy")
    out = _prepare(config, "compile")
    sigma = config.compile_sigma
    manifest = {"config": config.to_dict(), "circuits": []}
    for i, e in enumerate(config.compile_energies):
        point_seed = rng_mod.derive_seed(config.seed, i)
        for k in range(config.compile_sets):
            times = sample_times(sigma, config.n_cycles, rng_mod.stream(point_seed, k))
            ir = build_rodeo_circuit(config.h0, e, times, config.n_cycles)
            name = circuit_filename(e, sigma, config.seed, k)
            _write(out, name, emit_circuit_text(ir))
            manifest["circuits"].append(
                {"file": name, "e_target": e, "sigma": sigma, "set": k, "point_seed": point_seed, "times": list(map(float, times))}
            )
    _write(out, "manifest.json", _dump(manifest))
    print(f"wrote {len(manifest['circuits'])} circuits to {out}")
    return EXIT_OK


COMMANDS = {"spectrum": cmd_spectrum, "hf": cmd_hf, "benchmark": cmd_benchmark, "compile": cmd_compile}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rodeo", description="Rodeo-algorithm simulations for one-qubit Hamiltonians.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="TOML run configuration")
        p.add_argument("--seed", type=int, help="root RNG seed (unsigned 64-bit)")
        p.add_argument("--analytic", action="store_true", default=None, help="use exact averaged probabilities")
        p.add_argument("--out", help="output directory")
        p.add_argument("--shots", type=int, help="shots per time set (benchmark: per trial)")
        p.add_argument("--sets", type=int, help="time sets per grid point (compile: per energy)")
        p.add_argument("--noise-p01", type=float, dest="p01", help="P(read 1 | true 0)")
        p.add_argument("--noise-p10", type=float, dest="p10", help="P(read 0 | true 1)")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    overrides = {k: getattr(args, k) for k in ("seed", "analytic", "out", "shots", "sets", "p01", "p10")}
    try:
        config = load_config(args.config, overrides)
        return COMMANDS[args.command](config)
    except ConfigError as exc:
        print(f"rodeo {args.command}: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RodeoError as exc:
        print(f"rodeo {args.command}: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
