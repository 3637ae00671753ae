"""Command-line entry point.

Subcommands::

    simulate   ensemble-averaged entanglement curves (CSV + manifest)
    spectrum   level-spacing histogram of a symmetry sector (CSV + manifest)
    measures   entanglement report of a 4x4 density matrix read from JSON
    delta      Monte Carlo estimate of the mean perturbative matrix element
    fit        maximum deviation of a curve's Theta column from the rational fit
    replay     rerun a simulate or spectrum manifest

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .evolution import PropagationError
from .experiments import ExperimentConfig, read_curve_csv, run_ensemble
from .experiments import rational_fit_residual
from .hamiltonian import HamiltonianSpec, Model, TBRMNormalization
from .measures import check_density_matrix, entanglement_report
from .perturbation import mean_abs_delta
from .qstate import InitialStateKind
from .spectral import SPECTRAL_MAX_QUBITS, level_spacing_histogram

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3

MANIFEST_SUFFIX = ".manifest.json"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _default_threads() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def manifest_path(out: Path) -> Path:
    return out.with_name(out.stem + MANIFEST_SUFFIX)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write_manifest(out: Path, subcommand: str, flags: dict, config: dict, results: dict, execution: dict) -> Path:
    """One manifest per output file. Everything outside ``execution`` is a
    function of the flags alone and is reproduced byte for byte on rerun."""
    manifest = {
        "subcommand": subcommand,
        "version": __version__,
        "master_seed": flags.get("seed"),
        "flags": flags,
        "config": config,
        "outputs": [str(out)],
        "results": results,
        "execution": execution,
    }
    path = manifest_path(out)
    path.write_text(_dump(manifest))
    return path


def _execution(start: float, threads: int | None = None) -> dict:
    info = {"wall_seconds": round(time.perf_counter() - start, 3), "backend": kernels.BACKEND}
    if threads is not None:
        info["threads"] = threads
    return info


def _simulate_flags(args) -> dict:
    return {
        "model": args.model,
        "n": args.n,
        "r": args.r,
        "initial": args.initial,
        "samples": args.samples,
        "tau_max": args.tau_max,
        "dtau": args.dtau,
        "seed": args.seed,
        "tolerance": args.tolerance,
        "normalization": args.normalization,
    }


def _cmd_simulate(args) -> int:
    start = time.perf_counter()
    flags = _simulate_flags(args)
    spec = HamiltonianSpec(args.model, args.n, normalization=TBRMNormalization(args.normalization))
    config = ExperimentConfig(
        spec,
        r=args.r,
        initial=InitialStateKind.parse(args.initial),
        samples=args.samples,
        tau_max=args.tau_max,
        dtau=args.dtau,
        master_seed=args.seed,
        tolerance=args.tolerance,
    )
    threads = args.threads or _default_threads()
    curve = run_ensemble(config, threads=threads)
    out = Path(args.out)
    curve.write_csv(out)
    results = curve.crossings.to_dict()
    _write_manifest(out, "simulate", flags, config.to_dict(), results, _execution(start, threads))
    ts = results["tau_star"]
    print(f"wrote {out}; tau*(theta)={ts['theta']} tau*(lambda_min)={ts['lambda_min_pt']}")
    return EXIT_OK


def _spectrum_flags(args) -> dict:
    return {
        "model": args.model,
        "n": args.n,
        "sector": args.sector,
        "bins": args.bins,
        "degree": args.degree,
        "edge_fraction": args.edge_fraction,
        "resolve": args.resolve,
        "seed": args.seed,
    }


def _cmd_spectrum(args) -> int:
    start = time.perf_counter()
    if args.n > SPECTRAL_MAX_QUBITS:
        raise ValueError(f"spectrum is limited to n <= {SPECTRAL_MAX_QUBITS} (got n={args.n})")
    if Model.parse(args.model) is Model.TWO_BODY_RANDOM and args.seed is None:
        raise ValueError("--seed is required for the tbrm model")
    if not 0.0 <= args.edge_fraction < 0.5:
        raise ValueError("--edge-fraction must lie in [0, 0.5)")
    flags = _spectrum_flags(args)
    spec = HamiltonianSpec(args.model, args.n, seed=args.seed)
    hist = level_spacing_histogram(
        spec, args.sector, bins=args.bins, degree=args.degree, edge_fraction=args.edge_fraction, resolve=args.resolve
    )
    out = Path(args.out)
    hist.write_csv(out)
    results = {
        "kolmogorov_distance": hist.kolmogorov_distance,
        "level_count": hist.level_count,
        "block_sizes": list(hist.block_sizes),
        "spacing_count": int(hist.spacings.size),
    }
    _write_manifest(out, "spectrum", flags, {"spec": spec.to_dict()}, results, _execution(start))
    print(f"kolmogorov_distance {hist.kolmogorov_distance:.6f}")
    return EXIT_OK


def _read_rho(path) -> np.ndarray:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValueError(f"cannot read density matrix from {path}: {exc}") from exc
    arr = np.asarray(data, dtype=float)
    if arr.shape != (4, 4, 2):
        raise ValueError(f"expected a 4x4 list of [re, im] pairs, got shape {arr.shape}")
    rho = arr[..., 0] + 1j * arr[..., 1]
    check_density_matrix(rho, atol=1e-8)
    return rho


def _emit(payload: dict, out: str | None, subcommand: str, flags: dict, start: float) -> None:
    text = _dump(payload)
    sys.stdout.write(text)
    if out:
        path = Path(out)
        path.write_text(text)
        _write_manifest(path, subcommand, flags, {}, payload, _execution(start))


def _cmd_measures(args) -> int:
    start = time.perf_counter()
    rho = _read_rho(args.rho)
    _emit(entanglement_report(rho).to_dict(), args.out, "measures", {"rho": args.rho}, start)
    return EXIT_OK


def _cmd_delta(args) -> int:
    start = time.perf_counter()
    spec = HamiltonianSpec(args.model, args.n, normalization=TBRMNormalization(args.normalization))
    rng = np.random.default_rng(args.seed)
    stats = mean_abs_delta(spec, args.samples, rng)
    flags = {"model": args.model, "n": args.n, "samples": args.samples, "seed": args.seed,
             "normalization": args.normalization}
    _emit(stats.to_dict(), args.out, "delta", flags, start)
    return EXIT_OK


def _cmd_fit(args) -> int:
    start = time.perf_counter()
    try:
        data = read_curve_csv(args.curve)
    except OSError as exc:
        raise ValueError(f"cannot read curve {args.curve}: {exc}") from exc
    tau_max = args.tau_max
    worst, _ = rational_fit_residual((data["tau"], data["mean_theta"]), tau_max=tau_max)
    payload = {"max_residual": worst, "tau_max": float(data["tau"][-1]) if tau_max is None else tau_max}
    _emit(payload, args.out, "fit", {"curve": args.curve, "tau_max": tau_max}, start)
    return EXIT_OK


def _cmd_replay(args) -> int:
    try:
        manifest = json.loads(Path(args.manifest).read_text())
        sub, flags = manifest["subcommand"], manifest["flags"]
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise ValueError(f"cannot read manifest {args.manifest}: {exc}") from exc
    if sub not in ("simulate", "spectrum"):
        raise ValueError(f"replay supports simulate and spectrum manifests, not {sub!r}")
    out = args.out or manifest["outputs"][0]
    argv = [sub, "--out", out]
    for key, value in flags.items():
        if value is None:
            continue
        if key == "resolve":
            if not value:
                argv.append("--no-resolve")
            continue
        argv += ["--" + key.replace("_", "-"), repr(value) if isinstance(value, float) else str(value)]
    if sub == "simulate" and args.threads:
        argv += ["--threads", str(args.threads)]
    return main(argv)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="chainent", description="Pair entanglement in spin chains.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    models = [m.value for m in Model]
    norms = [m.value for m in TBRMNormalization]

    p = sub.add_parser("simulate", help="ensemble-averaged entanglement curves")
    p.add_argument("--model", required=True, choices=models)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, default=1, choices=(1, 2, 3))
    p.add_argument("--initial", default="product", choices=[k.value for k in InitialStateKind])
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--tau-max", type=float, default=2.5)
    p.add_argument("--dtau", type=float, default=0.025)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--tolerance", type=float, default=1e-4, help="propagation error per unit time")
    p.add_argument("--normalization", default=TBRMNormalization.ENSEMBLE.value, choices=norms)
    p.add_argument("--threads", type=_positive_int, default=None, help="worker threads (default: available cores)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("spectrum", help="level-spacing statistics")
    p.add_argument("--model", required=True, choices=models)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--sector", default="sz0", choices=("full", "sz0", "reflect"))
    p.add_argument("--bins", type=_positive_int, default=40)
    p.add_argument("--degree", type=_positive_int, default=10, help="unfolding polynomial degree")
    p.add_argument("--edge-fraction", type=float, default=0.1, help="fraction of levels dropped at each edge")
    p.add_argument("--no-resolve", dest="resolve", action="store_false",
                   help="keep residual reflection/flip symmetries unresolved")
    p.add_argument("--seed", type=int, default=None, help="bond seed (required for tbrm)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("measures", help="entanglement report of a two-qubit density matrix")
    p.add_argument("--rho", required=True, help="JSON file: row-major 4x4 list of [re, im] pairs")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_measures)

    p = sub.add_parser("delta", help="Monte Carlo mean |delta|")
    p.add_argument("--model", required=True, choices=models)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n", type=int, default=12, help="chain length (selects the interior bond)")
    p.add_argument("--normalization", default=TBRMNormalization.ENSEMBLE.value, choices=norms)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_delta)

    p = sub.add_parser("fit", help="rational-fit residual of a curve CSV")
    p.add_argument("--curve", required=True)
    p.add_argument("--tau-max", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("replay", help="rerun from a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", default=None, help="write here instead of the recorded path")
    p.add_argument("--threads", type=_positive_int, default=None)
    p.set_defaults(func=_cmd_replay)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"chainent {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (PropagationError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"chainent {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
