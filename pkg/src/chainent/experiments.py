"""Ensemble-averaged entanglement curves of a middle pair of a chain.

Each trajectory owns a random stream derived from ``(master_seed, index)``
through :class:`numpy.random.SeedSequence`; results are therefore identical
for any number of worker threads.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .evolution import PropagationConfig, PropagationError, TrotterPropagator
from .hamiltonian import HamiltonianSpec, Model, build_bonds
from .measures import MEASURE_NAMES, batch_measures
from .perturbation import model_abs_delta
from .qstate import InitialStateKind, build_initial_state, middle_pair, reduced_density_matrix

# separability threshold and the side on which the pair is entangled
THRESHOLDS = {
    "concurrence": (0.0, 1),
    "negativity": (0.0, 1),
    "lambda_min_pt": (0.0, -1),
    "theta": (1.0, 1),
    "eof": (0.0, 1),
}

# rounding noise at tau = 0 (product pair) must not count as entanglement
ENTANGLED_EPS = 1e-12

CSV_COLUMNS = [
    ("C", "concurrence"),
    ("N", "negativity"),
    ("lambda_min", "lambda_min_pt"),
    ("theta", "theta"),
    ("eof", "eof"),
]
CSV_HEADER = ["tau"] + [f"{p}_{short}" for short, _ in CSV_COLUMNS for p in ("mean", "se")]


def trajectory_rng(master_seed: int, index: int) -> np.random.Generator:
    """Stream of trajectory ``index``: PCG64 seeded by ``SeedSequence([master_seed, index])``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(master_seed), int(index)])))


@dataclass(frozen=True)
class ExperimentConfig:
    spec: HamiltonianSpec
    r: int = 1
    initial: InitialStateKind = InitialStateKind.RANDOM_PRODUCT
    samples: int = 200
    tau_max: float = 2.5
    dtau: float = 0.025
    master_seed: int = 0
    tolerance: float = 1e-4

    def __post_init__(self):
        object.__setattr__(self, "initial", InitialStateKind.parse(self.initial))
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if not self.dtau > 0 or not self.tau_max > 0:
            raise ValueError("tau_max and dtau must be positive")
        if self.r not in (1, 2, 3):
            raise ValueError("separation r must be 1, 2 or 3")
        middle_pair(self.spec.n, self.r)

    @property
    def tau(self) -> np.ndarray:
        k = math.ceil(self.tau_max / self.dtau - 1e-9)
        return np.arange(k + 1) * self.dtau

    @property
    def abs_delta(self) -> float:
        return model_abs_delta(self.spec)

    @property
    def pair(self) -> tuple[int, int]:
        return middle_pair(self.spec.n, self.r)

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "r": self.r,
            "pair": list(self.pair),
            "initial": self.initial.value,
            "samples": self.samples,
            "tau_max": self.tau_max,
            "dtau": self.dtau,
            "master_seed": self.master_seed,
            "tolerance": self.tolerance,
            "abs_delta": self.abs_delta,
        }


@dataclass
class CrossingTimes:
    """Separability-onset times; ``None`` marks a crossing not reached on the grid."""

    tau_star: dict[str, float | None]
    tau_bar_star: dict[str, float | None]
    crossed: dict[str, int]
    not_reached: dict[str, int]
    never_entangled: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "tau_star": self.tau_star,
            "tau_bar_star": self.tau_bar_star,
            "trajectories_crossed": self.crossed,
            "trajectories_not_reached": self.not_reached,
            "trajectories_never_entangled": self.never_entangled,
        }


@dataclass
class EnsembleCurve:
    config: ExperimentConfig
    tau: np.ndarray
    trajectories: dict[str, np.ndarray] = field(repr=False)
    crossings: CrossingTimes | None = None

    @property
    def sample_count(self) -> int:
        return next(iter(self.trajectories.values())).shape[0]

    def mean(self, measure: str) -> np.ndarray:
        return self.trajectories[measure].mean(axis=0)

    def se(self, measure: str) -> np.ndarray:
        data = self.trajectories[measure]
        if data.shape[0] < 2:
            return np.zeros(data.shape[1])
        return data.std(axis=0, ddof=1) / np.sqrt(data.shape[0])

    def rows(self):
        cols = [self.tau]
        for _, name in CSV_COLUMNS:
            cols += [self.mean(name), self.se(name)]
        return np.column_stack(cols)

    def write_csv(self, path) -> None:
        write_curve_csv(path, self.rows())


def write_curve_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for row in rows:
            w.writerow([f"{x:.17g}" for x in row])


def read_curve_csv(path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        data = np.array([[float(x) for x in row] for row in reader if row])
    return {name: data[:, i] for i, name in enumerate(header)}


def _trajectory(config: ExperimentConfig, index: int, pairs) -> np.ndarray:
    """Measures of one trajectory, shape ``(len(pairs), len(tau), len(MEASURE_NAMES))``."""
    spec = config.spec
    n = spec.n
    rng = trajectory_rng(config.master_seed, index)
    bonds = build_bonds(spec, rng) if spec.model is Model.TWO_BODY_RANDOM else config_bonds(spec)
    psi = build_initial_state(config.initial, n, pairs[0], rng).copy_amplitudes()

    tau = config.tau
    dt_phys = config.dtau / config.abs_delta
    prop = TrotterPropagator(bonds, n)
    rhos = np.empty((len(pairs), len(tau), 4, 4), dtype=np.complex128)
    for p, pair in enumerate(pairs):
        rhos[p, 0] = reduced_density_matrix(psi, pair)
    try:
        pc = PropagationConfig(dt=dt_phys, tolerance=config.tolerance)
        psi, steps = prop.refine(psi, dt_phys, pc, target=config.tolerance * dt_phys)
    except PropagationError as exc:
        raise PropagationError(f"trajectory {index}: {exc}") from exc
    for k in range(1, len(tau)):
        if k > 1:
            prop.advance(psi, dt_phys, steps)
        psi /= np.linalg.norm(psi)
        for p, pair in enumerate(pairs):
            rhos[p, k] = reduced_density_matrix(psi, pair)
    m = batch_measures(rhos.reshape(-1, 4, 4))
    out = np.stack([m[name] for name in MEASURE_NAMES], axis=-1)
    return out.reshape(len(pairs), len(tau), len(MEASURE_NAMES))


_BOND_CACHE: dict = {}


def config_bonds(spec: HamiltonianSpec):
    key = (spec.model, spec.n)
    if key not in _BOND_CACHE:
        _BOND_CACHE[key] = build_bonds(spec)
    return _BOND_CACHE[key]


def _run(config: ExperimentConfig, rs, threads: int | None) -> dict[int, EnsembleCurve]:
    pairs = [middle_pair(config.spec.n, r) for r in rs]
    indices = range(config.samples)
    if threads is not None and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda i: _trajectory(config, i, pairs), indices))
    else:
        results = [_trajectory(config, i, pairs) for i in indices]
    data = np.stack(results)  # (samples, pairs, tau, measures)
    curves = {}
    for p, r in enumerate(rs):
        cfg = replace(config, r=r)
        traj = {name: np.ascontiguousarray(data[:, p, :, j]) for j, name in enumerate(MEASURE_NAMES)}
        curve = EnsembleCurve(cfg, cfg.tau, traj)
        curve.crossings = crossing_times(curve)
        curves[r] = curve
    return curves


def run_ensemble(config: ExperimentConfig, threads: int | None = None) -> EnsembleCurve:
    """Average the entanglement of the middle pair at separation ``config.r`` over trajectories."""
    return _run(config, [config.r], threads)[config.r]


def run_ensemble_pairs(config: ExperimentConfig, rs=(1, 2, 3), threads: int | None = None) -> dict[int, EnsembleCurve]:
    """Several separations from the same trajectories.

    Each returned curve equals ``run_ensemble(replace(config, r=r))``; this
    needs an initial state that does not depend on the pair.
    """
    if config.initial is InitialStateKind.ENV_RANDOM_PAIR_PRODUCT and len(set(rs)) > 1:
        raise ValueError("the env-random initial state depends on the pair; run each r separately")
    for r in rs:
        replace(config, r=r)
    return _run(config, list(rs), threads)


def _first_crossing(tau: np.ndarray, g: np.ndarray, start: int) -> float | None:
    """First ``k > start`` with ``g[k] <= 0``, linearly interpolated; ``g[start] > 0``."""
    below = np.nonzero(g[start + 1 :] <= 0.0)[0]
    if below.size == 0:
        return None
    k = start + 1 + int(below[0])
    frac = g[k - 1] / (g[k - 1] - g[k])
    return float(tau[k - 1] + frac * (tau[k] - tau[k - 1]))


def average_crossing(tau, values, measure: str) -> float | None:
    """Crossing of an averaged curve through its threshold, after the curve's extremum."""
    thr, side = THRESHOLDS[measure]
    g = side * (np.asarray(values) - thr)
    kext = int(np.argmax(g))
    if g[kext] <= ENTANGLED_EPS:
        return None
    return _first_crossing(np.asarray(tau), g, kext)


def trajectory_crossing(tau, values, measure: str) -> tuple[str, float | None]:
    """Per-trajectory onset of separability: the first return through the threshold.

    The search starts at the first local extremum after the pair becomes
    entangled. Returns ``(status, tau)`` with status ``crossed``,
    ``not_reached`` or ``never_entangled``.
    """
    thr, side = THRESHOLDS[measure]
    g = side * (np.asarray(values) - thr)
    pos = np.nonzero(g[1:] > ENTANGLED_EPS)[0]
    if pos.size == 0:
        return "never_entangled", None
    k = 1 + int(pos[0])
    while k + 1 < len(g) and g[k + 1] > g[k]:
        k += 1
    t = _first_crossing(np.asarray(tau), g, k)
    return ("crossed", t) if t is not None else ("not_reached", None)


def crossing_times(curve: EnsembleCurve) -> CrossingTimes:
    tau_star, tau_bar, crossed, missing, never = {}, {}, {}, {}, {}
    for name in MEASURE_NAMES:
        tau_star[name] = average_crossing(curve.tau, curve.mean(name), name)
        times, counts = [], {"crossed": 0, "not_reached": 0, "never_entangled": 0}
        for row in curve.trajectories[name]:
            status, t = trajectory_crossing(curve.tau, row, name)
            counts[status] += 1
            if t is not None:
                times.append(t)
        tau_bar[name] = float(np.mean(times)) if times else None
        crossed[name] = counts["crossed"]
        missing[name] = counts["not_reached"]
        never[name] = counts["never_entangled"]
    return CrossingTimes(tau_star, tau_bar, crossed, missing, never)


def rational_fit(tau) -> np.ndarray:
    tau = np.asarray(tau, dtype=float)
    return (1.0 + 4.0 * tau) / (1.0 + 6.0 * tau**2)


def rational_fit_residual(curve, tau_max: float | None = None) -> tuple[float, np.ndarray]:
    """Max of ``|Theta_mean - (1 + 4 tau) / (1 + 6 tau^2)|`` over the grid, and the residual series.

    ``curve`` is an :class:`EnsembleCurve` or a ``(tau, theta_mean)`` pair.
    """
    if isinstance(curve, EnsembleCurve):
        tau, th = curve.tau, curve.mean("theta")
    else:
        tau, th = (np.asarray(x, dtype=float) for x in curve)
    res = th - rational_fit(tau)
    mask = tau <= tau_max + 1e-12 if tau_max is not None else np.ones_like(tau, dtype=bool)
    return float(np.max(np.abs(res[mask]))), res


def initial_state_comparison(
    spec: HamiltonianSpec,
    samples: int,
    seed: int,
    tau_max: float = 2.0,
    dtau: float = 0.025,
    threads: int | None = None,
) -> dict[InitialStateKind, EnsembleCurve]:
    """``r = 1`` curves for the three initial-state families."""
    out = {}
    for kind in InitialStateKind:
        cfg = ExperimentConfig(spec, r=1, initial=kind, samples=samples, tau_max=tau_max, dtau=dtau, master_seed=seed)
        out[kind] = run_ensemble(cfg, threads)
    return out
