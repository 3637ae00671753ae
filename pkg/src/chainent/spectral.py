"""Nearest-neighbour level-spacing statistics of chain Hamiltonians in a symmetry sector."""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from numpy.polynomial import Polynomial
from scipy import stats

from .hamiltonian import HamiltonianSpec, build_bonds, sparse_hamiltonian, total_sz

SPECTRAL_MAX_QUBITS = 12
SPACING_RANGE = 4.0


def wigner_dyson_pdf(s):
    s = np.asarray(s, dtype=float)
    return 0.5 * np.pi * s * np.exp(-0.25 * np.pi * s**2)


def wigner_dyson_cdf(s):
    s = np.asarray(s, dtype=float)
    return 1.0 - np.exp(-0.25 * np.pi * s**2)


def _reflect_index(n: int) -> np.ndarray:
    idx = np.arange(1 << n)
    out = np.zeros_like(idx)
    for q in range(n):
        out |= ((idx >> q) & 1) << (n - 1 - q)
    return out


def sector_basis(n: int, sector: str) -> sp.csr_matrix | None:
    """Isometry onto a symmetry sector as a sparse ``(2**n, d)`` matrix, or None for the full space.

    ``sector`` is ``full``/``none``, ``sz<m>`` with ``m = n_up - n_down``
    (``sz0`` is zero magnetisation), or ``reflect`` (even under chain reversal).
    """
    sector = sector.lower()
    if sector in ("full", "none"):
        return None
    dim = 1 << n
    match = re.fullmatch(r"sz(-?\d+)", sector)
    if match:
        m = int(match.group(1))
        idx = np.nonzero(total_sz(n) == m)[0]
        if idx.size == 0:
            raise ValueError(f"sector {sector!r} is empty for n={n}")
        return sp.csr_matrix((np.ones(idx.size), (idx, np.arange(idx.size))), shape=(dim, idx.size))
    if sector == "reflect":
        refl = _reflect_index(n)
        rows, cols, vals = [], [], []
        col = 0
        for s in range(dim):
            t = refl[s]
            if t < s:
                continue
            if t == s:
                rows.append(s), cols.append(col), vals.append(1.0)
            else:
                rows += [s, t]
                cols += [col, col]
                vals += [np.sqrt(0.5)] * 2
            col += 1
        return sp.csr_matrix((vals, (rows, cols)), shape=(dim, col))
    raise ValueError(f"unknown sector {sector!r}")


def sector_hamiltonian(bonds, n: int, sector: str) -> np.ndarray:
    if n > SPECTRAL_MAX_QUBITS:
        raise ValueError(f"spectral statistics limited to n <= {SPECTRAL_MAX_QUBITS}")
    h = sparse_hamiltonian(bonds, n)
    basis = sector_basis(n, sector)
    if basis is not None:
        h = basis.T @ h @ basis
    return h.toarray()


def _sector_permutations(n: int, basis) -> dict[str, np.ndarray]:
    """Chain reversal, global spin flip and their product as permutations of the
    sector's basis states, keeping only those that map the sector onto itself."""
    dim = 1 << n
    refl = _reflect_index(n)
    full = {
        "reflect": refl,
        "flip": np.arange(dim) ^ (dim - 1),
        "reflect-flip": refl[np.arange(dim) ^ (dim - 1)],
    }
    if basis is None:
        return full
    coo = basis.tocoo()
    if not np.allclose(coo.data, 1.0):
        return {}
    states = np.empty(basis.shape[1], dtype=np.int64)
    states[coo.col] = coo.row
    pos = np.full(dim, -1, dtype=np.int64)
    pos[states] = np.arange(states.size)
    out = {}
    for name, perm in full.items():
        image = pos[perm[states]]
        if np.all(image >= 0):
            out[name] = image
    return out


def residual_symmetries(h: np.ndarray, perms: dict[str, np.ndarray], atol: float = 1e-10) -> list[np.ndarray]:
    """Independent commuting permutations among ``perms`` that commute with ``h``."""
    found: list[np.ndarray] = []
    for perm in perms.values():
        if np.array_equal(perm, np.arange(perm.size)):
            continue
        if np.max(np.abs(h[np.ix_(perm, perm)] - h)) > atol:
            continue
        group = _closure(found)
        if any(np.array_equal(perm, g) for g in group):
            continue
        if all(np.array_equal(perm[g], g[perm]) for g in found):
            found.append(perm)
    return found


def _closure(generators: list[np.ndarray]) -> list[np.ndarray]:
    size = generators[0].size if generators else 0
    group = [np.arange(size)]
    for gen in generators:
        group = group + [gen[g] for g in group]
    return group


def symmetry_blocks(h: np.ndarray, generators: list[np.ndarray]) -> list[np.ndarray]:
    """Split ``h`` into the blocks of the involutions ``generators``.

    Each block is labelled by a sign per generator; its basis vectors are the
    signed orbit sums of the basis states.
    """
    if not generators:
        return [h]
    d = h.shape[0]
    group = _closure(generators)
    # sign of each group element under each character, in _closure order
    k = len(generators)
    bits = np.array([[(j >> i) & 1 for i in range(k)] for j in range(len(group))])
    blocks = []
    for label in range(1 << k):
        lab = np.array([(label >> i) & 1 for i in range(k)])
        chi = (-1.0) ** (bits @ lab)
        seen = np.zeros(d, dtype=bool)
        cols = []
        for s in range(d):
            if seen[s]:
                continue
            v = np.zeros(d)
            for g, c in zip(group, chi):
                v[g[s]] += c
                seen[g[s]] = True
            norm = np.linalg.norm(v)
            if norm > 1e-12:
                cols.append(v / norm)
        if cols:
            u = np.stack(cols, axis=1)
            blocks.append(u.T @ h @ u)
    return blocks


def unfold(levels, degree: int = 10, edge_fraction: float = 0.1) -> np.ndarray:
    """Drop ``edge_fraction`` of the levels at each edge and map the rest through
    a polynomial fit of the integrated level density."""
    e = np.sort(np.asarray(levels, dtype=float))
    cut = int(np.floor(edge_fraction * e.size))
    kept = e[cut : e.size - cut]
    if kept.size < degree + 2:
        raise ValueError("too few levels to unfold")
    staircase = np.arange(cut, cut + kept.size, dtype=float)
    fit = Polynomial.fit(kept, staircase, degree)
    return fit(kept)


def normalized_spacings(levels, degree: int = 10, edge_fraction: float = 0.1) -> np.ndarray:
    s = np.diff(unfold(levels, degree, edge_fraction))
    return s / s.mean()


def pooled_spacings(level_sets, degree: int = 10, edge_fraction: float = 0.1) -> np.ndarray:
    """Unfold each symmetry block on its own, then pool the spacings to unit mean."""
    s = np.concatenate([np.diff(unfold(lv, degree, edge_fraction)) for lv in level_sets])
    return s / s.mean()


def kolmogorov_distance(spacings) -> float:
    return float(stats.kstest(np.asarray(spacings), wigner_dyson_cdf).statistic)


@dataclass
class SpacingHistogram:
    spacings: np.ndarray
    centers: np.ndarray
    density: np.ndarray
    wigner_dyson: np.ndarray
    kolmogorov_distance: float
    level_count: int
    block_sizes: tuple[int, ...] = ()

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["s", "empirical_density", "wigner_dyson_density"])
            for row in zip(self.centers, self.density, self.wigner_dyson):
                w.writerow([f"{x:.17g}" for x in row])


def _eigvalsh(h: np.ndarray) -> np.ndarray:
    if np.max(np.abs(h.imag)) == 0.0:
        return np.linalg.eigvalsh(h.real)
    return np.linalg.eigvalsh(h)


def sector_levels(spec: HamiltonianSpec, sector: str, resolve: bool = True) -> list[np.ndarray]:
    """Eigenvalues of the sector Hamiltonian, one array per symmetry block.

    With ``resolve`` the sector is further split by any of chain reversal,
    spin flip or their product that leaves it invariant and commutes with it.
    Without resolution a single array is returned.
    """
    if spec.n > SPECTRAL_MAX_QUBITS:
        raise ValueError(f"spectral statistics limited to n <= {SPECTRAL_MAX_QUBITS}")
    h = sector_hamiltonian(build_bonds(spec), spec.n, sector)
    if not resolve:
        return [_eigvalsh(h)]
    perms = _sector_permutations(spec.n, sector_basis(spec.n, sector))
    return [_eigvalsh(b) for b in symmetry_blocks(h, residual_symmetries(h, perms))]


def level_spacing_histogram(
    spec: HamiltonianSpec,
    sector: str = "sz0",
    bins: int = 40,
    degree: int = 10,
    edge_fraction: float = 0.1,
    resolve: bool = True,
    levels=None,
) -> SpacingHistogram:
    """Spacing histogram of the sector spectrum against the Wigner-Dyson surmise.

    ``levels`` (one array, or a list of arrays per block) may be passed to
    reuse a diagonalisation.
    """
    if bins < 1:
        raise ValueError("bins must be >= 1")
    if levels is None:
        levels = sector_levels(spec, sector, resolve)
    elif isinstance(levels, np.ndarray) and levels.ndim == 1:
        levels = [levels]
    s = pooled_spacings(levels, degree, edge_fraction)
    counts, edges = np.histogram(s, bins=bins, range=(0.0, SPACING_RANGE))
    width = edges[1] - edges[0]
    centers = 0.5 * (edges[1:] + edges[:-1])
    return SpacingHistogram(
        spacings=s,
        centers=centers,
        density=counts / (s.size * width),
        wigner_dyson=wigner_dyson_pdf(centers),
        kolmogorov_distance=kolmogorov_distance(s),
        level_count=int(sum(np.asarray(lv).size for lv in levels)),
        block_sizes=tuple(int(np.asarray(lv).size) for lv in levels),
    )
