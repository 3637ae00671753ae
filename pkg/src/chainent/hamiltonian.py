"""Open-chain Hamiltonians written as sums of two-site bond operators.

Single-site terms (staggered field, tilted field) are folded into the bonds:
half of a site's term goes to each of its two bonds, and the end sites,
which touch a single bond, put their full term on it. The bond sum is
exactly the model Hamiltonian.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import kernels
from .qstate import PureState, check_qubit_count

SX = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SY = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SZ = np.array([[1, 0], [0, -1]], dtype=np.complex128)
I2 = np.eye(2, dtype=np.complex128)

HEISENBERG_BOND = np.kron(SX, SX) + np.kron(SY, SY) + np.kron(SZ, SZ)
ISING_BOND = np.kron(SX, SX)

STAGGERED_FIELD = -0.5
DENSE_MAX_QUBITS = 10
SPARSE_MAX_QUBITS = 14


class Model(enum.Enum):
    HEISENBERG = "heisenberg"
    HEISENBERG_STAGGERED = "heisenberg-staggered"
    TILTED_ISING = "tilted-ising"
    TWO_BODY_RANDOM = "tbrm"

    @classmethod
    def parse(cls, value: "str | Model") -> "Model":
        if isinstance(value, cls):
            return value
        try:
            return cls(value)
        except ValueError:
            names = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown model {value!r}; expected one of {names}") from None

    @property
    def conserves_sz(self) -> bool:
        return self in (Model.HEISENBERG, Model.HEISENBERG_STAGGERED)


class TBRMNormalization(enum.Enum):
    """Scale conventions for the random two-body bond.

    ``ENSEMBLE``: Hermitian part of a standard complex Gaussian matrix, scaled
    so every entry has ``E|h_ij|^2 = 1/4`` (``E[tr h^2 / 4] = 1``); then
    ``E|delta| = sqrt(pi)/4`` exactly.
    ``TRACE``: the same draw rescaled so that ``tr h^2 = 1`` for every realisation.
    """

    ENSEMBLE = "ensemble"
    TRACE = "trace"


@dataclass(frozen=True)
class HamiltonianSpec:
    model: Model
    n: int
    seed: int | None = None
    normalization: TBRMNormalization = TBRMNormalization.ENSEMBLE

    def __post_init__(self):
        object.__setattr__(self, "model", Model.parse(self.model))
        object.__setattr__(self, "normalization", TBRMNormalization(self.normalization))
        check_qubit_count(self.n)

    def to_dict(self) -> dict:
        d = {"model": self.model.value, "n": self.n, "seed": self.seed}
        if self.model is Model.TWO_BODY_RANDOM:
            d["normalization"] = self.normalization.value
        return d


@dataclass(frozen=True)
class BondOperator:
    """Hermitian 4x4 ``matrix`` acting on qubits ``site`` and ``site + 1``."""

    site: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128, copy=True)
        if m.shape != (4, 4):
            raise ValueError("bond matrix must be 4x4")
        if np.max(np.abs(m - m.conj().T)) > 1e-12:
            raise ValueError("bond matrix is not Hermitian")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)


def sample_two_body_random(
    rng: np.random.Generator, normalization: TBRMNormalization | str = TBRMNormalization.ENSEMBLE
) -> np.ndarray:
    normalization = TBRMNormalization(normalization)
    while True:
        a = (rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))) / np.sqrt(2.0)
        h = (a + a.conj().T) / (2.0 * np.sqrt(2.0))
        if normalization is TBRMNormalization.ENSEMBLE:
            return h
        norm2 = float(np.real(np.trace(h @ h)))
        if norm2 > 0.0:
            h = h / np.sqrt(norm2)
            return 0.5 * (h + h.conj().T)


def _site_term(model: Model, q: int) -> np.ndarray | None:
    if model is Model.HEISENBERG_STAGGERED:
        return STAGGERED_FIELD * SZ if q % 2 == 1 else None
    if model is Model.TILTED_ISING:
        return SX + SZ
    return None


def build_bonds(spec: HamiltonianSpec, rng: np.random.Generator | None = None) -> list[BondOperator]:
    """The ``n - 1`` bond operators of ``spec``.

    For the two-body random model the bond matrix is drawn from ``rng``, or
    from a stream seeded with ``spec.seed`` when ``rng`` is None.
    """
    n = spec.n
    if spec.model is Model.TWO_BODY_RANDOM:
        if rng is None:
            if spec.seed is None:
                raise ValueError("the two-body random model needs an rng or a seed")
            rng = np.random.default_rng(spec.seed)
        h = sample_two_body_random(rng, spec.normalization)
        return [BondOperator(i, h) for i in range(n - 1)]

    coupling = ISING_BOND if spec.model is Model.TILTED_ISING else HEISENBERG_BOND
    bonds = []
    for i in range(n - 1):
        m = coupling.copy()
        left, right = _site_term(spec.model, i), _site_term(spec.model, i + 1)
        if left is not None:
            m += (1.0 if i == 0 else 0.5) * np.kron(left, I2)
        if right is not None:
            m += (1.0 if i + 1 == n - 1 else 0.5) * np.kron(I2, right)
        bonds.append(BondOperator(i, m))
    return bonds


def stack_bonds(bonds) -> tuple[np.ndarray, np.ndarray]:
    if len(bonds) == 0:
        return np.zeros((0, 4, 4), dtype=np.complex128), np.zeros(0, dtype=np.int_)
    mats = np.stack([b.matrix for b in bonds]).astype(np.complex128)
    sites = np.array([b.site for b in bonds], dtype=np.int_)
    return mats, sites


def apply_hamiltonian(bonds, state, backend: str | None = None) -> np.ndarray:
    """``H |psi>`` without forming the ``2**n x 2**n`` matrix."""
    amps = state.amplitudes if isinstance(state, PureState) else np.asarray(state, dtype=np.complex128)
    n = int(round(np.log2(amps.shape[0])))
    if 1 << n != amps.shape[0]:
        raise ValueError("state length must be a power of two")
    if len(bonds) == 0:
        return np.zeros_like(amps)
    mats, sites = stack_bonds(bonds)
    if sites.max() > n - 2:
        raise ValueError(f"bond site {sites.max()} does not fit a state of {n} qubits")
    return kernels.apply_bonds(amps, mats, sites, n, backend=backend)


def energy(bonds, state) -> float:
    amps = state.amplitudes if isinstance(state, PureState) else np.asarray(state)
    return float(np.real(np.vdot(amps, apply_hamiltonian(bonds, amps))))


def dense_hamiltonian(bonds, n: int) -> np.ndarray:
    """Dense assembly ``sum_i 1 (x) h_i (x) 1`` by Kronecker products (validation oracle)."""
    if n > DENSE_MAX_QUBITS:
        raise ValueError(f"dense assembly limited to n <= {DENSE_MAX_QUBITS}")
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=np.complex128)
    for b in bonds:
        left = np.eye(1 << b.site)
        right = np.eye(1 << (n - 2 - b.site))
        out += np.kron(np.kron(left, b.matrix), right)
    return out


def sparse_hamiltonian(bonds, n: int) -> sp.csr_matrix:
    if n > SPARSE_MAX_QUBITS:
        raise ValueError(f"sparse assembly limited to n <= {SPARSE_MAX_QUBITS}")
    dim = 1 << n
    out = sp.csr_matrix((dim, dim), dtype=np.complex128)
    for b in bonds:
        left = sp.identity(1 << b.site, format="csr")
        right = sp.identity(1 << (n - 2 - b.site), format="csr")
        out = out + sp.kron(sp.kron(left, sp.csr_matrix(b.matrix)), right, format="csr")
    return out.tocsr()


def total_sz(n: int) -> np.ndarray:
    """Diagonal of ``sum_q sigma^z_q`` (number of zeros minus number of ones)."""
    idx = np.arange(1 << n)
    ones = np.zeros(1 << n, dtype=np.int64)
    for q in range(n):
        ones += (idx >> q) & 1
    return n - 2 * ones
