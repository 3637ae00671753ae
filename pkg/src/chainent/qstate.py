"""Pure states of qubit chains, Haar sampling and two-qubit reduced density matrices.

Basis convention: qubit 0 is the most significant bit of the computational
basis index, so ``|q0 q1 ... q_{n-1}>`` has index ``sum_q q_k 2**(n-1-k)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

MAX_QUBITS = 18


class InitialStateKind(enum.Enum):
    """How the initial product state of a trajectory is drawn."""

    RANDOM_PRODUCT = "product"
    HOMOGENEOUS_ZERO = "zero"
    ENV_RANDOM_PAIR_PRODUCT = "env-random"

    @classmethod
    def parse(cls, value: "str | InitialStateKind") -> "InitialStateKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(value)
        except ValueError:
            names = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown initial state {value!r}; expected one of {names}") from None


@dataclass(frozen=True)
class QubitSample:
    """Single-qubit state ``cos(phi) e^{i alpha}|0> + sin(phi) e^{i beta}|1>``."""

    phi: float
    alpha: float
    beta: float

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array(
            [np.cos(self.phi) * np.exp(1j * self.alpha), np.sin(self.phi) * np.exp(1j * self.beta)]
        )

    @property
    def orthogonal(self) -> np.ndarray:
        """A state orthogonal to this one (phase convention fixed, irrelevant for ``|delta|``)."""
        return np.array(
            [-np.sin(self.phi) * np.exp(-1j * self.beta), np.cos(self.phi) * np.exp(-1j * self.alpha)]
        )

    @classmethod
    def from_uniforms(cls, xi_alpha: float, xi_beta: float, xi_phi: float) -> "QubitSample":
        return cls(
            phi=float(np.arcsin(np.sqrt(xi_phi))),
            alpha=2.0 * np.pi * xi_alpha,
            beta=2.0 * np.pi * xi_beta,
        )


def sample_haar_qubit(rng: np.random.Generator) -> QubitSample:
    """Draw a Bloch-sphere-uniform qubit from three uniforms ``(alpha, beta, phi)``."""
    xi = rng.random(3)
    return QubitSample.from_uniforms(xi[0], xi[1], xi[2])


def haar_qubit_amplitudes(rng: np.random.Generator, size: int) -> np.ndarray:
    """Vectorised :func:`sample_haar_qubit`; returns a ``(size, 2)`` amplitude array.

    Consumes the stream exactly as ``size`` successive calls of
    :func:`sample_haar_qubit` would.
    """
    xi = rng.random((size, 3))
    phi = np.arcsin(np.sqrt(xi[:, 2]))
    out = np.empty((size, 2), dtype=np.complex128)
    out[:, 0] = np.cos(phi) * np.exp(2j * np.pi * xi[:, 0])
    out[:, 1] = np.sin(phi) * np.exp(2j * np.pi * xi[:, 1])
    return out


def haar_state(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Uniformly random unit vector in ``C^dim`` (normalised complex Gaussian)."""
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


@dataclass(frozen=True)
class PureState:
    """Normalised amplitude vector of an ``n``-qubit register."""

    n: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        check_qubit_count(self.n)
        amps = np.array(self.amplitudes, dtype=np.complex128, copy=True).reshape(-1)
        if amps.shape[0] != 1 << self.n:
            raise ValueError(f"expected {1 << self.n} amplitudes for n={self.n}, got {amps.shape[0]}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"state is not normalised (norm={norm!r})")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_vector(cls, vec, normalize: bool = True) -> "PureState":
        vec = np.asarray(vec, dtype=np.complex128).reshape(-1)
        n = int(round(np.log2(vec.shape[0])))
        if 1 << n != vec.shape[0]:
            raise ValueError("vector length must be a power of two")
        if normalize:
            vec = vec / np.linalg.norm(vec)
        return cls(n, vec)

    @classmethod
    def basis(cls, n: int, index: int = 0) -> "PureState":
        amps = np.zeros(1 << n, dtype=np.complex128)
        amps[index] = 1.0
        return cls(n, amps)

    def copy_amplitudes(self) -> np.ndarray:
        """Writable contiguous copy, for in-place propagation."""
        return np.array(self.amplitudes, dtype=np.complex128, copy=True)


def check_qubit_count(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise ValueError(f"qubit count must be an integer >= 2, got {n!r}")
    if n > MAX_QUBITS:
        raise ValueError(f"qubit count {n} exceeds the supported maximum of {MAX_QUBITS}")


def check_pair(n: int, pair) -> tuple[int, int]:
    a, b = (int(p) for p in pair)
    if a == b:
        raise ValueError("pair indices must be distinct")
    if not (0 <= a < n and 0 <= b < n):
        raise ValueError(f"pair {pair} out of range for n={n}")
    return a, b


def middle_pair(n: int, r: int) -> tuple[int, int]:
    """Pair at separation ``r`` placed in the middle of the chain."""
    check_qubit_count(n)
    if not 1 <= r < n:
        raise ValueError(f"separation r={r} impossible on a chain of {n} qubits")
    a = (n - r) // 2
    return a, a + r


def product_state(qubits) -> np.ndarray:
    """Kronecker product of single-qubit amplitude pairs, qubit 0 first."""
    out = np.ones(1, dtype=np.complex128)
    for q in qubits:
        out = np.kron(out, q)
    return out


def build_initial_state(
    kind: "InitialStateKind | str",
    n: int,
    pair: tuple[int, int],
    rng: np.random.Generator,
) -> PureState:
    """Draw the initial state of one trajectory.

    ``pair`` matters only for ``ENV_RANDOM_PAIR_PRODUCT``: qubits ``A < B`` get
    independent Haar single-qubit states and the other ``n - 2`` qubits a
    single Haar-random state. ``RANDOM_PRODUCT`` draws qubits 0..n-1 in order.
    """
    kind = InitialStateKind.parse(kind)
    check_qubit_count(n)
    a, b = check_pair(n, pair)
    if a > b:
        raise ValueError("pair must be ordered A < B")

    if kind is InitialStateKind.HOMOGENEOUS_ZERO:
        return PureState.basis(n, 0)
    if kind is InitialStateKind.RANDOM_PRODUCT:
        return PureState(n, product_state(haar_qubit_amplitudes(rng, n)))

    qa, qb = haar_qubit_amplitudes(rng, 2)
    env = haar_state(rng, 1 << (n - 2))
    # tensor with axes (env qubits in chain order..., A, B), then move A, B into place
    tensor = np.multiply.outer(env, np.kron(qa, qb)).reshape((2,) * n)
    order = [q for q in range(n) if q not in (a, b)] + [a, b]
    tensor = np.transpose(tensor, np.argsort(order))
    amps = tensor.reshape(-1)
    return PureState(n, amps / np.linalg.norm(amps))


def reduced_density_matrix(state, pair: tuple[int, int]) -> np.ndarray:
    """Two-qubit density matrix of qubits ``(A, B)``; the first basis label is qubit ``A``.

    ``state`` may be a :class:`PureState` or a raw amplitude vector.
    """
    amps = state.amplitudes if isinstance(state, PureState) else np.asarray(state)
    n = int(round(np.log2(amps.shape[0])))
    a, b = check_pair(n, pair)
    psi = amps.reshape((2,) * n)
    rest = [q for q in range(n) if q not in (a, b)]
    m = np.transpose(psi, [a, b] + rest).reshape(4, -1)
    rho = m @ m.conj().T
    return 0.5 * (rho + rho.conj().T)


def single_qubit_density(state, q: int) -> np.ndarray:
    amps = state.amplitudes if isinstance(state, PureState) else np.asarray(state)
    n = int(round(np.log2(amps.shape[0])))
    m = np.moveaxis(amps.reshape((2,) * n), q, 0).reshape(2, -1)
    return m @ m.conj().T


def purity(rho: np.ndarray) -> float:
    return float(np.real(np.trace(rho @ rho)))
