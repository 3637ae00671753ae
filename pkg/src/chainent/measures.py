"""Entanglement quantities of two-qubit density matrices.

Basis order ``|00>, |01>, |10>, |11>`` with the first label on qubit A.
The partial transpose is taken over qubit B.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .hamiltonian import SX, SY, SZ

PAULIS = (SX, SY, SZ)
SYSY = np.kron(SY, SY)

# magic basis |Phi+>, i|Phi->, i|Psi+>, |Psi-> as columns
MAGIC_BASIS = np.array(
    [
        [1, 1j, 0, 0],
        [0, 0, 1j, 1],
        [0, 0, 1j, -1],
        [1, -1j, 0, 0],
    ],
    dtype=np.complex128,
) / np.sqrt(2.0)

EIG_CLIP = 1e-10


def _as_rho(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a 4x4 density matrix, got shape {rho.shape}")
    return rho


def partial_transpose(rho) -> np.ndarray:
    rho = _as_rho(rho)
    return rho.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)


def negativity(rho) -> tuple[float, float]:
    """Return ``(N, lambda_min)`` of the partially transposed matrix.

    ``N`` comes from the trace norm; for two qubits it equals
    ``max(0, -lambda_min)``.
    """
    w = np.linalg.eigvalsh(partial_transpose(rho))
    n = max(0.0, (float(np.sum(np.abs(w))) - 1.0) / 2.0)
    return n, float(w[0])


def _wootters_lambdas(rhos: np.ndarray) -> np.ndarray:
    """Square roots of the eigenvalues of ``rho rho_tilde``, decreasing, for a ``(k, 4, 4)`` stack.

    They are the singular values of ``X^T (sy sy) X`` with ``rho = X X^dagger``
    (``X = V sqrt(w)`` from the clipped eigendecomposition), which avoids the
    square roots of rounding-level eigenvalues of the non-Hermitian product.
    """
    w, v = np.linalg.eigh(rhos)
    x = v * np.sqrt(np.clip(w, 0.0, None))[:, None, :]
    tau = np.swapaxes(x, 1, 2) @ SYSY @ x
    return np.linalg.svd(tau, compute_uv=False)


def concurrence(rho) -> float:
    lam = _wootters_lambdas(_as_rho(rho)[None])[0]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def binary_entropy(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return float(-x * np.log2(x) - (1.0 - x) * np.log2(1.0 - x))


def entanglement_of_formation(c: float) -> float:
    if c < -1e-9 or c > 1.0 + 1e-9:
        raise ValueError(f"concurrence {c} outside [0, 1]")
    c = min(max(c, 0.0), 1.0)
    return binary_entropy((1.0 + np.sqrt(1.0 - c * c)) / 2.0)


def correlation_matrix(rho) -> np.ndarray:
    """``T_ij = tr(rho sigma^i (x) sigma^j)`` for ``i, j in {x, y, z}``."""
    rho = _as_rho(rho)
    t = np.array([[np.trace(rho @ np.kron(a, b)) for b in PAULIS] for a in PAULIS])
    if np.max(np.abs(t.imag)) > 1e-8:
        raise ValueError("correlation matrix has a large imaginary part; rho is not Hermitian")
    return t.real


def theta(rho) -> float:
    return float(np.sum(np.linalg.svd(correlation_matrix(rho), compute_uv=False)))


def fully_entangled_fraction(rho) -> float:
    """Largest eigenvalue of the real part of ``rho`` in the magic basis."""
    rho = _as_rho(rho)
    m = MAGIC_BASIS.conj().T @ rho @ MAGIC_BASIS
    return float(np.linalg.eigvalsh(m.real)[-1])


def fef_bound(f: float) -> float:
    """Lower bound ``h(f)`` on the entanglement of formation."""
    if f < 0.5:
        return 0.0
    return binary_entropy(0.5 + np.sqrt(max(f * (1.0 - f), 0.0)))


@dataclass(frozen=True)
class EntanglementReport:
    negativity: float
    lambda_min_pt: float
    concurrence: float
    eof: float
    theta: float
    fef: float
    fef_bound: float
    distillable: bool

    def to_dict(self) -> dict:
        return asdict(self)


def entanglement_report(rho) -> EntanglementReport:
    rho = _as_rho(rho)
    n, lmin = negativity(rho)
    c = concurrence(rho)
    f = fully_entangled_fraction(rho)
    return EntanglementReport(
        negativity=n,
        lambda_min_pt=lmin,
        concurrence=c,
        eof=entanglement_of_formation(c),
        theta=theta(rho),
        fef=f,
        fef_bound=fef_bound(f),
        distillable=bool(f > 0.5),
    )


def check_density_matrix(rho, atol: float = 1e-10) -> None:
    rho = _as_rho(rho)
    if np.max(np.abs(rho - rho.conj().T)) > atol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > atol:
        raise ValueError("density matrix does not have unit trace")
    if np.linalg.eigvalsh(rho)[0] < -1e-9:
        raise ValueError("density matrix has a negative eigenvalue")


MEASURE_NAMES = ("concurrence", "negativity", "lambda_min_pt", "theta", "eof")


def batch_measures(rhos) -> dict[str, np.ndarray]:
    """Vectorised concurrence, negativity, lambda_min, Theta and E_F for a ``(k, 4, 4)`` stack."""
    rhos = np.asarray(rhos, dtype=np.complex128)
    k = rhos.shape[0]
    pt = rhos.reshape(k, 2, 2, 2, 2).transpose(0, 1, 4, 3, 2).reshape(k, 4, 4)
    w = np.linalg.eigvalsh(pt)
    neg = np.maximum(0.0, (np.sum(np.abs(w), axis=1) - 1.0) / 2.0)

    lam = _wootters_lambdas(rhos)
    conc = np.maximum(0.0, lam[:, 0] - lam[:, 1] - lam[:, 2] - lam[:, 3])

    t = np.einsum("kab,ijba->kij", rhos, _PAULI_PAIRS).real
    th = np.sum(np.linalg.svd(t, compute_uv=False), axis=1)

    x = (1.0 + np.sqrt(np.clip(1.0 - conc**2, 0.0, 1.0))) / 2.0
    with np.errstate(divide="ignore", invalid="ignore"):
        eof = -x * np.log2(x) - (1.0 - x) * np.log2(1.0 - x)
    eof = np.where((x <= 0.0) | (x >= 1.0), 0.0, eof)
    return {
        "concurrence": conc,
        "negativity": neg,
        "lambda_min_pt": w[:, 0],
        "theta": th,
        "eof": eof,
    }


_PAULI_PAIRS = np.array([[np.kron(a, b) for b in PAULIS] for a in PAULIS])
