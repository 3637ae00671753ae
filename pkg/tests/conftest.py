import numpy as np
import pytest

from chainent import kernels
from chainent.hamiltonian import Model

MODELS = [m.value for m in Model]


def ket(*amps):
    v = np.asarray(amps, dtype=np.complex128)
    return v / np.linalg.norm(v)


def projector(v):
    v = np.asarray(v, dtype=np.complex128)
    return np.outer(v, v.conj())


PHI_PLUS = ket(1, 0, 0, 1)
BELL = projector(PHI_PLUS)
MIXED = np.eye(4, dtype=np.complex128) / 4


def werner(p):
    return p * BELL + (1 - p) * MIXED


def random_density(rng, rank=None):
    """Random two-qubit density matrix of the given rank (1..4)."""
    rank = rank or int(rng.integers(1, 5))
    a = rng.standard_normal((4, rank)) + 1j * rng.standard_normal((4, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def haar_unitary(rng, d=2):
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_ket(rng, dim):
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


@pytest.fixture(params=sorted(kernels.BACKENDS))
def backend(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance check, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
