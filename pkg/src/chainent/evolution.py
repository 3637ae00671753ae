"""Propagation ``|psi(t)> = exp(-iHt)|psi(0)>`` for bond-sum Hamiltonians.

The default integrator is the symmetric even/odd bond splitting
``A(dt/2) B(dt) A(dt/2)``. Each bond is exponentiated exactly from the
eigendecomposition of its 4x4 matrix, and consecutive half steps are merged.
The step count is doubled until two successive refinements agree to
``tolerance * max(t, 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .hamiltonian import BondOperator, HamiltonianSpec, build_bonds, dense_hamiltonian
from .qstate import PureState


# steps between rescalings to the initial norm in long propagations
RENORM_INTERVAL = 1024


class PropagationError(RuntimeError):
    """Step refinement did not converge before the step size underflowed."""


@dataclass(frozen=True)
class PropagationConfig:
    dt: float = 0.05
    order: int = 2
    tolerance: float = 1e-8
    max_steps: int = 1 << 22

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.order != 2:
            raise ValueError("only the second-order splitting is implemented")


class TrotterPropagator:
    """Fixed-Hamiltonian splitting propagator; bond eigendecompositions are cached."""

    def __init__(self, bonds, n: int, backend: str | None = None):
        self.n = n
        self.backend = backend
        self._even = [self._eig(b) for b in bonds if b.site % 2 == 0]
        self._odd = [self._eig(b) for b in bonds if b.site % 2 == 1]
        self._cache: dict[float, tuple] = {}

    @staticmethod
    def _eig(bond: BondOperator):
        w, v = np.linalg.eigh(bond.matrix)
        return bond.site, w, v

    @staticmethod
    def _layer(layer, tau: float):
        if not layer:
            return np.zeros((0, 4, 4), dtype=np.complex128), np.zeros(0, dtype=np.int_)
        gates = np.stack([(v * np.exp(-1j * w * tau)) @ v.conj().T for _, w, v in layer])
        sites = np.array([s for s, _, _ in layer], dtype=np.int_)
        return gates, sites

    def _sequences(self, dt: float):
        seq = self._cache.get(dt)
        if seq is None:
            a_half, sa = self._layer(self._even, dt / 2)
            a_full, _ = self._layer(self._even, dt)
            b_full, sb = self._layer(self._odd, dt)
            first = (a_half, sa)
            middle = (np.concatenate([b_full, a_full]), np.concatenate([sb, sa]))
            last = (np.concatenate([b_full, a_half]), np.concatenate([sb, sa]))
            seq = (first, middle, last)
            if len(self._cache) > 8:
                self._cache.clear()
            self._cache[dt] = seq
        return seq

    def advance(self, psi: np.ndarray, t: float, steps: int) -> np.ndarray:
        """Propagate the contiguous vector ``psi`` in place by ``t`` using ``steps`` steps."""
        if steps < 1:
            raise ValueError("steps must be >= 1")
        if t == 0:
            return psi
        first, middle, last = self._sequences(t / steps)
        norm0 = np.linalg.norm(psi)
        kernels.apply_gates(psi, *first, self.n, backend=self.backend)
        for k in range(1, steps):
            kernels.apply_gates(psi, *middle, self.n, backend=self.backend)
            # each step is unitary; this only removes accumulated rounding bias
            if k % RENORM_INTERVAL == 0:
                psi *= norm0 / np.linalg.norm(psi)
        kernels.apply_gates(psi, *last, self.n, backend=self.backend)
        if steps > RENORM_INTERVAL:
            psi *= norm0 / np.linalg.norm(psi)
        return psi

    def refine(self, psi0: np.ndarray, t: float, config: PropagationConfig, target: float | None = None):
        """Propagate a copy of ``psi0`` by ``t``, doubling the step count until converged.

        Returns ``(psi, steps)`` where ``steps`` is the finer of the last two
        step counts, whose result is returned. ``target`` defaults to
        ``config.tolerance * max(t, 1)``.
        """
        if target is None:
            target = config.tolerance * max(t, 1.0)
        steps = max(1, math.ceil(t / config.dt - 1e-12))
        coarse = self.advance(psi0.copy(), t, steps)
        while True:
            fine_steps = 2 * steps
            if fine_steps > config.max_steps:
                raise PropagationError(
                    f"step refinement did not reach {target:.3g} within {config.max_steps} steps"
                )
            fine = self.advance(psi0.copy(), t, fine_steps)
            diff = float(np.linalg.norm(coarse - fine))
            if diff < target:
                return fine, fine_steps
            # error ~ dt^2: jump straight to the step count the estimate predicts
            jump = max(2, 2 ** math.ceil(0.5 * math.log2(diff / target)))
            if jump > 2:
                steps = fine_steps * jump // 2
                if 2 * steps > config.max_steps:
                    raise PropagationError(
                        f"step refinement would need about {2 * steps} steps to reach {target:.3g}"
                        f" (limit {config.max_steps})"
                    )
                coarse = self.advance(psi0.copy(), t, steps)
            else:
                steps, coarse = fine_steps, fine


def evolve(state: PureState, bonds, t: float, config: PropagationConfig | None = None) -> PureState:
    """``exp(-iHt)|state>`` within ``tolerance * max(t, 1)``, renormalised."""
    config = config or PropagationConfig()
    if t < 0:
        raise ValueError("t must be non-negative")
    if t == 0 or len(bonds) == 0:
        return state
    prop = TrotterPropagator(bonds, state.n)
    psi, _ = prop.refine(state.copy_amplitudes(), t, config)
    return PureState(state.n, psi / np.linalg.norm(psi))


def trotter_evolve(state: PureState, bonds, t: float, steps: int) -> PureState:
    """Fixed-step splitting without refinement or renormalisation."""
    psi = TrotterPropagator(bonds, state.n).advance(state.copy_amplitudes(), t, steps)
    return PureState(state.n, psi / np.linalg.norm(psi))


class ExactEvolver:
    """Full eigendecomposition of the dense Hamiltonian (``n <= 10``)."""

    def __init__(self, bonds, n: int):
        self.n = n
        self.energies, self.vectors = np.linalg.eigh(dense_hamiltonian(bonds, n))

    def evolve(self, psi, t: float) -> np.ndarray:
        amps = psi.amplitudes if isinstance(psi, PureState) else np.asarray(psi)
        c = self.vectors.conj().T @ amps
        return self.vectors @ (np.exp(-1j * self.energies * t) * c)


def dense_expm_oracle(hamiltonian, state: PureState, t: float) -> PureState:
    """Reference propagation; ``hamiltonian`` is a :class:`HamiltonianSpec` or a list of bonds."""
    if isinstance(hamiltonian, HamiltonianSpec):
        if hamiltonian.n != state.n:
            raise ValueError("spec and state disagree on the qubit count")
        bonds = build_bonds(hamiltonian)
    else:
        bonds = hamiltonian
    if state.n > 10:
        raise ValueError("dense oracle limited to n <= 10")
    psi = ExactEvolver(bonds, state.n).evolve(state, t)
    return PureState(state.n, psi / np.linalg.norm(psi))
