"""Two-qubit entanglement dynamics in spin chains started from random product states."""

from .kernels import BACKEND
from .qstate import (
    InitialStateKind,
    PureState,
    QubitSample,
    build_initial_state,
    middle_pair,
    reduced_density_matrix,
    sample_haar_qubit,
)
from .hamiltonian import BondOperator, HamiltonianSpec, Model, apply_hamiltonian, build_bonds
from .evolution import PropagationConfig, PropagationError, dense_expm_oracle, evolve
from .measures import EntanglementReport, entanglement_report

__version__ = "0.1.0"
