"""Heisenberg-picture descriptors for few-mode bosonic and fermionic fields."""

from .config import DEFAULT, Tolerances
from .descriptors import (
    BeamSplitter,
    ChargeRotation,
    Circuit,
    Custom,
    DescriptorFrame,
    PhaseShift,
    RawUnitary,
    advance,
    circuit_unitary,
    heisenberg_conjugate,
    realize_ladder,
    run_frame,
    synthesize_gate_unitary,
)
from .fock import (
    FockSpace,
    MatrixOperator,
    ModeId,
    ModeSpec,
    Species,
    StateVector,
    annihilation_op,
    basis_state,
    build_space,
    create_op,
    electron,
    expectation,
    number_op,
    photon,
    positron,
    superpose,
)
from .scenarios import bosonic_mz, fermionic_mz, locality_audit, picture_equivalence, sweep
from .superselection import charge_density_op, check_admissible, coherence_op, parity_op, wigner_demo

__version__ = "0.1.0"

__all__ = [
    "advance",
    "annihilation_op",
    "basis_state",
    "BeamSplitter",
    "bosonic_mz",
    "build_space",
    "charge_density_op",
    "ChargeRotation",
    "check_admissible",
    "Circuit",
    "circuit_unitary",
    "coherence_op",
    "create_op",
    "Custom",
    "DEFAULT",
    "DescriptorFrame",
    "electron",
    "expectation",
    "fermionic_mz",
    "FockSpace",
    "heisenberg_conjugate",
    "locality_audit",
    "MatrixOperator",
    "ModeId",
    "ModeSpec",
    "number_op",
    "parity_op",
    "PhaseShift",
    "photon",
    "picture_equivalence",
    "positron",
    "RawUnitary",
    "realize_ladder",
    "run_frame",
    "Species",
    "StateVector",
    "superpose",
    "sweep",
    "synthesize_gate_unitary",
    "Tolerances",
    "wigner_demo",
]
