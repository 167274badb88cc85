"""Heisenberg-picture descriptors as passive Bogoliubov coefficient matrices.

A frame stores, for each species sector, a unitary ``M`` such that

    a_i(t) = sum_j M[i, j] * a_j(0)

for every mode ``i`` of that sector.  A gate with coefficient matrix ``G``
(meaning ``g^dagger a_i g = sum_j G[i, j] a_j``) updates the frame as
``M <- G @ M``: with ``U(t+1) = g U(t)``,

    a_i(t+1) = U(t)^dagger (g^dagger a_i g) U(t) = sum_j G[i, j] a_j(t).

Every numeric check in this module compares that rule against explicit
conjugation ``U^dagger a U`` of dense matrices.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np
import scipy.linalg

from . import config, fock
from .errors import FockSpaceError, GateError, SpaceMismatchError, SuperselectionError, SynthesisError
from .fock import FockSpace, MatrixOperator, ModeId, Species

PHOTON_ONLY = frozenset({Species.PHOTON})
DIRAC = frozenset({Species.ELECTRON, Species.POSITRON})


def _species_set(species) -> frozenset[Species]:
    if isinstance(species, (Species, str)):
        species = [species]
    out = frozenset(Species(s) for s in species)
    if not out:
        raise GateError("gate must act on at least one species")
    return out


@dataclass(frozen=True)
class BeamSplitter:
    """Hadamard-type splitter: ``a_A -> (a_A + a_B)/sqrt2``, ``a_B -> (a_A - a_B)/sqrt2``."""

    site_a: str
    site_b: str
    species: frozenset[Species] = PHOTON_ONLY

    def __post_init__(self):
        object.__setattr__(self, "species", _species_set(self.species))
        if self.site_a == self.site_b:
            raise GateError("beam splitter needs two distinct sites")

    @property
    def label(self) -> str:
        return f"BS({self.site_a},{self.site_b})"


@dataclass(frozen=True)
class PhaseShift:
    """``a_site -> exp(i phi) a_site`` for each listed species."""

    site: str
    phi: float
    species: frozenset[Species] = PHOTON_ONLY

    def __post_init__(self):
        object.__setattr__(self, "species", _species_set(self.species))
        object.__setattr__(self, "phi", float(self.phi))

    @property
    def label(self) -> str:
        return f"Phase({self.site},{self.phi:.6g})"


@dataclass(frozen=True)
class ChargeRotation:
    """Rotates both Dirac species at ``site``: ``b -> e^{i phi} b``, ``d^dagger -> e^{-i phi} d^dagger``."""

    site: str
    phi: float

    def __post_init__(self):
        object.__setattr__(self, "phi", float(self.phi))

    species = DIRAC

    @property
    def label(self) -> str:
        return f"ChargeRot({self.site},{self.phi:.6g})"


@dataclass(frozen=True, eq=False)
class Custom:
    """Explicit passive coefficient matrix on ``sites`` of one species sector."""

    species: Species
    sites: tuple[str, ...]
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "species", Species(self.species))
        object.__setattr__(self, "sites", tuple(self.sites))
        mat = np.array(self.matrix, dtype=complex)
        k = len(self.sites)
        if len(set(self.sites)) != k:
            raise GateError("custom gate sites must be distinct")
        if mat.shape != (k, k):
            raise GateError(f"custom matrix must be {k}x{k}, got {mat.shape}")
        if np.max(np.abs(mat.conj().T @ mat - np.eye(k))) > config.DEFAULT.exact:
            raise GateError("custom coefficient matrix is not unitary")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def label(self) -> str:
        return f"Custom[{self.species.value}]({','.join(self.sites)})"


@dataclass(frozen=True, eq=False)
class RawUnitary:
    """A full-space unitary with a declared support.

    It has no passive coefficient matrix, so it cannot be tracked by a
    descriptor frame; it exists so that audits can be run against dynamics
    that break the library's guarantees (e.g. parity-violating unitaries).
    """

    unitary: MatrixOperator
    support: frozenset[ModeId]
    name: str = "raw"

    def __post_init__(self):
        object.__setattr__(self, "support", frozenset(self.support))
        if not fock.is_unitary(self.unitary, config.DEFAULT.operator):
            raise GateError("raw gate is not unitary")

    @property
    def label(self) -> str:
        return f"{self.name}({','.join(sorted(map(str, self.support)))})"


PassiveGate = Union[BeamSplitter, PhaseShift, ChargeRotation, Custom]
Gate = Union[PassiveGate, RawUnitary]


def is_passive(gate: Gate) -> bool:
    return not isinstance(gate, RawUnitary)


def gate_coefficient_matrix(gate: PassiveGate, space: FockSpace) -> dict[Species, np.ndarray]:
    """Per-sector coefficient matrices over the full sector of each affected species.

    Rows and columns of modes the gate does not touch are identity.
    """
    if isinstance(gate, RawUnitary):
        raise GateError(f"{gate.label} has no passive coefficient matrix")
    out = {}
    if isinstance(gate, BeamSplitter):
        block = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
        for s in gate.species:
            out[s] = _embed(space, s, (gate.site_a, gate.site_b), block)
    elif isinstance(gate, (PhaseShift, ChargeRotation)):
        block = np.array([[np.exp(1j * gate.phi)]])
        for s in gate.species:
            out[s] = _embed(space, s, (gate.site,), block)
    elif isinstance(gate, Custom):
        out[gate.species] = _embed(space, gate.species, gate.sites, gate.matrix)
    else:
        raise GateError(f"unknown gate type {type(gate).__name__}")
    return out


def _embed(space: FockSpace, species: Species, sites: Sequence[str], block: np.ndarray) -> np.ndarray:
    sector = space.modes_of(species)
    index = {m.site: i for i, m in enumerate(sector)}
    missing = [s for s in sites if s not in index]
    if missing:
        raise GateError(f"no {species.value} mode at site(s) {', '.join(missing)}")
    g = np.eye(len(sector), dtype=complex)
    rows = [index[s] for s in sites]
    g[np.ix_(rows, rows)] = block
    return g


def gate_support(gate: Gate, space: FockSpace) -> frozenset[ModeId]:
    """Modes with a non-identity row or column in the gate's coefficient matrix."""
    if isinstance(gate, RawUnitary):
        return gate.support
    support = set()
    for s, g in gate_coefficient_matrix(gate, space).items():
        off = g != np.eye(len(g))
        touched = off.any(axis=0) | off.any(axis=1)
        support.update(m for m, t in zip(space.modes_of(s), touched) if t)
    return frozenset(support)


def validate_gate(gate: Gate, space: FockSpace) -> None:
    if isinstance(gate, RawUnitary):
        if gate.unitary.space != space:
            raise SpaceMismatchError(f"{gate.label} is defined on another space")
        absent = [str(m) for m in gate.support if m not in space]
        if absent:
            raise GateError(f"{gate.label} declares unknown modes {absent}")
    else:
        gate_coefficient_matrix(gate, space)


@dataclass(frozen=True)
class Circuit:
    space: FockSpace
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for gate in self.gates:
            validate_gate(gate, self.space)

    def __len__(self) -> int:
        return len(self.gates)

    def then(self, *gates: Gate) -> "Circuit":
        return Circuit(self.space, self.gates + gates)


@dataclass(frozen=True, eq=False)
class DescriptorFrame:
    sectors: Mapping[Species, tuple[ModeId, ...]]
    matrices: Mapping[Species, np.ndarray]
    time: int = 0

    def __post_init__(self):
        mats = {}
        for s, mat in self.matrices.items():
            mat = np.array(mat, dtype=complex)
            mat.setflags(write=False)
            mats[s] = mat
        object.__setattr__(self, "matrices", mats)
        object.__setattr__(self, "sectors", dict(self.sectors))

    def row(self, mode: ModeId) -> np.ndarray:
        """Coefficients of ``mode``'s ladder operator over its sector's initial ladders."""
        sector = self.sectors.get(mode.species, ())
        if mode not in sector:
            raise FockSpaceError(f"mode {mode} is not in this frame")
        return self.matrices[mode.species][sector.index(mode)]

    def unitarity_residual(self) -> float:
        return max(
            (float(np.max(np.abs(m.conj().T @ m - np.eye(len(m))))) for m in self.matrices.values()),
            default=0.0,
        )

    def to_dict(self) -> dict:
        return {
            "time": self.time,
            "sectors": {
                s.value: {
                    "modes": [str(m) for m in self.sectors[s]],
                    "matrix": [[[z.real, z.imag] for z in row] for row in self.matrices[s].tolist()],
                }
                for s in self.sectors
            },
        }


def identity_frame(space: FockSpace) -> DescriptorFrame:
    sectors = {s: space.modes_of(s) for s in Species if space.modes_of(s)}
    return DescriptorFrame(sectors, {s: np.eye(len(m), dtype=complex) for s, m in sectors.items()})


def advance(frame: DescriptorFrame, gate: Gate, space: FockSpace) -> DescriptorFrame:
    """One gate step, ``M <- G @ M`` on each affected sector.

    Only rows of modes in the gate's support are recomputed; every other row
    is copied unchanged.
    """
    if isinstance(gate, RawUnitary):
        raise GateError(f"{gate.label} is not passive and cannot advance a frame")
    mats = dict(frame.matrices)
    for s, g in gate_coefficient_matrix(gate, space).items():
        if s not in frame.sectors or frame.sectors[s] != space.modes_of(s):
            raise GateError(f"frame has no {s.value} sector matching the space")
        m = frame.matrices[s]
        off = g != np.eye(len(g))
        rows = np.flatnonzero(off.any(axis=1))
        new = m.copy()
        new[rows] = g[rows] @ m
        mats[s] = new
    return DescriptorFrame(frame.sectors, mats, frame.time + 1)


def run_frame(circuit: Circuit) -> list[DescriptorFrame]:
    frames = [identity_frame(circuit.space)]
    for gate in circuit.gates:
        frames.append(advance(frames[-1], gate, circuit.space))
    return frames


def realize_ladder(frame: DescriptorFrame, space: FockSpace, mode: ModeId) -> MatrixOperator:
    row = frame.row(mode)
    entries = sum(
        c * fock.annihilation_op(space, m).entries
        for c, m in zip(row, frame.sectors[mode.species])
    )
    return MatrixOperator(space, entries)


def realize_field_observable(frame: DescriptorFrame, space: FockSpace, mode: ModeId) -> MatrixOperator:
    """``a(t) + a(t)^dagger`` for a bosonic mode."""
    if mode.statistics is fock.Statistics.FERMI:
        raise SuperselectionError(
            f"{mode} is fermionic: a + a^dagger is parity-odd and not an observable; "
            "use heisenframe.superselection for admissible quadratic observables"
        )
    a = realize_ladder(frame, space, mode)
    return a + a.dag


def generator(gate: PassiveGate, space: FockSpace) -> MatrixOperator:
    """Anti-Hermitian ``X = sum_ij log(G)_ij a_i^dagger a_j`` with ``exp(X)^dagger a exp(X) = G a``."""
    entries = np.zeros((space.dim, space.dim), dtype=complex)
    for s, g in gate_coefficient_matrix(gate, space).items():
        # Complex Schur of a unitary is diagonal up to rounding.
        t, z = scipy.linalg.schur(g, output="complex")
        log_g = z @ np.diag(1j * np.angle(np.diag(t))) @ z.conj().T
        log_g = (log_g - log_g.conj().T) / 2
        modes = space.modes_of(s)
        ladders = [fock.annihilation_op(space, m).entries for m in modes]
        for i, ai in enumerate(ladders):
            for j, aj in enumerate(ladders):
                if log_g[i, j] != 0:
                    entries += log_g[i, j] * (ai.conj().T @ aj)
    return MatrixOperator(space, entries)


def synthesis_residual(unitary: MatrixOperator, gate: PassiveGate, space: FockSpace) -> float:
    """Worst ``|U^dagger a_i U - sum_j G_ij a_j|`` over all modes, on the faithful subspace."""
    coeffs = gate_coefficient_matrix(gate, space)
    worst = 0.0
    for mode in space.mode_ids:
        a = fock.annihilation_op(space, mode)
        if mode.species in coeffs:
            sector = space.modes_of(mode.species)
            row = coeffs[mode.species][sector.index(mode)]
            target = MatrixOperator(
                space, sum(c * fock.annihilation_op(space, m).entries for c, m in zip(row, sector))
            )
        else:
            target = a
        got = heisenberg_conjugate(unitary, a)
        worst = max(worst, fock.operator_distance(got, target, faithful_only=True))
    return worst


def _boson_number_conserved(unitary: MatrixOperator) -> bool:
    space = unitary.space
    bosons = [m for m in space.mode_ids if m.statistics is fock.Statistics.BOSE]
    if not bosons:
        return True
    n = fock.total_number_op(space, bosons)
    return fock.norm(fock.commutator(unitary, n)) <= config.DEFAULT.operator


def synthesize_gate_unitary(
    gate: Gate, space: FockSpace, tol: float = config.DEFAULT.synthesis
) -> MatrixOperator:
    validate_gate(gate, space)
    if isinstance(gate, RawUnitary):
        if not _boson_number_conserved(gate.unitary):
            warnings.warn(
                f"{gate.label} does not conserve photon number; truncation at the "
                "bosonic cutoff may distort results",
                RuntimeWarning,
                stacklevel=2,
            )
        return gate.unitary
    u = fock.matrix_exponential(generator(gate, space))
    unitarity = fock.operator_distance(u.dag @ u, fock.identity(space))
    residual = synthesis_residual(u, gate, space)
    if unitarity > config.DEFAULT.operator or residual > tol:
        raise SynthesisError(
            f"{gate.label}: unitarity defect {unitarity:.2e}, map residual {residual:.2e}"
        )
    return u


def heisenberg_conjugate(unitary: MatrixOperator, op: MatrixOperator) -> MatrixOperator:
    """``U^dagger O U``."""
    return unitary.dag @ op @ unitary


def circuit_unitaries(circuit: Circuit) -> list[MatrixOperator]:
    """Cumulative unitaries ``U(t) = g_t ... g_1`` for ``t = 0 .. len(circuit)``."""
    out = [fock.identity(circuit.space)]
    for gate in circuit.gates:
        out.append(synthesize_gate_unitary(gate, circuit.space) @ out[-1])
    return out


def circuit_unitary(circuit: Circuit) -> MatrixOperator:
    return circuit_unitaries(circuit)[-1]


def phase_normalized(row: np.ndarray, tol: float = config.DEFAULT.exact) -> np.ndarray:
    """Divide out a global phase so the first non-negligible entry is real positive."""
    row = np.asarray(row, dtype=complex)
    flat = row.ravel()
    nonzero = np.flatnonzero(np.abs(flat) > tol)
    if not nonzero.size:
        return row.copy()
    z = flat[nonzero[0]]
    return row * (abs(z) / z)


def frame_distance(a: DescriptorFrame, b: DescriptorFrame) -> float:
    """Distance between two frames after quotienting one joint global phase.

    The phase is fixed on the concatenation of all sector matrices, so a phase
    carried by one row relative to the others is *not* quotiented away.
    """
    if a.sectors != b.sectors:
        raise GateError("frames have different sectors")
    order = sorted(a.sectors, key=lambda s: s.value)
    flat_a = phase_normalized(np.concatenate([a.matrices[s].ravel() for s in order]))
    flat_b = phase_normalized(np.concatenate([b.matrices[s].ravel() for s in order]))
    return float(np.max(np.abs(flat_a - flat_b))) if flat_a.size else 0.0
