"""Truncated Fock spaces for mixed bosonic/fermionic mode registries.

Basis convention
----------------
A basis vector is an occupation tuple ``(n_1, ..., n_k)`` in the order the
modes were registered.  Its index is ``sum(n_i * stride_i)`` with the first
mode varying slowest (row-major, the same order as ``np.kron`` of the local
factors).

Fermionic modes are realized with a Jordan-Wigner string that runs over
*every* fermionic mode registered before the target, whatever its species.
Electron and positron operators therefore anticommute with each other.
Bosonic modes carry no string, so photon operators commute with all
fermionic operators.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from . import config
from .errors import FockSpaceError, SpaceMismatchError


class Species(enum.Enum):
    PHOTON = "photon"
    ELECTRON = "electron"
    POSITRON = "positron"


class Statistics(enum.Enum):
    BOSE = "bose"
    FERMI = "fermi"


_STATISTICS = {
    Species.PHOTON: Statistics.BOSE,
    Species.ELECTRON: Statistics.FERMI,
    Species.POSITRON: Statistics.FERMI,
}


@dataclass(frozen=True)
class ModeId:
    species: Species
    site: str

    def __post_init__(self):
        object.__setattr__(self, "species", Species(self.species))

    def __str__(self) -> str:
        return f"{self.species.value}:{self.site}"

    @classmethod
    def parse(cls, text: str) -> "ModeId":
        """Inverse of ``str``: ``"electron:L"`` -> ``ModeId(ELECTRON, "L")``."""
        species, sep, site = text.partition(":")
        if not sep or not site:
            raise FockSpaceError(f"cannot parse mode id {text!r}")
        try:
            return cls(Species(species), site)
        except ValueError as exc:
            raise FockSpaceError(f"unknown species in {text!r}") from exc

    @property
    def statistics(self) -> Statistics:
        return _STATISTICS[self.species]


@dataclass(frozen=True)
class ModeSpec:
    """One registered mode.  ``cutoff`` is the maximum bosonic occupation."""

    id: ModeId
    statistics: Statistics
    cutoff: int = 1

    def __post_init__(self):
        if self.statistics is not self.id.statistics:
            raise FockSpaceError(
                f"{self.id} must use {self.id.statistics.value} statistics"
            )
        if self.statistics is Statistics.BOSE and self.cutoff < 1:
            raise FockSpaceError(f"bosonic cutoff must be >= 1, got {self.cutoff}")
        if self.statistics is Statistics.FERMI and self.cutoff != 1:
            raise FockSpaceError("fermionic modes hold at most one quantum")

    @property
    def local_dim(self) -> int:
        return self.cutoff + 1

    @property
    def is_fermi(self) -> bool:
        return self.statistics is Statistics.FERMI


def photon(site: str, cutoff: int = 2) -> ModeSpec:
    return ModeSpec(ModeId(Species.PHOTON, site), Statistics.BOSE, cutoff)


def electron(site: str) -> ModeSpec:
    return ModeSpec(ModeId(Species.ELECTRON, site), Statistics.FERMI)


def positron(site: str) -> ModeSpec:
    return ModeSpec(ModeId(Species.POSITRON, site), Statistics.FERMI)


@dataclass(frozen=True)
class FockSpace:
    modes: tuple[ModeSpec, ...]
    dims: tuple[int, ...] = field(init=False)
    strides: tuple[int, ...] = field(init=False)
    dim: int = field(init=False)

    def __post_init__(self):
        modes = tuple(self.modes)
        object.__setattr__(self, "modes", modes)
        dims = tuple(m.local_dim for m in modes)
        strides = []
        acc = 1
        for d in reversed(dims):
            strides.append(acc)
            acc *= d
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "strides", tuple(reversed(strides)))
        object.__setattr__(self, "dim", acc)

    @property
    def mode_ids(self) -> tuple[ModeId, ...]:
        return tuple(m.id for m in self.modes)

    def position(self, mode: ModeId) -> int:
        for i, spec in enumerate(self.modes):
            if spec.id == mode:
                return i
        raise FockSpaceError(f"mode {mode} is not in this space")

    def spec(self, mode: ModeId) -> ModeSpec:
        return self.modes[self.position(mode)]

    def __contains__(self, mode: object) -> bool:
        return any(spec.id == mode for spec in self.modes)

    def modes_of(self, species: Species) -> tuple[ModeId, ...]:
        """Modes of one species in registration order (a descriptor sector)."""
        return tuple(m.id for m in self.modes if m.id.species is species)

    def find(self, species: Species, site: str) -> ModeId:
        mode = ModeId(species, site)
        if mode not in self:
            raise FockSpaceError(f"mode {mode} is not in this space")
        return mode

    def index(self, occupations: Sequence[int]) -> int:
        if len(occupations) != len(self.modes):
            raise FockSpaceError(
                f"expected {len(self.modes)} occupations, got {len(occupations)}"
            )
        idx = 0
        for n, spec, stride in zip(occupations, self.modes, self.strides):
            if not 0 <= n <= spec.cutoff:
                kind = "fermionic occupation" if spec.is_fermi else "cutoff"
                raise FockSpaceError(f"occupation {n} of {spec.id} exceeds {kind}")
            idx += int(n) * stride
        return idx

    def occupations(self, index: int) -> tuple[int, ...]:
        return tuple(int(n) for n in np.unravel_index(index, self.dims))

    def occupation_table(self) -> np.ndarray:
        """``(dim, k)`` integer array; row ``i`` is the occupation tuple of index ``i``."""
        return _occupation_table(self)

    def faithful_mask(self) -> np.ndarray:
        """Basis states represented without truncation error by passive gates.

        Passive bosonic gates conserve the total photon number, and every
        sector with total number <= the smallest cutoff is fully contained in
        the truncated space.  Purely fermionic spaces are faithful everywhere.
        """
        table = self.occupation_table()
        bose = [i for i, m in enumerate(self.modes) if not m.is_fermi]
        if not bose:
            return np.ones(self.dim, dtype=bool)
        limit = min(self.modes[i].cutoff for i in bose)
        return table[:, bose].sum(axis=1) <= limit


@functools.lru_cache(maxsize=64)
def _occupation_table(space: FockSpace) -> np.ndarray:
    grids = np.indices(space.dims).reshape(len(space.dims), -1).T
    grids.setflags(write=False)
    return grids


def build_space(specs: Iterable[ModeSpec], max_dim: int = config.MAX_DIM) -> FockSpace:
    specs = tuple(specs)
    if not specs:
        raise FockSpaceError("a Fock space needs at least one mode")
    seen = set()
    for spec in specs:
        if spec.id in seen:
            raise FockSpaceError(f"duplicate mode {spec.id}")
        seen.add(spec.id)
    dim = int(np.prod([s.local_dim for s in specs]))
    if dim > max_dim:
        raise FockSpaceError(f"Fock dimension {dim} exceeds bound {max_dim}")
    return FockSpace(specs)


def _check_same(a: FockSpace, b: FockSpace) -> None:
    if a != b:
        raise SpaceMismatchError("operands live on different Fock spaces")


@dataclass(frozen=True, eq=False)
class StateVector:
    space: FockSpace
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (self.space.dim,):
            raise FockSpaceError(f"state must have shape ({self.space.dim},)")
        norm = np.linalg.norm(amps)
        if not np.isfinite(norm) or norm == 0.0:
            raise FockSpaceError("state vector has zero or non-finite norm")
        amps = amps / norm
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def evolve(self, unitary: "MatrixOperator") -> "StateVector":
        _check_same(self.space, unitary.space)
        return StateVector(self.space, unitary.entries @ self.amplitudes)


def basis_state(space: FockSpace, occupations: Sequence[int]) -> StateVector:
    amps = np.zeros(space.dim, dtype=complex)
    amps[space.index(occupations)] = 1.0
    return StateVector(space, amps)


def vacuum(space: FockSpace) -> StateVector:
    return basis_state(space, (0,) * len(space.modes))


def superpose(terms: Iterable[tuple[complex, StateVector]]) -> StateVector:
    """Normalized linear combination ``sum(c * psi)``."""
    terms = list(terms)
    if not terms:
        raise FockSpaceError("nothing to superpose")
    space = terms[0][1].space
    total = np.zeros(space.dim, dtype=complex)
    for coeff, state in terms:
        _check_same(space, state.space)
        total += coeff * state.amplitudes
    if np.linalg.norm(total) < 1e-14:
        raise FockSpaceError("superposition has zero norm")
    return StateVector(space, total)


@dataclass(frozen=True, eq=False)
class MatrixOperator:
    """Dense operator on a Fock space.  Entries are read-only."""

    space: FockSpace
    entries: np.ndarray

    def __post_init__(self):
        mat = np.array(self.entries, dtype=complex)
        if mat.shape != (self.space.dim, self.space.dim):
            raise FockSpaceError(
                f"operator must be {self.space.dim}x{self.space.dim}, got {mat.shape}"
            )
        mat.setflags(write=False)
        object.__setattr__(self, "entries", mat)

    def __add__(self, other: "MatrixOperator") -> "MatrixOperator":
        return add(self, other)

    def __sub__(self, other: "MatrixOperator") -> "MatrixOperator":
        return add(self, scale(other, -1.0))

    def __neg__(self) -> "MatrixOperator":
        return scale(self, -1.0)

    def __mul__(self, c: complex) -> "MatrixOperator":
        return scale(self, c)

    __rmul__ = __mul__

    def __matmul__(self, other: "MatrixOperator") -> "MatrixOperator":
        return multiply(self, other)

    @property
    def dag(self) -> "MatrixOperator":
        return adjoint(self)

    def apply(self, state: StateVector) -> np.ndarray:
        """Unnormalized ``O|psi>`` as a raw amplitude array."""
        _check_same(self.space, state.space)
        return self.entries @ state.amplitudes


def identity(space: FockSpace) -> MatrixOperator:
    return MatrixOperator(space, np.eye(space.dim, dtype=complex))


def zero(space: FockSpace) -> MatrixOperator:
    return MatrixOperator(space, np.zeros((space.dim, space.dim), dtype=complex))


def add(a: MatrixOperator, b: MatrixOperator) -> MatrixOperator:
    _check_same(a.space, b.space)
    return MatrixOperator(a.space, a.entries + b.entries)


def scale(a: MatrixOperator, c: complex) -> MatrixOperator:
    return MatrixOperator(a.space, c * a.entries)


def multiply(a: MatrixOperator, b: MatrixOperator) -> MatrixOperator:
    _check_same(a.space, b.space)
    return MatrixOperator(a.space, a.entries @ b.entries)


def adjoint(a: MatrixOperator) -> MatrixOperator:
    return MatrixOperator(a.space, a.entries.conj().T)


def commutator(a: MatrixOperator, b: MatrixOperator) -> MatrixOperator:
    _check_same(a.space, b.space)
    return MatrixOperator(a.space, a.entries @ b.entries - b.entries @ a.entries)


def anticommutator(a: MatrixOperator, b: MatrixOperator) -> MatrixOperator:
    _check_same(a.space, b.space)
    return MatrixOperator(a.space, a.entries @ b.entries + b.entries @ a.entries)


def operator_distance(
    a: MatrixOperator, b: MatrixOperator, faithful_only: bool = False
) -> float:
    """Largest absolute entry of ``a - b``.

    With ``faithful_only`` the comparison is restricted to columns in the
    space's faithful subspace (see ``FockSpace.faithful_mask``), which is
    where truncated bosonic operators are exact.
    """
    _check_same(a.space, b.space)
    diff = a.entries - b.entries
    if faithful_only:
        diff = diff[:, a.space.faithful_mask()]
    return float(np.max(np.abs(diff))) if diff.size else 0.0


def norm(a: MatrixOperator) -> float:
    """Max-abs-entry norm, the same metric as ``operator_distance``."""
    return float(np.max(np.abs(a.entries)))


def is_hermitian(a: MatrixOperator, tol: float = config.DEFAULT.operator) -> bool:
    return operator_distance(a, adjoint(a)) <= tol


def is_unitary(a: MatrixOperator, tol: float = config.DEFAULT.operator) -> bool:
    return operator_distance(adjoint(a) @ a, identity(a.space)) <= tol


@functools.lru_cache(maxsize=256)
def _annihilation_entries(space: FockSpace, pos: int) -> np.ndarray:
    target = space.modes[pos]
    factors = []
    for i, spec in enumerate(space.modes):
        if i == pos:
            local = np.diag(np.sqrt(np.arange(1, spec.local_dim, dtype=float)), k=1)
        elif i < pos and target.is_fermi and spec.is_fermi:
            local = np.diag([1.0, -1.0])
        else:
            local = np.eye(spec.local_dim)
        factors.append(local)
    mat = functools.reduce(np.kron, factors, np.ones((1, 1))).astype(complex)
    mat.setflags(write=False)
    return mat


def annihilation_op(space: FockSpace, mode: ModeId) -> MatrixOperator:
    return MatrixOperator(space, _annihilation_entries(space, space.position(mode)))


def create_op(space: FockSpace, mode: ModeId) -> MatrixOperator:
    return adjoint(annihilation_op(space, mode))


def number_op(space: FockSpace, mode: ModeId) -> MatrixOperator:
    a = annihilation_op(space, mode)
    return adjoint(a) @ a


def field_op(space: FockSpace, mode: ModeId) -> MatrixOperator:
    """``a + a^dagger`` for any mode (not an observable for fermions)."""
    a = annihilation_op(space, mode)
    return a + adjoint(a)


def total_number_op(space: FockSpace, modes: Iterable[ModeId] | None = None) -> MatrixOperator:
    modes = space.mode_ids if modes is None else tuple(modes)
    table = space.occupation_table()
    counts = table[:, [space.position(m) for m in modes]].sum(axis=1)
    return MatrixOperator(space, np.diag(counts.astype(complex)))


def matrix_exponential(op: MatrixOperator, scalar: complex = 1.0) -> MatrixOperator:
    """``exp(scalar * op)`` by scaling-and-squaring Pade (scipy)."""
    mat = scalar * op.entries
    if not np.all(np.isfinite(mat)):
        raise FockSpaceError("matrix exponential of non-finite entries")
    return MatrixOperator(op.space, scipy.linalg.expm(mat))


def expectation(state: StateVector, op: MatrixOperator) -> complex:
    _check_same(state.space, op.space)
    psi = state.amplitudes
    return complex(np.vdot(psi, op.entries @ psi))
