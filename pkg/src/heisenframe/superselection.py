"""Parity superselection: admissibility of observables and the signalling demo."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Iterable

import numpy as np

from . import config, fock
from .descriptors import DescriptorFrame, heisenberg_conjugate, realize_ladder
from .errors import FockSpaceError, SuperselectionError
from .fock import FockSpace, MatrixOperator, ModeId, Species


def _fermionic(space: FockSpace, modes: Iterable[ModeId] | None) -> tuple[ModeId, ...]:
    if modes is None:
        return tuple(m for m in space.mode_ids if m.statistics is fock.Statistics.FERMI)
    modes = tuple(modes)
    for m in modes:
        space.position(m)
        if m.statistics is not fock.Statistics.FERMI:
            raise SuperselectionError(f"parity is defined on fermionic modes; {m} is bosonic")
    return modes


def parity_op(space: FockSpace, modes: Iterable[ModeId] | None = None) -> MatrixOperator:
    """``exp(-i pi sum_x n_x)`` over ``modes`` (all fermionic modes by default).

    Built directly as the diagonal ``(-1)**N`` so the entries are exactly +-1.
    """
    modes = _fermionic(space, modes)
    table = space.occupation_table()
    count = table[:, [space.position(m) for m in modes]].sum(axis=1)
    return MatrixOperator(space, np.diag((-1.0) ** count))


@dataclass(frozen=True)
class AdmissibilityVerdict:
    hermitian: bool
    hermitian_residual: float
    parity_commuting: bool
    parity_residual: float

    @property
    def admissible(self) -> bool:
        return self.hermitian and self.parity_commuting

    def to_dict(self) -> dict:
        return {**asdict(self), "admissible": self.admissible}


def check_admissible(
    op: MatrixOperator,
    modes: Iterable[ModeId] | None = None,
    tol: float = config.DEFAULT.operator,
) -> AdmissibilityVerdict:
    """Hermiticity and commutation with fermionic parity.

    Global parity is used unless ``modes`` restricts the check to a subset
    (e.g. a single mode, the per-mode form of the rule).
    """
    herm = fock.operator_distance(op, op.dag)
    par = fock.norm(fock.commutator(op, parity_op(op.space, modes)))
    return AdmissibilityVerdict(herm <= tol, herm, par <= tol, par)


def _dirac_pair(space: FockSpace, site: str) -> tuple[MatrixOperator, MatrixOperator]:
    try:
        b = fock.annihilation_op(space, space.find(Species.ELECTRON, site))
        dd = fock.annihilation_op(space, space.find(Species.POSITRON, site))
    except FockSpaceError as exc:
        raise FockSpaceError(f"charge density at {site!r} needs electron and positron modes") from exc
    return b, dd


def _density(b: MatrixOperator, dd: MatrixOperator, charge: float) -> MatrixOperator:
    # -e :psi^dagger psi: with psi = b + d^dagger
    return -charge * (b.dag @ b - b @ dd + b.dag @ dd.dag - dd.dag @ dd)


def charge_density_op(space: FockSpace, site: str, charge: float = 1.0) -> MatrixOperator:
    """``-e (b^dag b - b d + b^dag d^dag - d^dag d)`` at ``site``."""
    b, dd = _dirac_pair(space, site)
    return _density(b, dd, charge)


def evolved_charge_density(
    frame: DescriptorFrame, space: FockSpace, site: str, charge: float = 1.0
) -> MatrixOperator:
    """Charge density built from the frame's realized ladders at ``site``."""
    b = realize_ladder(frame, space, space.find(Species.ELECTRON, site))
    dd = realize_ladder(frame, space, space.find(Species.POSITRON, site))
    return _density(b, dd, charge)


@dataclass(frozen=True, eq=False)
class ChargeDensityExpansion:
    """Charge density at one site written over the *initial* ladder operators.

    ``hop_b[j, k]`` multiplies ``b_j^dag b_k``, ``pair_annihilate[j, k]``
    multiplies ``b_j d_k``, ``pair_create[j, k]`` multiplies
    ``b_j^dag d_k^dag`` and ``hop_d[j, k]`` multiplies ``d_j^dag d_k``.
    """

    electrons: tuple[ModeId, ...]
    positrons: tuple[ModeId, ...]
    hop_b: np.ndarray
    pair_annihilate: np.ndarray
    pair_create: np.ndarray
    hop_d: np.ndarray

    def coefficient(self, kind: str, first: str, second: str) -> complex:
        e_sites = [m.site for m in self.electrons]
        p_sites = [m.site for m in self.positrons]
        rows = p_sites if kind == "hop_d" else e_sites
        cols = e_sites if kind == "hop_b" else p_sites
        return complex(getattr(self, kind)[rows.index(first), cols.index(second)])

    def to_operator(self, space: FockSpace) -> MatrixOperator:
        bs = [fock.annihilation_op(space, m).entries for m in self.electrons]
        ds = [fock.annihilation_op(space, m).entries for m in self.positrons]
        out = np.zeros((space.dim, space.dim), dtype=complex)
        for j, bj in enumerate(bs):
            for k, bk in enumerate(bs):
                out += self.hop_b[j, k] * bj.conj().T @ bk
            for k, dk in enumerate(ds):
                out += self.pair_annihilate[j, k] * bj @ dk
                out += self.pair_create[j, k] * bj.conj().T @ dk.conj().T
        for j, dj in enumerate(ds):
            for k, dk in enumerate(ds):
                out += self.hop_d[j, k] * dj.conj().T @ dk
        return MatrixOperator(space, out)

    def terms(self, tol: float = config.DEFAULT.exact) -> list[tuple[complex, str]]:
        """Nonzero ``(coefficient, monomial)`` pairs, for display."""
        out = []
        layout = [
            ("hop_b", self.electrons, self.electrons, "b_{}^+ b_{}"),
            ("pair_annihilate", self.electrons, self.positrons, "b_{} d_{}"),
            ("pair_create", self.electrons, self.positrons, "b_{}^+ d_{}^+"),
            ("hop_d", self.positrons, self.positrons, "d_{}^+ d_{}"),
        ]
        for name, rows, cols, fmt in layout:
            mat = getattr(self, name)
            for j, mj in enumerate(rows):
                for k, mk in enumerate(cols):
                    if abs(mat[j, k]) > tol:
                        out.append((complex(mat[j, k]), fmt.format(mj.site, mk.site)))
        return out


def charge_density_expansion(
    frame: DescriptorFrame, site: str, charge: float = 1.0
) -> ChargeDensityExpansion:
    electrons = frame.sectors[Species.ELECTRON]
    positrons = frame.sectors[Species.POSITRON]
    b = frame.row(ModeId(Species.ELECTRON, site))
    dd = frame.row(ModeId(Species.POSITRON, site))
    return ChargeDensityExpansion(
        electrons,
        positrons,
        hop_b=-charge * np.outer(b.conj(), b),
        pair_annihilate=charge * np.outer(b, dd),
        pair_create=-charge * np.outer(b.conj(), dd.conj()),
        hop_d=charge * np.outer(dd.conj(), dd),
    )


def coherence_op(
    space: FockSpace, site_a: str, site_b: str, species: Species = Species.ELECTRON
) -> MatrixOperator:
    """``c_A^dag c_B + c_B^dag c_A``."""
    ca = fock.annihilation_op(space, space.find(species, site_a))
    cb = fock.annihilation_op(space, space.find(species, site_b))
    return ca.dag @ cb + cb.dag @ ca


def parity_violating_unitary(space: FockSpace, mode: ModeId) -> MatrixOperator:
    """``exp(pi/2 (f^dag - f))``: creates a fermion in ``mode`` out of the vacuum."""
    if mode.statistics is not fock.Statistics.FERMI:
        raise SuperselectionError(f"{mode} is bosonic")
    f = fock.annihilation_op(space, mode)
    return fock.matrix_exponential(f.dag - f, np.pi / 2)


@dataclass(frozen=True)
class WignerReport:
    expectation_without: float
    expectation_with: float
    descriptor_flip_residual: float
    heisenberg_expectation_with: float
    tolerance: float = config.DEFAULT.operator

    @property
    def signalling_detected(self) -> bool:
        return abs(self.expectation_with - self.expectation_without) > self.tolerance

    def to_dict(self) -> dict:
        return {**asdict(self), "signalling_detected": self.signalling_detected}


def wigner_demo(
    space: FockSpace | None = None,
    mode_a: ModeId | None = None,
    mode_b: ModeId | None = None,
    unitary: MatrixOperator | None = None,
    tol: float = config.DEFAULT.operator,
) -> WignerReport:
    """Signalling protocol between fermionic modes A and B.

    The Heisenberg state is the vacuum on A (and any other mode) times
    ``(|0> + |1>)/sqrt2`` on B.  ``unitary`` acts on A and defaults to the
    parity-violating ``exp(pi/2 (f_A^dag - f_A))``.
    """
    if space is None:
        space = fock.build_space([fock.electron("A"), fock.electron("B")])
    fermions = _fermionic(space, None)
    if mode_a is None or mode_b is None:
        if len(fermions) < 2:
            raise SuperselectionError("the signalling demo needs two fermionic modes")
        mode_a, mode_b = mode_a or fermions[0], mode_b or fermions[1]
    if unitary is None:
        unitary = parity_violating_unitary(space, mode_a)

    occ = [0] * len(space.modes)
    empty = fock.basis_state(space, occ)
    occ[space.position(mode_b)] = 1
    state = fock.superpose([(1, empty), (1, fock.basis_state(space, occ))])

    probe = fock.field_op(space, mode_b)
    without = fock.expectation(state, probe).real
    with_ = fock.expectation(state.evolve(unitary), probe).real
    flipped = heisenberg_conjugate(unitary, probe)
    heisenberg = fock.expectation(state, flipped).real
    return WignerReport(without, with_, fock.norm(flipped + probe), heisenberg, tol)
