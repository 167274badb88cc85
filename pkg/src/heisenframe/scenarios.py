"""End-to-end interferometry runs, locality audits and picture-equivalence checks."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from typing import Sequence

import numpy as np

from . import config, fock
from . import descriptors as dsc
from . import superselection as ss
from .errors import ConsistencyError
from .fock import FockSpace, MatrixOperator, ModeId, Species, StateVector

BOSON = "boson"
FERMION = "fermion"


@dataclass(frozen=True)
class FringeRecord:
    """Output-port expectations at one phase.

    Bosonic runs fill ``a_squared_left``; fermionic runs fill the charge
    densities and ``coherence`` (the L/R electron coherence just after the
    phase, whose value ``cos(phi)`` is the interference term).
    """

    phi: float
    n_left: float
    n_right: float
    a_squared_left: float | None = None
    j0_left: float | None = None
    j0_right: float | None = None
    coherence: float | None = None

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}

    @classmethod
    def from_dict(cls, data: dict) -> "FringeRecord":
        names = {f.name for f in fields(cls)}
        return cls(**{k: float(v) for k, v in data.items() if k in names})


def photon_pair_space(cutoff: int = 2) -> FockSpace:
    return fock.build_space([fock.photon("L", cutoff), fock.photon("R", cutoff)])


def dirac_pair_space() -> FockSpace:
    return fock.build_space(
        [fock.electron("L"), fock.electron("R"), fock.positron("L"), fock.positron("R")]
    )


def mz_circuit(space: FockSpace, phi: float) -> dsc.Circuit:
    return dsc.Circuit(
        space,
        [dsc.BeamSplitter("L", "R"), dsc.PhaseShift("L", phi), dsc.BeamSplitter("L", "R")],
    )


def fermion_mz_circuit(space: FockSpace, phi: float, pre_splitter: bool = False) -> dsc.Circuit:
    gates = [dsc.ChargeRotation("L", phi), dsc.BeamSplitter("L", "R", dsc.DIRAC)]
    if pre_splitter:
        gates.insert(0, dsc.BeamSplitter("L", "R", dsc.DIRAC))
    return dsc.Circuit(space, gates)


def _agree(label: str, a: float, b: float, tol: float) -> None:
    if not abs(a - b) <= tol:
        raise ConsistencyError(f"{label}: descriptor path {a!r} vs conjugation path {b!r}")


def bosonic_mz(
    phi: float, cutoff: int = 2, tol: config.Tolerances = config.DEFAULT
) -> tuple[FringeRecord, list[dsc.DescriptorFrame]]:
    """Single photon enters L; splitter, phase on L, splitter."""
    if not math.isfinite(phi):
        raise ValueError("phi must be finite")
    space = photon_pair_space(cutoff)
    circuit = mz_circuit(space, phi)
    frames = dsc.run_frame(circuit)
    psi = fock.basis_state(space, (1, 0))
    left, right = space.mode_ids

    a_l = dsc.realize_ladder(frames[-1], space, left)
    a_r = dsc.realize_ladder(frames[-1], space, right)
    field_l = a_l + a_l.dag
    n_left = fock.expectation(psi, a_l.dag @ a_l).real
    n_right = fock.expectation(psi, a_r.dag @ a_r).real
    a_sq = fock.expectation(psi, field_l @ field_l).real

    u = dsc.circuit_unitary(circuit)
    conj = lambda op: fock.expectation(psi, dsc.heisenberg_conjugate(u, op)).real
    field0 = fock.field_op(space, left)
    _agree("n_left", n_left, conj(fock.number_op(space, left)), tol.expectation)
    _agree("n_right", n_right, conj(fock.number_op(space, right)), tol.expectation)
    _agree("a_squared_left", a_sq, conj(field0 @ field0), tol.expectation)
    return FringeRecord(phi, n_left, n_right, a_squared_left=a_sq), frames


def fermion_state(space: FockSpace, pre_splitter: bool = False) -> StateVector:
    """One electron, positron vacuum; split evenly over L/R unless ``pre_splitter``."""
    if pre_splitter:
        return fock.basis_state(space, (1, 0, 0, 0))
    return fock.superpose(
        [(1, fock.basis_state(space, (0, 1, 0, 0))), (1, fock.basis_state(space, (1, 0, 0, 0)))]
    )


def surviving_terms_op(space: FockSpace, phi: float, charge: float = 1.0) -> MatrixOperator:
    """``-(e/2) (n_L + n_R + e^{-i phi} b_L^dag b_R + e^{i phi} b_R^dag b_L)`` in initial operators."""
    b_l = fock.annihilation_op(space, space.find(Species.ELECTRON, "L"))
    b_r = fock.annihilation_op(space, space.find(Species.ELECTRON, "R"))
    inner = (
        b_l.dag @ b_l
        + b_r.dag @ b_r
        + np.exp(-1j * phi) * (b_l.dag @ b_r)
        + np.exp(1j * phi) * (b_r.dag @ b_l)
    )
    return (-charge / 2) * inner


def fermionic_mz(
    phi: float,
    charge: float = 1.0,
    pre_splitter: bool = False,
    tol: config.Tolerances = config.DEFAULT,
) -> tuple[FringeRecord, list[dsc.DescriptorFrame]]:
    """Electron interferometer tracked through the Dirac charge density.

    By default the Heisenberg state is the one just after the first splitter
    and the circuit is [charge rotation on L, splitter].  ``pre_splitter``
    starts from one electron in L and adds the first splitter explicitly.
    """
    if not math.isfinite(phi):
        raise ValueError("phi must be finite")
    space = dirac_pair_space()
    circuit = fermion_mz_circuit(space, phi, pre_splitter)
    frames = dsc.run_frame(circuit)
    psi = fermion_state(space, pre_splitter)
    unitaries = dsc.circuit_unitaries(circuit)
    u = unitaries[-1]
    ev = lambda op: fock.expectation(psi, op).real

    j0 = {}
    for site in ("L", "R"):
        numeric = ev(dsc.heisenberg_conjugate(u, ss.charge_density_op(space, site, charge)))
        symbolic = ev(ss.evolved_charge_density(frames[-1], space, site, charge))
        _agree(f"j0_{site}", symbolic, numeric, tol.expectation)
        j0[site] = numeric
    if not pre_splitter:
        surviving = ev(surviving_terms_op(space, phi, charge))
        if not abs(surviving - j0["L"]) <= tol.operator:
            raise ConsistencyError(f"surviving-terms value {surviving!r} vs {j0['L']!r}")

    e_l, e_r = space.find(Species.ELECTRON, "L"), space.find(Species.ELECTRON, "R")
    n_left = ev(dsc.heisenberg_conjugate(u, fock.number_op(space, e_l)))
    n_right = ev(dsc.heisenberg_conjugate(u, fock.number_op(space, e_r)))
    after_phase = unitaries[-2]
    coherence = ev(dsc.heisenberg_conjugate(after_phase, ss.coherence_op(space, "L", "R")))
    record = FringeRecord(
        phi, n_left, n_right, j0_left=j0["L"], j0_right=j0["R"], coherence=coherence
    )
    return record, frames


def sweep(scenario: str, phi_min: float = 0.0, phi_max: float = 2 * np.pi, steps: int = 33,
          **kwargs) -> list[FringeRecord]:
    """Fringe records on a uniform grid including both endpoints."""
    if steps < 2:
        raise ValueError("a sweep needs at least two grid points")
    if not phi_min < phi_max:
        raise ValueError("phi_min must be smaller than phi_max")
    run = {BOSON: bosonic_mz, FERMION: fermionic_mz}.get(scenario)
    if run is None:
        raise ValueError(f"unknown scenario {scenario!r}")
    return [run(float(phi), **kwargs)[0] for phi in np.linspace(phi_min, phi_max, steps)]


@dataclass(frozen=True)
class ConcealmentReport:
    scenario: str
    phis: tuple[float, ...]
    local_expectations: tuple[float, ...]
    expected_local: float
    descriptor_distances: tuple[float, ...]
    pair_coefficients: tuple[complex, ...] = ()

    @property
    def max_local_deviation(self) -> float:
        return max(abs(v - self.expected_local) for v in self.local_expectations)

    @property
    def phase_dependent(self) -> bool:
        """Every grid phase not congruent to 0 leaves a visible mark on the joint frame."""
        marks = [
            dist > config.DEFAULT.operator
            for phi, dist in zip(self.phis, self.descriptor_distances)
            if abs(math.remainder(phi, 2 * math.pi)) > 1e-9
        ]
        return all(marks)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["pair_coefficients"] = [[z.real, z.imag] for z in self.pair_coefficients]
        out["max_local_deviation"] = self.max_local_deviation
        out["phase_dependent"] = self.phase_dependent
        return out


def phase_concealment_check(
    phis: Sequence[float], scenario: str = BOSON, charge: float = 1.0
) -> ConcealmentReport:
    """Local expectations just after the phase, and whether the frame records the phase."""
    phis = tuple(float(p) for p in phis)
    if not phis:
        raise ValueError("empty phase grid")
    local, dists, pairs = [], [], []
    if scenario == BOSON:
        space = photon_pair_space()
        psi = fock.basis_state(space, (1, 0))
        left = space.mode_ids[0]
        reference = dsc.run_frame(mz_circuit(space, 0.0))[2]
        for phi in phis:
            frame = dsc.run_frame(mz_circuit(space, phi))[2]
            a = dsc.realize_ladder(frame, space, left)
            local.append(fock.expectation(psi, a.dag @ a).real)
            dists.append(dsc.frame_distance(frame, reference))
        expected = 0.5
    elif scenario == FERMION:
        space = dirac_pair_space()
        psi = fermion_state(space)
        reference = dsc.run_frame(fermion_mz_circuit(space, 0.0))[1]
        for phi in phis:
            circuit = fermion_mz_circuit(space, phi)
            frame = dsc.run_frame(circuit)[1]
            u = dsc.circuit_unitaries(circuit)[1]
            j0 = dsc.heisenberg_conjugate(u, ss.charge_density_op(space, "L", charge))
            local.append(fock.expectation(psi, j0).real)
            dists.append(dsc.frame_distance(frame, reference))
            pairs.append(ss.charge_density_expansion(frame, "L", charge).coefficient("pair_annihilate", "L", "L"))
        expected = -charge / 2
    else:
        raise ValueError(f"unknown scenario {scenario!r}")
    return ConcealmentReport(scenario, phis, tuple(local), expected, tuple(dists), tuple(pairs))


# -- locality audit ---------------------------------------------------------------

@dataclass(frozen=True)
class GateAudit:
    index: int
    gate: str
    support: tuple[str, ...]
    untouched: tuple[str, ...]
    descriptor_deviation: float | None
    conjugation_deviation: float
    worst_operator: str | None
    passed: bool

    def to_dict(self) -> dict:
        out = asdict(self)
        out["support"] = list(self.support)
        out["untouched"] = list(self.untouched)
        return out


@dataclass(frozen=True)
class AuditReport:
    gates: tuple[GateAudit, ...]
    tolerance: float

    @property
    def passed(self) -> bool:
        return all(g.passed for g in self.gates)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "tolerance": self.tolerance,
            "gates": [g.to_dict() for g in self.gates],
        }


def _local_probes(space: FockSpace, untouched: Sequence[ModeId]) -> list[tuple[str, MatrixOperator]]:
    probes = []
    for m in untouched:
        a = fock.annihilation_op(space, m)
        probes += [(f"a[{m}]", a), (f"n[{m}]", a.dag @ a), (f"field[{m}]", a + a.dag)]
    rest = set(untouched)
    for site in sorted({m.site for m in untouched}):
        pair = {ModeId(Species.ELECTRON, site), ModeId(Species.POSITRON, site)}
        if pair <= rest:
            probes.append((f"j0[{site}]", ss.charge_density_op(space, site)))
    return probes


def locality_audit(circuit: dsc.Circuit, tol: float = config.DEFAULT.operator) -> AuditReport:
    """Check, gate by gate, that modes outside a gate's support are left alone.

    Symbolically: their descriptor rows are bitwise unchanged.  Numerically:
    conjugating their ladder, number and field operators (and the charge
    density of fully untouched sites) by the gate unitary changes nothing.
    """
    space = circuit.space
    frame = dsc.identity_frame(space)
    audits = []
    for k, gate in enumerate(circuit.gates):
        support = dsc.gate_support(gate, space)
        untouched = [m for m in space.mode_ids if m not in support]
        u = dsc.synthesize_gate_unitary(gate, space)

        row_dev = None
        if dsc.is_passive(gate):
            new = dsc.advance(frame, gate, space)
            row_dev = max(
                (float(np.max(np.abs(new.row(m) - frame.row(m)))) for m in untouched), default=0.0
            )
            frame = new

        conj_dev, worst = 0.0, None
        for name, op in _local_probes(space, untouched):
            dev = fock.operator_distance(dsc.heisenberg_conjugate(u, op), op)
            if dev > conj_dev:
                conj_dev, worst = dev, name
        passed = conj_dev <= tol and (row_dev is None or row_dev == 0.0)
        audits.append(
            GateAudit(
                k, gate.label,
                tuple(sorted(map(str, support))), tuple(map(str, untouched)),
                row_dev, conj_dev, worst, passed,
            )
        )
    return AuditReport(tuple(audits), tol)


# -- picture equivalence ------------------------------------------------------------

@dataclass(frozen=True)
class EquivalenceReport:
    """``deviations[t][k]`` is ``|<psi(t)|O_k|psi(t)> - <psi|O_k(t)|psi>|``."""

    deviations: tuple[tuple[float, ...], ...]
    tolerance: float

    @property
    def max_deviation(self) -> float:
        return max((max(row, default=0.0) for row in self.deviations), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_deviation < self.tolerance

    def to_dict(self) -> dict:
        return {
            "max_deviation": self.max_deviation,
            "passed": self.passed,
            "tolerance": self.tolerance,
            "deviations": [list(row) for row in self.deviations],
        }


def picture_equivalence(
    circuit: dsc.Circuit,
    state: StateVector,
    observables: Sequence[MatrixOperator],
    tol: float = config.DEFAULT.expectation,
) -> EquivalenceReport:
    """Compare Schrodinger and Heisenberg expectations at every time step."""
    psi0 = state.amplitudes
    rows = []
    for u in dsc.circuit_unitaries(circuit):
        psi_t = u.entries @ psi0
        row = []
        for obs in observables:
            schrodinger = np.vdot(psi_t, obs.entries @ psi_t)
            heisenberg = np.vdot(psi0, dsc.heisenberg_conjugate(u, obs).entries @ psi0)
            row.append(float(abs(schrodinger - heisenberg)))
        rows.append(tuple(row))
    return EquivalenceReport(tuple(rows), tol)


# -- randomized inputs ---------------------------------------------------------------

def random_circuit(space: FockSpace, n_gates: int, rng: np.random.Generator) -> dsc.Circuit:
    """Library gates only: splitters, phase shifts and (where possible) charge rotations."""
    species = sorted({m.species for m in space.mode_ids}, key=lambda s: s.value)
    sites_of = {s: sorted(m.site for m in space.modes_of(s)) for s in species}
    dirac_sites = sorted(set(sites_of.get(Species.ELECTRON, [])) & set(sites_of.get(Species.POSITRON, [])))
    gates = []
    while len(gates) < n_gates:
        kind = rng.integers(3)
        s = species[rng.integers(len(species))]
        sites = sites_of[s]
        phi = float(rng.uniform(-np.pi, np.pi))
        if kind == 0 and len(sites) >= 2:
            i, j = rng.choice(len(sites), size=2, replace=False)
            gates.append(dsc.BeamSplitter(sites[i], sites[j], s))
        elif kind == 1:
            gates.append(dsc.PhaseShift(sites[rng.integers(len(sites))], phi, s))
        elif kind == 2 and dirac_sites:
            gates.append(dsc.ChargeRotation(dirac_sites[rng.integers(len(dirac_sites))], phi))
    return dsc.Circuit(space, gates)


def random_admissible_observable(space: FockSpace, rng: np.random.Generator) -> MatrixOperator:
    """Random Hermitian, parity-even quadratic form.

    Hopping terms within the bosonic and within the fermionic modes, plus
    fermionic pairing terms ``f_i f_j + h.c.``.
    """
    def cplx(*shape):
        return rng.normal(size=shape) + 1j * rng.normal(size=shape)

    out = fock.zero(space)
    for stats in fock.Statistics:
        modes = [m for m in space.mode_ids if m.statistics is stats]
        if not modes:
            continue
        ladders = [fock.annihilation_op(space, m) for m in modes]
        h = cplx(len(modes), len(modes))
        h = (h + h.conj().T) / 2
        for i, ai in enumerate(ladders):
            for j, aj in enumerate(ladders):
                out = out + h[i, j] * (ai.dag @ aj)
        if stats is fock.Statistics.FERMI:
            kappa = cplx(len(modes), len(modes))
            for i, ai in enumerate(ladders):
                for j, aj in enumerate(ladders[i + 1:], start=i + 1):
                    pair = kappa[i, j] * (ai @ aj)
                    out = out + pair + pair.dag
    return out


def random_admissible_state(space: FockSpace, rng: np.random.Generator) -> StateVector:
    """Random superposition of even-fermion-parity basis states."""
    table = space.occupation_table()
    fermi = [i for i, m in enumerate(space.modes) if m.is_fermi]
    even = table[:, fermi].sum(axis=1) % 2 == 0
    amps = (rng.normal(size=space.dim) + 1j * rng.normal(size=space.dim)) * even
    return StateVector(space, amps)
