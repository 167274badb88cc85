import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heisenframe import fock
from heisenframe.errors import FockSpaceError, SpaceMismatchError
from heisenframe.fock import ModeId, Species

from oracles import ladder_by_enumeration, taylor_expm

PL = ModeId(Species.PHOTON, "L")
PR = ModeId(Species.PHOTON, "R")
EL = ModeId(Species.ELECTRON, "L")
ER = ModeId(Species.ELECTRON, "R")


def two_electrons():
    return fock.build_space([fock.electron("L"), fock.electron("R")])


# -- build_space ------------------------------------------------------------

def test_photon_pair_dim(photon_pair):
    assert photon_pair.dim == 9
    assert photon_pair.strides == (3, 1)


def test_dirac_space_dim(dirac_space):
    assert dirac_space.dim == 16


def test_mixed_radix_strides():
    space = fock.build_space([fock.photon("L", cutoff=1), fock.electron("L")])
    assert space.dim == 4
    assert space.strides == (2, 1)


def test_duplicate_mode_rejected():
    with pytest.raises(FockSpaceError, match="duplicate"):
        fock.build_space([fock.photon("L"), fock.photon("L", cutoff=3)])


def test_dimension_bound():
    with pytest.raises(FockSpaceError, match="exceeds bound"):
        fock.build_space([fock.photon(str(i), cutoff=3) for i in range(7)])
    fock.build_space([fock.photon(str(i), cutoff=3) for i in range(7)], max_dim=4**7)


def test_zero_cutoff_rejected():
    with pytest.raises(FockSpaceError, match="cutoff"):
        fock.build_space([fock.photon("L", cutoff=0)])


def test_species_statistics_must_match():
    with pytest.raises(FockSpaceError):
        fock.ModeSpec(EL, fock.Statistics.BOSE, 2)
    with pytest.raises(FockSpaceError):
        fock.ModeSpec(PL, fock.Statistics.FERMI)


def test_empty_space_rejected():
    with pytest.raises(FockSpaceError):
        fock.build_space([])


def test_mode_id_round_trip():
    assert ModeId.parse(str(EL)) == EL
    with pytest.raises(FockSpaceError):
        ModeId.parse("muon:L")


# -- states -----------------------------------------------------------------

def test_vacuum_index(photon_pair):
    psi = fock.basis_state(photon_pair, (0, 0))
    assert psi.amplitudes[0] == 1


def test_stride_arithmetic(photon_pair, dirac_space):
    assert np.argmax(np.abs(fock.basis_state(photon_pair, (1, 0)).amplitudes)) == 3
    assert np.argmax(np.abs(fock.basis_state(dirac_space, (0, 1, 0, 0)).amplitudes)) == 4


def test_index_round_trip(photon_pair):
    for i in range(photon_pair.dim):
        assert photon_pair.index(photon_pair.occupations(i)) == i


def test_occupation_bounds(photon_pair):
    with pytest.raises(FockSpaceError, match="cutoff"):
        fock.basis_state(photon_pair, (3, 0))
    with pytest.raises(FockSpaceError, match="fermionic"):
        fock.basis_state(two_electrons(), (2, 0))


def test_superpose_normalizes():
    space = two_electrons()
    psi = fock.superpose([(1, fock.basis_state(space, (0, 1))), (1, fock.basis_state(space, (1, 0)))])
    expected = np.zeros(4, complex)
    expected[[1, 2]] = 1 / np.sqrt(2)
    np.testing.assert_allclose(psi.amplitudes, expected, atol=1e-15)
    assert abs(np.linalg.norm(psi.amplitudes) - 1) < 1e-12


def test_superpose_zero_norm():
    space = fock.build_space([fock.electron("A")])
    zero = fock.basis_state(space, (0,))
    with pytest.raises(FockSpaceError, match="zero norm"):
        fock.superpose([(1, zero), (-1, zero)])


def test_superpose_complex_weights():
    space = fock.build_space([fock.electron("A")])
    psi = fock.superpose([(1, fock.basis_state(space, (0,))), (1j, fock.basis_state(space, (1,)))])
    np.testing.assert_allclose(psi.amplitudes, [1 / np.sqrt(2), 1j / np.sqrt(2)], atol=1e-15)


def test_superpose_space_mismatch(photon_pair):
    other = two_electrons()
    with pytest.raises(SpaceMismatchError):
        fock.superpose([(1, fock.vacuum(photon_pair)), (1, fock.vacuum(other))])


# -- ladder operators ---------------------------------------------------------

def test_bose_ladder_action():
    space = fock.build_space([fock.photon("L")])
    a = fock.annihilation_op(space, PL)
    two = fock.basis_state(space, (2,))
    np.testing.assert_allclose(a.apply(two), [0, np.sqrt(2), 0], atol=1e-15)
    assert np.all(a.apply(fock.vacuum(space)) == 0)


def test_fermi_cross_anticommutator_vanishes():
    space = two_electrons()
    fl = fock.annihilation_op(space, EL)
    fr_dag = fock.create_op(space, ER)
    assert fock.norm(fock.anticommutator(fl, fr_dag)) < 1e-14


def test_jordan_wigner_sign_on_doubly_occupied():
    # f_R |1_L 1_R> = -|1_L 0_R>: the string picks up the occupied L mode.
    space = two_electrons()
    out = fock.annihilation_op(space, ER).apply(fock.basis_state(space, (1, 1)))
    np.testing.assert_array_equal(out, -fock.basis_state(space, (1, 0)).amplitudes)


def test_creation_of_vacuum():
    space = fock.build_space([fock.photon("L")])
    out = fock.create_op(space, PL).apply(fock.vacuum(space))
    np.testing.assert_array_equal(out, fock.basis_state(space, (1,)).amplitudes)


def test_adjoint_involution(photon_pair):
    a = fock.annihilation_op(photon_pair, PL)
    np.testing.assert_array_equal(a.dag.dag.entries, a.entries)


def test_single_mode_car_completeness():
    space = fock.build_space([fock.electron("A"), fock.positron("A")])
    for mode in space.mode_ids:
        f = fock.annihilation_op(space, mode)
        total = f.dag @ f + f @ f.dag
        assert fock.operator_distance(total, fock.identity(space)) < 1e-14


def test_number_op_spectra():
    space = fock.build_space([fock.photon("L")])
    np.testing.assert_allclose(np.linalg.eigvalsh(fock.number_op(space, PL).entries), [0, 1, 2])
    fs = fock.build_space([fock.electron("A")])
    n = fock.number_op(fs, ModeId(Species.ELECTRON, "A"))
    np.testing.assert_allclose(np.linalg.eigvalsh(n.entries), [0, 1])


def test_number_op_expectation(photon_pair):
    psi = fock.basis_state(photon_pair, (1, 0))
    assert fock.expectation(psi, fock.number_op(photon_pair, PL)) == 1


def test_unknown_mode(photon_pair):
    with pytest.raises(FockSpaceError):
        fock.annihilation_op(photon_pair, EL)
    with pytest.raises(FockSpaceError):
        fock.number_op(photon_pair, EL)


@pytest.mark.parametrize(
    "specs",
    [
        [fock.electron("L"), fock.electron("R")],
        [fock.electron("L"), fock.electron("R"), fock.positron("L"), fock.positron("R")],
        [fock.photon("L", 2), fock.electron("L"), fock.photon("R", 1), fock.positron("L")],
        [fock.electron("A"), fock.photon("B", 3), fock.electron("C")],
    ],
)
def test_ladders_match_enumeration_oracle(specs):
    space = fock.build_space(specs)
    dims = [s.local_dim for s in specs]
    flags = [s.is_fermi for s in specs]
    for pos, spec in enumerate(specs):
        expected = ladder_by_enumeration(dims, flags, pos)
        np.testing.assert_array_equal(fock.annihilation_op(space, spec.id).entries, expected)


# -- algebra ------------------------------------------------------------------

def test_distinct_bose_modes_commute(photon_pair):
    a_l = fock.annihilation_op(photon_pair, PL)
    a_r = fock.annihilation_op(photon_pair, PR)
    assert fock.norm(fock.commutator(a_l, a_r.dag)) == 0
    assert fock.norm(fock.commutator(a_l, a_r)) == 0


def test_truncated_ccr_defect():
    # [a, a^dag] = I - (n_max + 1)|n_max><n_max| on a truncated mode.
    for cutoff in (1, 2, 5):
        space = fock.build_space([fock.photon("L", cutoff)])
        a = fock.annihilation_op(space, PL)
        expected = np.eye(cutoff + 1)
        expected[cutoff, cutoff] -= cutoff + 1
        np.testing.assert_allclose(fock.commutator(a, a.dag).entries, expected, atol=1e-13)


def test_fermion_self_anticommutator():
    space = two_electrons()
    f = fock.annihilation_op(space, EL)
    assert fock.norm(fock.anticommutator(f, f)) == 0


def test_algebra_space_mismatch(photon_pair):
    other = two_electrons()
    with pytest.raises(SpaceMismatchError):
        fock.identity(photon_pair) + fock.identity(other)
    with pytest.raises(SpaceMismatchError):
        fock.expectation(fock.vacuum(other), fock.identity(photon_pair))


def test_is_hermitian(photon_pair):
    a = fock.annihilation_op(photon_pair, PL)
    assert fock.is_hermitian(a + a.dag)
    assert not fock.is_hermitian(a)
    assert fock.is_hermitian(1j * (a.dag - a))


def test_operators_are_immutable(photon_pair):
    a = fock.annihilation_op(photon_pair, PL)
    with pytest.raises(ValueError):
        a.entries[0, 0] = 1


# -- matrix exponential ------------------------------------------------------

def test_expm_of_zero():
    space = two_electrons()
    out = fock.matrix_exponential(fock.zero(space))
    np.testing.assert_array_equal(out.entries, np.eye(4))


def test_expm_parity_of_single_mode():
    space = fock.build_space([fock.electron("A")])
    n = fock.number_op(space, ModeId(Species.ELECTRON, "A"))
    out = fock.matrix_exponential(n, 1j * np.pi)
    np.testing.assert_allclose(out.entries, np.diag([1, -1]), atol=1e-15)


def test_expm_creates_fermion_from_vacuum():
    # exp(t X) with X = f^dag - f, X^2 = -1: cos t + X sin t; at t = pi/2 it is X.
    space = fock.build_space([fock.electron("A")])
    f = fock.annihilation_op(space, ModeId(Species.ELECTRON, "A"))
    u = fock.matrix_exponential(f.dag - f, np.pi / 2)
    out = u.apply(fock.vacuum(space))
    np.testing.assert_allclose(np.abs(out), [0, 1], atol=1e-15)
    assert fock.is_unitary(u, 1e-14)


def test_expm_rejects_non_finite():
    space = fock.build_space([fock.electron("A")])
    bad = fock.MatrixOperator(space, np.array([[np.nan, 0], [0, 0]]))
    with pytest.raises(FockSpaceError):
        fock.matrix_exponential(bad)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=1, max_value=12), st.integers(0, 2**31 - 1))
def test_expm_matches_independent_routes(dim, seed):
    gen = np.random.default_rng(seed)
    h = gen.normal(size=(dim, dim)) + 1j * gen.normal(size=(dim, dim))
    h = (h + h.conj().T) / 2
    space = fock.build_space([fock.photon("x", dim - 1)] if dim > 1 else [fock.electron("x")])
    if dim == 1:
        h = np.zeros((2, 2)) + h[0, 0] * np.eye(2)
    op = fock.MatrixOperator(space, h)
    got = fock.matrix_exponential(op, -1j).entries
    w, v = np.linalg.eigh(h)
    spectral = (v * np.exp(-1j * w)) @ v.conj().T
    np.testing.assert_allclose(got, spectral, atol=1e-12)
    np.testing.assert_allclose(got, taylor_expm(-1j * h), atol=1e-12)


# -- invariants -----------------------------------------------------------------

MIXED = [
    fock.photon("L", 2), fock.electron("L"), fock.photon("R", 2),
    fock.electron("R"), fock.positron("L"), fock.positron("R"),
]


def test_car_across_all_fermion_pairs():
    space = fock.build_space(MIXED)
    fermions = [m.id for m in MIXED if m.is_fermi]
    eye = fock.identity(space)
    for x, y in itertools.product(fermions, repeat=2):
        fx, fy = fock.annihilation_op(space, x), fock.annihilation_op(space, y)
        expected = eye if x == y else fock.zero(space)
        assert fock.operator_distance(fock.anticommutator(fx, fy.dag), expected) < 1e-12
        assert fock.norm(fock.anticommutator(fx, fy)) < 1e-12


def test_ccr_below_cutoff_and_mixed_commutation():
    space = fock.build_space(MIXED)
    bosons = [m.id for m in MIXED if not m.is_fermi]
    fermions = [m.id for m in MIXED if m.is_fermi]
    table = space.occupation_table()
    for x, y in itertools.product(bosons, repeat=2):
        ax, ay = fock.annihilation_op(space, x), fock.annihilation_op(space, y)
        assert fock.norm(fock.commutator(ax, ay)) == 0
        comm = fock.commutator(ax, ay.dag)
        if x == y:
            below = table[:, space.position(x)] < space.spec(x).cutoff
            diff = (comm.entries - np.eye(space.dim))[:, below]
            assert np.max(np.abs(diff)) < 1e-12
        else:
            assert fock.norm(comm) == 0
    for b, f in itertools.product(bosons, fermions):
        ab, ff = fock.annihilation_op(space, b), fock.annihilation_op(space, f)
        assert fock.norm(fock.commutator(ab, ff)) < 1e-12
        assert fock.norm(fock.commutator(ab, ff.dag)) < 1e-12


def test_vacuum_is_annihilated_by_every_mode():
    space = fock.build_space(MIXED)
    vac = fock.vacuum(space)
    for mode in space.mode_ids:
        assert np.all(fock.annihilation_op(space, mode).apply(vac) == 0)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_hermitian_expectation_is_real(seed):
    gen = np.random.default_rng(seed)
    space = fock.build_space([fock.photon("L"), fock.electron("L")])
    h = gen.normal(size=(space.dim, space.dim)) + 1j * gen.normal(size=(space.dim, space.dim))
    op = fock.MatrixOperator(space, h + h.conj().T)
    psi = fock.StateVector(space, gen.normal(size=space.dim) + 1j * gen.normal(size=space.dim))
    assert abs(fock.expectation(psi, op).imag) < 1e-10
    assert abs(np.linalg.norm(psi.amplitudes) - 1) < 1e-12


def test_faithful_mask():
    space = fock.build_space([fock.photon("L", 2), fock.photon("R", 2), fock.electron("L")])
    mask = space.faithful_mask()
    table = space.occupation_table()
    assert np.array_equal(mask, table[:, 0] + table[:, 1] <= 2)
    assert two_electrons().faithful_mask().all()
