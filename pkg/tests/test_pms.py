import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from contextlab import linalg as la
from contextlab import pms
from contextlab.catalog import SpinParams, WeylParams, pauli_triple, spin_rotation_triple, weyl_triple
from contextlab.spectral import PmsTriple

from helpers import perturbed

X, Y, Z = la.SIGMA_X, la.SIGMA_Y, la.SIGMA_Z
I2 = np.eye(2)

# the textbook Pauli square, row by row
PAULI_TABLE = [
    [np.kron(X, I2), np.kron(I2, X), np.kron(X, X)],
    [np.kron(I2, Z), np.kron(Z, I2), np.kron(Z, Z)],
    [np.kron(X, Z), np.kron(Z, X), np.kron(Y, Y)],
]


@pytest.fixture(scope="module")
def pauli_square():
    return pms.build_square(pauli_triple())


@pytest.fixture(scope="module")
def weyl4_square():
    return pms.build_square(weyl_triple(WeylParams(4)))


def test_pauli_square_is_the_table(pauli_square):
    assert pauli_square.dim == 4
    for j in range(3):
        for k in range(3):
            e = pauli_square.entry(j, k)
            assert e.shape == (4, 4)
            assert la.max_norm(e - PAULI_TABLE[j][k]) == 0.0


def test_pauli_column_three_is_minus_one(pauli_square):
    p = pauli_square.context_products["C3"]
    assert la.max_norm(p + np.eye(4)) <= 1e-12


@pytest.mark.parametrize("factory", [pauli_triple, lambda: weyl_triple(WeylParams(4)),
                                     lambda: weyl_triple(WeylParams(4), sign=-1)])
def test_compatibility_and_products(factory):
    sq = pms.build_square(factory())
    comp = pms.verify_compatibility(sq)
    prod = pms.row_col_products(sq)
    assert comp.passed and comp.worst <= 1e-12
    assert prod.passed and prod.worst <= 1e-12


def test_factorwise_checks_agree_with_dense(weyl4_square):
    dense = pms.PmsSquare.from_entries(weyl4_square.entries)
    a = pms.verify_compatibility(weyl4_square).residuals
    b = pms.verify_compatibility(dense).residuals
    assert a.keys() == b.keys()
    for k in a:
        assert abs(a[k] - b[k]) < 1e-14
    pa = pms.row_col_products(weyl4_square).residuals
    pb = pms.row_col_products(dense).residuals
    for k in pa:
        assert abs(pa[k] - pb[k]) < 1e-14


def test_corrupted_triple_breaks_contexts():
    t = pauli_triple()
    rng = np.random.default_rng(1)
    bad = PmsTriple(t.u1, perturbed(t.u2, 1e-3, rng), t.u3, t.sign)
    sq = pms.build_square(bad)
    assert not pms.verify_compatibility(sq).passed
    # every context term is at most 1, so 6 is a maximum: the total moves only at second order
    summary = pms.scan_states(sq, 10, 10, seed=2)
    assert 1e-8 < 6 - summary.direct["max"] < 1e-4
    worse = pms.build_square(PmsTriple(t.u1, perturbed(t.u2, 0.1, rng), t.u3, t.sign))
    assert pms.scan_states(worse, 10, 10, seed=2).spread > 1e-3


def test_known_states(pauli_square):
    mixed = np.eye(4) / 4
    assert pms.expectation_re_x(pauli_square, mixed).total == pytest.approx(6, abs=1e-12)
    ket00 = np.array([1, 0, 0, 0], dtype=complex)
    rep = pms.expectation_re_x(pauli_square, ket00)
    assert rep.total == pytest.approx(6, abs=1e-12)
    assert rep.terms == pytest.approx({"R1": 1, "R2": 1, "R3": 1, "C1": 1, "C2": 1, "C3": -1}, abs=1e-12)


def test_phase_on_u3():
    t = pauli_triple()
    rho = la.random_density(4, 4, 9)
    # -u3 leaves U3⊗U3 untouched, so the square and its total are unchanged
    minus = pms.build_square(PmsTriple(t.u1, t.u2, -t.u3, t.sign))
    assert pms.expectation_re_x(minus, rho).total == pytest.approx(6, abs=1e-12)
    # i·u3 flips U3⊗U3, hence R3 and C3
    rot = pms.build_square(PmsTriple(t.u1, t.u2, 1j * t.u3, t.sign))
    rep = pms.expectation_re_x(rot, rho)
    assert rep.terms["R3"] == pytest.approx(-1, abs=1e-12)
    assert rep.terms["C3"] == pytest.approx(1, abs=1e-12)
    assert rep.total == pytest.approx(2, abs=1e-12)


def test_hermitian_parts_row_one(pauli_square):
    for k in range(3):
        _, im = pauli_square.hermitian_parts[0][k]
        assert la.max_norm(im) == 0.0


@pytest.mark.parametrize("name", ["pauli", "weyl4"])
def test_paths_agree_on_many_states(name, pauli_square, weyl4_square):
    sq = pauli_square if name == "pauli" else weyl4_square
    for s in range(100):
        state = la.haar_state(sq.dim, s) if name == "pauli" else la.random_density(sq.dim, sq.dim, s)
        a = pms.expectation_re_x(sq, state)
        b = pms.expectation_re_x_hermitian(sq, state)
        assert abs(a.total - b.total) <= 1e-9
        assert abs(a.im_total - b.im_total) <= 1e-9


def test_product_path_agrees_with_dense(weyl4_square):
    a = la.haar_state(4, 1)
    b = la.haar_state(4, 2)
    fast = pms.expectation_re_x_product(weyl4_square, a, b)
    slow = pms.expectation_re_x(weyl4_square, np.kron(a, b))
    assert fast.total == pytest.approx(slow.total, abs=1e-12)
    for k in fast.terms:
        assert fast.terms[k] == pytest.approx(slow.terms[k], abs=1e-12)


def test_state_dimension_checked(pauli_square):
    with pytest.raises(ValueError):
        pms.expectation_re_x(pauli_square, la.haar_state(3, 0))


def test_scan_examples(pauli_square):
    s = pms.scan_states(pauli_square, 50, 20, seed=0)
    assert len(s.records) == 70
    assert abs(s.direct["min"] - 6) <= 1e-9 and abs(s.direct["max"] - 6) <= 1e-9
    assert s.spread <= 1e-9 and s.max_path_gap <= 1e-9
    spin32 = pms.build_square(spin_rotation_triple(SpinParams(3)))
    s = pms.scan_states(spin32, 50, 20, seed=0)
    assert abs(s.direct["mean"] - 6) <= 1e-9 and s.spread <= 1e-9


def test_scan_is_thread_independent(weyl4_square):
    a = pms.scan_states(weyl4_square, 8, 4, seed=3, threads=1).as_dict()
    b = pms.scan_states(weyl4_square, 8, 4, seed=3, threads=4).as_dict()
    assert a == b


def test_report_bounds(pauli_square):
    d = pms.expectation_re_x(pauli_square, np.eye(4) / 4).as_dict()
    assert d["bound_noncontextual"] == pytest.approx(3 * math.sqrt(3))
    assert d["bound_quantum_max"] == 6
    assert d["path"] == "direct"


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([1, -1]))
def test_any_state_reaches_six(seed, sign):
    sq = pms.build_square(pauli_triple() if sign == -1 else weyl_triple(WeylParams(2)))
    rho = la.random_density(4, int(np.random.default_rng(seed).integers(1, 5)), seed)
    assert pms.expectation_re_x(sq, rho).total == pytest.approx(6, abs=1e-9)
    assert pms.expectation_re_x_hermitian(sq, rho).total == pytest.approx(6, abs=1e-9)


@pytest.mark.parametrize("factory", [pauli_triple, lambda: weyl_triple(WeylParams(4)),
                                     lambda: spin_rotation_triple(SpinParams(3))])
def test_hermitian_parts_normalized(factory):
    sq = pms.build_square(factory())
    eye = np.eye(sq.dim)
    for row in sq.hermitian_parts:
        for re, im in row:
            assert la.max_norm(re @ re + im @ im - eye) <= 1e-10
