import math
import warnings

import numpy as np
import pytest

from contextlab import catalog as cat
from contextlab import linalg as la
from contextlab import pms, spectral
from contextlab.exceptions import RefusalError

X, Y, Z = la.SIGMA_X, la.SIGMA_Y, la.SIGMA_Z
A = math.sqrt(math.pi / 2)


def test_pauli_examples():
    t = cat.pauli_triple()
    assert la.max_norm(t.u3 - Y) < 1e-15
    s = pms.scan_states(pms.build_square(t), 10, 5, seed=0)
    assert abs(s.direct["mean"] - 6) < 1e-12
    cf = spectral.canonical_form(t)
    assert cf.N == 1 and cf.block_multiplicities == (1,)


def test_spin_half_is_i_sigma():
    t = cat.spin_rotation_triple(cat.SpinParams(1))
    assert la.max_norm(t.u1 - 1j * X) < 1e-14
    assert la.max_norm(t.u2 - 1j * Y) < 1e-14
    assert la.max_norm(la.anticommutator(t.u1, t.u2)) < 1e-14
    # exp(iπSz) = iσz differs from the completed u3 by a global phase of -π/2
    assert t.residuals["z_phase"] == pytest.approx(-math.pi / 2, abs=1e-12)
    assert t.residuals["z_phase_residual"] < 1e-14


@pytest.mark.parametrize("two_s,defect", [(2, "(2 vs 1)"), (4, "(2 vs 3)"), (6, "(4 vs 3)")])
def test_integer_spin_refused(two_s, defect):
    with pytest.raises(RefusalError) as exc:
        cat.spin_rotation_triple(cat.SpinParams(two_s))
    assert exc.value.verdict.defect.kind == "multiplicity_mismatch"
    assert defect in str(exc.value)


@pytest.mark.parametrize("two_s", [1, 3, 5])
def test_half_integer_spin_valid(two_s):
    t = cat.spin_rotation_triple(cat.SpinParams(two_s))
    assert t.dim == two_s + 1
    assert spectral.verify_algebra(t).passed


def test_spin_angle_other_than_pi_refused():
    with pytest.raises(RefusalError, match="t = π"):
        cat.spin_rotation_triple(cat.SpinParams(1, t1=1.0))


def test_spin_matrices_commutation():
    sx, sy, sz = cat.spin_matrices(3)
    assert la.max_norm(la.commutator(sx, sy) - 1j * sz) < 1e-14
    assert la.max_norm(sx @ sx + sy @ sy + sz @ sz - 1.5 * 2.5 * np.eye(4)) < 1e-13


def test_parity_examples():
    t1 = cat.parity_pseudospin_triple(1)
    assert la.max_norm(t1.u1 - Z) == 0 and la.max_norm(t1.u2 - X) == 0
    t8 = cat.parity_pseudospin_triple(8)
    assert t8.dim == 16 and max(t8.residuals.values()) == 0.0
    cf = spectral.canonical_form(t8)
    assert cf.N == 1 and cf.block_multiplicities == (8,)


def test_weyl_examples():
    t2 = cat.weyl_triple(cat.WeylParams(2))
    assert la.max_norm(t2.u1 - Z) < 1e-15 and la.max_norm(t2.u2 - X) == 0
    t4 = cat.weyl_triple(cat.WeylParams(4))
    z, x = cat.clock_shift(4)
    z2 = z @ z
    assert la.max_norm(z2 @ x + x @ z2) < 1e-15
    s = pms.scan_states(pms.build_square(t4), 20, 10, seed=0)
    assert s.spread <= 1e-9


@pytest.mark.parametrize("d", [3, 5, 7, 9])
def test_odd_weyl_refused(d):
    with pytest.raises(RefusalError) as exc:
        cat.weyl_triple(cat.WeylParams(d))
    assert exc.value.verdict.defect.kind == "missing_partner"


def test_clock_shift_relation():
    z, x = cat.clock_shift(5)
    w = np.exp(2j * math.pi / 5)
    assert la.max_norm(z @ x - w * x @ z) < 1e-14


def test_displacement_is_unitary_and_shifts():
    d = cat.displacement(0.7 - 0.2j, 40)
    assert la.unitarity_residual(d) < 1e-10
    vac = cat.fock_state(0, 40)
    coh = cat.coherent_state(0.7 - 0.2j, 40)
    assert np.linalg.norm(d @ vac - coh) < 1e-8


def test_reference_triangle():
    a1, a2 = cat.REFERENCE_ALPHAS
    assert (a1 * a2.conjugate()).imag == pytest.approx(-math.pi / 2)
    a3 = -a1 - a2
    assert a3 == pytest.approx(-A * (1 + 1j))
    assert cat.triangle_check(a1, a2, a3)
    assert not cat.triangle_check(0, 0, 0)
    for p in [(a2, a3, a1), (a3, a1, a2), (a2, a1, a3)]:
        assert cat.triangle_check(*p)


def test_fock_refuses_bad_area():
    with pytest.raises(RefusalError, match="±π/2"):
        cat.fock_displacement_triple(cat.FockParams(16, 1, 1))
    with pytest.raises(ValueError):
        cat.FockParams(4, *cat.REFERENCE_ALPHAS)


def test_fock_warns_for_large_alpha():
    a = 3.0
    with pytest.warns(RuntimeWarning):
        cat.fock_displacement_triple(cat.FockParams(8, a, 1j * math.pi / 2 / a))


def test_fock_vacuum_at_cutoff_64():
    approx = cat.fock_displacement_triple(cat.FockParams(64, *cat.REFERENCE_ALPHAS))
    assert approx.sign == -1
    vac = cat.fock_violation(approx, betas=(0.0,))[0]
    assert vac.total == pytest.approx(6, abs=1e-3)
    assert approx.quality["unitarity"] < 1e-10


@pytest.mark.parametrize("name,dim", [("pauli", 2), ("spin:3", 4), ("parity:2", 4), ("weyl:6", 6)])
def test_from_name(name, dim):
    assert cat.from_name(name).dim == dim


@pytest.mark.parametrize("bad", ["", "qutrit", "pauli:3", "spin:x", "fock:1,2"])
def test_from_name_rejects(bad):
    with pytest.raises(ValueError):
        cat.from_name(bad)


def test_from_name_fock():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        t = cat.from_name(f"fock:{A!r},0,0,{A!r},16")
    assert isinstance(t, cat.ApproxTriple) and t.cutoff == 16
