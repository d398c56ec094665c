"""Example operator families that complete to Peres-Mermin triples.

Finite families (qubit Paulis, half-integer spin rotations by π, block parity
pseudospins, qudit clock/shift) yield exact :class:`PmsTriple` objects.
Phase-space displacements live in an infinite-dimensional space; here they
are truncated to a Fock cutoff and returned as an :class:`ApproxTriple`
carrying truncation diagnostics.

Displacements are parametrized by ``α``; in position/momentum units the shift
is ``ν = √2 Re α``, ``μ = √2 Im α``.
"""

from __future__ import annotations

import cmath
import math
import re
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .exceptions import RefusalError
from .spectral import PmsTriple, complete_triple, pairing_of

TRIANGLE_TOL = 1e-10


@dataclass(frozen=True)
class SpinParams:
    two_s: int
    t1: float = math.pi
    t2: float = math.pi
    t3: float = math.pi

    def __post_init__(self):
        if self.two_s < 1:
            raise ValueError("two_s must be at least 1")

    @property
    def dim(self) -> int:
        return self.two_s + 1


@dataclass(frozen=True)
class FockParams:
    cutoff: int
    alpha1: complex
    alpha2: complex

    def __post_init__(self):
        if self.cutoff < 8:
            raise ValueError("cutoff must be at least 8")


@dataclass(frozen=True)
class WeylParams:
    d: int

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("d must be at least 2")


def pauli_triple() -> PmsTriple:
    """``(σx, σz, σy)``; the square built from it is the textbook Pauli square."""
    return complete_triple(la.SIGMA_X, la.SIGMA_Z, sign=-1)


def spin_matrices(two_s: int):
    """``(Sx, Sy, Sz)`` for spin ``S = two_s/2`` in the basis ``m = S, S-1, ..., -S``."""
    s = two_s / 2
    m = s - np.arange(two_s + 1)
    sz = np.diag(m).astype(complex)
    # <m+1| S+ |m> sits just above the diagonal
    sp = np.diag(np.sqrt(s * (s + 1) - m[1:] * (m[1:] + 1)), k=1).astype(complex)
    sm = la.adjoint(sp)
    return (sp + sm) / 2, (sp - sm) / 2j, sz


def spin_rotation_triple(p: SpinParams, sign: int = 1) -> PmsTriple:
    """Triple from rotations by π about x and y for a half-integer spin.

    ``u1 = exp(iπSx)``, ``u2 = exp(iπSy)``, ``u3`` completed from them. The
    residuals record ``z_phase``, the phase ``φ`` with ``exp(iπSz) = e^{iφ} u3``.
    """
    for name, t in (("t1", p.t1), ("t2", p.t2), ("t3", p.t3)):
        if not math.isclose(t, math.pi, rel_tol=0.0, abs_tol=1e-12):
            raise RefusalError(
                f"{name} = {t!r}: the eigenvalues exp(i(S+1-b)t) of a spin rotation pair "
                f"up as ±λ only for t = π"
            )
    sx, sy, sz = spin_matrices(p.two_s)
    if p.two_s % 2 == 0:
        rz = la.expm_i_hermitian(sz, math.pi)
        _, verdict = pairing_of(rz)
        raise RefusalError(
            f"integer spin S = {p.two_s // 2}: exp(iπSz) has no anti-commuting partner: {verdict.defect}",
            verdict,
        )
    u1 = la.expm_i_hermitian(sx, math.pi)
    u2 = la.expm_i_hermitian(sy, math.pi)
    triple = complete_triple(u1, u2, sign)
    rz = la.expm_i_hermitian(sz, math.pi)
    # exp(iπSz) and u3 agree up to a global phase; record it
    k = np.argmax(np.abs(triple.u3.ravel()))
    phase = cmath.phase(rz.ravel()[k] / triple.u3.ravel()[k])
    triple.residuals["z_phase"] = phase
    triple.residuals["z_phase_residual"] = la.max_norm(rz - cmath.exp(1j * phase) * triple.u3)
    return triple


def parity_pseudospin_triple(num_blocks: int, sign: int = 1) -> PmsTriple:
    """Truncated parity ``(-1)^n = ⊕σz`` with partners ``⊕σx`` and ``⊕σy`` on ``2·num_blocks`` Fock levels."""
    if num_blocks < 1:
        raise ValueError("num_blocks must be at least 1")
    pz = la.direct_sum([la.SIGMA_Z] * num_blocks)
    px = la.direct_sum([la.SIGMA_X] * num_blocks)
    return complete_triple(pz, px, sign)


def clock_shift(d: int):
    """Clock ``Z|k> = ω^k|k>`` and shift ``X|k> = |k+1 mod d>`` with ``ω = e^{2πi/d}``."""
    omega = np.exp(2j * np.pi * np.arange(d) / d)
    z = np.diag(omega)
    x = np.roll(np.eye(d, dtype=complex), 1, axis=0)
    return z, x


def weyl_triple(p: WeylParams, sign: int = 1) -> PmsTriple:
    """``(Z^{d/2}, X, ·)`` for even ``d``; odd ``d`` is refused with the pairing defect of ``X``."""
    d = p.d
    z, x = clock_shift(d)
    if d % 2:
        _, verdict = pairing_of(x)
        raise RefusalError(
            f"odd dimension d = {d}: the shift operator has no negation-paired spectrum: {verdict.defect}",
            verdict,
        )
    u1 = np.linalg.matrix_power(z, d // 2)
    return complete_triple(u1, x, sign)


def annihilation(cutoff: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, cutoff)), k=1).astype(complex)


def displacement(alpha: complex, cutoff: int) -> np.ndarray:
    """Truncated ``D(α) = exp(α a^† - α* a)``, exponentiated after truncating the generator."""
    a = annihilation(cutoff)
    gen = alpha * la.adjoint(a) - np.conj(alpha) * a
    return la.expm_i_hermitian(-1j * gen, 1.0)


def coherent_state(beta: complex, cutoff: int, levels: int | None = None) -> np.ndarray:
    """Coherent state amplitudes on the first ``levels`` Fock states, renormalized."""
    levels = cutoff if levels is None else levels
    n = np.arange(levels)
    logf = np.array([math.lgamma(k + 1) for k in n])
    amp = np.zeros(cutoff, dtype=complex)
    if beta == 0:
        amp[0] = 1.0
    else:
        amp[:levels] = np.exp(n * np.log(complex(beta)) - 0.5 * logf)
    return amp / np.linalg.norm(amp)


def fock_state(n: int, cutoff: int) -> np.ndarray:
    v = np.zeros(cutoff, dtype=complex)
    v[n] = 1.0
    return v


def triangle_check(a1: complex, a2: complex, a3: complex, tol: float = TRIANGLE_TOL) -> bool:
    """True iff ``Im(α_i α_j*) = ±π/2`` for every pair and ``α1 + α2 + α3 = 0``, within ``tol``."""
    a = (complex(a1), complex(a2), complex(a3))
    if abs(a[0] + a[1] + a[2]) > tol:
        return False
    for i, j in ((0, 1), (1, 2), (0, 2)):
        if abs(abs((a[i] * a[j].conjugate()).imag) - math.pi / 2) > tol:
            return False
    return True


# test vectors for the truncation diagnostics
TEST_COHERENT = (0.5, 1.0, 1.5, 1.5j, -1.0 + 1.0j, 1.06 - 1.06j)
TEST_FOCK_LEVELS = 5


def low_energy_states(cutoff: int):
    """Vacuum, coherent states with ``|β| <= 1.5`` and the first Fock states, all on levels ``< cutoff/2``."""
    half = cutoff // 2
    states = [("vacuum", fock_state(0, cutoff))]
    states += [(f"coherent({b})", coherent_state(b, cutoff, half)) for b in TEST_COHERENT]
    states += [(f"fock({n})", fock_state(n, cutoff)) for n in range(1, TEST_FOCK_LEVELS)]
    return states


@dataclass
class ApproxTriple:
    """Truncated displacement triple; the triple relations hold only away from the cutoff."""

    u1: np.ndarray
    u2: np.ndarray
    u3: np.ndarray
    sign: int
    alphas: tuple
    cutoff: int
    quality: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.cutoff

    def operators(self):
        return (self.u1, self.u2, self.u3)

    def as_triple(self) -> PmsTriple:
        return PmsTriple(self.u1, self.u2, self.u3, self.sign, dict(self.quality))


def truncation_quality(u1, u2, u3, sign: int, cutoff: int) -> dict:
    """Residuals of the triple relations, applied to low-energy test states only."""
    d = cutoff
    worst_anti = worst_prod = 0.0
    for _, psi in low_energy_states(cutoff):
        for a, b in ((u1, u2), (u1, u3), (u2, u3)):
            worst_anti = max(worst_anti, float(np.linalg.norm(a @ (b @ psi) + b @ (a @ psi))))
        worst_prod = max(worst_prod, float(np.linalg.norm(u1 @ (u2 @ (u3 @ psi)) - sign * 1j * psi)))
    return {
        "unitarity": max(la.unitarity_residual(u) for u in (u1, u2, u3)),
        "low_energy_anticommutator": worst_anti,
        "low_energy_product": worst_prod,
        "full_anticommutator_12": la.max_norm(la.anticommutator(u1, u2)),
        "test_subspace_levels": d // 2,
    }


def fock_displacement_triple(p: FockParams) -> ApproxTriple:
    """Truncated displacements ``D(α1)``, ``D(α2)``, ``D(α3)`` with ``α3 = -α1 - α2``.

    Requires ``Im(α1 α2*) = ±π/2``; the sign of that imaginary part is the
    sign branch of ``D3 = ±i D2^† D1^†``.
    """
    a1, a2 = complex(p.alpha1), complex(p.alpha2)
    area = (a1 * a2.conjugate()).imag
    if abs(abs(area) - math.pi / 2) > TRIANGLE_TOL:
        raise RefusalError(
            f"Im(α1 α2*) = {area:.12g}; displacements anti-commute only for "
            "Im(α_i α_j*) = ±π/2 with α1 + α2 + α3 = 0"
        )
    a3 = -a1 - a2
    biggest = max(abs(a1), abs(a2), abs(a3)) ** 2
    if biggest > p.cutoff / 4:
        warnings.warn(f"|α|² = {biggest:.3g} exceeds cutoff/4 = {p.cutoff / 4:.3g}; truncation errors will be large",
                      RuntimeWarning, stacklevel=2)
    sign = 1 if area > 0 else -1
    u1, u2, u3 = (displacement(a, p.cutoff) for a in (a1, a2, a3))
    quality = truncation_quality(u1, u2, u3, sign, p.cutoff)
    return ApproxTriple(u1, u2, u3, sign, (a1, a2, a3), p.cutoff, quality)


REFERENCE_ALPHAS = (math.sqrt(math.pi / 2), 1j * math.sqrt(math.pi / 2))


def fock_violation(approx: ApproxTriple, betas=(0.0,) + TEST_COHERENT):
    """Direct-path ``Re X`` on product coherent states ``|β>⊗|β>``, one report per ``β``."""
    from .pms import build_square, expectation_re_x_product

    square = build_square(approx.as_triple())
    half = approx.cutoff // 2
    out = []
    for b in betas:
        psi = coherent_state(b, approx.cutoff, half)
        out.append(expectation_re_x_product(square, psi, psi, {"kind": "coherent", "beta": [complex(b).real, complex(b).imag]}))
    return out


_NAME = re.compile(r"^(pauli|spin|parity|weyl|fock)(?::(.*))?$")


def from_name(name: str, sign: int | None = None):
    """Resolve a catalog name.

    Names are ``pauli``, ``spin:<two_s>``, ``parity:<blocks>``, ``weyl:<d>`` and
    ``fock:<re1>,<im1>,<re2>,<im2>,<cutoff>``. Returns a :class:`PmsTriple`, or
    an :class:`ApproxTriple` for ``fock``.
    """
    m = _NAME.match(name.strip())
    if not m:
        raise ValueError(f"unknown catalog name {name!r}")
    kind, arg = m.group(1), m.group(2)
    kw = {} if sign is None else {"sign": sign}
    try:
        if kind == "pauli":
            if arg:
                raise ValueError("pauli takes no argument")
            return pauli_triple()
        if kind == "spin":
            return spin_rotation_triple(SpinParams(int(arg)), **kw)
        if kind == "parity":
            return parity_pseudospin_triple(int(arg), **kw)
        if kind == "weyl":
            return weyl_triple(WeylParams(int(arg)), **kw)
        parts = [x.strip() for x in arg.split(",")]
        if len(parts) != 5:
            raise ValueError("fock needs <re1>,<im1>,<re2>,<im2>,<cutoff>")
        re1, im1, re2, im2 = (float(x) for x in parts[:4])
        return fock_displacement_triple(FockParams(int(parts[4]), complex(re1, im1), complex(re2, im2)))
    except (TypeError, AttributeError) as exc:
        raise ValueError(f"malformed catalog name {name!r}") from exc

