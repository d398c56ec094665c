"""Spectral pairing of unitaries and anti-commuting triples.

A unitary ``U1`` has an anti-commuting unitary partner exactly when its
spectrum is closed under ``λ -> -λ`` with matching multiplicities. This module
tests that condition, builds the partner explicitly when it holds, completes a
partner pair to a Peres-Mermin triple ``U3 = ±i U2^† U1^†`` and extracts the
block form ``U1 = ⊕ λ σz``, ``U2 = ⊕ λ' σx``, ``U3 = ±⊕ (λλ')* σy``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .exceptions import (
    AntiCommutationError,
    ClusteringAmbiguityError,
    ConvergenceError,
    PairingError,
)

PAIRING_TOL = 1e-8
TRIPLE_TOL = 1e-9

TWO_PI = 2.0 * math.pi


def _wrap(phase: float) -> float:
    """Map an angle into [-π, π)."""
    return (phase + math.pi) % TWO_PI - math.pi


def angular_distance(a: complex, b: complex) -> float:
    return abs(_wrap(cmath.phase(a) - cmath.phase(b)))


@dataclass(frozen=True)
class Cluster:
    value: complex
    multiplicity: int
    vectors: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class EigenClusters:
    """Eigenvalues of a unitary grouped on the unit circle.

    Clusters are ordered by the phase of their representative, taken in
    ``[-π, π)`` (so ``-1`` comes first).
    """

    clusters: tuple
    tol: float

    def __len__(self):
        return len(self.clusters)

    def __getitem__(self, i):
        return self.clusters[i]

    @property
    def dim(self) -> int:
        return sum(c.multiplicity for c in self.clusters)


def cluster_spectrum(decomp: la.SpectralDecomposition, tol: float = PAIRING_TOL) -> EigenClusters:
    """Greedy angular clustering of a unitary spectrum.

    Neighbouring phases (sorted, with wrap-around) within ``tol`` are merged;
    the representative is the normalized mean of the merged eigenvalues.
    Raises :class:`ClusteringAmbiguityError` when two resulting clusters are
    still within ``2 * tol`` of each other.
    """
    if not tol > 0:
        raise ValueError("clustering tolerance must be positive")
    lam = np.asarray(decomp.eigenvalues, dtype=complex)
    vecs = np.asarray(decomp.eigenvectors, dtype=complex)
    n = len(lam)
    if n == 0:
        return EigenClusters((), tol)

    phases = np.array([_wrap(cmath.phase(z)) for z in lam])
    order = np.argsort(phases, kind="stable")
    groups = [[order[0]]]
    for prev, cur in zip(order[:-1], order[1:]):
        if phases[cur] - phases[prev] <= tol:
            groups[-1].append(cur)
        else:
            groups.append([cur])
    # close the circle
    if len(groups) > 1 and phases[groups[0][0]] + TWO_PI - phases[groups[-1][-1]] <= tol:
        groups[0] = groups.pop() + groups[0]

    clusters = []
    for g in groups:
        mean = complex(np.sum(lam[g]))
        rep = mean / abs(mean) if abs(mean) > 0 else complex(lam[g[0]])
        clusters.append(Cluster(rep, len(g), vecs[:, g]))

    def key(c):
        ph = _wrap(cmath.phase(c.value))
        # -1 may come out with phase just below +π
        return -math.pi if ph > math.pi - tol else ph

    clusters.sort(key=key)
    for a, b in zip(clusters, clusters[1:] + clusters[:1]):
        if a is b:
            continue
        sep = angular_distance(a.value, b.value)
        if sep <= 2 * tol:
            raise ClusteringAmbiguityError(
                f"eigenvalue clusters at {a.value:.12g} and {b.value:.12g} are separated by "
                f"{sep:.3e}, within twice the clustering tolerance {tol:.1e}",
                sep,
            )
    return EigenClusters(tuple(clusters), tol)


@dataclass(frozen=True)
class PairingDefect:
    kind: str  # "missing_partner" or "multiplicity_mismatch"
    cluster: int
    value: complex
    multiplicity: int
    partner: int | None = None
    partner_multiplicity: int | None = None

    def __str__(self):
        if self.kind == "multiplicity_mismatch":
            return (
                f"multiplicity mismatch ({self.multiplicity} vs {self.partner_multiplicity}): "
                f"eigenvalue {_fmt(self.value)} has multiplicity {self.multiplicity}, "
                f"its negative has {self.partner_multiplicity}"
            )
        return f"−1·λ absent for λ = {_fmt(self.value)} (multiplicity {self.multiplicity})"


def _fmt(z: complex) -> str:
    z = complex(round(z.real, 12) + 0.0, round(z.imag, 12) + 0.0)
    return f"{z.real:.12g}{z.imag:+.12g}i"


@dataclass(frozen=True)
class PairingVerdict:
    paired: bool
    pairs: tuple
    defects: tuple = ()

    @property
    def defect(self):
        """The first violated condition, or ``None`` when paired."""
        return self.defects[0] if self.defects else None


def check_pairing(clusters: EigenClusters, tol: float | None = None) -> PairingVerdict:
    """Test whether every cluster ``(λ, K)`` has a distinct partner ``(-λ, K)``."""
    tol = clusters.tol if tol is None else tol
    cl = clusters.clusters
    pairs, defects = [], []
    for i, c in enumerate(cl):
        target = -c.value
        best, dist = None, math.inf
        for j, other in enumerate(cl):
            if j == i:
                continue
            d = angular_distance(other.value, target)
            if d < dist:
                best, dist = j, d
        if best is None or dist > tol:
            defects.append(PairingDefect("missing_partner", i, c.value, c.multiplicity))
        elif cl[best].multiplicity != c.multiplicity:
            defects.append(
                PairingDefect(
                    "multiplicity_mismatch", i, c.value, c.multiplicity,
                    best, cl[best].multiplicity,
                )
            )
        elif i < best:
            pairs.append((i, best))
    return PairingVerdict(not defects, tuple(pairs), tuple(defects))


def pairing_of(u1, tol: float = PAIRING_TOL):
    """Decompose, cluster and pair ``u1`` in one go; returns ``(clusters, verdict)``."""
    clusters = cluster_spectrum(la.eig_unitary(u1), tol)
    return clusters, check_pairing(clusters)


def _plus_minus(clusters: EigenClusters, pair, tol: float):
    """Order a pair so that the first member has the smaller phase in [0, 2π)."""

    def phase(c):
        ph = cmath.phase(c.value) % TWO_PI
        return 0.0 if ph > TWO_PI - tol else ph

    a, b = (clusters[i] for i in pair)
    return (a, b) if phase(a) <= phase(b) else (b, a)


def construct_partner(u1, lambda_primes="default", tol: float = PAIRING_TOL) -> np.ndarray:
    """Build a unitary ``U2`` with ``{U1, U2} = 0``.

    For each paired eigenvalue ``±λ_i`` with eigenvectors ``e±_ij``, ``U2`` maps
    ``e+_ij -> λ'_i e-_ij`` and ``e-_ij -> λ'_i e+_ij``. ``lambda_primes`` is a
    list of unit-modulus numbers, one per pair, or ``"default"`` for all ones.
    Raises :class:`PairingError` when the spectrum is not negation-paired.
    """
    u1 = la.as_matrix(u1)
    clusters, verdict = pairing_of(u1, tol)
    if not verdict.paired:
        raise PairingError(verdict)

    npairs = len(verdict.pairs)
    if isinstance(lambda_primes, str):
        if lambda_primes != "default":
            raise ValueError(f"unknown lambda_primes {lambda_primes!r}")
        lambda_primes = [1.0] * npairs
    lambda_primes = [complex(x) for x in lambda_primes]
    if len(lambda_primes) != npairs:
        raise ValueError(f"need {npairs} lambda_primes (one per eigenvalue pair), got {len(lambda_primes)}")
    for lp in lambda_primes:
        if abs(abs(lp) - 1.0) > 1e-12:
            raise ValueError(f"lambda_primes must have unit modulus, got {lp}")

    d = u1.shape[0]
    u2 = np.zeros((d, d), dtype=complex)
    for pair, lp in zip(verdict.pairs, lambda_primes):
        plus, minus = _plus_minus(clusters, pair, tol)
        ep, em = plus.vectors, minus.vectors
        u2 += lp * (em @ la.adjoint(ep) + ep @ la.adjoint(em))

    res = la.max_norm(la.anticommutator(u1, u2))
    if res > TRIPLE_TOL:
        raise AntiCommutationError("constructed partner does not anti-commute", res)
    ures = la.unitarity_residual(u2)
    if ures > la.UNITARITY_TOL:
        raise ConvergenceError("constructed partner is not unitary", ures)
    return u2


@dataclass
class PmsTriple:
    """Three unitaries intended to satisfy ``{Ui, Uj} = 0`` (i≠j) and ``U1 U2 U3 = sign·i``.

    Construction does not validate; use :func:`complete_triple` or
    :func:`triple_residuals`.
    """

    u1: np.ndarray
    u2: np.ndarray
    u3: np.ndarray
    sign: int = 1
    residuals: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.u1.shape[0]

    def operators(self):
        return (self.u1, self.u2, self.u3)


def triple_residuals(u1, u2, u3, sign: int) -> dict:
    d = u1.shape[0]
    return {
        "unitarity": max(la.unitarity_residual(u) for u in (u1, u2, u3)),
        "anticommutator_12": la.max_norm(la.anticommutator(u1, u2)),
        "anticommutator_13": la.max_norm(la.anticommutator(u1, u3)),
        "anticommutator_23": la.max_norm(la.anticommutator(u2, u3)),
        "product": la.max_norm(u1 @ u2 @ u3 - sign * 1j * la.identity(d)),
    }


def complete_triple(u1, u2, sign: int = 1, tol: float = TRIPLE_TOL) -> PmsTriple:
    """Complete an anti-commuting pair with ``U3 = sign·i·U2^† U1^†``."""
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    u1 = la.as_matrix(u1)
    u2 = la.as_matrix(u2)
    if u1.shape != u2.shape or u1.shape[0] != u1.shape[1]:
        raise ValueError(f"u1 and u2 must be square with equal shapes, got {u1.shape} and {u2.shape}")
    pre = la.max_norm(la.anticommutator(u1, u2))
    if pre > tol:
        raise AntiCommutationError("u1 and u2 do not anti-commute", pre)
    u3 = sign * 1j * la.adjoint(u2) @ la.adjoint(u1)
    res = triple_residuals(u1, u2, u3, sign)
    worst = max(res.values())
    if worst > tol:
        raise AntiCommutationError("completed triple violates its invariants", worst)
    if u1.shape[0] % 2:
        raise AntiCommutationError("anti-commuting unitaries need even dimension", math.inf)
    return PmsTriple(u1, u2, u3, sign, res)


@dataclass(frozen=True)
class AlgebraReport:
    """Residuals of the commutation and anti-commutation relations of a triple.

    ``commutator`` maps each branch ``b = ±1`` to
    ``max_{i≠j} |[Ui, Uj] - b·2i·ε_ijk·Uk^†|``; the matched branch is the
    smaller one. ``anticommutator`` is ``max_{i,j} |{Ui, Uj} - 2δ_ij Ui²|``
    (the diagonal terms hold identically). ``product`` is
    ``|U1 U2 U3 - sign·i|`` against the triple's declared sign.
    """

    commutator: dict
    branch: int
    anticommutator: float
    anticommutator_pairs: dict
    product: float
    sign: int
    tol: float

    @property
    def commutator_residual(self) -> float:
        return self.commutator[self.branch]

    @property
    def sign_consistent(self) -> bool:
        return self.branch == self.sign

    @property
    def passed(self) -> bool:
        return max(self.commutator_residual, self.anticommutator, self.product) <= self.tol

    def as_dict(self) -> dict:
        return {
            "commutator_plus": self.commutator[1],
            "commutator_minus": self.commutator[-1],
            "branch": self.branch,
            "anticommutator": self.anticommutator,
            "anticommutator_pairs": dict(self.anticommutator_pairs),
            "product": self.product,
            "sign": self.sign,
            "tol": self.tol,
            "passed": self.passed,
        }


_CYCLIC = {(0, 1): 2, (1, 2): 0, (2, 0): 1}


def verify_algebra(triple: PmsTriple, tol: float = TRIPLE_TOL) -> AlgebraReport:
    ops = triple.operators()
    d = triple.dim
    comm = {}
    for branch in (1, -1):
        worst = 0.0
        for i in range(3):
            for j in range(3):
                if i == j:
                    continue
                if (i, j) in _CYCLIC:
                    k, eps = _CYCLIC[(i, j)], 1
                else:
                    k, eps = _CYCLIC[(j, i)], -1
                target = branch * 2j * eps * la.adjoint(ops[k])
                worst = max(worst, la.max_norm(la.commutator(ops[i], ops[j]) - target))
        comm[branch] = worst
    branch = 1 if comm[1] <= comm[-1] else -1

    anti = {}
    for i in range(3):
        for j in range(i, 3):
            expected = 2 * ops[i] @ ops[i] if i == j else 0
            anti[f"{i + 1}{j + 1}"] = la.max_norm(la.anticommutator(ops[i], ops[j]) - expected)
    product = la.max_norm(ops[0] @ ops[1] @ ops[2] - triple.sign * 1j * la.identity(d))
    return AlgebraReport(comm, branch, max(anti.values()), anti, product, triple.sign, tol)


@dataclass(frozen=True)
class CanonicalForm:
    """Basis ``V`` in which the triple is ``⊕λσz``, ``⊕λ'σx``, ``sign·⊕(λλ')*σy``.

    Block ``i`` holds ``K_i`` copies of a 2x2 Pauli block with coefficients
    ``lambdas[i]`` and ``lambda_primes[i]``. Blocks sharing ``λ`` but with
    different ``λ'`` are listed separately. Columns of ``V`` alternate
    ``e+``, ``U2 e+ / λ'``.
    """

    basis: np.ndarray
    lambdas: tuple
    lambda_primes: tuple
    block_multiplicities: tuple
    sign: int
    residuals: dict = field(default_factory=dict)

    @property
    def N(self) -> int:
        return len(self.lambdas)

    @property
    def dim(self) -> int:
        return 2 * sum(self.block_multiplicities)

    def block_operators(self):
        """The triple in the canonical basis."""
        u1, u2, u3 = [], [], []
        for lam, lp, k in zip(self.lambdas, self.lambda_primes, self.block_multiplicities):
            for _ in range(k):
                u1.append(lam * la.SIGMA_Z)
                u2.append(lp * la.SIGMA_X)
                u3.append(self.sign * np.conj(lam * lp) * la.SIGMA_Y)
        return la.direct_sum(u1), la.direct_sum(u2), la.direct_sum(u3)

    def reconstruct(self):
        """Conjugate the block operators back: ``V B V^†`` for each of the three."""
        v = self.basis
        return tuple(v @ b @ la.adjoint(v) for b in self.block_operators())


def _principal_sqrt(z: complex, tol: float = PAIRING_TOL) -> complex:
    # phases within tol of -π are taken as +π so the branch does not flip on rounding
    phase = cmath.phase(z)
    if phase < -math.pi + tol:
        phase += TWO_PI
    return cmath.exp(0.5j * phase)


def canonical_form(triple: PmsTriple, tol: float = PAIRING_TOL) -> CanonicalForm:
    """Extract the block structure of a valid triple.

    Within each ``+λ`` eigenspace ``E`` of ``U1`` the operator ``E^† U2² E`` is
    unitary; its eigenvectors ``e+`` fix the basis and its eigenvalues ``μ``
    give ``λ' = sqrt(μ)`` (principal branch). The partner column is
    ``U2 e+ / λ'``, which locks the relative phase.
    """
    u1, u2 = triple.u1, triple.u2
    clusters, verdict = pairing_of(u1, tol)
    if not verdict.paired:
        raise PairingError(verdict)

    u2sq = u2 @ u2
    columns, lambdas, lprimes, mults = [], [], [], []
    for pair in verdict.pairs:
        plus, _ = _plus_minus(clusters, pair, tol)
        e = plus.vectors
        w = la.adjoint(e) @ u2sq @ e
        sub = cluster_spectrum(la.eig_unitary(w, tol=1e-8), tol)
        for c in sub:
            lp = _principal_sqrt(c.value)
            ep = e @ c.vectors
            f = (u2 @ ep) / lp
            for j in range(c.multiplicity):
                columns.extend([ep[:, j], f[:, j]])
            lambdas.append(plus.value)
            lprimes.append(lp)
            mults.append(c.multiplicity)

    v = np.column_stack(columns)
    cf = CanonicalForm(v, tuple(lambdas), tuple(lprimes), tuple(mults), triple.sign)
    rec = cf.reconstruct()
    residuals = {
        "basis_unitarity": la.unitarity_residual(v),
        "u1": la.max_norm(rec[0] - triple.u1),
        "u2": la.max_norm(rec[1] - triple.u2),
        "u3": la.max_norm(rec[2] - triple.u3),
    }
    assert cf.dim == triple.dim
    return CanonicalForm(v, cf.lambdas, cf.lambda_primes, cf.block_multiplicities, cf.sign, residuals)
