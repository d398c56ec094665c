"""The generalized Peres-Mermin square and its real-part witness.

The square is laid out as

    U1^†⊗1   1⊗U1^†   U1⊗U1
    1⊗U2^†   U2^†⊗1   U2⊗U2
    U1⊗U2    U2⊗U1    U3⊗U3

and the witness is ``Re X = R1 + R2 + R3 + C1 + C2 - C3`` with ``Rj`` (``Ck``)
the real part of the ordered product along row ``j`` (column ``k``). It is
evaluated either directly from the products or through the Hermitian parts
``A = A^R + i A^I`` of every entry.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import linalg as la
from .spectral import PmsTriple

CONTEXTS = {
    "R1": ((0, 0), (0, 1), (0, 2)),
    "R2": ((1, 0), (1, 1), (1, 2)),
    "R3": ((2, 0), (2, 1), (2, 2)),
    "C1": ((0, 0), (1, 0), (2, 0)),
    "C2": ((0, 1), (1, 1), (2, 1)),
    "C3": ((0, 2), (1, 2), (2, 2)),
}
# Coefficient of each context in Re X; also the value its product must take.
CONTEXT_SIGNS = {"R1": 1, "R2": 1, "R3": 1, "C1": 1, "C2": 1, "C3": -1}

QUANTUM_MAX = 6.0
PHASE_BOUND = 3.0 * math.sqrt(3.0)
DICHOTOMIC_BOUND = 4


def _threads(threads):
    if threads is not None:
        return max(1, int(threads))
    try:
        return max(1, int(os.environ.get("CONTEXTLAB_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class PmsSquare:
    """Nine operators on a bipartite space.

    ``factors[j][k]`` holds ``(left, right)`` with ``A_jk = left ⊗ right`` when
    the square was built from a triple; dense ``entries`` are formed on demand.
    """

    factors: list | None = None
    triple: PmsTriple | None = None
    local_dim: int | None = None
    _entries: list | None = field(default=None, repr=False)

    @classmethod
    def from_entries(cls, entries) -> "PmsSquare":
        grid = [[la.as_matrix(entries[j][k]) for k in range(3)] for j in range(3)]
        return cls(_entries=grid)

    @cached_property
    def entries(self):
        if self._entries is not None:
            return self._entries
        return [[la.tensor(*self.factors[j][k]) for k in range(3)] for j in range(3)]

    @property
    def dim(self) -> int:
        if self._entries is not None:
            return self._entries[0][0].shape[0]
        return self.local_dim ** 2

    def entry(self, j: int, k: int) -> np.ndarray:
        return self.entries[j][k]

    @cached_property
    def context_products(self) -> dict:
        out = {}
        for name, ctx in CONTEXTS.items():
            a, b, c = (self.entry(*jk) for jk in ctx)
            out[name] = a @ b @ c
        return out

    @cached_property
    def hermitian_parts(self):
        """``(A^R, A^I)`` for every entry, with ``A^R = (A+A^†)/2`` and ``A^I = (A-A^†)/2i``."""
        parts = []
        for j in range(3):
            row = []
            for k in range(3):
                a = self.entry(j, k)
                ad = la.adjoint(a)
                row.append((0.5 * (a + ad), (a - ad) / 2j))
            parts.append(row)
        return parts

    @cached_property
    def hermitian_terms(self) -> dict:
        """Real- and imaginary-part operators of each context, expanded in Hermitian parts."""
        out = {}
        hp = self.hermitian_parts
        for name, ctx in CONTEXTS.items():
            (r1, i1), (r2, i2), (r3, i3) = (hp[j][k] for j, k in ctx)
            re_pair = r1 @ r2 - i1 @ i2
            im_pair = i1 @ r2 + r1 @ i2
            out[name] = (re_pair @ r3 - im_pair @ i3, im_pair @ r3 + re_pair @ i3)
        return out


def build_square(triple: PmsTriple) -> PmsSquare:
    u1, u2, u3 = triple.u1, triple.u2, triple.u3
    one = la.identity(triple.dim)
    u1d, u2d = la.adjoint(u1), la.adjoint(u2)
    factors = [
        [(u1d, one), (one, u1d), (u1, u1)],
        [(one, u2d), (u2d, one), (u2, u2)],
        [(u1, u2), (u2, u1), (u3, u3)],
    ]
    return PmsSquare(factors=factors, triple=triple, local_dim=triple.dim)


@dataclass(frozen=True)
class CompatibilityReport:
    residuals: dict
    tol: float

    @property
    def passed(self) -> bool:
        return all(r <= self.tol for r in self.residuals.values())

    @property
    def worst(self) -> float:
        return max(self.residuals.values())

    def as_dict(self):
        return {"residuals": dict(self.residuals), "tol": self.tol, "passed": self.passed}


def _kron_diff_max(x1, y1, x2, y2) -> float:
    """``max |x1⊗y1 - x2⊗y2|`` without forming either Kronecker product."""
    worst = 0.0
    for i in range(x1.shape[0]):
        block = x1[i, :, None, None] * y1 - x2[i, :, None, None] * y2
        worst = max(worst, float(np.max(np.abs(block))))
    return worst


def verify_compatibility(square: PmsSquare, tol: float = la.COMMUTATOR_TOL) -> CompatibilityReport:
    """Largest ``|[A, B]|`` over the pairs inside each row and column."""
    res = {}
    for name, ctx in CONTEXTS.items():
        worst = 0.0
        for a in range(3):
            for b in range(a + 1, 3):
                if square.factors is not None and square._entries is None:
                    (p, q), (r, s) = (square.factors[j][k] for j, k in (ctx[a], ctx[b]))
                    # [p⊗q, r⊗s] = pr⊗qs - rp⊗sq
                    worst = max(worst, _kron_diff_max(p @ r, q @ s, r @ p, s @ q))
                else:
                    worst = max(worst, la.max_norm(la.commutator(square.entry(*ctx[a]), square.entry(*ctx[b]))))
        res[name] = worst
    return CompatibilityReport(res, tol)


@dataclass(frozen=True)
class ProductReport:
    products: dict = field(repr=False)
    residuals: dict
    tol: float

    @property
    def passed(self) -> bool:
        return all(r <= self.tol for r in self.residuals.values())

    @property
    def worst(self) -> float:
        return max(self.residuals.values())

    def as_dict(self):
        return {
            "targets": dict(CONTEXT_SIGNS),
            "residuals": dict(self.residuals),
            "tol": self.tol,
            "passed": self.passed,
        }


def row_col_products(square: PmsSquare, tol: float = la.COMMUTATOR_TOL) -> ProductReport:
    """Ordered context products and their distance from ``+1`` (``-1`` for column 3).

    For a square built from a triple the products are kept as ``(left, right)``
    tensor factors.
    """
    if square.factors is not None and square._entries is None:
        one = la.identity(square.local_dim)
        prods, res = {}, {}
        for name, ctx in CONTEXTS.items():
            (a1, a2), (b1, b2), (c1, c2) = (square.factors[j][k] for j, k in ctx)
            left, right = a1 @ b1 @ c1, a2 @ b2 @ c2
            prods[name] = (left, right)
            res[name] = _kron_diff_max(left, right, CONTEXT_SIGNS[name] * one, one)
        return ProductReport(prods, res, tol)
    prods = square.context_products
    eye = la.identity(square.dim)
    res = {name: la.max_norm(p - CONTEXT_SIGNS[name] * eye) for name, p in prods.items()}
    return ProductReport(prods, res, tol)


@dataclass
class ViolationReport:
    terms: dict
    im_terms: dict
    path: str
    state: dict = field(default_factory=dict)
    order: str = "left-to-right along rows and down columns"

    @property
    def total(self) -> float:
        t = self.terms
        return t["R1"] + t["R2"] + t["R3"] + t["C1"] + t["C2"] - t["C3"]

    @property
    def im_total(self) -> float:
        t = self.im_terms
        return t["R1"] + t["R2"] + t["R3"] + t["C1"] + t["C2"] - t["C3"]

    bound_noncontextual = PHASE_BOUND
    bound_quantum_max = QUANTUM_MAX

    def as_dict(self):
        return {
            "terms": dict(self.terms),
            "total": self.total,
            "im_terms": dict(self.im_terms),
            "im_total": self.im_total,
            "path": self.path,
            "state": dict(self.state),
            "order": self.order,
            "bound_noncontextual": self.bound_noncontextual,
            "bound_quantum_max": self.bound_quantum_max,
        }


def _check_state(square, state):
    rho = la.as_density(state)
    if rho.shape[0] != square.dim:
        raise ValueError(f"state has dimension {rho.shape[0]}, square acts on dimension {square.dim}")
    return rho


def _expect(rho, op) -> complex:
    return complex(np.einsum("ij,ji->", rho, op))


def expectation_re_x(square: PmsSquare, state, descriptor=None) -> ViolationReport:
    """``Re X`` from ``tr(ρ A_j1 A_j2 A_j3)`` for each context."""
    rho = _check_state(square, state)
    vals = {name: _expect(rho, p) for name, p in square.context_products.items()}
    return ViolationReport(
        {k: v.real for k, v in vals.items()},
        {k: v.imag for k, v in vals.items()},
        "direct",
        dict(descriptor or {}),
    )


def expectation_re_x_hermitian(square: PmsSquare, state, descriptor=None) -> ViolationReport:
    """``Re X`` from the Hermitian-part expansion of every context."""
    rho = _check_state(square, state)
    terms, im_terms = {}, {}
    for name, (re_op, im_op) in square.hermitian_terms.items():
        terms[name] = _expect(rho, re_op).real
        im_terms[name] = _expect(rho, im_op).real
    return ViolationReport(terms, im_terms, "hermitian", dict(descriptor or {}))


def expectation_re_x_product(square: PmsSquare, psi_a, psi_b, descriptor=None) -> ViolationReport:
    """Direct-path ``Re X`` on a product state ``psi_a ⊗ psi_b``.

    Uses the tensor factors of each entry, so the bipartite operators are never
    formed. Only available for squares built from a triple.
    """
    if square.factors is None:
        raise ValueError("product-state evaluation needs a square built from a triple")
    psi_a = np.asarray(psi_a, dtype=complex)
    psi_b = np.asarray(psi_b, dtype=complex)
    vals = {}
    for name, ctx in CONTEXTS.items():
        (l1, r1), (l2, r2), (l3, r3) = (square.factors[j][k] for j, k in ctx)
        left = np.vdot(psi_a, l1 @ (l2 @ (l3 @ psi_a)))
        right = np.vdot(psi_b, r1 @ (r2 @ (r3 @ psi_b)))
        vals[name] = complex(left * right)
    return ViolationReport(
        {k: v.real for k, v in vals.items()},
        {k: v.imag for k, v in vals.items()},
        "direct-product",
        dict(descriptor or {}),
    )


@dataclass
class ScanSummary:
    records: list
    seed: int

    def _col(self, key):
        return np.array([r[key] for r in self.records], dtype=float)

    def stats(self, key):
        v = self._col(key)
        if v.size == 0:
            return {"min": math.nan, "max": math.nan, "mean": math.nan, "spread": math.nan}
        return {"min": float(v.min()), "max": float(v.max()), "mean": float(v.mean()),
                "spread": float(v.max() - v.min())}

    @property
    def direct(self):
        return self.stats("total_direct")

    @property
    def hermitian(self):
        return self.stats("total_hermitian")

    @property
    def spread(self) -> float:
        both = np.concatenate([self._col("total_direct"), self._col("total_hermitian")])
        return float(both.max() - both.min()) if both.size else math.nan

    @property
    def max_path_gap(self) -> float:
        if not self.records:
            return 0.0
        return float(np.max(np.abs(self._col("total_direct") - self._col("total_hermitian"))))

    def as_dict(self):
        return {
            "seed": self.seed,
            "n_pure": sum(r["kind"] == "pure" for r in self.records),
            "n_mixed": sum(r["kind"] == "mixed" for r in self.records),
            "direct": self.direct,
            "hermitian": self.hermitian,
            "spread": self.spread,
            "max_path_gap": self.max_path_gap,
            "records": [dict(r) for r in self.records],
        }


def state_seeds(seed: int, n: int):
    """Per-state seeds derived from a master seed; independent of evaluation order."""
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(n)] if n else []


def scan_states(square: PmsSquare, n_pure: int, n_mixed: int, seed: int = 0,
                threads: int | None = None) -> ScanSummary:
    """Evaluate both paths on seeded Haar-random pure and full-rank mixed states."""
    if n_pure < 0 or n_mixed < 0:
        raise ValueError("sample counts must be non-negative")
    seeds = state_seeds(seed, n_pure + n_mixed)
    jobs = [(i, "pure" if i < n_pure else "mixed", s) for i, s in enumerate(seeds)]
    dim = square.dim
    # warm the caches before any threads touch them
    square.context_products
    square.hermitian_terms

    def run(job):
        i, kind, s = job
        rho = la.haar_state(dim, s) if kind == "pure" else la.random_density(dim, dim, s)
        desc = {"kind": kind, "seed": s}
        direct = expectation_re_x(square, rho, desc)
        herm = expectation_re_x_hermitian(square, rho, desc)
        return {"seed_index": i, "kind": kind, "seed": s,
                "total_direct": direct.total, "total_hermitian": herm.total}

    n = _threads(threads)
    if n > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=n) as ex:
            records = list(ex.map(run, jobs))
    else:
        records = [run(j) for j in jobs]
    return ScanSummary(records, seed)
