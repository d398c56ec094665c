"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Unitaries, states
and density matrices are validated arrays rather than wrapper classes; the
``require_*`` helpers enforce the invariants and return the measured residual.

Hermitian eigenproblems are solved with a cyclic complex Jacobi method. Unitary
eigenproblems are reduced to Hermitian ones through the commuting pair
``B = (U + U^†)/2`` and ``C = (U - U^†)/(2i)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ConvergenceError, NotHermitianError, NotUnitaryError

UNITARITY_TOL = 1e-10
RECONSTRUCTION_TOL = 1e-8
COMMUTATOR_TOL = 1e-9
HERMITIAN_TOL = 1e-10
STATE_TOL = 1e-12

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100

# Largest number of entries a tensor product may have (about 1 GiB of complex128).
MAX_ENTRIES = 1 << 26

# Adjacent eigenvalues of B closer than this are diagonalized together in C.
_GROUP_GAP = 1e-6

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues and orthonormal eigenvector columns with ``U = V diag(w) V^†``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    reconstruction_residual: float = 0.0

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def max_norm(a) -> float:
    """Largest absolute entry."""
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def adjoint(a) -> np.ndarray:
    return np.conj(np.asarray(a, dtype=complex)).T


def commutator(a, b) -> np.ndarray:
    return a @ b - b @ a


def anticommutator(a, b) -> np.ndarray:
    return a @ b + b @ a


def tensor(a, b) -> np.ndarray:
    """Kronecker product; entry ``((ia, ib), (ja, jb))`` is ``a[ia, ja] * b[ib, jb]``."""
    a = as_matrix(a)
    b = as_matrix(b)
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if rows * cols > MAX_ENTRIES:
        raise OverflowError(f"tensor product of size {rows}x{cols} exceeds {MAX_ENTRIES} entries")
    return np.kron(a, b)


def direct_sum(blocks) -> np.ndarray:
    blocks = [as_matrix(b) for b in blocks]
    if not blocks:
        raise ValueError("direct_sum needs at least one block")
    for b in blocks:
        if b.shape[0] != b.shape[1]:
            raise ValueError(f"direct_sum blocks must be square, got {b.shape}")
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=complex)
    i = 0
    for b in blocks:
        k = b.shape[0]
        out[i:i + k, i:i + k] = b
        i += k
    return out


def unitarity_residual(u) -> float:
    """``max |U^† U - 1|``; infinite for non-square input."""
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return math.inf
    return max_norm(adjoint(u) @ u - identity(u.shape[0]))


def require_unitary(u, tol: float = UNITARITY_TOL) -> float:
    """Raise :class:`NotUnitaryError` unless ``u`` is unitary within ``tol``; return the residual."""
    u = as_matrix(u)
    res = unitarity_residual(u)
    if not res <= tol:
        raise NotUnitaryError(f"matrix of shape {u.shape} is not unitary", res)
    return res


def hermiticity_residual(h) -> float:
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        return math.inf
    return max_norm(h - adjoint(h))


def require_hermitian(h, tol: float = HERMITIAN_TOL) -> float:
    h = as_matrix(h)
    res = hermiticity_residual(h)
    if not res <= tol:
        raise NotHermitianError(f"matrix of shape {h.shape} is not Hermitian", res)
    return res


def eigh_jacobi(h, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Diagonalize a Hermitian matrix by cyclic complex Jacobi rotations.

    Returns ascending real eigenvalues ``w`` and unitary ``V`` with
    ``h = V diag(w) V^†``. Sweeps stop once the off-diagonal Frobenius norm is
    below ``tol * max(1, ||h||_F)``; one more sweep then polishes the
    eigenvectors, since their error scales like off-norm / spectral gap.
    """
    a = np.array(as_matrix(h), copy=True)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"expected a square matrix, got {a.shape}")
    a = 0.5 * (a + adjoint(a))
    v = identity(n)
    scale = max(1.0, float(np.linalg.norm(a)))
    threshold = tol * scale
    # Rotations on entries this small cannot change the result.
    skip = 1e-20 * scale
    polished = False
    offdiag = ~np.eye(n, dtype=bool)

    for _ in range(max_sweeps + 2):
        off = float(np.linalg.norm(a[offdiag]))
        if off <= threshold:
            if polished:
                break
            polished = True
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r <= skip:
                    continue
                phase = apq / r
                theta = 0.5 * math.atan2(2.0 * r, a[p, p].real - a[q, q].real)
                c, s = math.cos(theta), math.sin(theta)
                w = np.array([[c, -s], [np.conj(phase) * s, np.conj(phase) * c]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ w
                a[idx, :] = adjoint(w) @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ w
    else:
        raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps", off)

    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def expm_i_hermitian(h, t: float) -> np.ndarray:
    """``exp(i t h)`` for Hermitian ``h``, via its eigendecomposition."""
    h = as_matrix(h)
    require_hermitian(h)
    w, v = eigh_jacobi(h)
    u = (v * np.exp(1j * t * w)) @ adjoint(v)
    res = unitarity_residual(u)
    if res > 1e-9:
        raise ConvergenceError("matrix exponential lost unitarity", res)
    return u


def _runs(values, gap):
    """Split sorted values into index runs whose adjacent differences are <= gap."""
    runs = [[0]] if len(values) else []
    for i in range(1, len(values)):
        if values[i] - values[i - 1] <= gap:
            runs[-1].append(i)
        else:
            runs.append([i])
    return runs


def eig_unitary(u, tol: float = UNITARITY_TOL) -> SpectralDecomposition:
    """Eigendecomposition of a unitary matrix.

    ``B = (U+U^†)/2`` is diagonalized first; ``C = (U-U^†)/2i`` is then
    diagonalized inside each (near-)eigenspace of ``B``, and ``B`` once more
    inside each resulting near-eigenspace of ``C``. Degenerate eigenspaces come
    back with an arbitrary orthonormal basis.
    """
    u = as_matrix(u)
    require_unitary(u, tol)
    n = u.shape[0]
    b = 0.5 * (u + adjoint(u))
    c = (u - adjoint(u)) / 2j

    wb, vb = eigh_jacobi(b)
    columns = []
    for group in _runs(wb, _GROUP_GAP):
        vg = vb[:, group]
        if len(group) == 1:
            columns.append(vg)
            continue
        wc, yc = eigh_jacobi(adjoint(vg) @ c @ vg)
        vg = vg @ yc
        for sub in _runs(wc, _GROUP_GAP):
            vs = vg[:, sub]
            if len(sub) > 1:
                _, ys = eigh_jacobi(adjoint(vs) @ b @ vs)
                vs = vs @ ys
            columns.append(vs)
    v = np.hstack(columns) if columns else np.zeros((0, 0), dtype=complex)

    lam = np.einsum("ij,ik,kj->j", np.conj(v), u, v)
    recon = max_norm(u - (v * lam) @ adjoint(v))
    if recon > RECONSTRUCTION_TOL:
        raise ConvergenceError("unitary eigendecomposition failed to reconstruct input", recon)
    ortho = max_norm(adjoint(v) @ v - identity(n))
    if ortho > UNITARITY_TOL:
        raise ConvergenceError("eigenvectors lost orthonormality", ortho)
    return SpectralDecomposition(lam, v, recon)


def _rng(seed):
    return np.random.default_rng(seed)


def haar_state(dim: int, seed) -> np.ndarray:
    """Unitarily invariant random pure state (normalized complex Gaussian vector)."""
    if dim < 1:
        raise ValueError("dim must be positive")
    rng = _rng(seed)
    psi = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return psi / np.linalg.norm(psi)


def random_density(dim: int, rank: int, seed) -> np.ndarray:
    """``G G^† / tr(G G^†)`` for a seeded complex Gaussian ``dim x rank`` matrix ``G``."""
    if dim < 1:
        raise ValueError("dim must be positive")
    if not 1 <= rank <= dim:
        raise ValueError(f"rank must lie in [1, {dim}], got {rank}")
    rng = _rng(seed)
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ adjoint(g)
    rho = 0.5 * (rho + adjoint(rho))
    return rho / np.trace(rho).real


def haar_unitary(dim: int, seed) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a Ginibre matrix with phase fix."""
    rng = _rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def require_state(psi, tol: float = STATE_TOL) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1 or psi.size == 0:
        raise ValueError(f"state vector must be 1-d and non-empty, got shape {psi.shape}")
    err = abs(float(np.vdot(psi, psi).real) - 1.0)
    if err > tol:
        raise ValueError(f"state vector is not normalized (|norm^2 - 1| = {err:.3e})")
    return psi


def require_density(rho, tol: float = STATE_TOL) -> np.ndarray:
    rho = as_matrix(rho)
    if rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got {rho.shape}")
    herm = hermiticity_residual(rho)
    if herm > tol:
        raise ValueError(f"density matrix is not Hermitian (residual {herm:.3e})")
    tr = np.trace(rho)
    if abs(tr - 1.0) > tol:
        raise ValueError(f"density matrix trace is {tr.real:.15g}, expected 1")
    lo = float(np.linalg.eigvalsh(0.5 * (rho + adjoint(rho)))[0])
    if lo < -1e-10:
        raise ValueError(f"density matrix has negative eigenvalue {lo:.3e}")
    return rho


def as_density(state) -> np.ndarray:
    """Promote a pure state vector to its projector; validate density matrices."""
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        psi = require_state(state)
        return np.outer(psi, np.conj(psi))
    return require_density(state)
