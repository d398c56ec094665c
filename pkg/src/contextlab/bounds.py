"""Classical (non-contextual) bounds on the Peres-Mermin witness.

A non-contextual model assigns one number ``u_jk`` to every cell of the
square, whatever context the cell is measured in. With ``u_jk = ±1`` the
witness ``X`` never exceeds 4; with complex ``|u_jk| <= 1`` its real part never
exceeds ``3√3``. The first value is found by enumeration, the second by
multistart projected gradient ascent over moduli and phases.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .pms import CONTEXTS, CONTEXT_SIGNS

PHASE_BOUND = 3.0 * math.sqrt(3.0)

# Flat cell indices (3*j + k) of each context, and its sign in Re X.
_CTX = np.array([[3 * j + k for j, k in ctx] for ctx in CONTEXTS.values()])
_SIGNS = np.array([CONTEXT_SIGNS[name] for name in CONTEXTS])

STEP0 = 0.1
MIN_STEP = 1e-12
MAX_ITER = 100_000
DEFAULT_STARTS = 64


@dataclass
class BoundCertificate:
    bound_value: float
    argmax: list
    method: str
    n_starts: int
    max_gradient_norm: float = 0.0
    details: dict = field(default_factory=dict)

    def as_dict(self):
        if self.method == "exhaustive":
            argmax = [int(x) for x in self.argmax]
        else:
            argmax = [[float(z.real), float(z.imag)] for z in self.argmax]
        return {
            "bound_value": self.bound_value,
            "argmax": argmax,
            "method": self.method,
            "n_starts": self.n_starts,
            "max_gradient_norm": self.max_gradient_norm,
            **self.details,
        }


def objective(assignment) -> float:
    """``Re X`` for nine classical values given row-major (shape 9 or 3x3)."""
    u = np.asarray(assignment).reshape(9)
    prods = np.prod(u[_CTX], axis=1)
    return float(np.sum(_SIGNS * np.real(prods)))


def dichotomic_objective(signs) -> int:
    """``X`` for nine ±1 values, in exact integer arithmetic."""
    s = [int(x) for x in signs]
    total = 0
    for idx, sign in zip(_CTX, _SIGNS):
        total += int(sign) * s[idx[0]] * s[idx[1]] * s[idx[2]]
    return total


def dichotomic_bound() -> BoundCertificate:
    """Enumerate all 2^9 sign assignments; the first maximizer met is returned."""
    best, arg = None, None
    for signs in itertools.product((1, -1), repeat=9):
        val = dichotomic_objective(signs)
        if best is None or val > best:
            best, arg = val, signs
    return BoundCertificate(best, list(arg), "exhaustive", 512, 0.0, {"n_assignments": 512})


def _value_and_grad(u):
    """Objective and its gradient ``∂f/∂x + i ∂f/∂y`` with respect to ``u = x + iy``."""
    cu = u[_CTX]  # (6, 3)
    prods = np.prod(cu, axis=1)
    value = float(np.sum(_SIGNS * prods.real))
    grad = np.zeros(9, dtype=complex)
    for p in range(3):
        others = cu[:, (p + 1) % 3] * cu[:, (p + 2) % 3]
        np.add.at(grad, _CTX[:, p], _SIGNS * np.conj(others))
    return value, grad


def _project(u):
    m = np.abs(u)
    out = u.copy()
    over = m > 1.0
    out[over] /= m[over]
    return out


def _projected_grad(u, g):
    """Drop the outward radial part of the gradient on cells already at modulus 1."""
    g = g.copy()
    m = np.abs(u)
    edge = m >= 1.0 - 1e-15
    if np.any(edge):
        dirs = u[edge] / m[edge]
        radial = np.real(g[edge] * np.conj(dirs))
        g[edge] -= np.maximum(radial, 0.0) * dirs
    return g


def ascend(r, theta, tol=1e-9, step=STEP0, max_iter=MAX_ITER):
    """Projected gradient ascent on ``Re X`` over the closed unit disc.

    Starts from moduli ``r`` and phases ``theta``; steps are taken in the
    Cartesian coordinates of each cell (the polar chart is singular at
    ``r = 0``) followed by radial projection onto ``|u| <= 1``. A trial step is
    accepted only if it strictly increases the objective; otherwise the step
    is halved. Stops when the projected gradient norm drops below ``tol`` or
    the step below ``MIN_STEP``.
    """
    u = _project(np.clip(np.asarray(r, dtype=float), 0.0, 1.0) * np.exp(1j * np.asarray(theta, dtype=float)))
    f, g = _value_and_grad(u)
    status = "max_iter"
    it = 0
    for it in range(1, max_iter + 1):
        gp = _projected_grad(u, g)
        gnorm = float(np.linalg.norm(gp))
        if gnorm < tol:
            status = "gradient"
            break
        u_new = _project(u + step * gp)
        f_new, g_new = _value_and_grad(u_new)
        if f_new > f:
            u, f, g = u_new, f_new, g_new
        else:
            step *= 0.5
            if step < MIN_STEP:
                status = "step"
                break
    gnorm = float(np.linalg.norm(_projected_grad(u, g)))
    return {"r": np.abs(u), "theta": np.angle(u), "u": u, "value": f, "gradient_norm": gnorm,
            "iterations": it, "status": status, "converged": status != "max_iter"}


def _threads(threads):
    if threads is not None:
        return max(1, int(threads))
    try:
        return max(1, int(os.environ.get("CONTEXTLAB_THREADS", "1")))
    except ValueError:
        return 1


def phase_bound(n_starts: int = DEFAULT_STARTS, tol: float = 1e-9, seed: int = 0,
                max_iter: int = MAX_ITER, threads: int | None = None) -> BoundCertificate:
    """Maximize ``Re X`` over nine classical values in the closed unit disc.

    Each start draws moduli uniformly in [0, 1] and phases uniformly in
    [0, 2π) from its own child seed. The best start wins, ties going to the
    lowest index, so the certificate does not depend on scheduling.
    """
    if n_starts < 1:
        raise ValueError("n_starts must be at least 1")
    children = np.random.SeedSequence(seed).spawn(n_starts)

    def run(child):
        rng = np.random.default_rng(child)
        return ascend(rng.uniform(0.0, 1.0, 9), rng.uniform(0.0, 2 * math.pi, 9), tol, max_iter=max_iter)

    n = _threads(threads)
    if n > 1 and n_starts > 1:
        with ThreadPoolExecutor(max_workers=n) as ex:
            runs = list(ex.map(run, children))
    else:
        runs = [run(c) for c in children]

    best_i = 0
    for i, res in enumerate(runs):
        if res["value"] > runs[best_i]["value"]:
            best_i = i
    best = runs[best_i]
    u = best["u"]
    value = objective(u)
    modulus_gap = max(float(np.max(1.0 - res["r"])) for res in runs)
    details = {
        "best_start": best_i,
        "all_unit_modulus": modulus_gap <= 1e-6,
        "max_modulus_gap": modulus_gap,
        "argmax_phases_over_pi": [float(t) for t in np.mod(best["theta"], 2 * math.pi) / math.pi],
        "starts": [
            {"value": res["value"], "gradient_norm": res["gradient_norm"],
             "iterations": res["iterations"], "status": res["status"]}
            for res in runs
        ],
        "non_converged_starts": [i for i, res in enumerate(runs) if not res["converged"]],
        "seed": seed,
        "tol": tol,
    }
    worst_grad = max(res["gradient_norm"] for res in runs)
    return BoundCertificate(value, [complex(z) for z in u], "multistart-ascent", n_starts,
                            worst_grad, details)


def sample_noncontextual(n: int, seed: int = 0, include=None) -> float:
    """Largest ``Re X`` over ``n`` uniformly random unit-modulus assignments.

    ``include`` optionally appends given assignments (each nine complex
    numbers) to the random sample.
    """
    if n < 1 and not include:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(seed)
    best = -math.inf
    chunk = 1 << 16
    done = 0
    while done < n:
        m = min(chunk, n - done)
        phases = rng.uniform(0.0, 2 * math.pi, (m, 9))
        ctx_phase = phases[:, _CTX].sum(axis=2)
        vals = np.cos(ctx_phase) @ _SIGNS
        best = max(best, float(vals.max()))
        done += m
    for a in include or ():
        best = max(best, objective(a))
    return best
