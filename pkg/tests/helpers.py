"""Generators shared by the test modules."""

import numpy as np

from contextlab import linalg as la

MIN_GAP = 1e-3


def _separated_phases(rng, m):
    """``m`` phases in [0, π) whose images and negatives stay ``MIN_GAP`` apart on the circle."""
    while True:
        ph = rng.uniform(0.0, np.pi, m)
        allp = np.sort(np.concatenate([ph, ph + np.pi]))
        gaps = np.diff(np.concatenate([allp, [allp[0] + 2 * np.pi]]))
        if gaps.min() > MIN_GAP:
            return ph


def paired_unitary(d, rng):
    """Random unitary whose spectrum is closed under negation, with random multiplicities.

    Returns ``(u, lambdas, mults)`` where ``lambdas`` are the ``+λ`` representatives.
    """
    assert d % 2 == 0
    k = d // 2
    m = int(rng.integers(1, k + 1))
    cuts = np.sort(rng.choice(np.arange(1, k), m - 1, replace=False)) if m > 1 else np.array([], int)
    mults = np.diff(np.concatenate([[0], cuts, [k]])).astype(int)
    lambdas = np.exp(1j * _separated_phases(rng, m))
    spectrum = np.concatenate([np.repeat(lambdas, mults), np.repeat(-lambdas, mults)])
    v = la.haar_unitary(d, rng)
    return v @ np.diag(spectrum) @ v.conj().T, lambdas, mults


def generic_diagonal(d, rng):
    """Diagonal unitary with independent uniform phases."""
    return np.diag(np.exp(1j * rng.uniform(0.0, 2 * np.pi, d)))


def perturbed(u, eps, rng):
    """``u`` pushed off by ``eps`` then re-unitarized through its polar factor."""
    g = rng.standard_normal(u.shape) + 1j * rng.standard_normal(u.shape)
    w, _, vh = np.linalg.svd(u + eps * g)
    return w @ vh
