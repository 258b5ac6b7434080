"""Random constructions shared by several test modules."""

import numpy as np

from mumkit.catalog import fourier_hadamard
from mumkit.mum import MumPair, assemble_direct_sum


def random_unitary(rng, n):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_mub_phases(rng, d):
    """A d x d complex Hadamard matrix with first column all ones.

    Row/column permutations and column phases of the Fourier matrix, then
    rows rescaled so the first column is 1 again.
    """
    f = fourier_hadamard(d).blocks[:, :, 0, 0]
    f = f[rng.permutation(d)][:, rng.permutation(d)]
    f = f * np.exp(2j * np.pi * rng.random(d))[None, :]
    return f / f[:, :1]


def random_direct_sum(rng, d, n):
    phases = np.array([random_mub_phases(rng, d) for _ in range(n)])
    return assemble_direct_sum(phases, random_unitary(rng, n)), phases


def random_column_gauge(rng, m: MumPair) -> MumPair:
    """``U[b, j] -> W_j U[b, j] W_1^H``: keeps ``U[b, 1] = 1`` but breaks canonical form."""
    ws = np.array([random_unitary(rng, m.n) for _ in range(m.d)])
    return MumPair(np.einsum("jxy,bjyz,wz->bjxw", ws, m.blocks, ws[0].conj()))
