"""
Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Every structural
predicate takes an explicit absolute tolerance and measures deviations with
the max-entry modulus, which is cheap and bounds the spectral norm up to a
dimension factor at the sizes handled here.
"""

from __future__ import annotations

import numpy as np

EPS = 1e-10
EIG_TOL = 1e-8

_MAX_SWEEPS = 60


def check_tol(tol: float) -> float:
    tol = float(tol)
    if not 0.0 < tol < 1.0:
        raise ValueError(f"tolerance must lie in (0, 1), got {tol!r}")
    return tol


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a finite 2-D complex array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or 0 in m.shape:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def _square(a) -> np.ndarray:
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


def max_abs(a) -> float:
    """Max-entry modulus; the norm surrogate used by every predicate."""
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def mat_mul(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def adjoint(a) -> np.ndarray:
    return as_matrix(a).conj().T


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=complex)


def is_unitary(a, tol: float = EPS) -> bool:
    a = _square(a)
    one = identity(a.shape[0])
    return max(max_abs(a @ a.conj().T - one), max_abs(a.conj().T @ a - one)) <= tol


def is_hermitian(a, tol: float = EPS) -> bool:
    a = _square(a)
    return max_abs(a - a.conj().T) <= tol


def is_orthogonal_projector(a, tol: float = EPS) -> bool:
    a = _square(a)
    return max_abs(a - a.conj().T) <= tol and max_abs(a @ a - a) <= tol


def commutator_norm(a, b) -> float:
    a, b = _square(a), _square(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return max_abs(a @ b - b @ a)


def matrix_power(a, k: int) -> np.ndarray:
    if int(k) != k or k < 0:
        raise ValueError(f"exponent must be a non-negative integer, got {k!r}")
    return np.linalg.matrix_power(_square(a), int(k))


def root_of_unity(d: int) -> complex:
    return complex(np.exp(2j * np.pi / d))


def fourier_vector(d: int, j: int) -> np.ndarray:
    """Column vector of the Fourier basis, ``|chi_j>`` with 1-based ``j``.

    The ``i``-th entry (1-based) is ``omega_d**(i*j) / sqrt(d)``.
    """
    if d < 1:
        raise ValueError("dimension must be positive")
    if not 1 <= j <= d:
        raise ValueError(f"index {j} out of range [1, {d}]")
    i = np.arange(1, d + 1)
    return (np.exp(2j * np.pi * ((i * j) % d) / d) / np.sqrt(d)).reshape(d, 1)


def _round_robin(n: int) -> list[list[tuple[int, int]]]:
    # circle-method schedule: each round holds disjoint pairs, rounds cover all pairs
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = []
        for i in range(m // 2):
            p, q = players[i], players[m - 1 - i]
            if p < n and q < n:
                pairs.append((min(p, q), max(p, q)))
        rounds.append(pairs)
        players = [players[0], players[-1], *players[1:-1]]
    return rounds


def _square_stack(h) -> np.ndarray:
    a = np.asarray(h, dtype=complex)
    if a.ndim == 2:
        a = _square(a)[None]
    if a.ndim != 3 or a.shape[-1] != a.shape[-2] or 0 in a.shape:
        raise ValueError(f"expected a square matrix or a stack of them, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def jacobi_eigh(h, max_sweeps: int = _MAX_SWEEPS) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix by complex Jacobi rotations.

    Each sweep runs a round-robin schedule; the rotations inside a round act
    on disjoint index pairs and are applied together. A stack of matrices of
    shape ``(m, n, n)`` is processed in one pass.

    Returns
    -------
    (w, v) : eigenvalues (real, unsorted) and the unitary whose columns are
        the corresponding eigenvectors, so that ``h = v @ diag(w) @ v^H``.
        Both carry the leading stack axis when one was given.
    """
    single = np.asarray(h).ndim == 2
    a = _square_stack(h).copy()
    a = (a + np.conj(np.swapaxes(a, -1, -2))) / 2
    n = a.shape[-1]
    v = np.broadcast_to(identity(n), a.shape).copy()
    if n > 1:
        scale = np.maximum(np.linalg.norm(a, axis=(1, 2)), np.finfo(float).tiny)
        schedule = _round_robin(n)
        diag = np.eye(n, dtype=bool)
        for _ in range(max_sweeps):
            off = np.linalg.norm(np.where(diag, 0, a), axis=(1, 2))
            if np.all(off <= 1e-15 * scale):
                break
            for pairs in schedule:
                p = np.array([pq[0] for pq in pairs])
                q = np.array([pq[1] for pq in pairs])
                apq = a[:, p, q]
                mag = np.abs(apq)
                if not np.any(mag > 1e-300):
                    continue
                # identity rotation where the entry already vanishes
                safe = np.where(mag > 1e-300, mag, 1.0)
                phase = np.where(mag > 1e-300, apq / safe, 1.0)
                theta = (a[:, q, q].real - a[:, p, p].real) / (2 * safe)
                t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.sqrt(theta**2 + 1))
                t = np.where(mag > 1e-300, t, 0.0)
                c = 1 / np.sqrt(t**2 + 1)
                s = t * c
                # G[p,p] = c, G[p,q] = s, G[q,p] = -s*conj(phase), G[q,q] = c*conj(phase);
                # apply A <- G^H A G and V <- V G touching only rows/columns p, q
                gqp = -s * phase.conj()
                gqq = c * phase.conj()
                ap, aq = a[:, :, p].copy(), a[:, :, q].copy()
                a[:, :, p] = ap * c[:, None] + aq * gqp[:, None]
                a[:, :, q] = ap * s[:, None] + aq * gqq[:, None]
                rp, rq = a[:, p, :].copy(), a[:, q, :].copy()
                a[:, p, :] = c[..., None] * rp + np.conj(gqp)[..., None] * rq
                a[:, q, :] = s[..., None] * rp + np.conj(gqq)[..., None] * rq
                vp, vq = v[:, :, p].copy(), v[:, :, q].copy()
                v[:, :, p] = vp * c[:, None] + vq * gqp[:, None]
                v[:, :, q] = vp * s[:, None] + vq * gqq[:, None]
    w = np.einsum("mii->mi", a).real.copy()
    if single:
        return w[0], v[0]
    return w, v


def _clusters(values: np.ndarray, tol: float) -> list[np.ndarray]:
    order = np.argsort(values)
    groups = [[order[0]]]
    for prev, cur in zip(order[:-1], order[1:]):
        if values[cur] - values[prev] <= tol:
            groups[-1].append(cur)
        else:
            groups.append([cur])
    return [np.array(g) for g in groups]


def eig_normal(a, tol: float = EIG_TOL) -> list[tuple[complex, np.ndarray]]:
    """Spectral decomposition of a normal matrix.

    ``a`` is split into commuting Hermitian parts ``H = (a + a^H)/2`` and
    ``K = (a - a^H)/2i``. ``H`` is diagonalized by Jacobi rotations, then the
    restriction of ``K`` to each eigenspace cluster of ``H`` is diagonalized
    the same way. Eigenvalues closer than ``tol`` are merged into one
    eigenspace.

    Returns
    -------
    list of (eigenvalue, projector)
        Pairwise orthogonal projectors summing to the identity.
    """
    a = _square(a)
    tol = check_tol(tol)
    if max_abs(a @ a.conj().T - a.conj().T @ a) > tol:
        raise ValueError("matrix is not normal within tolerance")
    herm = (a + a.conj().T) / 2
    skew = (a - a.conj().T) / 2j
    w, v = jacobi_eigh(herm)
    out = []
    for idx in _clusters(w, tol):
        basis = v[:, idx]
        h_val = float(np.mean(w[idx]))
        k_sub = basis.conj().T @ skew @ basis
        kw, kv = jacobi_eigh(k_sub)
        vecs = basis @ kv
        for kidx in _clusters(kw, tol):
            block = vecs[:, kidx]
            out.append((complex(h_val, float(np.mean(kw[kidx]))), block @ block.conj().T))
    return out


def support_projector(rho, tol: float = EPS) -> np.ndarray:
    """Projector onto the span of eigenvectors of ``rho`` with eigenvalue > ``tol``.

    Accepts a single matrix or a stack ``(m, n, n)``.
    """
    a = _square_stack(rho)
    if max_abs(a - np.conj(np.swapaxes(a, -1, -2))) > tol:
        raise ValueError("density operator is not Hermitian within tolerance")
    w, v = jacobi_eigh(a)
    keep = (w > tol)[:, None, :]
    out = np.einsum("mik,mjk->mij", v * keep, v.conj())
    return out[0] if np.asarray(rho).ndim == 2 else out


def orthonormal_columns(vectors, pivot: float = 1e-8, against=None) -> np.ndarray:
    """Modified Gram-Schmidt on the columns of ``vectors``.

    Columns whose residual norm drops below ``pivot`` are discarded. When
    ``against`` is given, the result is also orthogonal to its columns
    (which must already be orthonormal).
    """
    vectors = np.asarray(vectors, dtype=complex)
    dim = vectors.shape[0]
    kept: list[np.ndarray] = []
    prior = [] if against is None else list(np.asarray(against, dtype=complex).T)
    for col in vectors.T:
        r = col.copy()
        for _ in range(2):
            for u in prior + kept:
                r = r - u * np.vdot(u, r)
        nrm = np.linalg.norm(r)
        if nrm > pivot:
            kept.append(r / nrm)
    if not kept:
        return np.zeros((dim, 0), dtype=complex)
    return np.stack(kept, axis=1)


def partial_trace(rho, dims: list[int], keep: list[int]) -> np.ndarray:
    """Trace out every tensor factor of ``rho`` not listed in ``keep``."""
    rho = _square(rho)
    dims = list(dims)
    if int(np.prod(dims)) != rho.shape[0]:
        raise ValueError(f"factor dimensions {dims} do not match size {rho.shape[0]}")
    k = len(dims)
    t = rho.reshape(dims + dims)
    traced = [i for i in range(k) if i not in keep]
    # contract from the highest axis down so remaining axis numbers stay valid
    for count, axis in enumerate(sorted(traced, reverse=True)):
        cur = k - count
        t = np.trace(t, axis1=axis, axis2=axis + cur)
    kept_dim = int(np.prod([dims[i] for i in sorted(keep)])) if keep else 1
    return t.reshape(kept_dim, kept_dim)
