"""
Pairs of mutually unbiased measurements (MUMs) in unitary-block form.

A pair of ``d``-outcome MUMs on ``C^n (x) C^d`` is fixed, up to a change of
basis, by ``d*d`` unitaries ``U[b, j]`` on ``C^n``:

    P_a = 1 (x) |a><a|
    Q_b = (1/d) sum_{j,k} U[b, j] U[b, k]^H (x) |j><k|

Blocks are stored 0-based in an array of shape ``(d, d, n, n)``; indices in
reports (witnesses, labels) are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .linalg import EPS, check_tol, eig_normal, identity, is_unitary, max_abs, orthonormal_columns

DIRECT_SUM_TOL = 1e-8
GS_PIVOT = 1e-8


def _as_blocks(blocks) -> np.ndarray:
    arr = np.array(blocks, dtype=complex)
    if arr.ndim == 2 and arr.shape[0] == arr.shape[1]:
        # a d x d matrix of scalars: block size 1
        arr = arr[:, :, None, None]
    if arr.ndim != 4 or arr.shape[0] != arr.shape[1] or arr.shape[2] != arr.shape[3]:
        raise ValueError(f"expected blocks of shape (d, d, k, k), got {arr.shape}")
    if 0 in arr.shape:
        raise ValueError("empty block array")
    if not np.all(np.isfinite(arr)):
        raise ValueError("blocks have non-finite entries")
    return arr


class BlockHadamard:
    """A ``d x d`` array of ``k x k`` blocks, candidate Hadamard matrix of unitaries."""

    def __init__(self, blocks):
        self.blocks = _as_blocks(blocks)
        if self.d < 2:
            raise ValueError("need at least two outcomes")

    @property
    def d(self) -> int:
        return self.blocks.shape[0]

    @property
    def k(self) -> int:
        return self.blocks.shape[2]

    def block(self, b: int, j: int) -> np.ndarray:
        """Block ``U^b_j`` with 1-based indices."""
        return self.blocks[b - 1, j - 1]

    def matrix(self) -> np.ndarray:
        """The full ``(dk) x (dk)`` matrix ``sum |b><j| (x) U[b, j]``."""
        d, k = self.d, self.k
        return self.blocks.transpose(0, 2, 1, 3).reshape(d * k, d * k)

    def is_dephased(self, tol: float = EPS) -> bool:
        one = identity(self.k)
        return max_abs(self.blocks[0, :] - one) <= tol and max_abs(self.blocks[:, 0] - one) <= tol

    def __repr__(self):
        return f"BlockHadamard(d={self.d}, k={self.k})"


class MumPair:
    """A pair of ``d``-outcome MUMs given by the unitary blocks ``U[b, j]``."""

    def __init__(self, blocks):
        self.blocks = _as_blocks(blocks)
        if self.d < 2:
            raise ValueError("need at least two outcomes")

    @property
    def d(self) -> int:
        return self.blocks.shape[0]

    @property
    def n(self) -> int:
        return self.blocks.shape[2]

    @property
    def canonical(self) -> bool:
        return self.is_canonical()

    def is_canonical(self, tol: float = EPS) -> bool:
        return max_abs(self.blocks[0] - identity(self.n)) <= tol

    def block(self, b: int, j: int) -> np.ndarray:
        return self.blocks[b - 1, j - 1]

    def as_block_hadamard(self) -> BlockHadamard:
        return BlockHadamard(self.blocks)

    def __repr__(self):
        return f"MumPair(d={self.d}, n={self.n}, canonical={self.canonical})"


@dataclass
class MumReport:
    """Outcome of a verification run.

    Fields that a given check does not evaluate are left as ``None``.
    """

    conditions_ok: bool
    orthogonality_ok: Optional[bool] = None
    canonical: Optional[bool] = None
    direct_sum_of_mubs: Optional[bool] = None
    max_violation: float = 0.0
    witness: Optional[tuple] = None
    tol: float = EPS
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.conditions_ok) and self.orthogonality_ok is not False

    def to_dict(self) -> dict:
        return {
            "conditions_ok": self.conditions_ok,
            "orthogonality_ok": self.orthogonality_ok,
            "canonical": self.canonical,
            "direct_sum_of_mubs": self.direct_sum_of_mubs,
            "max_violation": self.max_violation,
            "witness": list(self.witness) if self.witness is not None else None,
            "tol": self.tol,
            "passed": self.passed,
            "details": self.details,
        }


def _unitarity_defect(blocks: np.ndarray) -> float:
    one = identity(blocks.shape[-1])
    bh = np.conj(np.swapaxes(blocks, -1, -2))
    return max(max_abs(blocks @ bh - one), max_abs(bh @ blocks - one))


def _row_defect(blocks: np.ndarray) -> float:
    # sum_b U[b, j] U[b, k]^H = delta_jk d 1
    d, k = blocks.shape[0], blocks.shape[-1]
    s = np.einsum("bjxy,bkzy->jkxz", blocks, blocks.conj())
    target = np.einsum("jk,xz->jkxz", np.eye(d), d * np.eye(k))
    return max_abs(s - target)


def _column_defect(blocks: np.ndarray) -> float:
    # sum_j U[b, j]^H U[c, j] = delta_bc d 1
    d, k = blocks.shape[0], blocks.shape[-1]
    s = np.einsum("bjyx,cjyz->bcxz", blocks.conj(), blocks)
    target = np.einsum("bc,xz->bcxz", np.eye(d), d * np.eye(k))
    return max_abs(s - target)


def verify_unitary_hadamard(h, tol: float = EPS) -> MumReport:
    """Check unitarity of every block and both orthogonality relations."""
    blocks = h.blocks
    tol = check_tol(tol)
    unit = _unitarity_defect(blocks)
    rows = _row_defect(blocks)
    cols = _column_defect(blocks)
    return MumReport(
        conditions_ok=max(unit, rows) <= tol,
        orthogonality_ok=cols <= tol,
        canonical=BlockHadamard(blocks).is_dephased(tol),
        max_violation=max(unit, rows, cols),
        tol=tol,
        details={"unitarity": unit, "row_orthogonality": rows, "column_orthogonality": cols},
    )


def mum_defect(m: MumPair) -> float:
    """Largest violation of the unitary-block MUM conditions."""
    first = max_abs(m.blocks[:, 0] - identity(m.n))
    return max(first, _unitarity_defect(m.blocks), _row_defect(m.blocks))


def _require_valid(m: MumPair, tol: float) -> None:
    if not isinstance(m, MumPair):
        raise TypeError(f"expected a MumPair, got {type(m).__name__}")
    defect = mum_defect(m)
    if defect > tol:
        raise ValueError(f"blocks violate the MUM conditions (max violation {defect:.3g})")


def build_projectors(m: MumPair, tol: float = EPS) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Projectors ``P_a`` and ``Q_b`` on ``C^n (x) C^d`` (block factor first)."""
    _require_valid(m, tol)
    d, n = m.d, m.n
    P = [np.kron(identity(n), np.diag(np.eye(d)[a]).astype(complex)) for a in range(d)]
    # V[b, j, k] = U[b, j] U[b, k]^H
    V = np.einsum("bjxy,bkzy->bjkxz", m.blocks, m.blocks.conj())
    Q = [V[b].transpose(2, 0, 3, 1).reshape(n * d, n * d) / d for b in range(d)]
    return P, Q


def _check_measurement_shapes(P: Sequence, Q: Sequence) -> tuple[np.ndarray, np.ndarray]:
    P = np.array(P, dtype=complex)
    Q = np.array(Q, dtype=complex)
    if P.ndim != 3 or Q.ndim != 3:
        raise ValueError("measurements must be lists of square matrices")
    if P.shape != Q.shape or P.shape[1] != P.shape[2]:
        raise ValueError(f"shape mismatch between measurements: {P.shape} vs {Q.shape}")
    if P.shape[0] < 1:
        raise ValueError("measurements must have at least one outcome")
    return P, Q


def _measurement_defects(E: np.ndarray) -> tuple[float, float]:
    one = identity(E.shape[1])
    herm = max_abs(E - np.conj(np.swapaxes(E, 1, 2)))
    prod = np.einsum("aij,bjk->abik", E, E)
    target = np.einsum("ab,bik->abik", np.eye(E.shape[0]), E)
    orth = max_abs(prod - target)
    complete = max_abs(E.sum(axis=0) - one)
    return max(herm, complete), orth


def verify_mum_conditions(P: Sequence, Q: Sequence, tol: float = EPS) -> MumReport:
    """Check ``P_a = d P_a Q_b P_a`` and ``Q_b = d Q_b P_a Q_b`` for all ``a, b``.

    Also checks that both families are complete projective measurements;
    the orthogonality of outcomes is reported separately.
    """
    P, Q = _check_measurement_shapes(P, Q)
    tol = check_tol(tol)
    d = P.shape[0]
    p_basic, p_orth = _measurement_defects(P)
    q_basic, q_orth = _measurement_defects(Q)
    pqp = d * np.einsum("aij,bjk,akl->abil", P, Q, P)
    qpq = d * np.einsum("bij,ajk,bkl->abil", Q, P, Q)
    unbiased_p = max_abs(pqp - P[:, None])
    unbiased_q = max_abs(qpq - Q[None, :])
    basic = max(p_basic, q_basic, unbiased_p, unbiased_q)
    orth = max(p_orth, q_orth)
    return MumReport(
        conditions_ok=basic <= tol and orth <= tol,
        orthogonality_ok=orth <= tol,
        max_violation=max(basic, orth),
        tol=tol,
        details={
            "projectors_P": max(p_basic, p_orth),
            "projectors_Q": max(q_basic, q_orth),
            "PQP": unbiased_p,
            "QPQ": unbiased_q,
        },
    )


def mub_defect(P: Sequence, Q: Sequence) -> float:
    """Largest deviation from two rank-one measurements on ``C^d`` with overlaps ``1/d``."""
    P, Q = _check_measurement_shapes(P, Q)
    d = P.shape[0]
    if P.shape[1] != d:
        raise ValueError(f"{d} outcomes on a space of dimension {P.shape[1]}")
    worst = 0.0
    for E in (P, Q):
        worst = max(worst, *_measurement_defects(E), max_abs(np.einsum("aii->a", E) - 1))
    overlaps = np.einsum("aij,bji->ab", P, Q)
    return max(worst, max_abs(overlaps - 1.0 / d))


def verify_mub_pair(P: Sequence, Q: Sequence, tol: float = EPS) -> bool:
    """True iff ``P`` and ``Q`` are rank-one measurements on ``C^d`` with overlaps ``1/d``."""
    return mub_defect(P, Q) <= check_tol(tol)


def canonicalize(m: MumPair, tol: float = EPS) -> MumPair:
    """Canonical form: replace ``U[b, j]`` by ``U[1, j]^H U[b, j]``.

    This corresponds to conjugating both measurements by
    ``sum_j U[1, j]^H (x) |j><j|``, so measurement statistics are unchanged.
    """
    _require_valid(m, tol)
    first_h = np.conj(np.swapaxes(m.blocks[0], -1, -2))
    return MumPair(np.einsum("jxy,bjyz->bjxz", first_h, m.blocks))


def canonicalizing_unitary(m: MumPair) -> np.ndarray:
    d, n = m.d, m.n
    u = np.zeros((n * d, n * d), dtype=complex)
    for j in range(d):
        u += np.kron(m.blocks[0, j].conj().T, np.diag(np.eye(d)[j]))
    return u


def gauge_transform(h, left: Optional[Sequence] = None, right: Optional[Sequence] = None,
                    tol: float = EPS) -> BlockHadamard:
    """Apply ``U[b, j] -> left[j] U[b, j] right[b]``.

    Either list may be omitted (identity). The result satisfies the Hadamard
    conditions whenever the input does; it is re-verified before returning.
    """
    blocks = h.blocks
    d, k = blocks.shape[0], blocks.shape[-1]
    ws = []
    for name, gauge in (("left", left), ("right", right)):
        if gauge is None:
            gauge = [identity(k)] * d
        gauge = np.array(gauge, dtype=complex)
        if gauge.shape != (d, k, k):
            raise ValueError(f"{name} gauge must be {d} matrices of size {k}x{k}")
        if not all(is_unitary(w, tol) for w in gauge):
            raise ValueError(f"{name} gauge contains a non-unitary matrix")
        ws.append(gauge)
    out = np.einsum("jxy,bjyz,bzw->bjxw", ws[0], blocks, ws[1])
    before = verify_unitary_hadamard(BlockHadamard(blocks), tol)
    result = BlockHadamard(out)
    if before.passed:
        after = verify_unitary_hadamard(result, tol * 10)
        if not after.passed:
            raise ArithmeticError(f"gauge broke the Hadamard conditions ({after.max_violation:.3g})")
    return result


def normalize(h: BlockHadamard, tol: float = EPS) -> MumPair:
    """MUM pair of a Hadamard matrix of unitaries by right-normalizing block-rows.

    Each ``U[b, j]`` becomes ``U[b, j] U[b, 1]^H`` so that the first block
    column is the identity.
    """
    first_h = np.conj(np.swapaxes(h.blocks[:, 0], -1, -2))
    m = MumPair(np.einsum("bjxy,byz->bjxz", h.blocks, first_h))
    _require_valid(m, tol)
    return m


def from_block_hadamard(h: BlockHadamard, tol: float = EPS) -> MumPair:
    """Canonical MUM pair of a dephased Hadamard matrix of unitary operators."""
    report = verify_unitary_hadamard(h, tol)
    if not report.passed:
        raise ValueError(f"not a Hadamard matrix of unitaries (max violation {report.max_violation:.3g})")
    if not h.is_dephased(tol):
        raise ValueError("Hadamard matrix is not dephased (first block row and column must be identity)")
    return MumPair(h.blocks.copy())


def mum_pair_from_projectors(P: Sequence, Q: Sequence, tol: float = EPS) -> MumPair:
    """Recover ``U[b, j]`` from measurements with ``P_a = 1 (x) |a><a|``.

    ``U[b, j]`` is ``d`` times the ``(j, 1)`` block of ``Q_b``.
    """
    P, Q = _check_measurement_shapes(P, Q)
    d, dim = P.shape[0], P.shape[1]
    if dim % d:
        raise ValueError(f"dimension {dim} is not a multiple of the outcome number {d}")
    n = dim // d
    for a in range(d):
        expected = np.kron(identity(n), np.diag(np.eye(d)[a]))
        if max_abs(P[a] - expected) > tol:
            raise ValueError("first measurement is not in the standard form 1 (x) |a><a|")
    # Q[b] viewed as blocks: Q[b][(x, j), (y, k)] = V[b, j, k][x, y] / d
    Qr = Q.reshape(d, n, d, n, d)
    blocks = d * Qr[:, :, :, :, 0].transpose(0, 2, 1, 3)
    m = MumPair(blocks)
    _require_valid(m, max(tol, 10 * tol))
    return m


def _all_blocks(m: MumPair) -> np.ndarray:
    return m.blocks.reshape(m.d * m.d, m.n, m.n)


def direct_sum_test(m: MumPair, tol: float = DIRECT_SUM_TOL):
    """Decide whether a canonical MUM pair is a direct sum of MUBs.

    This holds iff all blocks ``U[b, j]`` commute pairwise.

    Returns
    -------
    (is_direct_sum, witness)
        ``witness`` is the first quadruple ``(b, j, b', j')`` (1-based,
        lexicographic order) whose commutator exceeds ``tol``, else ``None``.
    """
    tol = check_tol(tol)
    if not m.is_canonical(tol):
        raise ValueError("direct-sum criterion needs a canonical MUM pair; call canonicalize first")
    F = _all_blocks(m)
    comm = np.einsum("aij,cjk->acik", F, F) - np.einsum("cij,ajk->acik", F, F)
    defect = np.max(np.abs(comm), axis=(2, 3))
    hits = np.argwhere(defect > tol)
    if hits.size == 0:
        return True, None
    first, second = (int(x) for x in hits[0])
    d = m.d
    return False, (first // d + 1, first % d + 1, second // d + 1, second % d + 1)


def max_commutator(m: MumPair) -> float:
    F = _all_blocks(m)
    comm = np.einsum("aij,cjk->acik", F, F) - np.einsum("cij,ajk->acik", F, F)
    return max_abs(comm)


@dataclass
class MubBlock:
    """One MUB summand: basis vector ``e_t`` of ``C^n`` and the pair on ``C^d``."""

    t: int
    vector: np.ndarray
    P: list
    Q: list
    phases: np.ndarray


def _common_eigenbasis(ops: np.ndarray, tol: float) -> np.ndarray:
    n = ops.shape[-1]
    subspaces = [identity(n)]
    for op in ops:
        refined = []
        for basis in subspaces:
            if basis.shape[1] == 1:
                refined.append(basis)
                continue
            restricted = basis.conj().T @ op @ basis
            for _, proj in eig_normal(restricted, tol):
                vecs = orthonormal_columns(basis @ proj, pivot=GS_PIVOT)
                if vecs.shape[1]:
                    refined.append(vecs)
        subspaces = refined
    basis = np.concatenate(subspaces, axis=1)
    if basis.shape[1] != n:
        raise ArithmeticError(f"refinement produced {basis.shape[1]} vectors for dimension {n}")
    return basis


def extract_mub_blocks(m: MumPair, tol: float = DIRECT_SUM_TOL) -> list[MubBlock]:
    """Split a commuting canonical MUM pair into ``n`` MUB pairs on ``C^d``.

    The blocks ``U[b, j]`` are simultaneously diagonalized by refining the
    whole space with the eigenprojectors of each block in turn. For each
    common eigenvector ``e_t`` with ``U[b, j] e_t = lam[b, j] e_t`` the
    summand is ``P_a = |a><a|`` and ``Q_b = |v_b><v_b|`` where
    ``v_b[j] = lam[b, j] / sqrt(d)``.
    """
    ok, witness = direct_sum_test(m, tol)
    if not ok:
        raise ValueError(f"blocks do not commute (witness {witness}); not a direct sum of MUBs")
    d, n = m.d, m.n
    basis = _common_eigenbasis(_all_blocks(m), tol)
    out = []
    for t in range(n):
        e = basis[:, t]
        lam = np.einsum("x,bjxy,y->bj", e.conj(), m.blocks, e)
        P = [np.diag(np.eye(d)[a]).astype(complex) for a in range(d)]
        Q = []
        for b in range(d):
            v = lam[b] / np.sqrt(d)
            Q.append(np.outer(v, v.conj()))
        out.append(MubBlock(t=t + 1, vector=e, P=P, Q=Q, phases=lam))
    return out


def reconstruct_from_blocks(blocks: Sequence[MubBlock]) -> tuple[list, list]:
    """Reassemble ``P_a = sum_t |e_t><e_t| (x) P^t_a`` (and likewise ``Q_b``)."""
    d = len(blocks[0].P)
    P, Q = [], []
    for a in range(d):
        P.append(sum(np.kron(np.outer(bl.vector, bl.vector.conj()), bl.P[a]) for bl in blocks))
        Q.append(sum(np.kron(np.outer(bl.vector, bl.vector.conj()), bl.Q[a]) for bl in blocks))
    return P, Q


def assemble_direct_sum(phases, basis=None, tol: float = EPS) -> MumPair:
    """MUM pair that is a direct sum of MUB pairs, the inverse of :func:`extract_mub_blocks`.

    ``phases[t]`` is a ``d x d`` complex Hadamard matrix with first column all
    ones, read as ``lam[b, j]``; summand ``t`` sits on ``basis[:, t]``
    (default: the standard basis of ``C^n``).
    """
    lam = np.asarray(phases, dtype=complex)
    if lam.ndim != 3 or lam.shape[1] != lam.shape[2]:
        raise ValueError("phases must have shape (n, d, d)")
    n = lam.shape[0]
    v = identity(n) if basis is None else np.asarray(basis, dtype=complex)
    if v.shape != (n, n) or not is_unitary(v, tol):
        raise ValueError(f"basis must be a {n}x{n} unitary")
    blocks = np.einsum("xt,tbj,yt->bjxy", v, lam, v.conj())
    m = MumPair(blocks)
    _require_valid(m, tol)
    return m


def extend_outcomes(m: MumPair, ell: int, tol: float = EPS) -> MumPair:
    """An ``ell*d``-outcome MUM pair from tensoring with a MUB pair on ``C^ell``.

    The new measurements are ``P_a (x) |i><i|`` and ``Q_b (x) |chi_j><chi_j|``,
    outcome ``(a, i)`` flattened to ``(a-1)*ell + i``. In block form this gives
    ``U'[(b, j'), (j, p)] = omega_ell**((p-1) j') U[b, j]`` on the same ``C^n``.
    """
    if int(ell) != ell or ell < 2:
        raise ValueError(f"ell must be an integer >= 2, got {ell!r}")
    _require_valid(m, tol)
    d, n = m.d, m.n
    p = np.arange(ell)
    jp = np.arange(1, ell + 1)
    phase = np.exp(2j * np.pi * np.outer(jp, p) / ell)  # [j', p]
    blocks = np.einsum("bjxy,cp->bcjpxy", m.blocks, phase).reshape(d * ell, d * ell, n, n)
    return MumPair(blocks)


def verify_mum_pair(m: MumPair, tol: float = EPS, direct_sum_tol: float = DIRECT_SUM_TOL) -> MumReport:
    """Full report for a MUM pair: block conditions, projector identities, direct sum."""
    block_defect = mum_defect(m)
    if block_defect > tol:
        return MumReport(
            conditions_ok=False,
            canonical=m.is_canonical(tol),
            max_violation=block_defect,
            tol=tol,
            details={"blocks": block_defect},
        )
    P, Q = build_projectors(m, tol)
    report = verify_mum_conditions(P, Q, tol)
    report.canonical = m.is_canonical(tol)
    report.max_violation = max(report.max_violation, block_defect)
    report.details["blocks"] = block_defect
    target = m if report.canonical else canonicalize(m, tol)
    ok, witness = direct_sum_test(target, direct_sum_tol)
    report.direct_sum_of_mubs = ok
    report.witness = witness
    return report
