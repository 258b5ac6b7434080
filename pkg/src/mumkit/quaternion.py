"""
Quaternion algebra, quaternionic Hadamard matrices and perfect sequences.

A quaternion ``a + b*i + c*j + d*k`` is stored as its four real components.
Matrices of quaternions keep an ``(rows, cols, 4)`` float array so the
Hamilton product can be applied to whole rows at once.

The map ``lift`` embeds quaternions into 2x2 complex matrices by
``i -> iX``, ``j -> -iY``, ``k -> iZ``; it is a real-algebra homomorphism
that sends conjugation to the Hermitian adjoint, so a quaternionic Hadamard
matrix lifts to a Hadamard matrix of 2x2 unitary blocks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .linalg import EPS
from .mum import BlockHadamard

PERFECT_TOL = 1e-9

_CONJ = np.array([1.0, -1.0, -1.0, -1.0])


def hamilton(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Hamilton product of component arrays with trailing axis of length 4."""
    a1, b1, c1, d1 = np.moveaxis(np.asarray(p, dtype=float), -1, 0)
    a2, b2, c2, d2 = np.moveaxis(np.asarray(q, dtype=float), -1, 0)
    return np.stack(
        [
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ],
        axis=-1,
    )


@dataclass(frozen=True)
class Quaternion:
    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    d: float = 0.0

    def __post_init__(self):
        for name in "abcd":
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"quaternion component {name} is not finite")
            object.__setattr__(self, name, value)

    @classmethod
    def from_array(cls, arr) -> "Quaternion":
        a, b, c, d = (float(x) for x in arr)
        return cls(a, b, c, d)

    def to_array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c, self.d])

    def __iter__(self):
        return iter((self.a, self.b, self.c, self.d))

    def __add__(self, other):
        other = _coerce(other)
        return Quaternion(self.a + other.a, self.b + other.b, self.c + other.c, self.d + other.d)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __neg__(self):
        return Quaternion(-self.a, -self.b, -self.c, -self.d)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Quaternion(self.a * other, self.b * other, self.c * other, self.d * other)
        return Quaternion.from_array(hamilton(self.to_array(), _coerce(other).to_array()))

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return self * other
        return _coerce(other) * self

    def __truediv__(self, scalar: float):
        return self * (1.0 / scalar)

    def conj(self) -> "Quaternion":
        return Quaternion(self.a, -self.b, -self.c, -self.d)

    def norm(self) -> float:
        return math.sqrt(self.a**2 + self.b**2 + self.c**2 + self.d**2)

    def inverse(self) -> "Quaternion":
        n2 = self.a**2 + self.b**2 + self.c**2 + self.d**2
        if n2 == 0.0:
            raise ZeroDivisionError("zero quaternion has no inverse")
        return self.conj() / n2

    def is_unit(self, tol: float = EPS) -> bool:
        return abs(self.norm() - 1.0) <= tol

    def is_real(self, tol: float = EPS) -> bool:
        return max(abs(self.b), abs(self.c), abs(self.d)) <= tol

    def isclose(self, other, tol: float = 1e-12) -> bool:
        return float(np.max(np.abs(self.to_array() - _coerce(other).to_array()))) <= tol

    def __repr__(self):
        return f"Quaternion({self.a:g}, {self.b:g}, {self.c:g}, {self.d:g})"


def _coerce(x) -> Quaternion:
    if isinstance(x, Quaternion):
        return x
    if isinstance(x, (int, float)):
        return Quaternion(float(x))
    raise TypeError(f"cannot interpret {x!r} as a quaternion")


ONE = Quaternion(1.0)
I = Quaternion(0.0, 1.0)
J = Quaternion(0.0, 0.0, 1.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


def q_mul(p: Quaternion, q: Quaternion) -> Quaternion:
    return p * q


def q_conj(q: Quaternion) -> Quaternion:
    return q.conj()


def q_norm(q: Quaternion) -> float:
    return q.norm()


def is_unit(q: Quaternion, tol: float = EPS) -> bool:
    return q.is_unit(tol)


class QuaternionMatrix:
    """Dense matrix of quaternions backed by an ``(rows, cols, 4)`` array."""

    def __init__(self, data):
        data = np.array(data, dtype=float)
        if data.ndim != 3 or data.shape[2] != 4 or 0 in data.shape[:2]:
            raise ValueError(f"expected an array of shape (rows, cols, 4), got {data.shape}")
        if not np.all(np.isfinite(data)):
            raise ValueError("quaternion matrix has non-finite entries")
        self.data = data

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable]) -> "QuaternionMatrix":
        return cls([[_coerce(q).to_array() for q in row] for row in rows])

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape[0], self.data.shape[1]

    def __getitem__(self, idx) -> Quaternion:
        i, j = idx
        return Quaternion.from_array(self.data[i, j])

    def rows(self) -> list[list[Quaternion]]:
        r, c = self.shape
        return [[self[i, j] for j in range(c)] for i in range(r)]

    def conjugate(self) -> "QuaternionMatrix":
        """Entrywise conjugate (no transpose)."""
        return QuaternionMatrix(self.data * _CONJ)

    def conj_transpose(self) -> "QuaternionMatrix":
        return QuaternionMatrix(np.transpose(self.data * _CONJ, (1, 0, 2)))

    def __matmul__(self, other: "QuaternionMatrix") -> "QuaternionMatrix":
        if self.shape[1] != other.shape[0]:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        prod = hamilton(self.data[:, :, None, :], other.data[None, :, :, :])
        return QuaternionMatrix(prod.sum(axis=1))

    def allclose(self, other: "QuaternionMatrix", tol: float = 1e-12) -> bool:
        return self.shape == other.shape and float(np.max(np.abs(self.data - other.data))) <= tol

    def __repr__(self):
        return f"QuaternionMatrix(shape={self.shape})"


def _require_square(m: QuaternionMatrix) -> int:
    r, c = m.shape
    if r != c:
        raise ValueError(f"expected a square quaternion matrix, got {m.shape}")
    return r


def unit_defect(m: QuaternionMatrix) -> float:
    return float(np.max(np.abs(np.linalg.norm(m.data, axis=-1) - 1.0)))


def hadamard_defect(m: QuaternionMatrix) -> float:
    """Largest entry of ``M M^dagger - d*1``, with rows multiplied in that order."""
    d = _require_square(m)
    gram = (m @ m.conj_transpose()).data
    target = np.zeros_like(gram)
    target[np.arange(d), np.arange(d), 0] = d
    return float(np.max(np.abs(gram - target)))


def is_q_hadamard(m: QuaternionMatrix, tol: float = EPS) -> bool:
    _require_square(m)
    return unit_defect(m) <= tol and hadamard_defect(m) <= tol


def is_dephased(m: QuaternionMatrix, tol: float = EPS) -> bool:
    one = np.array([1.0, 0.0, 0.0, 0.0])
    return (
        float(np.max(np.abs(m.data[0, :, :] - one))) <= tol
        and float(np.max(np.abs(m.data[:, 0, :] - one))) <= tol
    )


def dephase_columns(m: QuaternionMatrix) -> QuaternionMatrix:
    """Left-multiply every column by the conjugate of its first entry."""
    first = m.data[0:1, :, :] * _CONJ
    return QuaternionMatrix(hamilton(np.broadcast_to(first, m.data.shape), m.data))


def dephase_rows(m: QuaternionMatrix) -> QuaternionMatrix:
    """Right-multiply every row by the conjugate of its first entry."""
    first = m.data[:, 0:1, :] * _CONJ
    return QuaternionMatrix(hamilton(m.data, np.broadcast_to(first, m.data.shape)))


def dephase(m: QuaternionMatrix, tol: float = EPS) -> QuaternionMatrix:
    """Bring ``m`` to dephased form: first row and first column all ones.

    Columns are fixed first (left multiplication by the conjugate of the
    first entry), then rows (right multiplication). Quaternions do not
    commute, so the order is observable in the result.

    These multiplications preserve the Hadamard property of the entrywise
    conjugate of ``m``, not of ``m`` itself; use :func:`dephase_hadamard`
    when the result has to stay a quaternionic Hadamard matrix.
    """
    _require_square(m)
    if unit_defect(m) > tol:
        raise ValueError("dephasing requires unit quaternion entries")
    return dephase_rows(dephase_columns(m))


def dephase_hadamard(m: QuaternionMatrix, tol: float = EPS) -> QuaternionMatrix:
    """Dephase while keeping ``M M^dagger = d*1``.

    Rows are left-multiplied by the conjugate of their first entry, then
    columns are right-multiplied by the conjugate of their (new) first entry.
    Under ``lift_matrix`` this is exactly normalizing the block-rows and then
    taking the canonical form of the resulting MUM pair.
    """
    _require_square(m)
    if unit_defect(m) > tol:
        raise ValueError("dephasing requires unit quaternion entries")
    first_col = m.data[:, 0:1, :] * _CONJ
    rows_done = hamilton(np.broadcast_to(first_col, m.data.shape), m.data)
    first_row = rows_done[0:1, :, :] * _CONJ
    return QuaternionMatrix(hamilton(rows_done, np.broadcast_to(first_row, m.data.shape)))


def has_noncommuting_pair(m: QuaternionMatrix, tol: float = EPS):
    """Look for two entries ``p, q`` with ``|pq - qp| > tol``.

    Entries are scanned in row-major order and the first offending pair is
    returned.

    Returns
    -------
    (found, witness)
        ``witness`` is ``((row1, col1), (row2, col2))`` with 1-based indices,
        or ``None``.
    """
    r, c = m.shape
    flat = m.data.reshape(r * c, 4)
    # pq - qp only depends on the vector parts: 2 (v_p x v_q)
    cross = 2 * np.cross(flat[:, None, 1:], flat[None, :, 1:])
    defect = np.linalg.norm(cross, axis=-1)
    hits = np.argwhere(np.triu(defect > tol, k=1))
    if hits.size == 0:
        return False, None
    first, second = (int(x) for x in hits[0])
    return True, ((first // c + 1, first % c + 1), (second // c + 1, second % c + 1))


@dataclass(frozen=True)
class PerfectSequence:
    """Candidate perfect sequence of quaternions; validated by :meth:`check`."""

    terms: tuple[Quaternion, ...]

    def __init__(self, terms: Sequence):
        object.__setattr__(self, "terms", tuple(_coerce(q) for q in terms))
        if not self.terms:
            raise ValueError("sequence must be non-empty")

    def __len__(self):
        return len(self.terms)

    def autocorrelation(self, t: int) -> Quaternion:
        return autocorrelation(self, t)

    def max_autocorrelation(self) -> float:
        d = len(self)
        return max((autocorrelation(self, t).norm() for t in range(1, d)), default=0.0)

    def is_perfect(self, tol: float = PERFECT_TOL) -> bool:
        return all(q.is_unit(tol) for q in self.terms) and self.max_autocorrelation() <= tol

    def check(self, tol: float = PERFECT_TOL) -> "PerfectSequence":
        bad = [i for i, q in enumerate(self.terms) if not q.is_unit(tol)]
        if bad:
            raise ValueError(f"terms at positions {bad} are not unit quaternions")
        worst = self.max_autocorrelation()
        if worst > tol:
            raise ValueError(f"periodic autocorrelation does not vanish (max norm {worst:.3g})")
        return self


def autocorrelation(seq, t: int) -> Quaternion:
    """Periodic autocorrelation ``sum_l q_l q*_{(l+t) mod d}``."""
    terms = seq.terms if isinstance(seq, PerfectSequence) else [_coerce(q) for q in seq]
    arr = np.array([q.to_array() for q in terms])
    shifted = np.roll(arr, -t, axis=0) * _CONJ
    return Quaternion.from_array(hamilton(arr, shifted).sum(axis=0))


def circulant_from_sequence(seq: PerfectSequence, tol: float = PERFECT_TOL) -> QuaternionMatrix:
    """Circulant matrix of a perfect sequence.

    The first row is the sequence and each further row is the previous one
    cyclically shifted one place to the right: ``M[i, j] = q[(j - i) mod d]``
    (0-based).
    """
    if not isinstance(seq, PerfectSequence):
        seq = PerfectSequence(seq)
    seq.check(tol)
    d = len(seq)
    arr = np.array([q.to_array() for q in seq.terms])
    idx = (np.arange(d)[None, :] - np.arange(d)[:, None]) % d
    return QuaternionMatrix(arr[idx])


_PAULI_LIFT = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1j], [1j, 0]],  # i -> iX
        [[0, -1], [1, 0]],  # j -> -iY
        [[1j, 0], [0, -1j]],  # k -> iZ
    ],
    dtype=complex,
)


def lift(q) -> np.ndarray:
    """2x2 complex matrix of a quaternion: ``a*1 + b*iX - c*iY + d*iZ``."""
    comps = _coerce(q).to_array() if not isinstance(q, np.ndarray) else q
    return np.tensordot(np.asarray(comps, dtype=float), _PAULI_LIFT, axes=([-1], [0]))


def lift_blocks(m: QuaternionMatrix) -> np.ndarray:
    """Array of shape ``(d, d, 2, 2)`` whose ``(b, j)`` block is ``lift(M[b, j]*)``."""
    return lift(m.data * _CONJ)


def lift_matrix(m: QuaternionMatrix, tol: float = EPS) -> BlockHadamard:
    """Hadamard matrix of 2x2 unitary blocks from a quaternionic Hadamard matrix.

    Block ``(b, j)`` is ``lift(conj(M[b, j]))``.
    """
    if not is_q_hadamard(m, tol):
        raise ValueError("input is not a quaternionic Hadamard matrix")
    return BlockHadamard(lift_blocks(m))
