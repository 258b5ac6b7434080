"""
Built-in constructions.

The ``h4``/``h5``/``h6`` Hadamard matrices of 2x2 unitaries are assembled
from Pauli combinations rather than decimal literals, so a transcription
slip shows up as a failed Hadamard check instead of a silent rounding error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import EPS, identity, is_unitary, matrix_power, max_abs, root_of_unity
from .mum import BlockHadamard, MumPair
from .quaternion import ONE, I, J, K, PerfectSequence, Quaternion, QuaternionMatrix, is_q_hadamard

DEFAULT_CAP = 256

ID2 = identity(2)
PX = np.array([[0, 1], [1, 0]], dtype=complex)
PY = np.array([[0, -1j], [1j, 0]], dtype=complex)
PZ = np.array([[1, 0], [0, -1]], dtype=complex)


def h4() -> BlockHadamard:
    i = 1j
    return BlockHadamard([
        [ID2, ID2, ID2, ID2],
        [ID2,
         2 * i / 3 * (PZ - PY) - ID2 / 3,
         2 * i / 3 * (PX - PZ) - ID2 / 3,
         2 * i / 3 * (PY - PX) - ID2 / 3],
        [ID2, i * PY, -ID2, -i * PY],
        [ID2,
         -2 / 3 * ID2 - i / 3 * (2 * PZ + PY),
         ID2 / 3 + 2 * i / 3 * (PZ - PX),
         -2 / 3 * ID2 + i / 3 * (2 * PX + PY)],
    ])


def h5() -> BlockHadamard:
    i = 1j
    s = math.sin(2 * math.pi / 3)
    c = math.cos(2 * math.pi / 3)
    A = -i * c * PY - i * s * PX
    B = -i * c * PY + i * s * PX
    Y = -i * PY
    return BlockHadamard([
        [ID2, ID2, ID2, ID2, ID2],
        [ID2, -ID2, A, B, Y],
        [ID2, A, -ID2, Y, B],
        [ID2, B, Y, -ID2, A],
        [ID2, Y, B, A, -ID2],
    ])


def h6() -> BlockHadamard:
    i = 1j
    return BlockHadamard([
        [ID2, ID2, ID2, ID2, ID2, ID2],
        [ID2, -ID2, -i * PZ, i * PZ, i * PY, -i * PY],
        [ID2, -i * PX, -ID2, i * PY, -i * PY, i * PX],
        [ID2, i * PX, i * PY, -ID2, -i * PY, -i * PX],
        [ID2, i * PY, -i * PY, -i * PY, -ID2, i * PY],
        [ID2, -i * PY, i * PZ, -i * PZ, i * PY, -ID2],
    ])


@dataclass(frozen=True)
class CdParams:
    """Parameters ``a = a1 + a2*i`` and ``b = b1 + b2*j`` (unit quaternions)."""

    a1: float
    a2: float
    b1: float
    b2: float

    def __post_init__(self):
        if abs(math.hypot(self.a1, self.a2) - 1) > EPS:
            raise ValueError("a = a1 + a2*i must be a unit quaternion")
        if abs(math.hypot(self.b1, self.b2) - 1) > EPS:
            raise ValueError("b = b1 + b2*j must be a unit quaternion")

    @classmethod
    def from_angles(cls, alpha: float, beta: float) -> "CdParams":
        return cls(math.cos(alpha), math.sin(alpha), math.cos(beta), math.sin(beta))

    @property
    def a(self) -> Quaternion:
        return Quaternion(self.a1, self.a2)

    @property
    def b(self) -> Quaternion:
        return Quaternion(self.b1, 0.0, self.b2)


def cd_special(p: CdParams, tol: float = EPS) -> QuaternionMatrix:
    """4x4 quaternionic Hadamard matrix of the two-parameter special family."""
    a, b = p.a, p.b
    ab = a * b
    x = -0.5 * (ONE + a + b - ab)
    z = -0.5 * (ONE + a - b + ab)
    y = -0.5 * (ONE - a + b + ab)
    w = -0.5 * (ONE - a - b - ab)
    m = QuaternionMatrix.from_rows([
        [ONE, ONE, ONE, ONE],
        [ONE, -ONE, b, -b],
        [ONE, a, x, z],
        [ONE, -a, y, w],
    ])
    if not is_q_hadamard(m, tol):
        raise ArithmeticError("special-family matrix failed the M M^dagger = 4*1 check")
    return m


def kuznetsov5() -> PerfectSequence:
    """The length-5 perfect sequence ``(1, j, j, 1, q)`` with ``q = (-1 + i - j - k)/2``."""
    q = (-ONE + I - J - K) * 0.5
    return PerfectSequence([ONE, J, J, ONE, q])


def gen_pauli(d: int) -> tuple[np.ndarray, np.ndarray]:
    """Clock ``Z_d = sum_j omega^j |j><j|`` and shift ``X_d = sum_j |j+1><j|`` (1-based)."""
    if d < 2:
        raise ValueError("d must be at least 2")
    w = root_of_unity(d)
    z = np.diag([w ** (j % d) for j in range(1, d + 1)]).astype(complex)
    x = np.roll(identity(d), 1, axis=0)
    return z, x


def standard_mub_pair(d: int) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Computational basis and Fourier basis projectors on ``C^d``."""
    if d < 2:
        raise ValueError("d must be at least 2")
    e = identity(d)
    P = [np.outer(e[a], e[a]) for a in range(d)]
    Q = []
    for b in range(1, d + 1):
        i = np.arange(1, d + 1)
        chi = np.exp(2j * np.pi * ((i * b) % d) / d) / np.sqrt(d)
        Q.append(np.outer(chi, chi.conj()))
    return P, Q


def mub_mum_pair(d: int) -> MumPair:
    """The standard MUB pair as a MUM pair with ``n = 1``: ``U[b, j] = omega**((j-1) b)``."""
    if d < 2:
        raise ValueError("d must be at least 2")
    b = np.arange(1, d + 1)[:, None]
    j = np.arange(d)[None, :]
    return MumPair(np.exp(2j * np.pi * ((j * b) % d) / d))


def fourier_hadamard(d: int) -> BlockHadamard:
    """Dephased Fourier matrix as a Hadamard matrix with block size 1."""
    idx = np.arange(d)
    return BlockHadamard(np.exp(2j * np.pi * (np.outer(idx, idx) % d) / d))


@dataclass(frozen=True)
class TowerSpec:
    d: int
    n: int
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        if self.d < 2 or self.n < 2:
            raise ValueError("tower needs d >= 2 and n >= 2")
        if self.d**self.n > self.cap:
            raise ValueError(f"dimension d**n = {self.d ** self.n} exceeds the cap {self.cap}")


def pauli_tower(spec: TowerSpec) -> list[np.ndarray]:
    """Operators ``A_j = X^(x)(j-1) (x) Z (x) 1^(x)(n-j)`` on ``(C^d)^(x)n``."""
    z, x = gen_pauli(spec.d)
    one = identity(spec.d)
    ops = []
    for j in range(spec.n):
        factors = [x] * j + [z] + [one] * (spec.n - j - 1)
        a = factors[0]
        for f in factors[1:]:
            a = np.kron(a, f)
        ops.append(a)
    return ops


def spectral_projectors(a: np.ndarray, d: int, tol: float = EPS) -> list[np.ndarray]:
    """Projectors onto the ``omega**a`` eigenspaces of ``A`` with ``A**d = 1``.

    ``Pi_a = (1/d) sum_{m=1}^{d} omega**(-a m) A**m`` for ``a = 1..d``.
    """
    if not is_unitary(a, tol):
        raise ValueError("operator is not unitary")
    powers = [matrix_power(a, m) for m in range(1, d + 1)]
    if max_abs(powers[-1] - identity(a.shape[0])) > tol:
        raise ValueError(f"operator does not satisfy A**{d} = 1")
    w = root_of_unity(d)
    return [sum(w ** (-(k * m) % d) * powers[m - 1] for m in range(1, d + 1)) / d for k in range(1, d + 1)]


def tower_to_measurements(ops: list[np.ndarray], d: int, tol: float = EPS) -> list[list[np.ndarray]]:
    return [spectral_projectors(a, d, tol) for a in ops]


def heisenberg_weyl(d: int) -> list[np.ndarray]:
    """The ``d*d`` operators ``X^s Z^t``, enumerated with index ``s*d + t``."""
    z, x = gen_pauli(d)
    return [matrix_power(x, s) @ matrix_power(z, t) for s in range(d) for t in range(d)]
