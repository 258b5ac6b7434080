"""
Superdense coding protocols built from a MUM pair.

Registers: the sender holds ``A = A' (x) A''`` with ``A' = C^n`` and
``A'' = C^d``; the receiver holds ``B = C^(nd)`` and, after transmission,
``A''``. Encoders act on ``A``, which is ordered block factor first like the
MUM projectors. Message ``(s, t)`` with ``s, t`` in ``1..d`` is also
numbered ``i = (s-1)*d + t``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .linalg import (
    EPS,
    check_tol,
    identity,
    is_unitary,
    jacobi_eigh,
    matrix_power,
    max_abs,
    orthonormal_columns,
    partial_trace,
    root_of_unity,
)
from .mum import DIRECT_SUM_TOL, MumPair, build_projectors, direct_sum_test

SDC_TOL = 1e-9
CLOSED_FORM_TOL = 1e-10
RECONSTRUCTION_TOL = 1e-11


def message_index(s: int, t: int, d: int) -> int:
    _check_message(s, t, d)
    return (s - 1) * d + t


def message_pair(i: int, d: int) -> tuple[int, int]:
    if not 1 <= i <= d * d:
        raise ValueError(f"message index {i} out of range [1, {d * d}]")
    return (i - 1) // d + 1, (i - 1) % d + 1


def _check_message(s: int, t: int, d: int) -> None:
    if not (1 <= s <= d and 1 <= t <= d):
        raise ValueError(f"message ({s}, {t}) out of range for d = {d}")


def max_entangled(dim: int) -> np.ndarray:
    """``(1/sqrt(dim)) sum_p |p>|p>`` as a vector of length ``dim**2``."""
    if int(dim) != dim or dim < 1:
        raise ValueError(f"dimension must be a positive integer, got {dim!r}")
    dim = int(dim)
    v = np.zeros(dim * dim, dtype=complex)
    v[np.arange(dim) * (dim + 1)] = 1 / np.sqrt(dim)
    return v


@dataclass
class Decoder:
    """Projective decoding measurement; ``abort`` is set only in diagnostic mode."""

    projectors: list
    abort: Optional[np.ndarray] = None

    @property
    def outcomes(self) -> int:
        return len(self.projectors) + (self.abort is not None)

    def all_projectors(self) -> list:
        return self.projectors + ([self.abort] if self.abort is not None else [])


@dataclass
class SdcProtocol:
    d: int
    n: int
    encoders: np.ndarray  # shape (d, d, nd, nd), [s-1, t-1] -> W_st
    source: Optional[MumPair] = None
    R: Optional[np.ndarray] = None
    S: Optional[np.ndarray] = None
    decoder: Optional[Decoder] = None

    @property
    def dim(self) -> int:
        return self.n * self.d

    @property
    def receiver_dim(self) -> int:
        return self.d * self.dim

    @property
    def shared_state(self) -> np.ndarray:
        return max_entangled(self.dim)

    def encoder(self, s: int, t: int) -> np.ndarray:
        _check_message(s, t, self.d)
        return self.encoders[s - 1, t - 1]

    def messages(self) -> list[tuple[int, int]]:
        return [(s, t) for s in range(1, self.d + 1) for t in range(1, self.d + 1)]

    def with_encoder(self, s: int, t: int, w) -> "SdcProtocol":
        """Copy with ``W_st`` replaced; the decoder is dropped."""
        _check_message(s, t, self.d)
        w = np.asarray(w, dtype=complex)
        if w.shape != (self.dim, self.dim):
            raise ValueError(f"encoder must be {self.dim}x{self.dim}")
        enc = self.encoders.copy()
        enc[s - 1, t - 1] = w
        return replace(self, encoders=enc, decoder=None)


def encoders_from_mums(m: MumPair, tol: float = EPS) -> SdcProtocol:
    """Encoders ``W_st = R^s S^t`` with ``R = sum_a w^a P_a`` and ``S = sum_b w^b Q_b``.

    The closed form ``sum_{a,b} w^(sa + tb) P_a Q_b`` is recomputed for
    every message and must agree with the power form.
    """
    P, Q = build_projectors(m, tol)
    d, n = m.d, m.n
    w = root_of_unity(d)
    phases = w ** np.arange(1, d + 1)
    R = np.einsum("a,aij->ij", phases, np.array(P))
    S = np.einsum("b,bij->ij", phases, np.array(Q))
    r_pow = [matrix_power(R, s) for s in range(1, d + 1)]
    s_pow = [matrix_power(S, t) for t in range(1, d + 1)]
    enc = np.array([[r_pow[s] @ s_pow[t] for t in range(d)] for s in range(d)])

    PQ = np.einsum("aij,bjk->abik", np.array(P), np.array(Q))
    a = np.arange(1, d + 1)
    for s in range(1, d + 1):
        for t in range(1, d + 1):
            coeff = w ** ((np.outer(s * a, np.ones(d)) + np.outer(np.ones(d), t * a)) % d)
            closed = np.einsum("ab,abik->ik", coeff, PQ)
            gap = max_abs(closed - enc[s - 1, t - 1])
            if gap > CLOSED_FORM_TOL:
                raise ArithmeticError(f"closed form of W_{s}{t} disagrees with R^s S^t by {gap:.3g}")
    return SdcProtocol(d=d, n=n, encoders=enc, source=m, R=R, S=S)


def receiver_vectors(proto: SdcProtocol, s: int, t: int) -> np.ndarray:
    """Columns ``psi^x = (1/sqrt d) sum_l |l> (x) W^T |x l>`` for ``x = 1..n``."""
    d, n = proto.d, proto.n
    wt = proto.encoder(s, t).T
    # column (x, l) of W^T, with A = C^n (x) C^d
    cols = wt.reshape(proto.dim, n, d)
    # psi[x][l, :] = cols[:, x, l]
    psi = np.einsum("pxl->xlp", cols).reshape(n, d * proto.dim) / np.sqrt(d)
    return psi.T


def reduced_receiver_state(proto: SdcProtocol, s: int, t: int) -> np.ndarray:
    """State of ``A'' B`` after encoding ``(s, t)``: ``(1/n) sum_x |psi^x><psi^x|``."""
    psi = receiver_vectors(proto, s, t)
    return psi @ psi.conj().T / proto.n


def reduced_receiver_state_partial_trace(proto: SdcProtocol, s: int, t: int) -> np.ndarray:
    """Same state by tracing ``A'`` out of ``(W_st (x) 1)|Phi+><Phi+|(W_st (x) 1)^H``."""
    phi = proto.shared_state
    v = np.kron(proto.encoder(s, t), identity(proto.dim)) @ phi
    return partial_trace(np.outer(v, v.conj()), [proto.n, proto.d, proto.dim], keep=[1, 2])


def _support_from_vectors(psi: np.ndarray, tol: float) -> np.ndarray:
    # rho = psi psi^H / n shares its nonzero spectrum with the n x n Gram matrix
    n = psi.shape[1]
    w, u = jacobi_eigh(psi.conj().T @ psi / n)
    keep = w > tol
    vecs = psi @ u[:, keep] / np.sqrt(n * w[keep])
    return vecs @ vecs.conj().T


def _all_states(proto: SdcProtocol) -> np.ndarray:
    return np.array([reduced_receiver_state(proto, s, t) for s, t in proto.messages()])


def _overlaps(states: np.ndarray) -> np.ndarray:
    return np.einsum("iab,jba->ij", states, states).real


@dataclass
class OrthogonalityReport:
    max_offdiag: float
    purity_defect: float
    trace_defect: float
    tol: float

    @property
    def passed(self) -> bool:
        return max(self.max_offdiag, self.purity_defect, self.trace_defect) <= self.tol


def orthogonality_report(proto: SdcProtocol, tol: float = SDC_TOL) -> OrthogonalityReport:
    tol = check_tol(tol)
    states = _all_states(proto)
    ov = _overlaps(states)
    offdiag = ov - np.diag(np.diag(ov))
    traces = np.einsum("iaa->i", states).real
    return OrthogonalityReport(
        max_offdiag=float(np.max(np.abs(offdiag))),
        purity_defect=float(np.max(np.abs(np.diag(ov) - 1 / proto.n))),
        trace_defect=float(np.max(np.abs(traces - 1))),
        tol=tol,
    )


def verify_orthogonality(proto: SdcProtocol, tol: float = SDC_TOL) -> float:
    """Max of ``|tr(rho_st rho_s't')|`` over distinct messages."""
    return orthogonality_report(proto, tol).max_offdiag


def build_decoder(proto: SdcProtocol, tol: float = SDC_TOL, strict: bool = True) -> Decoder:
    """Decoding measurement: ``M_i`` is the support projector of ``rho_i``.

    The support is read off the ``n`` receiver vectors, so only an ``n x n``
    eigenproblem is solved per message.

    In strict mode the states must pass the orthogonality check. With
    ``strict=False`` supports are orthogonalized in message order, so a later
    message loses whatever overlaps an earlier one, and the unused part of
    the space becomes an extra abort outcome.
    """
    tol = check_tol(tol)
    dim = proto.receiver_dim
    supports = [_support_from_vectors(receiver_vectors(proto, s, t), tol) for s, t in proto.messages()]
    if strict:
        rep = orthogonality_report(proto, tol)
        if not rep.passed:
            raise ValueError(
                f"reduced states are not perfectly distinguishable "
                f"(overlap {rep.max_offdiag:.3g}, purity defect {rep.purity_defect:.3g})"
            )
        projs = supports
        rest = identity(dim) - sum(projs)
    else:
        taken = np.zeros((dim, 0), dtype=complex)
        projs = []
        for support in supports:
            vecs = orthonormal_columns(support, against=taken if taken.shape[1] else None)
            projs.append(vecs @ vecs.conj().T)
            taken = np.concatenate([taken, vecs], axis=1)
        rest = identity(dim) - taken @ taken.conj().T
    abort = rest if max_abs(rest) > tol else None
    return Decoder(projs, abort)


@dataclass
class SimulationResult:
    message: tuple[int, int]
    decoded: Optional[tuple[int, int]]
    success_probability: float
    probabilities: list

    def to_dict(self) -> dict:
        return {
            "message": list(self.message),
            "decoded": list(self.decoded) if self.decoded is not None else None,
            "success_probability": self.success_probability,
            "probabilities": self.probabilities,
        }


def simulate(proto: SdcProtocol, message: tuple[int, int]) -> SimulationResult:
    """Encode ``message``, measure with the decoder, report the most likely outcome."""
    if proto.decoder is None:
        raise ValueError("protocol has no decoder; call build_decoder first")
    s, t = message
    _check_message(s, t, proto.d)
    rho = reduced_receiver_state(proto, s, t)
    probs = [float(np.real(np.trace(M @ rho))) for M in proto.decoder.all_projectors()]
    best = int(np.argmax(probs))
    decoded = message_pair(best + 1, proto.d) if best < proto.d ** 2 else None
    return SimulationResult(
        message=(s, t),
        decoded=decoded,
        success_probability=probs[message_index(s, t, proto.d) - 1],
        probabilities=probs,
    )


def q_reconstruction_defect(proto: SdcProtocol) -> float:
    """Max over ``b`` of ``|Q_b - (1/d) sum_j w^(-bj) S^j|``."""
    if proto.source is None or proto.S is None:
        raise ValueError("protocol was not built from a MUM pair")
    _, Q = build_projectors(proto.source)
    d = proto.d
    w = root_of_unity(d)
    s_pow = [matrix_power(proto.S, j) for j in range(1, d + 1)]
    worst = 0.0
    for b in range(1, d + 1):
        rebuilt = sum(w ** (-(b * j) % d) * s_pow[j - 1] for j in range(1, d + 1)) / d
        worst = max(worst, max_abs(Q[b - 1] - rebuilt))
    return worst


def root_defect(proto: SdcProtocol) -> float:
    """``max(|R^d - 1|, |S^d - 1|)``."""
    one = identity(proto.dim)
    return max(max_abs(matrix_power(proto.R, proto.d) - one), max_abs(matrix_power(proto.S, proto.d) - one))


@dataclass
class SdcReport:
    d: int
    n: int
    orthogonality_max_offdiag: float
    purity_defect: float
    decode_success_min: float
    is_valid_protocol: bool
    direct_sum_of_mubs: bool
    witness: Optional[tuple] = None
    q_reconstruction: float = 0.0
    root_defect: float = 0.0
    success_probabilities: dict = field(default_factory=dict)
    tol: float = SDC_TOL

    @property
    def conjecture_counterexample(self) -> bool:
        return bool(self.is_valid_protocol and not self.direct_sum_of_mubs)

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "n": self.n,
            "orthogonality_max_offdiag": self.orthogonality_max_offdiag,
            "purity_defect": self.purity_defect,
            "decode_success_min": self.decode_success_min,
            "is_valid_protocol": self.is_valid_protocol,
            "direct_sum_of_mubs": self.direct_sum_of_mubs,
            "conjecture_counterexample": self.conjecture_counterexample,
            "witness": list(self.witness) if self.witness is not None else None,
            "q_reconstruction": self.q_reconstruction,
            "root_defect": self.root_defect,
            "success_probabilities": self.success_probabilities,
            "tol": self.tol,
        }


def rigidity_witness(m: MumPair, tol: float = SDC_TOL, direct_sum_tol: float = DIRECT_SUM_TOL) -> SdcReport:
    """Run the protocol built from ``m`` end to end and test for a direct sum.

    A valid protocol from a pair that is not a direct sum of MUBs is flagged
    as a counterexample to rigidity.
    """
    tol = check_tol(tol)
    if not m.is_canonical(tol):
        raise ValueError("rigidity_witness needs a canonical MUM pair; call canonicalize first")
    proto = encoders_from_mums(m, min(tol, EPS))
    orth = orthogonality_report(proto, tol)
    recon = q_reconstruction_defect(proto)
    roots = root_defect(proto)
    probs = {}
    success_min = 0.0
    if orth.passed:
        proto.decoder = build_decoder(proto, tol)
        results = [simulate(proto, msg) for msg in proto.messages()]
        probs = {f"{r.message[0]},{r.message[1]}": r.success_probability for r in results}
        success_min = min(r.success_probability for r in results)
    ds, witness = direct_sum_test(m, direct_sum_tol)
    valid = orth.passed and success_min >= 1 - tol and recon <= RECONSTRUCTION_TOL
    return SdcReport(
        d=m.d,
        n=m.n,
        orthogonality_max_offdiag=orth.max_offdiag,
        purity_defect=orth.purity_defect,
        decode_success_min=success_min,
        is_valid_protocol=bool(valid),
        direct_sum_of_mubs=ds,
        witness=witness,
        q_reconstruction=recon,
        root_defect=roots,
        success_probabilities=probs,
        tol=tol,
    )


def _unitary_stack(Es: Sequence) -> np.ndarray:
    arr = np.array([np.asarray(e, dtype=complex) for e in Es])
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
        raise ValueError("expected a list of square matrices of equal size")
    return arr


def gram_matrix(Es: Sequence) -> np.ndarray:
    """Hilbert-Schmidt Gram matrix ``G[i, j] = tr(E_i^H E_j)``."""
    arr = _unitary_stack(Es)
    return np.einsum("iab,jab->ij", arr.conj(), arr)


def verify_orthogonal_unitary_basis(Es: Sequence, tol: float = EPS) -> bool:
    """``d*d`` unitaries on ``C^d`` whose Gram matrix is ``d * 1``."""
    arr = _unitary_stack(Es)
    dim = arr.shape[1]
    if arr.shape[0] != dim * dim:
        return False
    if not all(is_unitary(e, tol) for e in arr):
        return False
    return max_abs(gram_matrix(arr) - dim * identity(len(arr))) <= tol


def encoder_gram(proto: SdcProtocol) -> np.ndarray:
    """Gram matrix of the encoders in message order (reported, not judged)."""
    return gram_matrix(proto.encoders.reshape(proto.d * proto.d, proto.dim, proto.dim))
