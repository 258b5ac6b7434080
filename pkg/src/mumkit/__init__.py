"""Mutually unbiased measurements, quaternionic Hadamard matrices and superdense coding."""

__version__ = "0.1.0"

from .linalg import eig_normal, jacobi_eigh, partial_trace, support_projector
from .mum import (
    BlockHadamard,
    MumPair,
    MumReport,
    build_projectors,
    canonicalize,
    direct_sum_test,
    extend_outcomes,
    extract_mub_blocks,
    from_block_hadamard,
    gauge_transform,
    normalize,
    verify_mub_pair,
    verify_mum_conditions,
    verify_mum_pair,
    verify_unitary_hadamard,
)
from .quaternion import (
    PerfectSequence,
    Quaternion,
    QuaternionMatrix,
    circulant_from_sequence,
    dephase,
    dephase_hadamard,
    has_noncommuting_pair,
    is_q_hadamard,
    lift,
    lift_matrix,
)
from .sdc import (
    SdcProtocol,
    SdcReport,
    build_decoder,
    encoders_from_mums,
    reduced_receiver_state,
    rigidity_witness,
    simulate,
    verify_orthogonal_unitary_basis,
    verify_orthogonality,
)

__all__ = [
    "__version__",
    "BlockHadamard",
    "MumPair",
    "MumReport",
    "PerfectSequence",
    "Quaternion",
    "QuaternionMatrix",
    "SdcProtocol",
    "SdcReport",
    "build_decoder",
    "build_projectors",
    "canonicalize",
    "circulant_from_sequence",
    "dephase",
    "dephase_hadamard",
    "direct_sum_test",
    "eig_normal",
    "encoders_from_mums",
    "extend_outcomes",
    "extract_mub_blocks",
    "from_block_hadamard",
    "gauge_transform",
    "has_noncommuting_pair",
    "is_q_hadamard",
    "jacobi_eigh",
    "lift",
    "lift_matrix",
    "normalize",
    "partial_trace",
    "reduced_receiver_state",
    "rigidity_witness",
    "simulate",
    "support_projector",
    "verify_mub_pair",
    "verify_mum_conditions",
    "verify_mum_pair",
    "verify_orthogonal_unitary_basis",
    "verify_orthogonality",
    "verify_unitary_hadamard",
]
