"""
JSON encodings for matrices, quaternion data, MUM pairs and reports.

Complex matrices are ``{"rows", "cols", "entries": [[re, im], ...]}`` in
row-major order. Top-level objects carry a ``"type"`` tag so a file can be
loaded without knowing what produced it. Floats go through ``json``'s
shortest round-trip repr, so values survive a write/read cycle exactly.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from . import __version__
from .mum import BlockHadamard, MumPair
from .quaternion import PerfectSequence, Quaternion, QuaternionMatrix


class FormatError(ValueError):
    """Input is not a well-formed encoding of the expected object."""


def _require(obj: Any, keys: tuple[str, ...], what: str) -> None:
    if not isinstance(obj, dict):
        raise FormatError(f"{what}: expected a JSON object")
    missing = [k for k in keys if k not in obj]
    if missing:
        raise FormatError(f"{what}: missing keys {missing}")


def _number(x: Any, what: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise FormatError(f"{what}: expected a number, got {x!r}")
    return float(x)


def _count(x: Any, what: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int) or x < 1:
        raise FormatError(f"{what}: expected a positive integer, got {x!r}")
    return x


def encode_matrix(a) -> dict:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    return {
        "rows": a.shape[0],
        "cols": a.shape[1],
        "entries": [[float(z.real), float(z.imag)] for z in a.ravel()],
    }


def decode_matrix(obj: Any) -> np.ndarray:
    _require(obj, ("rows", "cols", "entries"), "matrix")
    r, c = _count(obj["rows"], "matrix rows"), _count(obj["cols"], "matrix cols")
    entries = obj["entries"]
    if not isinstance(entries, list) or len(entries) != r * c:
        raise FormatError(f"matrix: expected {r * c} entries")
    out = np.empty(r * c, dtype=complex)
    for i, e in enumerate(entries):
        if isinstance(e, list) and len(e) == 2:
            out[i] = complex(_number(e[0], "entry"), _number(e[1], "entry"))
        else:
            out[i] = _number(e, "entry")
    return out.reshape(r, c)


def encode_quaternion(q: Quaternion) -> list:
    return [float(x) for x in q.to_array()]


def decode_quaternion(obj: Any) -> Quaternion:
    if not isinstance(obj, list) or len(obj) != 4:
        raise FormatError(f"quaternion: expected [a, b, c, d], got {obj!r}")
    return Quaternion(*(_number(x, "quaternion component") for x in obj))


def encode_qmatrix(m: QuaternionMatrix) -> dict:
    r, c = m.shape
    return {
        "type": "quaternion_matrix",
        "rows": r,
        "cols": c,
        "entries": [[float(x) for x in e] for e in m.data.reshape(r * c, 4)],
    }


def decode_qmatrix(obj: Any) -> QuaternionMatrix:
    _require(obj, ("rows", "cols", "entries"), "quaternion matrix")
    r, c = _count(obj["rows"], "rows"), _count(obj["cols"], "cols")
    entries = obj["entries"]
    if not isinstance(entries, list) or len(entries) != r * c:
        raise FormatError(f"quaternion matrix: expected {r * c} entries")
    data = np.array([decode_quaternion(e).to_array() for e in entries]).reshape(r, c, 4)
    return QuaternionMatrix(data)


def encode_sequence(seq: PerfectSequence) -> dict:
    return {"type": "perfect_sequence", "terms": [encode_quaternion(q) for q in seq.terms]}


def decode_sequence(obj: Any) -> PerfectSequence:
    _require(obj, ("terms",), "sequence")
    terms = obj["terms"]
    if not isinstance(terms, list) or not terms:
        raise FormatError("sequence: 'terms' must be a non-empty list")
    return PerfectSequence([decode_quaternion(t) for t in terms])


def _encode_blocks(blocks: np.ndarray) -> list:
    return [[encode_matrix(u) for u in row] for row in blocks]


def _decode_blocks(obj: Any, d: int, k: int, what: str) -> np.ndarray:
    if not isinstance(obj, list) or len(obj) != d or any(not isinstance(r, list) or len(r) != d for r in obj):
        raise FormatError(f"{what}: 'blocks' must be a {d}x{d} nested list")
    blocks = np.array([[decode_matrix(u) for u in row] for row in obj])
    if blocks.shape != (d, d, k, k):
        raise FormatError(f"{what}: blocks have shape {blocks.shape[2:]}, expected ({k}, {k})")
    return blocks


def encode_mum_pair(m: MumPair) -> dict:
    return {"type": "mum_pair", "d": m.d, "n": m.n, "canonical": m.canonical, "blocks": _encode_blocks(m.blocks)}


def decode_mum_pair(obj: Any) -> MumPair:
    _require(obj, ("d", "n", "blocks"), "MUM pair")
    d, n = _count(obj["d"], "d"), _count(obj["n"], "n")
    try:
        return MumPair(_decode_blocks(obj["blocks"], d, n, "MUM pair"))
    except FormatError:
        raise
    except ValueError as exc:
        raise FormatError(f"MUM pair: {exc}") from exc


def encode_block_hadamard(h: BlockHadamard) -> dict:
    return {"type": "block_hadamard", "d": h.d, "k": h.k, "blocks": _encode_blocks(h.blocks)}


def decode_block_hadamard(obj: Any) -> BlockHadamard:
    _require(obj, ("d", "k", "blocks"), "block Hadamard matrix")
    d, k = _count(obj["d"], "d"), _count(obj["k"], "k")
    try:
        return BlockHadamard(_decode_blocks(obj["blocks"], d, k, "block Hadamard matrix"))
    except FormatError:
        raise
    except ValueError as exc:
        raise FormatError(f"block Hadamard matrix: {exc}") from exc


def encode_measurements(P, Q) -> dict:
    return {"type": "measurements", "P": [encode_matrix(p) for p in P], "Q": [encode_matrix(q) for q in Q]}


def decode_measurements(obj: Any) -> tuple[list, list]:
    _require(obj, ("P", "Q"), "measurements")
    if not isinstance(obj["P"], list) or not isinstance(obj["Q"], list):
        raise FormatError("measurements: 'P' and 'Q' must be lists of matrices")
    return [decode_matrix(p) for p in obj["P"]], [decode_matrix(q) for q in obj["Q"]]


def encode_operators(ops, **meta) -> dict:
    return {"type": "operators", **meta, "operators": [encode_matrix(a) for a in ops]}


def decode_operators(obj: Any) -> list:
    _require(obj, ("operators",), "operator list")
    if not isinstance(obj["operators"], list) or not obj["operators"]:
        raise FormatError("operator list: 'operators' must be a non-empty list")
    return [decode_matrix(a) for a in obj["operators"]]


_DECODERS = {
    "quaternion_matrix": decode_qmatrix,
    "perfect_sequence": decode_sequence,
    "mum_pair": decode_mum_pair,
    "block_hadamard": decode_block_hadamard,
    "measurements": decode_measurements,
    "operators": decode_operators,
}


def guess_type(obj: Any) -> str:
    """Type tag of a decoded JSON document, inferred from its keys if untagged."""
    if not isinstance(obj, dict):
        raise FormatError("expected a JSON object at top level")
    tag = obj.get("type")
    if tag is not None:
        if tag not in _DECODERS:
            raise FormatError(f"unknown type tag {tag!r}")
        return tag
    keys = set(obj)
    if {"d", "n", "blocks"} <= keys:
        return "mum_pair"
    if {"d", "k", "blocks"} <= keys:
        return "block_hadamard"
    if "terms" in keys:
        return "perfect_sequence"
    if {"P", "Q"} <= keys:
        return "measurements"
    if "operators" in keys:
        return "operators"
    if {"rows", "cols", "entries"} <= keys:
        entries = obj["entries"]
        if isinstance(entries, list) and entries and isinstance(entries[0], list) and len(entries[0]) == 4:
            return "quaternion_matrix"
    raise FormatError("cannot tell what kind of object this is")


def decode_any(obj: Any) -> tuple[str, Any]:
    tag = guess_type(obj)
    try:
        return tag, _DECODERS[tag](obj)
    except FormatError:
        raise
    except ValueError as exc:
        raise FormatError(f"{tag}: {exc}") from exc


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from exc


def dumps(obj: Any, indent: int | None = None) -> str:
    return json.dumps(obj, indent=indent, default=_default)


def _default(x: Any):
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def with_provenance(report: dict, tol: float) -> dict:
    """Attach the tolerance and library version to a report."""
    return {**report, "tol": tol, "version": __version__}
