import json

import numpy as np
import pytest

from builders import random_direct_sum
from mumkit.catalog import CdParams, cd_special, h4, h6, kuznetsov5, standard_mub_pair
from mumkit.mum import MumPair, from_block_hadamard
from mumkit.quaternion import Quaternion
from mumkit.serialize import (
    FormatError,
    decode_any,
    decode_matrix,
    decode_quaternion,
    dumps,
    encode_block_hadamard,
    encode_matrix,
    encode_measurements,
    encode_mum_pair,
    encode_qmatrix,
    encode_sequence,
    guess_type,
    loads,
    with_provenance,
)


def through_json(doc):
    return loads(dumps(doc))


def test_matrix_roundtrip_exact():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(3, 4)) + 1j * rng.normal(size=(3, 4))
    back = decode_matrix(through_json(encode_matrix(a)))
    assert np.array_equal(back, a)


def test_matrix_real_entries_accepted():
    assert np.array_equal(decode_matrix({"rows": 1, "cols": 2, "entries": [1, [0, 2]]}), [[1, 2j]])


@pytest.mark.parametrize("bad", [
    {"rows": 2, "cols": 2, "entries": [[1, 0]]},
    {"rows": 0, "cols": 1, "entries": []},
    {"rows": 1, "cols": 1, "entries": [["x", 0]]},
    {"rows": 1, "cols": 1, "entries": [[True, 0]]},
    {"cols": 1, "entries": [[1, 0]]},
    [1, 2],
])
def test_matrix_malformed(bad):
    with pytest.raises(FormatError):
        decode_matrix(bad)


def test_quaternion():
    assert decode_quaternion([0.5, -0.5, 0.5, -0.5]).isclose(Quaternion(0.5, -0.5, 0.5, -0.5))
    with pytest.raises(FormatError):
        decode_quaternion([1, 2, 3])


def test_block_hadamard_roundtrip():
    h = h6()
    tag, back = decode_any(through_json(encode_block_hadamard(h)))
    assert tag == "block_hadamard" and np.array_equal(back.blocks, h.blocks)


def test_mum_pair_roundtrip():
    m, _ = random_direct_sum(np.random.default_rng(1), 3, 2)
    doc = through_json(encode_mum_pair(m))
    assert doc["d"] == 3 and doc["n"] == 2 and doc["canonical"] is m.canonical
    tag, back = decode_any(doc)
    assert tag == "mum_pair" and np.array_equal(back.blocks, m.blocks)


def test_qmatrix_and_sequence_roundtrip():
    m = cd_special(CdParams.from_angles(0.4, 1.1))
    tag, back = decode_any(through_json(encode_qmatrix(m)))
    assert tag == "quaternion_matrix" and back.allclose(m, 0)
    tag, seq = decode_any(through_json(encode_sequence(kuznetsov5())))
    assert tag == "perfect_sequence" and all(a == b for a, b in zip(seq.terms, kuznetsov5().terms))


def test_measurements_roundtrip():
    P, Q = standard_mub_pair(3)
    tag, (P2, Q2) = decode_any(through_json(encode_measurements(P, Q)))
    assert tag == "measurements"
    assert all(np.array_equal(a, b) for a, b in zip(P + Q, P2 + Q2))


def test_untagged_documents():
    doc = encode_block_hadamard(h4())
    del doc["type"]
    assert guess_type(doc) == "block_hadamard"
    seq = encode_sequence(kuznetsov5())
    del seq["type"]
    assert guess_type(seq) == "perfect_sequence"
    qm = encode_qmatrix(cd_special(CdParams(1, 0, 1, 0)))
    del qm["type"]
    assert guess_type(qm) == "quaternion_matrix"


def test_unknown_and_wrong_shapes():
    with pytest.raises(FormatError):
        guess_type({"type": "banana"})
    with pytest.raises(FormatError):
        guess_type({"hello": 1})
    doc = encode_mum_pair(from_block_hadamard(h4()))
    doc["n"] = 3
    with pytest.raises(FormatError):
        decode_any(doc)
    doc = encode_block_hadamard(h4())
    doc["blocks"] = doc["blocks"][:2]
    with pytest.raises(FormatError):
        decode_any(doc)


def test_library_errors_become_format_errors():
    with pytest.raises(FormatError):
        decode_any({"terms": [[float("nan"), 0, 0, 0]]})
    with pytest.raises(FormatError):
        decode_any({"type": "mum_pair", "d": 1, "n": 1, "blocks": [[encode_matrix([[1]])]]})


def test_loads_truncated():
    text = dumps(encode_block_hadamard(h4()))
    with pytest.raises(FormatError):
        loads(text[: len(text) // 2])


def test_dumps_numpy_scalars():
    out = json.loads(dumps({"a": np.float64(0.5), "b": np.bool_(True), "c": np.int64(3)}))
    assert out == {"a": 0.5, "b": True, "c": 3}
    with pytest.raises(TypeError):
        dumps({"x": object()})


def test_provenance():
    rep = with_provenance({"passed": True}, 1e-10)
    assert rep["tol"] == 1e-10 and rep["version"]


def test_mum_pair_shape_recorded():
    m = MumPair(np.exp(2j * np.pi * np.outer(np.arange(1, 3), np.arange(2)) / 2))
    assert encode_mum_pair(m)["n"] == 1
