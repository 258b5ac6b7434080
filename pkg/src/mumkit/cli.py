"""
Command-line front end.

Exit codes: 0 when the check passes, 1 when it runs and fails, 2 when the
input or the command line is malformed. JSON on stdout is the source of
truth; ``--format text`` prints a short human summary instead.
"""

from __future__ import annotations

import argparse
import re
import sys
from dataclasses import dataclass
from typing import Any, Callable, Optional

import numpy as np

from . import __version__
from . import catalog as cat
from .linalg import identity, max_abs
from .mum import (
    MumPair,
    build_projectors,
    canonicalize,
    from_block_hadamard,
    mub_defect,
    mum_defect,
    normalize,
    verify_mum_conditions,
    verify_mum_pair,
    verify_unitary_hadamard,
)
from .quaternion import (
    circulant_from_sequence,
    dephase_hadamard,
    hadamard_defect,
    has_noncommuting_pair,
    is_dephased,
    lift_matrix,
    unit_defect,
)
from .sdc import build_decoder, encoders_from_mums, message_index, message_pair, rigidity_witness, simulate
from .serialize import (
    FormatError,
    decode_any,
    dumps,
    encode_block_hadamard,
    encode_measurements,
    encode_operators,
    encode_qmatrix,
    encode_sequence,
    loads,
    with_provenance,
)

EXIT_PASS, EXIT_FAIL, EXIT_MALFORMED = 0, 1, 2
DEFAULT_TOL = 1e-10
VERIFY_KINDS = ("mum", "qhad", "block-hadamard", "mub", "oub")


class UsageError(Exception):
    """Bad command-line values; maps to exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    tol: float = DEFAULT_TOL
    fmt: str = "json"
    out: Optional[str] = None
    cap: int = cat.DEFAULT_CAP

    def __post_init__(self):
        if not 0 < self.tol < 1e-2:
            raise UsageError(f"--tol must lie in (0, 1e-2), got {self.tol}")
        if self.cap < 4:
            raise UsageError(f"--cap must be at least 4, got {self.cap}")
        if self.fmt not in ("json", "text"):
            raise UsageError(f"--format must be json or text, got {self.fmt!r}")


# catalog

_CALL = re.compile(r"^\s*([a-z0-9-]+)\s*(?:\((.*)\))?\s*$")


def _args(raw: Optional[str], count: int, conv: Callable, name: str) -> list:
    parts = [] if raw is None or not raw.strip() else [p.strip() for p in raw.split(",")]
    if len(parts) != count:
        raise UsageError(f"{name} takes {count} argument(s), got {len(parts)}")
    try:
        return [conv(p) for p in parts]
    except ValueError as exc:
        raise UsageError(f"{name}: bad argument ({exc})") from exc


def catalog_object(name: str, cap: int = cat.DEFAULT_CAP) -> dict:
    """JSON document for a catalog identifier such as ``h4`` or ``tower(2,3)``."""
    match = _CALL.match(name)
    if not match:
        raise UsageError(f"cannot parse catalog identifier {name!r}")
    key, raw = match.groups()
    try:
        if key in ("h4", "h5", "h6"):
            _args(raw, 0, int, key)
            return encode_block_hadamard(getattr(cat, key)())
        if key == "kuznetsov5":
            _args(raw, 0, int, key)
            return encode_sequence(cat.kuznetsov5())
        if key == "cd-special":
            a1, a2, b1, b2 = _args(raw, 4, float, key)
            return encode_qmatrix(cat.cd_special(cat.CdParams(a1, a2, b1, b2)))
        if key == "tower":
            d, n = _args(raw, 2, int, key)
            ops = cat.pauli_tower(cat.TowerSpec(d, n, cap))
            return encode_operators(ops, d=d, n=n)
        if key == "mub":
            (d,) = _args(raw, 1, int, key)
            return encode_measurements(*cat.standard_mub_pair(d))
        if key == "hw":
            (d,) = _args(raw, 1, int, key)
            if d < 2 or d * d > cap:
                raise UsageError(f"hw(d) needs 2 <= d and d*d <= cap ({cap})")
            return encode_operators(cat.heisenberg_weyl(d), d=d)
    except (ValueError, ArithmeticError) as exc:
        raise UsageError(f"{name}: {exc}") from exc
    raise UsageError(f"unknown catalog identifier {key!r}")


# verification

def _as_mum_pair(tag: str, obj: Any, tol: float) -> tuple[Optional[MumPair], Optional[str]]:
    """MUM pair from a MUM-pair or block-Hadamard document, or a reason it is not one."""
    if tag == "mum_pair":
        return obj, None
    if tag == "block_hadamard":
        rep = verify_unitary_hadamard(obj, tol)
        if not rep.passed:
            return None, f"not a Hadamard matrix of unitaries (max violation {rep.max_violation:.3g})"
        return (from_block_hadamard(obj, tol) if obj.is_dephased(tol) else normalize(obj, tol)), None
    raise FormatError(f"expected a MUM pair or block Hadamard matrix, got {tag}")


def _verify_mum(tag: str, obj: Any, tol: float) -> dict:
    if tag == "measurements":
        rep = verify_mum_conditions(*obj, tol)
        return {**rep.to_dict(), "passed": rep.passed}
    m, reason = _as_mum_pair(tag, obj, tol)
    if m is None:
        return {"passed": False, "reason": reason}
    rep = verify_mum_pair(m, tol)
    return {**rep.to_dict(), "d": m.d, "n": m.n}


def _verify_qhad(tag: str, obj: Any, tol: float) -> dict:
    if tag != "quaternion_matrix":
        raise FormatError(f"expected a quaternion matrix, got {tag}")
    r, c = obj.shape
    if r != c:
        raise FormatError(f"quaternion matrix must be square, got {r}x{c}")
    units, had = unit_defect(obj), hadamard_defect(obj)
    found, witness = has_noncommuting_pair(obj, tol)
    return {
        "passed": max(units, had) <= tol,
        "max_violation": max(units, had),
        "details": {"unit_entries": units, "hadamard": had},
        "dephased": is_dephased(obj, tol),
        "noncommuting_pair": found,
        "witness": [list(w) for w in witness] if witness else None,
    }


def _verify_block_hadamard(tag: str, obj: Any, tol: float) -> dict:
    if tag != "block_hadamard":
        raise FormatError(f"expected a block Hadamard matrix, got {tag}")
    return verify_unitary_hadamard(obj, tol).to_dict()


def _verify_mub(tag: str, obj: Any, tol: float) -> dict:
    if tag != "measurements":
        raise FormatError(f"expected measurements, got {tag}")
    P, Q = obj
    P, Q = np.array(P), np.array(Q)
    if P.ndim != 3 or P.shape != Q.shape or P.shape[1] != P.shape[2]:
        raise FormatError("measurements must be two equally sized lists of square matrices")
    if P.shape[1] != P.shape[0]:
        return {"passed": False, "reason": f"{P.shape[0]} outcomes on dimension {P.shape[1]}"}
    defect = mub_defect(P, Q)
    return {"passed": defect <= tol, "max_violation": defect, "d": P.shape[0]}


def _verify_oub(tag: str, obj: Any, tol: float) -> dict:
    if tag != "operators":
        raise FormatError(f"expected an operator list, got {tag}")
    shapes = {a.shape for a in obj}
    if len(shapes) != 1 or next(iter(shapes))[0] != next(iter(shapes))[1]:
        raise FormatError("operators must be square matrices of one size")
    arr = np.array(obj)
    dim = arr.shape[1]
    gram = np.einsum("iab,jab->ij", arr.conj(), arr)
    gram_defect = max_abs(gram - dim * identity(len(arr)))
    unit = max(max_abs(a @ a.conj().T - identity(dim)) for a in arr)
    complete = len(arr) == dim * dim
    return {
        "passed": complete and max(gram_defect, unit) <= tol,
        "max_violation": max(gram_defect, unit),
        "count": len(arr),
        "dimension": dim,
        "details": {"gram": gram_defect, "unitarity": unit, "complete": complete},
    }


_VERIFIERS = {
    "mum": _verify_mum,
    "qhad": _verify_qhad,
    "block-hadamard": _verify_block_hadamard,
    "mub": _verify_mub,
    "oub": _verify_oub,
}


def verify_document(kind: str, doc: Any, tol: float = DEFAULT_TOL) -> dict:
    """Verify a decoded JSON document; raises FormatError on malformed input."""
    if kind not in _VERIFIERS:
        raise UsageError(f"unknown kind {kind!r}; choose from {', '.join(VERIFY_KINDS)}")
    tag, obj = decode_any(doc)
    try:
        report = _VERIFIERS[kind](tag, obj, tol)
    except FormatError:
        raise
    except ValueError as exc:
        # shape problems surfaced by the library
        raise FormatError(str(exc)) from exc
    return with_provenance({"command": "verify", "kind": kind, **report}, tol)


# pipeline and protocol

def run_pipeline(doc: Any, tol: float = DEFAULT_TOL) -> dict:
    """Perfect sequence to circulant, dephasing, lift, MUM pair and protocol."""
    stages: list[dict] = []
    report: dict = {"command": "pipeline", "stages": stages, "failed_stage": None}

    def stage(name: str, ok: bool, **info) -> bool:
        stages.append({"stage": name, "ok": bool(ok), **info})
        if not ok and report["failed_stage"] is None:
            report["failed_stage"] = name
        return ok

    tag, seq = decode_any(doc)
    if tag != "perfect_sequence":
        raise FormatError(f"expected a perfect sequence, got {tag}")
    stage("parse", True, length=len(seq))
    report["d"] = len(seq)
    units = all(q.is_unit(tol) for q in seq.terms)
    worst = seq.max_autocorrelation()
    if stage("autocorrelation", units and worst <= tol, unit_terms=units, max_autocorrelation=worst):
        circ = circulant_from_sequence(seq, tol)
        had = hadamard_defect(circ)
        if stage("circulant", had <= tol, hadamard_defect=had):
            deph = dephase_hadamard(circ, tol)
            found, witness = has_noncommuting_pair(deph, tol)
            report["noncommuting_witness"] = [list(w) for w in witness] if witness else None
            if stage("dephase", is_dephased(deph, tol), noncommuting_pair=found):
                h = lift_matrix(deph, tol)
                lifted = verify_unitary_hadamard(h, tol)
                if stage("lift", lifted.passed, max_violation=lifted.max_violation):
                    m = from_block_hadamard(h, tol)
                    conds = verify_mum_conditions(*build_projectors(m, tol), tol)
                    if stage("mum", conds.passed, max_violation=conds.max_violation):
                        sdc = rigidity_witness(m, tol)
                        stage("rigidity", sdc.is_valid_protocol)
                        report["sdc"] = sdc.to_dict()
                        report["conjecture_counterexample"] = sdc.conjecture_counterexample
    report["passed"] = report["failed_stage"] is None
    return with_provenance(report, tol)


def _parse_message(text: str, d: int) -> tuple[int, int]:
    try:
        parts = [int(p) for p in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"--message must be 's,t' or an index, got {text!r}") from exc
    try:
        if len(parts) == 1:
            return message_pair(parts[0], d)
        if len(parts) == 2:
            message_index(parts[0], parts[1], d)
            return parts[0], parts[1]
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    raise UsageError(f"--message must be 's,t' or an index, got {text!r}")


def run_sdc(doc: Any, message: Optional[str] = None, tol: float = DEFAULT_TOL,
            cap: int = cat.DEFAULT_CAP) -> dict:
    tag, obj = decode_any(doc)
    m, reason = _as_mum_pair(tag, obj, tol)
    if m is not None and m.n * m.d > cap:
        raise UsageError(f"dimension n*d = {m.n * m.d} exceeds the cap {cap}")
    if m is not None and mum_defect(m) > tol:
        reason = f"blocks violate the MUM conditions (max violation {mum_defect(m):.3g})"
        m = None
    if m is None:
        return with_provenance({"command": "sdc", "passed": False, "reason": reason}, tol)
    if not m.is_canonical(tol):
        m = canonicalize(m, tol)
    if message is None:
        rep = rigidity_witness(m, tol)
        return with_provenance({"command": "sdc", **rep.to_dict(), "passed": rep.is_valid_protocol}, tol)
    msg = _parse_message(message, m.d)
    proto = encoders_from_mums(m, tol)
    proto.decoder = build_decoder(proto, tol)
    res = simulate(proto, msg)
    ok = res.decoded == msg and res.success_probability >= 1 - tol
    return with_provenance(
        {"command": "sdc", "d": m.d, "n": m.n, "message_index": message_index(*msg, m.d), **res.to_dict(),
         "passed": ok},
        tol,
    )


# output

def _text_summary(report: dict) -> str:
    verdict = "PASS" if report.get("passed") else "FAIL"
    head = " ".join(str(report[k]) for k in ("command", "kind") if k in report)
    lines = [f"{verdict} {head}".rstrip()]
    for key, value in report.items():
        if key in ("command", "kind", "passed", "stages", "success_probabilities", "probabilities", "details", "sdc"):
            continue
        if isinstance(value, float):
            value = f"{value:.3g}"
        lines.append(f"  {key}: {value}")
    for st in report.get("stages", []):
        lines.append(f"  stage {st['stage']}: {'ok' if st['ok'] else 'FAILED'}")
    if "sdc" in report:
        sdc = report["sdc"]
        lines.append(f"  valid protocol: {sdc['is_valid_protocol']}, direct sum: {sdc['direct_sum_of_mubs']}")
    return "\n".join(lines)


def _catalog_summary(name: str, doc: dict) -> str:
    kind = doc.get("type")
    fields = ", ".join(f"{k}={doc[k]}" for k in ("d", "k", "n", "rows", "cols") if k in doc)
    extra = {"measurements": f"{len(doc.get('P', []))} + {len(doc.get('Q', []))} projectors",
             "operators": f"{len(doc.get('operators', []))} operators",
             "perfect_sequence": f"{len(doc.get('terms', []))} terms"}.get(kind, "")
    return f"{name}: {kind} {fields} {extra}".strip()


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _read(path: str) -> Any:
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    return loads(text)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="absolute tolerance (default 1e-10)")
    common.add_argument("--format", dest="fmt", choices=("json", "text"), default="json")
    common.add_argument("--out", default=None, help="write output here instead of stdout")
    common.add_argument("--cap", type=int, default=cat.DEFAULT_CAP, help="dimension cap (default 256)")

    parser = argparse.ArgumentParser(prog="mumkit", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalog", parents=[common], help="emit a built-in object as JSON")
    p.add_argument("name", help="h4 | h5 | h6 | kuznetsov5 | cd-special(a1,a2,b1,b2) | tower(d,n) | mub(d) | hw(d)")

    p = sub.add_parser("verify", parents=[common], help="check an object from a JSON file")
    p.add_argument("kind", choices=VERIFY_KINDS)
    p.add_argument("input", help="JSON file, or - for stdin")

    p = sub.add_parser("pipeline", parents=[common], help="perfect sequence to superdense coding report")
    p.add_argument("input", help="perfect-sequence JSON file, or - for stdin")

    p = sub.add_parser("sdc", parents=[common], help="superdense coding protocol from a MUM pair")
    p.add_argument("input", help="MUM pair or block Hadamard JSON file, or - for stdin")
    p.add_argument("--message", default=None, help="simulate one message, as 's,t' or index (s-1)*d+t")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(tol=args.tol, fmt=args.fmt, out=args.out, cap=args.cap)
        if args.command == "catalog":
            doc = catalog_object(args.name, cfg.cap)
            text = _catalog_summary(args.name, doc) if cfg.fmt == "text" else dumps(doc)
            _emit(text, cfg.out)
            return EXIT_PASS
        doc = _read(args.input)
        if args.command == "verify":
            report = verify_document(args.kind, doc, cfg.tol)
        elif args.command == "pipeline":
            report = run_pipeline(doc, cfg.tol)
        else:
            report = run_sdc(doc, args.message, cfg.tol, cfg.cap)
    except (UsageError, FormatError) as exc:
        print(f"mumkit: error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    _emit(_text_summary(report) if cfg.fmt == "text" else dumps(report, indent=2), cfg.out)
    return EXIT_PASS if report.get("passed") else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
