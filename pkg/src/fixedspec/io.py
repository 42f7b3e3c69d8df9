"""JSON system/family file parsing and report serialization.

Scalars are real numbers or two-element [re, im] arrays; matrices are
nested row-major arrays. Emission is canonical (sorted keys, two-space
indent, bare floats whenever the imaginary part is zero) so identical
inputs produce byte-identical files. Channel and member indices in reports
are 0-based positions into the corresponding JSON arrays.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .fixed_modes import (
    FixedModeCertificate,
    FixedModeRecord,
    FixedSpectrumReport,
    MultiChannelSystem,
)
from .grank import MatrixFamily, VectorPairFamily

__all__ = [
    "FileFormatError",
    "ParsedSystem",
    "ParsedFamily",
    "parse_system_file",
    "parse_family_file",
    "system_to_jsonable",
    "family_to_jsonable",
    "report_to_jsonable",
    "report_from_jsonable",
    "emit_json",
]


class FileFormatError(ValueError):
    """Malformed system/family file; the message carries the location."""


def _scalar(value, where: str) -> complex:
    if isinstance(value, bool):
        raise FileFormatError(f"{where}: expected a number, got a boolean")
    if isinstance(value, (int, float)):
        return complex(value)
    if (isinstance(value, list) and len(value) == 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool)
                    for v in value)):
        return complex(value[0], value[1])
    raise FileFormatError(f"{where}: expected a number or [re, im] pair, got {value!r}")


def _matrix(value, where: str, cols_hint: int | None = None) -> np.ndarray:
    if not isinstance(value, list):
        raise FileFormatError(f"{where}: expected an array of rows")
    if not value:
        if cols_hint is None:
            raise FileFormatError(f"{where}: empty matrix needs known width")
        return np.zeros((0, cols_hint), np.complex128)
    rows = []
    width = None
    for r, row in enumerate(value):
        if not isinstance(row, list):
            raise FileFormatError(f"{where} row {r}: expected an array")
        entries = [_scalar(v, f"{where} row {r} col {c}") for c, v in enumerate(row)]
        if width is None:
            width = len(entries)
        elif len(entries) != width:
            raise FileFormatError(
                f"{where} row {r}: expected {width} entries, got {len(entries)}")
        rows.append(entries)
    out = np.array(rows, dtype=np.complex128)
    if out.shape[1] == 0:
        return out.reshape(len(rows), 0)
    return out


def _vector(value, where: str) -> np.ndarray:
    if not isinstance(value, list):
        raise FileFormatError(f"{where}: expected an array of numbers")
    return np.array([_scalar(v, f"{where}[{i}]") for i, v in enumerate(value)],
                    dtype=np.complex128)


def _load(text: str, source: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FileFormatError(
            f"{source}: invalid JSON at line {exc.lineno} column {exc.colno}: "
            f"{exc.msg}") from exc
    if not isinstance(doc, dict):
        raise FileFormatError(f"{source}: top level must be an object")
    return doc


def _optional_number(doc: dict, key: str, source: str):
    if key not in doc:
        return None
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise FileFormatError(f"{source}: '{key}' must be a number")
    return v


@dataclass(frozen=True)
class ParsedSystem:
    system: MultiChannelSystem
    tolerance: float | None
    seed: int | None


@dataclass(frozen=True)
class ParsedFamily:
    family: VectorPairFamily | MatrixFamily
    constant: np.ndarray | None


def parse_system_file(text: str, source: str = "<input>") -> ParsedSystem:
    doc = _load(text, source)
    if "A" not in doc:
        raise FileFormatError(f"{source}: missing field 'A'")
    A = _matrix(doc["A"], f"{source}: A")
    if A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise FileFormatError(f"{source}: A must be square and nonempty, "
                              f"got {A.shape[0]}x{A.shape[1]}")
    n = A.shape[0]
    if "channels" not in doc or not isinstance(doc["channels"], list):
        raise FileFormatError(f"{source}: missing field 'channels' (array)")
    if not doc["channels"]:
        raise FileFormatError(f"{source}: at least one channel is required")
    channels = []
    for i, ch in enumerate(doc["channels"]):
        where = f"{source}: channels[{i}]"
        if not isinstance(ch, dict) or "B" not in ch or "C" not in ch:
            raise FileFormatError(f"{where}: expected an object with 'B' and 'C'")
        B = _matrix(ch["B"], f"{where}.B")
        C = _matrix(ch["C"], f"{where}.C", cols_hint=n)
        if B.shape[0] != n:
            raise FileFormatError(f"{where}.B: expected {n} rows, got {B.shape[0]}")
        if C.shape[1] != n:
            raise FileFormatError(f"{where}.C: expected {n} columns, got {C.shape[1]}")
        channels.append((B, C))
    tolerance = _optional_number(doc, "tolerance", source)
    seed = _optional_number(doc, "seed", source)
    seed = int(seed) if seed is not None else None
    try:
        system = MultiChannelSystem(A, channels)
    except ValueError as exc:
        raise FileFormatError(f"{source}: {exc}") from exc
    return ParsedSystem(system, tolerance, seed)


def parse_family_file(text: str, source: str = "<input>") -> ParsedFamily:
    doc = _load(text, source)
    has_pairs = "pairs" in doc
    has_members = "members" in doc
    if has_pairs == has_members:
        raise FileFormatError(
            f"{source}: exactly one of 'pairs' or 'members' is required")
    n1 = _optional_number(doc, "n1", source)
    n2 = _optional_number(doc, "n2", source)
    n1 = int(n1) if n1 is not None else None
    n2 = int(n2) if n2 is not None else None

    constant = None
    if "M" in doc:
        constant = _matrix(doc["M"], f"{source}: M", cols_hint=n2)
        n1 = constant.shape[0] if n1 is None else n1
        n2 = constant.shape[1] if n2 is None else n2

    if has_pairs:
        if not isinstance(doc["pairs"], list):
            raise FileFormatError(f"{source}: 'pairs' must be an array")
        pairs = []
        for i, pair in enumerate(doc["pairs"]):
            where = f"{source}: pairs[{i}]"
            if not isinstance(pair, dict) or "w" not in pair or "r" not in pair:
                raise FileFormatError(f"{where}: expected an object with 'w' and 'r'")
            pairs.append((_vector(pair["w"], f"{where}.w"),
                          _vector(pair["r"], f"{where}.r")))
        try:
            family = VectorPairFamily.from_pairs(pairs, n1, n2)
        except ValueError as exc:
            raise FileFormatError(f"{source}: {exc}") from exc
    else:
        if not isinstance(doc["members"], list):
            raise FileFormatError(f"{source}: 'members' must be an array")
        members = []
        for i, mem in enumerate(doc["members"]):
            where = f"{source}: members[{i}]"
            if not isinstance(mem, dict) or "W" not in mem or "R" not in mem:
                raise FileFormatError(f"{where}: expected an object with 'W' and 'R'")
            W = _matrix(mem["W"], f"{where}.W", cols_hint=0)
            R = _matrix(mem["R"], f"{where}.R", cols_hint=n2)
            members.append((W, R))
        if n1 is None:
            n1 = members[0][0].shape[0] if members else 0
        if n2 is None:
            # zero-row R blocks without an explicit n2 were rejected above
            widths = [R.shape[1] for _, R in members if R.shape[0] > 0]
            n2 = widths[0] if widths else 0
        try:
            family = MatrixFamily(n1, n2, members)
        except ValueError as exc:
            raise FileFormatError(f"{source}: {exc}") from exc

    if constant is not None and constant.shape != (family.n1, family.n2):
        raise FileFormatError(
            f"{source}: M must be {family.n1}x{family.n2}, got "
            f"{constant.shape[0]}x{constant.shape[1]}")
    return ParsedFamily(family, constant)


# ---------------------------------------------------------------------------
# emission


def _encode_scalar(z: complex):
    z = complex(z)
    if z.imag == 0.0:
        return z.real
    return [z.real, z.imag]


def _encode_matrix(M: np.ndarray):
    return [[_encode_scalar(v) for v in row] for row in np.asarray(M)]


def system_to_jsonable(sys: MultiChannelSystem, tolerance: float | None = None,
                       seed: int | None = None) -> dict:
    doc = {
        "A": _encode_matrix(sys.A),
        "channels": [{"B": _encode_matrix(B), "C": _encode_matrix(C)}
                     for B, C in sys.channels],
    }
    if tolerance is not None:
        doc["tolerance"] = tolerance
    if seed is not None:
        doc["seed"] = seed
    return doc


def family_to_jsonable(fam, constant: np.ndarray | None = None) -> dict:
    if isinstance(fam, VectorPairFamily):
        doc = {
            "n1": fam.n1,
            "n2": fam.n2,
            "pairs": [{"w": [_encode_scalar(v) for v in w],
                       "r": [_encode_scalar(v) for v in r]}
                      for w, r in fam.pairs],
        }
    elif isinstance(fam, MatrixFamily):
        doc = {
            "n1": fam.n1,
            "n2": fam.n2,
            "members": [{"W": _encode_matrix(W), "R": _encode_matrix(R)}
                        for W, R in fam.members],
        }
    else:
        raise TypeError(f"unsupported family type {type(fam).__name__}")
    if constant is not None:
        doc["M"] = _encode_matrix(constant)
    return doc


def report_to_jsonable(report: FixedSpectrumReport) -> dict:
    records = []
    for rec in report.records:
        entry = {
            "lambda": _encode_scalar(rec.lam),
            "multiplicity": rec.multiplicity,
            "is_fixed": rec.is_fixed,
            "certificate": None,
            "oracle_agrees": rec.oracle_agrees,
        }
        if rec.certificate is not None:
            entry["certificate"] = {
                "lambda": _encode_scalar(rec.certificate.lam),
                "subset": list(rec.certificate.subset),
                "deficiency": rec.certificate.deficiency,
            }
        records.append(entry)
    return {
        "records": records,
        "tolerance": report.tolerance,
        "cluster_tol": report.cluster_tol,
        "seed": report.seed,
        "trials": report.trials,
        "match_tol": report.match_tol,
        "fixed_spectrum": [_encode_scalar(lam) for lam in report.fixed],
    }


def _decode_scalar(value) -> complex:
    if isinstance(value, list):
        return complex(value[0], value[1])
    return complex(value)


def report_from_jsonable(doc: dict) -> FixedSpectrumReport:
    records = []
    for entry in doc["records"]:
        certificate = None
        if entry["certificate"] is not None:
            cert = entry["certificate"]
            certificate = FixedModeCertificate(
                _decode_scalar(cert["lambda"]),
                tuple(cert["subset"]),
                cert["deficiency"])
        records.append(FixedModeRecord(
            _decode_scalar(entry["lambda"]),
            entry["multiplicity"],
            entry["is_fixed"],
            certificate,
            entry["oracle_agrees"]))
    return FixedSpectrumReport(
        tuple(records),
        doc["tolerance"],
        doc["cluster_tol"],
        seed=doc["seed"],
        trials=doc["trials"],
        match_tol=doc["match_tol"])


def emit_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
