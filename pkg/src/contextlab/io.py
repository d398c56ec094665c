"""JSON and CSV serialization.

Floats are written with 17 significant digits so that every double survives
a round trip bit for bit. Complex numbers are ``[re, im]`` pairs.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .linalg import as_matrix
from .spectral import PmsTriple


def _float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    s = format(x, ".17g")
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def _encode(obj, indent, level):
    pad = "" if indent is None else "\n" + " " * (indent * (level + 1))
    end = "" if indent is None else "\n" + " " * (indent * level)
    sep = "," if indent is None else ","
    colon = ":" if indent is None else ": "
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return _encode([obj.real, obj.imag], None, 0)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent, level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [pad + json.dumps(str(k), ensure_ascii=False) + colon + _encode(v, indent, level + 1)
                 for k, v in obj.items()]
        return "{" + sep.join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        # short numeric lists stay on one line
        if all(isinstance(v, (int, float, np.number)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_encode(v, None, 0) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[" + sep.join(items) + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int | None = 2) -> str:
    return _encode(obj, indent, 0)


def write_json(obj, path) -> None:
    Path(path).write_text(dumps(obj) + "\n", encoding="utf-8")


def matrix_to_json(m) -> dict:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError("matrix JSON holds square matrices only")
    return {"dim": m.shape[0], "entries": [[z.real, z.imag] for z in m.ravel()]}


def matrix_from_json(obj) -> np.ndarray:
    try:
        n = int(obj["dim"])
        entries = obj["entries"]
    except (KeyError, TypeError) as exc:
        raise ValueError("matrix JSON needs 'dim' and 'entries'") from exc
    if n < 1 or len(entries) != n * n:
        raise ValueError(f"matrix JSON: expected {n * n} entries for dim {n}, got {len(entries)}")
    try:
        vals = np.array([complex(float(re), float(im)) for re, im in entries], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise ValueError("matrix JSON entries must be [re, im] pairs") from exc
    return as_matrix(vals.reshape(n, n))


def load_matrix(path) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        return matrix_from_json(json.load(fh))


def triple_to_json(triple) -> dict:
    out = {
        "sign": int(triple.sign),
        "u1": matrix_to_json(triple.u1),
        "u2": matrix_to_json(triple.u2),
        "u3": matrix_to_json(triple.u3),
        "residuals": dict(getattr(triple, "residuals", None) or getattr(triple, "quality", {})),
    }
    if hasattr(triple, "alphas"):
        out["kind"] = "approx"
        out["alphas"] = [[complex(a).real, complex(a).imag] for a in triple.alphas]
        out["cutoff"] = triple.cutoff
        out["quality"] = dict(triple.quality)
    return out


def triple_from_json(obj) -> PmsTriple:
    try:
        sign = int(obj["sign"])
        mats = [matrix_from_json(obj[k]) for k in ("u1", "u2", "u3")]
    except (KeyError, TypeError) as exc:
        raise ValueError("triple JSON needs 'sign', 'u1', 'u2', 'u3'") from exc
    if sign not in (1, -1):
        raise ValueError(f"triple sign must be ±1, got {sign}")
    return PmsTriple(*mats, sign=sign, residuals=dict(obj.get("residuals", {})))


def canonical_to_json(cf) -> dict:
    return {
        "basis": matrix_to_json(cf.basis),
        "lambdas": [[z.real, z.imag] for z in cf.lambdas],
        "lambda_primes": [[z.real, z.imag] for z in cf.lambda_primes],
        "block_multiplicities": list(cf.block_multiplicities),
        "N": cf.N,
        "sign": cf.sign,
        "residuals": dict(cf.residuals),
    }


SCAN_FIELDS = ("seed_index", "kind", "total_direct", "total_hermitian")


def write_scan_csv(summary, fh) -> None:
    """One row per sampled state; '.' decimals, 17 significant digits."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SCAN_FIELDS)
    for r in summary.records:
        w.writerow([r["seed_index"], r["kind"], _float(r["total_direct"]), _float(r["total_hermitian"])])
