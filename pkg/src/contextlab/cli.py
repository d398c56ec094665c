"""Command-line front end.

Exit codes: 0 pass, 1 verification failure, 2 I/O or parse error,
3 structural refusal (no anti-commuting partner, refused catalog entry).
Every failure prints a JSON object with ``error`` and ``residual`` to stdout.
"""

from __future__ import annotations

import argparse
import io as _io
import json
import sys
import warnings
from pathlib import Path

from . import bounds, catalog, pms, spectral
from . import io as cio
from . import linalg as la
from .exceptions import (
    AntiCommutationError,
    ClusteringAmbiguityError,
    ContextLabError,
    NotUnitaryError,
    PairingError,
    RefusalError,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_IO = 2
EXIT_REFUSED = 3

APPROX_HINT = (
    "strict verification failed; if these are truncated infinite-dimensional "
    "operators, build them as an ApproxTriple (catalog 'fock:...') and judge them "
    "by its low-energy truncation-quality block instead"
)


class CliFailure(Exception):
    def __init__(self, code, error, residual=None, **extra):
        super().__init__(error)
        self.code = code
        self.payload = {"error": error, "residual": residual, **extra}


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_matrix(path):
    try:
        return cio.load_matrix(path)
    except OSError as exc:
        raise CliFailure(EXIT_IO, f"cannot read {path}: {exc.strerror or exc}") from exc
    except (ValueError, json.JSONDecodeError) as exc:
        raise CliFailure(EXIT_IO, f"cannot parse {path}: {exc}") from exc


def _parse_sign(text):
    if text is None:
        return None
    try:
        s = int(text)
    except ValueError:
        s = 0
    if s not in (1, -1):
        raise CliFailure(EXIT_IO, f"--sign must be +1 or -1, got {text!r}")
    return s


def _parse_lambda_primes(text):
    if text is None or text == "default":
        return "default"
    try:
        return [complex(t.strip().replace(" ", "")) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise CliFailure(EXIT_IO, f"cannot parse --lambda-primes {text!r}") from exc


def _write_matrices(triple, directory):
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    for name, m in zip(("u1", "u2", "u3"), triple.operators()):
        cio.write_json(cio.matrix_to_json(m), d / f"{name}.json")


def verify_report(triple, tol: float) -> dict:
    alg = spectral.verify_algebra(triple, tol)
    square = pms.build_square(triple)
    comp = pms.verify_compatibility(square, tol)
    prod = pms.row_col_products(square, tol)
    unit = max(la.unitarity_residual(u) for u in triple.operators())
    return {
        "dim": triple.dim,
        "sign": triple.sign,
        "unitarity": unit,
        "algebra": alg.as_dict(),
        "compatibility": comp.as_dict(),
        "products": prod.as_dict(),
        "passed": bool(alg.passed and comp.passed and prod.passed and unit <= tol),
    }


def _worst(report: dict):
    """Name and value of the largest failing residual."""
    cands = {"unitarity": report["unitarity"]}
    alg = report["algebra"]
    cands["algebra.commutator"] = min(alg["commutator_plus"], alg["commutator_minus"])
    cands["algebra.anticommutator"] = alg["anticommutator"]
    cands["algebra.product"] = alg["product"]
    for k, v in report["compatibility"]["residuals"].items():
        cands[f"compatibility.{k}"] = v
    for k, v in report["products"]["residuals"].items():
        cands[f"products.{k}"] = v
    name = max(cands, key=lambda k: cands[k])
    return name, cands[name]


def cmd_verify(args) -> int:
    mats = [_load_matrix(p) for p in (args.u1, args.u2, args.u3)]
    dims = {m.shape[0] for m in mats}
    if len(dims) != 1:
        raise CliFailure(EXIT_IO, f"matrix dimensions differ: {[m.shape[0] for m in mats]}")
    sign = _parse_sign(args.sign)
    if sign is None:
        d = mats[0].shape[0]
        prod = mats[0] @ mats[1] @ mats[2]
        sign = min((1, -1), key=lambda s: la.max_norm(prod - s * 1j * la.identity(d)))
    triple = spectral.PmsTriple(*mats, sign=sign)
    report = verify_report(triple, args.tol)
    if not report["passed"]:
        name, value = _worst(report)
        raise CliFailure(EXIT_FAIL, f"verification failed: {name} = {value:.3e} exceeds tol {args.tol:g}",
                         value, failed=name, hint=APPROX_HINT, report=report)
    _emit(cio.dumps(report) + "\n", args.out)
    return EXIT_OK


def cmd_complete(args) -> int:
    u1 = _load_matrix(args.u1)
    sign = _parse_sign(args.sign) or 1
    lp = _parse_lambda_primes(args.lambda_primes)
    clusters, verdict = spectral.pairing_of(u1)
    if not verdict.paired:
        raise CliFailure(EXIT_REFUSED, f"no anti-commuting partner exists: {verdict.defect}", None,
                         defects=[str(d) for d in verdict.defects])
    u2 = spectral.construct_partner(u1, lp)
    triple = spectral.complete_triple(u1, u2, sign=sign, tol=args.tol)
    out = cio.triple_to_json(triple)
    out["pairing"] = {
        "paired": True,
        "pairs": [[clusters[a].value, clusters[b].value, clusters[a].multiplicity] for a, b in verdict.pairs],
    }
    if args.matrices:
        _write_matrices(triple, args.matrices)
    _emit(cio.dumps(out) + "\n", args.out)
    return EXIT_OK


def _resolve_source(source, sign):
    path = Path(source)
    if path.is_file():
        try:
            obj = json.loads(path.read_text(encoding="utf-8"))
            return cio.triple_from_json(obj)
        except (ValueError, json.JSONDecodeError) as exc:
            raise CliFailure(EXIT_IO, f"cannot parse {source}: {exc}") from exc
    try:
        return catalog.from_name(source, sign)
    except ValueError as exc:
        if isinstance(exc, ContextLabError):
            raise
        raise CliFailure(EXIT_IO, f"{source!r} is neither a triple file nor a catalog name: {exc}") from exc


def cmd_violate(args) -> int:
    triple = _resolve_source(args.source, _parse_sign(args.sign))
    if isinstance(triple, catalog.ApproxTriple):
        reports = catalog.fock_violation(triple)
        totals = [r.total for r in reports]
        out = {
            "kind": "approx",
            "cutoff": triple.cutoff,
            "quality": triple.quality,
            "states": [{**r.state, "total_direct": r.total} for r in reports],
            "max_deviation": max(abs(t - pms.QUANTUM_MAX) for t in totals),
        }
        _emit(cio.dumps(out) + "\n", args.out)
        return EXIT_OK
    alg = spectral.verify_algebra(triple, args.tol)
    if not alg.passed:
        worst = max(alg.commutator_residual, alg.anticommutator, alg.product)
        raise CliFailure(EXIT_FAIL, "invalid triple: algebra residual exceeds tolerance", worst,
                         hint=APPROX_HINT)
    summary = pms.scan_states(pms.build_square(triple), args.pure, args.mixed, seed=args.seed)
    if args.format == "csv":
        buf = _io.StringIO()
        cio.write_scan_csv(summary, buf)
        _emit(buf.getvalue(), args.out)
    else:
        _emit(cio.dumps(summary.as_dict()) + "\n", args.out)
    return EXIT_OK


def cmd_bound(args) -> int:
    if args.kind == "dichotomic":
        cert = bounds.dichotomic_bound()
        phases = [0.0 if s > 0 else 1.0 for s in cert.argmax]
    else:
        cert = bounds.phase_bound(args.starts, seed=args.seed)
        phases = cert.details["argmax_phases_over_pi"]
    out = {
        "bound": cert.bound_value,
        "gap_to_quantum": pms.QUANTUM_MAX - cert.bound_value,
        "argmax_phases_over_pi": phases,
        "certificate": cert.as_dict(),
    }
    _emit(cio.dumps(out) + "\n", args.out)
    return EXIT_OK


def cmd_catalog(args) -> int:
    try:
        triple = catalog.from_name(args.name, _parse_sign(args.sign))
    except ValueError as exc:
        if isinstance(exc, ContextLabError):
            raise
        raise CliFailure(EXIT_IO, str(exc)) from exc
    if args.matrices:
        _write_matrices(triple, args.matrices)
    _emit(cio.dumps(cio.triple_to_json(triple)) + "\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="contextlab", description="Peres-Mermin square toolkit.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the result here instead of stdout")
    common.add_argument("--tol", type=float, default=spectral.TRIPLE_TOL)
    common.add_argument("--sign", help="sign branch of U1 U2 U3 = ±i, '+1' or '-1'")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="check the triple relations and the square")
    v.add_argument("u1")
    v.add_argument("u2")
    v.add_argument("u3")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("complete", parents=[common], help="construct U2, U3 for a given U1")
    c.add_argument("u1")
    c.add_argument("--lambda-primes", default="default",
                   help="comma-separated unit-modulus values, one per ± pair, or 'default'")
    c.add_argument("--matrices", help="also write u1/u2/u3 matrix files into this directory")
    c.set_defaults(func=cmd_complete)

    s = sub.add_parser("violate", parents=[common], help="evaluate Re X on random states")
    s.add_argument("source", help="triple JSON file or catalog name")
    s.add_argument("--pure", type=int, default=50)
    s.add_argument("--mixed", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.set_defaults(func=cmd_violate)

    b = sub.add_parser("bound", parents=[common], help="classical bounds of the witness")
    b.add_argument("kind", choices=("dichotomic", "phase"))
    b.add_argument("--starts", type=int, default=bounds.DEFAULT_STARTS)
    b.add_argument("--seed", type=int, default=0)
    b.set_defaults(func=cmd_bound)

    k = sub.add_parser("catalog", parents=[common], help="emit a named example triple")
    k.add_argument("name", help="pauli | spin:<2s> | parity:<blocks> | weyl:<d> | fock:re1,im1,re2,im2,cutoff")
    k.add_argument("--matrices", help="also write u1/u2/u3 matrix files into this directory")
    k.set_defaults(func=cmd_catalog)
    return p


def _fail(code, payload) -> int:
    sys.stdout.write(cio.dumps(payload) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code in (0, None):
            return 0
        return _fail(EXIT_IO, {"error": "invalid command line", "residual": None})
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return args.func(args)
    except CliFailure as exc:
        return _fail(exc.code, exc.payload)
    except (PairingError, RefusalError) as exc:
        extra = {}
        verdict = getattr(exc, "verdict", None)
        if verdict is not None:
            extra["defects"] = [str(d) for d in verdict.defects]
        return _fail(EXIT_REFUSED, {"error": str(exc), "residual": getattr(exc, "residual", None), **extra})
    except (NotUnitaryError, AntiCommutationError, ClusteringAmbiguityError, ContextLabError) as exc:
        return _fail(EXIT_FAIL, {"error": str(exc), "residual": getattr(exc, "residual", None)})
    except OSError as exc:
        return _fail(EXIT_IO, {"error": f"I/O error: {exc}", "residual": None})


if __name__ == "__main__":
    sys.exit(main())
