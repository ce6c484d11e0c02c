"""Command-line front end.

Exit codes: 0 ok, 1 bad input, 2 not a member, 3 not extreme,
4 oracle disagreement, 5 verification failure.

Every document read or written carries ``"format_version": 1``; unknown
fields are rejected.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

import numpy as np

from .extremality import Extreme, NotAMember, certify_extremality, cut_oracle_bruteforce, MAX_ORACLE_N
from .generators import GenConfig, gen_euclidean_space, gen_extreme, gen_member, gen_random_metric
from .metric import (
    DEFAULT_TOL,
    FiniteMetricSpace,
    LipextError,
    LipschitzPoint,
    MetricError,
    NormSpec,
    ToleranceConfig,
    is_member,
    lipschitz_constant,
    validate_metric,
    worst_pair,
)
from .representer import Atom, Decomposition, Direction, decompose, verify_decomposition

FORMAT_VERSION = 1

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NOT_MEMBER = 2
EXIT_NOT_EXTREME = 3
EXIT_ORACLE = 4
EXIT_VERIFY = 5

INSTANCE_KEYS = {"format_version", "space", "norm", "point", "L"}
DECOMPOSITION_KEYS = {
    "format_version", "kind", "k", "atoms", "direction",
    "reconstruction_error", "verified", "report",
}
ATOM_KEYS = {"weight", "t", "point"}


class InputError(Exception):
    def __init__(self, message: str, kind: str = "InputError", indices=()):
        super().__init__(message)
        self.kind = kind
        self.indices = list(indices)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message, "UsageError")


# ------------------------------------------------------------------ documents

def _check_keys(obj, allowed, required, where):
    if not isinstance(obj, dict):
        raise InputError(f"{where} must be a JSON object")
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise InputError(f"unknown field(s) in {where}: {', '.join(unknown)}")
    missing = sorted(set(required) - set(obj))
    if missing:
        raise InputError(f"missing field(s) in {where}: {', '.join(missing)}")


def _check_version(doc):
    if doc.get("format_version") != FORMAT_VERSION:
        raise InputError(f"format_version must be {FORMAT_VERSION}")


def _matrix(value, where, shape=None):
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise InputError(f"{where} must be a numeric array")
    if arr.ndim != 2 or (shape is not None and arr.shape != shape):
        want = f" of shape {list(shape)}" if shape else ""
        raise InputError(f"{where} must be a 2-D array{want}, got shape {list(arr.shape)}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{where} has non-finite entries")
    return arr


def parse_instance(doc):
    """Decode an instance document into ``(X, norm, y, L)``."""
    _check_keys(doc, INSTANCE_KEYS, {"format_version", "space", "norm", "point"}, "instance")
    _check_version(doc)
    space, norm_doc = doc["space"], doc["norm"]
    _check_keys(space, {"n", "dist"}, {"n", "dist"}, "space")
    _check_keys(norm_doc, {"dim", "p"}, {"dim", "p"}, "norm")
    try:
        X = validate_metric(_matrix(space["dist"], "space.dist"))
    except MetricError as err:
        raise InputError(str(err), err.kind, err.indices)
    if space["n"] != X.n:
        raise InputError(f"space.n = {space['n']!r} does not match a {X.n + 1}x{X.n + 1} matrix")
    if not isinstance(norm_doc["dim"], int) or isinstance(norm_doc["dim"], bool):
        raise InputError("norm.dim must be an integer")
    try:
        norm = NormSpec(norm_doc["dim"], norm_doc["p"])
    except (LipextError, TypeError, ValueError) as err:
        raise InputError(str(err), "InvalidNorm")
    point = _matrix(doc["point"], "point", (X.n + 1, norm.dim))
    try:
        y = LipschitzPoint(point)
    except LipextError as err:
        raise InputError(str(err), "NonzeroBasePoint", [0])
    L = doc.get("L", 1.0)
    if not isinstance(L, (int, float)) or isinstance(L, bool) or not L > 0:
        raise InputError("L must be a positive number")
    return X, norm, y, float(L)


def instance_document(X: FiniteMetricSpace, norm: NormSpec, y: LipschitzPoint, L=None) -> dict:
    doc = {
        "format_version": FORMAT_VERSION,
        "space": {"n": X.n, "dist": X.dist.tolist()},
        "norm": {"dim": norm.dim, "p": norm.p},
        "point": y.values.tolist(),
    }
    if L is not None:
        doc["L"] = float(L)
    return doc


def certificate_document(cert) -> dict:
    doc = {"format_version": FORMAT_VERSION, "kind": "certificate"}
    if isinstance(cert, Extreme):
        doc["status"] = "extreme"
        doc["parent"] = {str(i): int(j) for i, j in cert.parent.items()}
    else:
        doc["status"] = "not_extreme"
        doc["S"] = list(cert.cut.S)
        doc["epsilon"] = float(cert.cut.epsilon)
    return doc


def decomposition_document(dec: Decomposition, report=None) -> dict:
    doc = {
        "format_version": FORMAT_VERSION,
        "kind": "decomposition",
        "k": dec.k,
        "atoms": [
            {"weight": float(w), "t": np.asarray(a.t).tolist(), "point": a.point.values.tolist()}
            for w, a in zip(dec.weights, dec.atoms)
        ],
        "direction": np.asarray(dec.direction.v).tolist(),
        "reconstruction_error": dec.reconstruction_error(),
        "verified": bool(report is not None and report.passed),
    }
    if report is not None:
        doc["report"] = report.to_dict()
    return doc


class _RawDirection:
    # unvalidated direction read back from a document; verification judges it
    def __init__(self, v):
        self.v = v


def parse_decomposition(doc, y: LipschitzPoint) -> Decomposition:
    _check_keys(doc, DECOMPOSITION_KEYS, {"format_version", "atoms", "direction"}, "decomposition")
    _check_version(doc)
    if doc.get("kind", "decomposition") != "decomposition":
        raise InputError("document kind must be 'decomposition'")
    atoms_doc = doc["atoms"]
    if not isinstance(atoms_doc, list) or not atoms_doc:
        raise InputError("atoms must be a nonempty list")
    try:
        direction = np.array(doc["direction"], dtype=float)
    except (TypeError, ValueError):
        raise InputError("direction must be a numeric array")
    if direction.shape != (y.dim,):
        raise InputError(f"direction must have length {y.dim}", "DimensionMismatch")
    weights, atoms = [], []
    for idx, entry in enumerate(atoms_doc):
        _check_keys(entry, ATOM_KEYS, ATOM_KEYS, f"atoms[{idx}]")
        point = _matrix(entry["point"], f"atoms[{idx}].point")
        try:
            t = np.array(entry["t"], dtype=float)
        except (TypeError, ValueError):
            raise InputError(f"atoms[{idx}].t must be a numeric array")
        if point.shape != y.values.shape or t.shape != (y.n + 1,):
            raise InputError(f"atoms[{idx}] does not match the instance shape", "DimensionMismatch")
        weight = entry["weight"]
        if not isinstance(weight, (int, float)) or isinstance(weight, bool):
            raise InputError(f"atoms[{idx}].weight must be a number")
        weights.append(float(weight))
        # kept as a raw array: a nonzero base row is a verification failure
        atoms.append(Atom(t, point))
    return Decomposition(y, _RawDirection(direction), np.array(weights), atoms)


def _read_json(path: str, stdin):
    try:
        if path == "-":
            return json.load(stdin)
        with open(path) as fh:
            return json.load(fh)
    except OSError as err:
        raise InputError(f"cannot read {path}: {err.strerror}", "IOError")
    except json.JSONDecodeError as err:
        raise InputError(f"malformed JSON in {path}: {err}", "MalformedJSON")


def _tolerance(args) -> ToleranceConfig:
    if getattr(args, "tol", None) is None:
        return DEFAULT_TOL
    if not args.tol >= 0:
        raise InputError("--tol must be nonnegative")
    return ToleranceConfig(tol_feas=args.tol, tol_tight=args.tol)


def _direction(spec: Optional[str], norm: NormSpec) -> Direction:
    if spec is None:
        return Direction.basis(norm)
    try:
        if "," not in spec:
            return Direction.basis(norm, int(spec))
        return Direction.normalized([float(x) for x in spec.split(",")], norm)
    except (ValueError, LipextError) as err:
        raise InputError(f"bad --direction {spec!r}: {err}")


# ------------------------------------------------------------------- commands

def cmd_validate(args, stdin):
    X, norm, y, L = parse_instance(_read_json(args.instance, stdin))
    if args.L is not None:
        L = args.L
    member = is_member(y, X, norm, L, _tolerance(args))
    doc = {
        "format_version": FORMAT_VERSION,
        "kind": "membership",
        "member": member,
        "L": L,
        "lipschitz_constant": lipschitz_constant(y, X, norm),
        "worst_pair": list(worst_pair(y, X, norm)),
    }
    return (EXIT_OK if member else EXIT_NOT_MEMBER), doc


def _not_member_doc(err: NotAMember):
    return {
        "format_version": FORMAT_VERSION,
        "kind": "error",
        "error": "NotAMember",
        "message": str(err),
        "indices": list(err.pair),
    }


def cmd_check_extreme(args, stdin):
    X, norm, y, _ = parse_instance(_read_json(args.instance, stdin))
    tol = _tolerance(args)
    try:
        cert = certify_extremality(y, X, norm, tol)
    except NotAMember as err:
        return EXIT_NOT_MEMBER, _not_member_doc(err)
    doc = certificate_document(cert)
    code = EXIT_OK if isinstance(cert, Extreme) else EXIT_NOT_EXTREME
    if args.oracle:
        if X.n > MAX_ORACLE_N:
            raise InputError(f"--oracle supports n <= {MAX_ORACLE_N}", "TooLarge")
        cut = cut_oracle_bruteforce(y, X, norm, tol)
        agrees = (cut is None) == isinstance(cert, Extreme)
        doc["oracle"] = {
            "agrees": agrees,
            "cut": None if cut is None else {"S": list(cut.S), "epsilon": cut.epsilon},
        }
        if not agrees:
            code = EXIT_ORACLE
    return code, doc


def cmd_decompose(args, stdin):
    X, norm, y, _ = parse_instance(_read_json(args.instance, stdin))
    tol = _tolerance(args)
    v = _direction(args.direction, norm)
    try:
        dec = decompose(y, X, norm, v, tol)
    except NotAMember as err:
        return EXIT_NOT_MEMBER, _not_member_doc(err)
    report = verify_decomposition(y, dec, X, norm, tol) if args.verify else None
    doc = decomposition_document(dec, report)
    if report is not None and not report.passed:
        return EXIT_VERIFY, doc
    return EXIT_OK, doc


def cmd_gen(args, stdin):
    try:
        cfg = GenConfig(
            seed=args.seed, n=args.n, dim=args.dim, p=args.p,
            embed_dim=args.embed_dim, scale=args.scale,
        )
    except LipextError as err:
        raise InputError(str(err), "InvalidConfig")
    X = gen_euclidean_space(cfg) if args.kind == "euclidean" else gen_random_metric(cfg)
    y = gen_extreme(cfg, X).point if args.extreme else gen_member(cfg, X)
    return EXIT_OK, instance_document(X, cfg.norm, y)


def cmd_verify(args, stdin):
    X, norm, y, _ = parse_instance(_read_json(args.instance, stdin))
    dec = parse_decomposition(_read_json(args.decomposition, stdin), y)
    report = verify_decomposition(y, dec, X, norm, _tolerance(args))
    doc = {"format_version": FORMAT_VERSION, "kind": "verification", **report.to_dict()}
    return (EXIT_OK if report.passed else EXIT_VERIFY), doc


# ----------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lipext", description="Extreme points of the Lipschitz unit ball.")
    parser.add_argument("--format", choices=("json", "text"), default="json")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, tol=True):
        p.add_argument("--format", choices=("json", "text"), default=argparse.SUPPRESS)
        if tol:
            p.add_argument("--tol", type=float, default=None,
                           help="feasibility and tightness tolerance (default 1e-9)")

    p = sub.add_parser("validate", help="membership report for an instance")
    p.add_argument("instance")
    p.add_argument("--L", type=float, default=None)
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("check-extreme", help="extremality certificate")
    p.add_argument("instance")
    p.add_argument("--oracle", action="store_true", help="cross-check with the exhaustive cut search")
    common(p)
    p.set_defaults(func=cmd_check_extreme)

    p = sub.add_parser("decompose", help="convex combination of extreme points")
    p.add_argument("instance")
    p.add_argument("--direction", default=None,
                   help="standard basis index, or comma-separated vector (normalised)")
    p.add_argument("--verify", action="store_true")
    common(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("--kind", choices=("euclidean", "random"), default="euclidean")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--embed-dim", type=int, default=2)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--extreme", action="store_true")
    common(p, tol=False)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", help="re-check a stored decomposition")
    p.add_argument("instance")
    p.add_argument("decomposition")
    common(p)
    p.set_defaults(func=cmd_verify)
    return parser


def _as_text(doc: dict, prefix: str = "") -> str:
    lines = []
    for key, value in doc.items():
        if key == "format_version":
            continue
        if isinstance(value, dict):
            lines.append(f"{prefix}{key}:")
            lines.append(_as_text(value, prefix + "  "))
        else:
            lines.append(f"{prefix}{key}: {json.dumps(value)}")
    return "\n".join(line for line in lines if line)


def main(argv: Optional[Sequence[str]] = None, stdout=None, stdin=None) -> int:
    stdout = stdout or sys.stdout
    stdin = stdin or sys.stdin
    fmt = "json"
    try:
        args = build_parser().parse_args(argv)
        fmt = args.format
        code, doc = args.func(args, stdin)
    except InputError as err:
        code = EXIT_INPUT
        doc = {
            "format_version": FORMAT_VERSION,
            "kind": "error",
            "error": err.kind,
            "message": str(err),
            "indices": err.indices,
        }
    except LipextError as err:
        code = EXIT_INPUT
        doc = {
            "format_version": FORMAT_VERSION,
            "kind": "error",
            "error": type(err).__name__,
            "message": str(err),
            "indices": [],
        }
    if fmt == "text":
        stdout.write(_as_text(doc) + "\n")
    else:
        stdout.write(json.dumps(doc, indent=2) + "\n")
    return code


def main_entry() -> None:
    sys.exit(main())
