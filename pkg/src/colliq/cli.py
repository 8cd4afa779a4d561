"""Command-line front end.

Exit codes: 0 success or structure satisfied, 1 a check or verification
failed, 2 bad usage or unreadable input.
"""

import argparse
import csv
import os
import sys

import numpy as np

from . import ball, builders, colligation, factorize, structure
from .ball import BallColligation
from .document import load_document, save_document, serialize_document
from .errors import (
    ColliqError,
    NotIsometricError,
    SingularMatrixError,
    StructureError,
    VerificationError,
    ZeroConstantError,
)

__all__ = ["build_parser", "run_command", "main"]

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

DEFAULT_SEED = 42
COMPARE_TOL = 1e-9

# order matters: most error classes also derive from ValueError
_FAILURES = (StructureError, ZeroConstantError, NotIsometricError,
             VerificationError, SingularMatrixError)


class _UsageError(Exception):
    pass


def _default_seed():
    raw = os.environ.get("COLLIQ_SEED")
    if raw is None:
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise _UsageError(f"COLLIQ_SEED={raw!r} is not an integer") from None


def _complex(token):
    token = token.strip().replace(" ", "")
    if token.endswith("i"):
        token = token[:-1] + "j"
    try:
        return complex(token)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {token!r}") from None


def _point(text):
    return [_complex(t) for t in text.split(",") if t.strip()]


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of integers: {text!r}") from None


def _split_list(text):
    pairs = []
    for item in text.split(","):
        parts = item.split(":")
        try:
            if len(parts) != 2:
                raise ValueError
            pairs.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise argparse.ArgumentTypeError(
                f"split items look like 'm:n', got {item!r}") from None
    return pairs


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=float, default=colligation.ISOMETRY_TOL,
                        help="isometry and structure tolerance (default 1e-10)")
    common.add_argument("--seed", type=int, default=None,
                        help="grid / random seed (default 42, or $COLLIQ_SEED)")
    common.add_argument("--points", type=int, default=factorize.GRID_POINTS,
                        help="number of grid points (default 100)")

    parser = _Parser(prog="colliq", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", parents=[common], help="test a block pattern")
    p.add_argument("file")
    p.add_argument("--property", required=True,
                   choices=["fm", "fn", "chain", "zero1", "zero2", "ball"])
    p.add_argument("--m", type=int)

    p = sub.add_parser("eval", parents=[common], help="evaluate tau at a point")
    p.add_argument("file")
    p.add_argument("--point", required=True, type=_point,
                   help="comma-separated complex coordinates, e.g. 0.1,0.2+0.1j")

    p = sub.add_parser("grid", parents=[common], help="CSV of tau on seeded points")
    p.add_argument("file")
    p.add_argument("--out")

    p = sub.add_parser("product", parents=[common], help="multiply colligations")
    p.add_argument("files", nargs="+")
    p.add_argument("--mode", required=True, choices=["fm", "fn", "chain"])
    p.add_argument("--out")
    p.add_argument("--verify", action="store_true")
    p.add_argument("--compare", metavar="FILE",
                   help="report max |tau_FILE - tau_product| on the grid")

    p = sub.add_parser("factor", parents=[common], help="extract factors")
    p.add_argument("file")
    p.add_argument("--mode", required=True,
                   choices=["fm", "fn", "chain", "zero1", "zero2"])
    p.add_argument("--m", type=int)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--out-left")
    p.add_argument("--out-right")
    p.add_argument("--out-prefix", help="chain mode: writes PREFIX_1.json, ...")

    p = sub.add_parser("embed", parents=[common],
                       help="separated-variable to same-variable form")
    p.add_argument("file")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--pad-dim", type=int, default=1)
    p.add_argument("--out")

    p = sub.add_parser("roundtrip", parents=[common],
                       help="factor the same-variable product of two files")
    p.add_argument("file1")
    p.add_argument("file2")

    p = sub.add_parser("random", parents=[common], help="random isometric colligation")
    p.add_argument("--kind", default="isometric",
                   choices=("isometric", "ball") + builders.STRUCTURED_KINDS)
    p.add_argument("--dims", type=_int_list)
    p.add_argument("--split", type=_split_list)
    p.add_argument("--m", type=int)
    p.add_argument("--variables", type=int, default=2, help="ball kind only")
    p.add_argument("--out")

    p = sub.add_parser("blaschke", parents=[common], help="Blaschke factor colligation")
    p.add_argument("--lambda", dest="lam", type=_complex, required=True)
    p.add_argument("--out")

    p = sub.add_parser("monomial", parents=[common], help="colligation of z^m")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--out")
    return parser


def _fmt(z):
    z = complex(z)
    return f"{z.real:.15g}{z.imag:+.15g}j"


def _emit(obj, path, out, metadata):
    if path:
        save_document(path, obj, metadata)
        print(f"wrote {path}", file=out)
    else:
        out.write(serialize_document(obj, metadata))


def _load_polydisc(path):
    v = load_document(path)
    if isinstance(v, BallColligation):
        raise _UsageError(f"{path}: expected a polydisc document, found a ball document")
    return v


def _evaluate(v, z):
    if isinstance(v, BallColligation):
        return ball.ball_transfer_eval(v, z)
    return colligation.transfer_eval(v, z)


def _grid(v, num, seed):
    if isinstance(v, BallColligation):
        return ball.sample_ball(v.n, num, seed)
    return factorize.verification_grid(v.n, num, seed)


def _require_m(args):
    if args.m is None:
        raise _UsageError(f"{args.command}: --m is required for this mode")
    return args.m


def _cmd_check(args, out):
    v = load_document(args.file)
    prop = args.property
    if (prop == "ball") != isinstance(v, BallColligation):
        raise _UsageError(f"property {prop!r} does not apply to this document kind")
    if prop == "fm":
        report = structure.check_fm(v, _require_m(args), args.tol)
    elif prop == "fn":
        report = structure.check_fn(v, args.tol)
    elif prop == "chain":
        report = structure.check_chain(v, args.tol)
    elif prop == "ball":
        report = ball.check_ball_factor_structure(v, _require_m(args), args.tol)
    elif v.partition.split is not None:
        report = structure.check_zero_origin_nvar(v, 1 if prop == "zero1" else 2,
                                                  tol=args.tol)
    elif prop == "zero1":
        report = structure.check_zero_origin_case1(v, args.tol)
    else:
        report = _check_case2(v, args.tol)
    print(f"{prop}: {report.summary()}", file=out)
    return EXIT_OK if report.satisfied else EXIT_FAILED


def _check_case2(v, tol):
    try:
        x, y = structure.recover_case2_witness(v, tol)
    except StructureError as exc:
        report = structure.StructureReport(checked=1)
        report.violations.append(structure.Violation((1, 2), np.inf, str(exc)))
        return report
    return structure.check_zero_origin_case2(v, x, y, tol)


def _cmd_eval(args, out):
    v = load_document(args.file)
    print(_fmt(_evaluate(v, args.point)), file=out)
    return EXIT_OK


def _cmd_grid(args, out):
    v = load_document(args.file)
    points = _grid(v, args.points, args.seed)
    header = [f"z{k}_{part}" for k in range(1, v.n + 1) for part in ("re", "im")]
    header += ["value_re", "value_im", "modulus"]
    rows = []
    for z in points:
        value = _evaluate(v, z)
        row = [repr(float(c)) for zk in z for c in (zk.real, zk.imag)]
        row += [repr(value.real), repr(value.imag), repr(abs(value))]
        rows.append(row)
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            _write_csv(fh, header, rows)
        print(f"wrote {args.out} ({len(rows)} points)", file=out)
    else:
        _write_csv(out, header, rows)
    return EXIT_OK


def _write_csv(fh, header, rows):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)


def _cmd_product(args, out):
    vs = [_load_polydisc(f) for f in args.files]
    if args.mode == "chain":
        v = factorize.product_chain(vs, verify=args.verify, tol=args.tol)
    else:
        if len(vs) != 2:
            raise _UsageError(f"product --mode {args.mode} takes exactly two files")
        fn = factorize.product_fm if args.mode == "fm" else factorize.product_fn
        v = fn(vs[0], vs[1], verify=args.verify, tol=args.tol)
    if args.verify:
        points = factorize.verification_grid(v.n)
        if args.mode == "fm":
            res = factorize.separated_residual(v, vs[0], vs[1], points)
        elif args.mode == "fn":
            res = factorize.same_point_residual(v, vs[0], vs[1], points)
        else:
            res = factorize.chain_residual(v, vs, points)
        print(f"residual: {res!r}", file=out)
    status = EXIT_OK
    if args.compare:
        ref = _load_polydisc(args.compare)
        if ref.n != v.n:
            raise _UsageError(f"{args.compare} has {ref.n} variables, product has {v.n}")
        dev = max((abs(colligation.transfer_eval(ref, z) - colligation.transfer_eval(v, z))
                   for z in factorize.verification_grid(v.n, args.points, args.seed)),
                  default=0.0)
        print(f"compare: max |tau_ref - tau_product| = {dev!r}", file=out)
        if not dev <= COMPARE_TOL:
            status = EXIT_FAILED
    _emit(v, args.out, out, {"command": f"product --mode {args.mode}"})
    return status


def _cmd_factor(args, out):
    v = _load_polydisc(args.file)
    mode = args.mode
    if mode == "chain":
        factors = factorize.factor_chain(v, tol=args.tol)
        res = factorize.chain_residual(v, factors) if args.verify else None
        if res is not None and not res <= 1e-9:
            raise VerificationError(f"factor_chain residual {res:.3e} exceeds 1e-9", res)
        phase = complex(np.prod([f.a for f in factors]) / v.a)
        print(f"factors: {len(factors)}", file=out)
        print(f"phase product: {_fmt(phase)}", file=out)
        if res is not None:
            print(f"residual: {res!r}", file=out)
        for k, f in enumerate(factors, 1):
            path = f"{args.out_prefix}_{k}.json" if args.out_prefix else None
            _emit(f, path, out, {"command": "factor --mode chain", "factor": str(k)})
        return EXIT_OK
    if mode == "fm":
        result = factorize.factor_fm(v, _require_m(args), verify=args.verify, tol=args.tol)
    elif mode == "fn":
        result = factorize.factor_fn(v, verify=args.verify, tol=args.tol)
    elif v.partition.split is not None:
        result = factorize.check_and_factor_zero_origin_nvar(
            v, 1 if mode == "zero1" else 2, verify=args.verify, tol=args.tol)
    elif mode == "zero1":
        result = factorize.factor_zero_origin_case1(v, verify=args.verify, tol=args.tol)
    else:
        result = factorize.factor_zero_origin_case2(v, verify=args.verify, tol=args.tol)
    print(f"alpha: {_fmt(result.alpha)}", file=out)
    print(f"beta: {_fmt(result.beta)}", file=out)
    if args.verify:
        print(f"residual: {result.residual!r}", file=out)
    meta = {"command": f"factor --mode {mode}"}
    _emit(result.left, args.out_left, out, dict(meta, factor="left"))
    _emit(result.right, args.out_right, out, dict(meta, factor="right"))
    return EXIT_OK


def _cmd_embed(args, out):
    v = _load_polydisc(args.file)
    e = factorize.embed_fm_into_fn(v, args.m, args.pad_dim, tol=args.tol)
    dev = max((abs(colligation.transfer_eval(v, z) - colligation.transfer_eval(e, z))
               for z in factorize.verification_grid(v.n, args.points, args.seed)),
              default=0.0)
    print(f"max |tau_in - tau_embedded| = {dev!r}", file=out)
    _emit(e, args.out, out, {"command": "embed", "pad_dim": str(args.pad_dim)})
    return EXIT_OK


def _cmd_roundtrip(args, out):
    v1, v2 = _load_polydisc(args.file1), _load_polydisc(args.file2)
    eps, dev = factorize.kappa_pi_roundtrip(v1, v2, tol=args.tol)
    print(f"eps: {_fmt(eps)}", file=out)
    print(f"|eps| - 1: {abs(eps) - 1.0!r}", file=out)
    print(f"max deviation: {dev!r}", file=out)
    return EXIT_OK if dev <= 1e-11 else EXIT_FAILED


def _cmd_random(args, out):
    kind, seed = args.kind, args.seed
    if kind == "ball":
        if not args.dims or len(args.dims) != 1:
            raise _UsageError("random --kind ball needs --dims d")
        split = tuple(args.split[0]) if args.split else None
        v = ball.random_isometric_ball_colligation(args.variables, args.dims[0], seed, split)
    elif kind == "isometric":
        if not args.dims:
            raise _UsageError("random needs --dims")
        split = tuple(args.split) if args.split else None
        v = builders.random_isometric_colligation(
            colligation.SpacePartition(tuple(args.dims), split), seed)
    else:
        v = builders.random_structured_colligation(kind, args.dims, m=args.m,
                                                   split=args.split, seed=seed)
    _emit(v, args.out, out, {"command": f"random --kind {kind}", "seed": str(seed)})
    return EXIT_OK


def _cmd_blaschke(args, out):
    v = builders.blaschke_colligation(args.lam)
    _emit(v, args.out, out, {"command": "blaschke", "lambda": _fmt(args.lam)})
    return EXIT_OK


def _cmd_monomial(args, out):
    v = builders.monomial_colligation(args.m)
    _emit(v, args.out, out, {"command": "monomial", "m": str(args.m)})
    return EXIT_OK


_COMMANDS = {
    "check": _cmd_check,
    "eval": _cmd_eval,
    "grid": _cmd_grid,
    "product": _cmd_product,
    "factor": _cmd_factor,
    "embed": _cmd_embed,
    "roundtrip": _cmd_roundtrip,
    "random": _cmd_random,
    "blaschke": _cmd_blaschke,
    "monomial": _cmd_monomial,
}


def run_command(argv=None, stdout=None, stderr=None):
    """Run one subcommand and return its exit code."""
    out = stdout if stdout is not None else sys.stdout
    err = stderr if stderr is not None else sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.seed is None:
            args.seed = _default_seed()
        return _COMMANDS[args.command](args, out)
    except SystemExit as exc:  # --help
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except _UsageError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    except _FAILURES as exc:
        print(f"failed: {exc}", file=err)
        return EXIT_FAILED
    except (ColliqError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE


def main():
    sys.exit(run_command())
