"""Command-line interface.

Exit codes: 0 success, 64 bad usage, 65 malformed input, 70 internal
error.  The verify and falsify commands report 0 when the statement held,
2 when a counterexample was found and 1 on an internal error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from fractions import Fraction

from .certificate import check_certificate
from .instances import random_polytope
from .linalg import fmt_vec, to_fraction
from .lp import SoundnessError
from .polytope import OutsideError, PolytopeError, load_polytope
from .proof import decompose_via_proof
from .solver import SolverConfig, decompose, is_prime, mixed_decompose
from .verify import falsify_mixed_skeleton_simplex, falsify_weighted_prism, grid_sampler, random_sampler, verify_minkowski

EX_OK = 0
EX_USAGE = 64
EX_DATAERR = 65
EX_SOFTWARE = 70

log = logging.getLogger("baryskel")


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def write_atomic(path: str | None, text: str) -> None:
    """Write ``text`` to ``path`` via a temp file and rename; stdout when path is None."""
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def parse_point(text: str) -> tuple:
    try:
        return tuple(to_fraction(s) for s in text.split(","))
    except (ValueError, TypeError, ZeroDivisionError) as e:
        raise InputError(f"bad point {text!r}: {e}") from None


def seed_type(text: str) -> int:
    try:
        s = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= s < 1 << 64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return s


def positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return v


def rational_type(text: str) -> Fraction:
    try:
        return to_fraction(text)
    except (ValueError, TypeError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a rational like 1/10, got {text!r}") from None


def _load(path: str):
    try:
        return load_polytope(path)
    except FileNotFoundError:
        raise InputError(f"no such file: {path}") from None
    except (json.JSONDecodeError, PolytopeError, ValueError, TypeError, ZeroDivisionError) as e:
        raise InputError(f"{path}: {e}") from None


def _split(P, n: int, d: int | None) -> int:
    D = P.ambient_dim
    if D % n:
        raise UsageError(f"polytope dimension {D} is not divisible by --n {n}")
    if d is not None and d * n != D:
        raise UsageError(f"--d {d} does not match dim/n = {D}/{n}")
    return D // n


def _solver_cfg(args) -> SolverConfig:
    return SolverConfig(parallel=args.threads > 1, threads=args.threads)


# ---------------------------------------------------------------------------
# commands


def cmd_decompose(args) -> int:
    P = _load(args.polytope)
    p = parse_point(args.point)
    if len(p) != P.ambient_dim:
        raise InputError(f"point has {len(p)} coordinates, polytope has dimension {P.ambient_dim}")
    if args.chain:
        try:
            chain = [int(c) for c in args.chain.split(",")]
        except ValueError:
            raise UsageError(f"bad --chain {args.chain!r}") from None
        try:
            dec = mixed_decompose(P, p, chain, _solver_cfg(args))
        except OutsideError as e:
            raise InputError(str(e)) from None
        except ValueError as e:
            raise UsageError(str(e)) from None
    else:
        if args.n is None:
            raise UsageError("decompose needs --n (or --chain)")
        _split(P, args.n, args.d)
        try:
            if args.method == "proof":
                if not is_prime(args.n):
                    raise UsageError("--method proof needs prime --n")
                dec = decompose_via_proof(P, p, args.n, P.ambient_dim // args.n, seed=args.seed)
            else:
                dec = decompose(P, p, args.n, _solver_cfg(args))
        except OutsideError as e:
            raise InputError(str(e)) from None
    cert = dec.to_json()
    errs = check_certificate(P, cert)
    if errs:
        raise SoundnessError("produced certificate fails re-check: " + "; ".join(errs))
    write_atomic(args.out, dump(cert))
    return EX_OK


def cmd_check_cert(args) -> int:
    P = _load(args.polytope)
    try:
        with open(args.cert) as fh:
            cert = json.load(fh)
    except FileNotFoundError:
        raise InputError(f"no such file: {args.cert}") from None
    except json.JSONDecodeError as e:
        raise InputError(f"{args.cert}: {e}") from None
    if not isinstance(cert, dict):
        raise InputError(f"{args.cert}: certificate must be a JSON object")
    errs = check_certificate(P, cert)
    out = {"exact": not errs, "errors": errs}
    write_atomic(args.out, dump(out))
    if not errs:
        print("exact: true", file=sys.stderr)
        return EX_OK
    print("exact: false", file=sys.stderr)
    for e in errs:
        print(f"  {e}", file=sys.stderr)
    return 1


def cmd_gen(args) -> int:
    if not 1 <= args.dim <= 8:
        raise UsageError("--dim must be in [1, 8]")
    if args.facets < args.dim + 1:
        raise UsageError("--facets must be at least --dim + 1")
    try:
        P = random_polytope(args.seed, args.dim, args.facets)
    except ValueError as e:
        raise UsageError(str(e)) from None
    write_atomic(args.out, dump(P.to_json()))
    return EX_OK


def _report(args, rep) -> int:
    write_atomic(args.out, dump(rep.to_json(timing=args.timing)))
    if rep.counterexample is not None:
        print(f"counterexample: {','.join(fmt_vec(rep.counterexample))}", file=sys.stderr)
        return 2
    if not rep.verified:
        print(f"only {rep.succeeded}/{rep.attempted} checks passed", file=sys.stderr)
        return 1
    print(f"verified: {rep.succeeded}/{rep.attempted}", file=sys.stderr)
    return EX_OK


def cmd_verify(args) -> int:
    P = _load(args.polytope)
    d = _split(P, args.n, args.d)
    sampler = grid_sampler if args.sampler == "grid" else random_sampler
    rep = verify_minkowski(P, args.n, d, samples=args.samples, seed=args.seed, sampler=sampler,
                           cfg=_solver_cfg(args), keep_witnesses=args.witnesses)
    return _report(args, rep)


def cmd_falsify_prism(args) -> int:
    if args.eps <= 0:
        raise UsageError("--eps must be positive; eps = 0 is the equal-weight case")
    rep = falsify_weighted_prism(args.eps, max_level=args.max_level)
    return _report(args, rep)


def cmd_falsify_simplex(args) -> int:
    if args.a + args.b != 2 * args.d + 1 or not 0 <= args.a <= args.b:
        raise UsageError("need --a + --b = 2 --d + 1 and 0 <= a <= b")
    rep = falsify_mixed_skeleton_simplex(args.a, args.b, args.d, samples=args.samples, seed=args.seed)
    return _report(args, rep)


def cmd_trace(args) -> int:
    P = _load(args.polytope)
    p = parse_point(args.point)
    if len(p) != P.ambient_dim:
        raise InputError(f"point has {len(p)} coordinates, polytope has dimension {P.ambient_dim}")
    if not is_prime(args.n):
        raise UsageError(f"trace needs prime --n; use decompose for n = {args.n}")
    d = _split(P, args.n, args.d)
    lines = []
    try:
        dec = decompose_via_proof(P, p, args.n, d, seed=args.seed,
                                  trace=lambda rec: lines.append(json.dumps(rec, sort_keys=True)))
    except OutsideError as e:
        raise InputError(str(e)) from None
    cert = dec.to_json()
    if check_certificate(P, cert):
        raise SoundnessError("traced certificate fails re-check")
    lines.append(json.dumps({"stage": "certificate", "certificate": cert}, sort_keys=True))
    write_atomic(args.out, "\n".join(lines) + "\n")
    return EX_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=seed_type, default=0, help="64-bit unsigned seed (default 0)")
    common.add_argument("--threads", type=positive_int, default=1, help="worker threads for tuple checks")
    common.add_argument("--out", default=None, help="output file (default stdout); written atomically")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = _Parser(prog="baryskel", description="Exact barycentric decompositions into polytope skeletons.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("decompose", parents=[common], help="write a decomposition certificate")
    s.add_argument("--polytope", required=True)
    s.add_argument("--point", required=True, help='comma-separated rationals, e.g. "1/4,0,-1/3"')
    s.add_argument("--n", type=positive_int)
    s.add_argument("--d", type=positive_int)
    s.add_argument("--chain", help="mixed weights, e.g. 2,2 on a 4-polytope")
    s.add_argument("--method", choices=["search", "proof"], default="search")
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("verify-minkowski", parents=[common], help="check nP = S + ... + S on samples")
    s.add_argument("--polytope", required=True)
    s.add_argument("--n", type=positive_int, required=True)
    s.add_argument("--d", type=positive_int)
    s.add_argument("--samples", type=positive_int, default=100)
    s.add_argument("--sampler", choices=["random", "grid"], default="random")
    s.add_argument("--witnesses", action="store_true", help="include every certificate in the report")
    s.add_argument("--timing", action="store_true", help="include elapsed seconds in the report")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("falsify-prism", parents=[common], help="weighted triangular prism search")
    s.add_argument("--eps", type=rational_type, default=Fraction(1, 10))
    s.add_argument("--max-level", type=positive_int, default=4, help="finest dyadic grid level")
    s.add_argument("--timing", action="store_true")
    s.set_defaults(func=cmd_falsify_prism)

    s = sub.add_parser("falsify-simplex", parents=[common], help="mixed skeleton pairs on a simplex")
    s.add_argument("--a", type=int, required=True)
    s.add_argument("--b", type=int, required=True)
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--samples", type=positive_int, default=100)
    s.add_argument("--timing", action="store_true")
    s.set_defaults(func=cmd_falsify_simplex)

    s = sub.add_parser("trace", parents=[common], help="JSON-lines trace of the proof pipeline (prime n)")
    s.add_argument("--polytope", required=True)
    s.add_argument("--point", required=True)
    s.add_argument("--n", type=positive_int, required=True)
    s.add_argument("--d", type=positive_int)
    s.set_defaults(func=cmd_trace)

    s = sub.add_parser("gen", parents=[common], help="seeded random H-polytope")
    s.add_argument("--dim", type=positive_int, required=True)
    s.add_argument("--facets", type=positive_int, required=True)
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("check-cert", parents=[common], help="re-validate a certificate")
    s.add_argument("--polytope", required=True)
    s.add_argument("--cert", required=True)
    s.set_defaults(func=cmd_check_cert)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    internal = 1 if args.command.startswith(("verify", "falsify")) else EX_SOFTWARE
    try:
        return args.func(args)
    except UsageError as e:
        print(f"baryskel: {e}", file=sys.stderr)
        return EX_USAGE
    except InputError as e:
        print(f"baryskel: {e}", file=sys.stderr)
        return EX_DATAERR
    except (SoundnessError, AssertionError, RuntimeError) as e:
        log.exception("internal error")
        print(f"baryskel: internal error: {e}", file=sys.stderr)
        return internal
    except (OSError, ValueError) as e:
        print(f"baryskel: {e}", file=sys.stderr)
        return EX_DATAERR


if __name__ == "__main__":
    sys.exit(main())
