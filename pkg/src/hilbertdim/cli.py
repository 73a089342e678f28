"""Command-line front end.

Exit codes: 0 success (or verdict true), 1 domain failure or bad arguments,
2 I/O or parse failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import bounds, generators, psdrank, quantum
from .correlation import DEFAULT_TOL, from_json, to_json
from .exceptions import HilbertDimError, ParseError

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_IO = 2

GENERATORS = {
    "chsh": generators.chsh_optimal,
    "magic-square": generators.magic_square,
    "pr-box": generators.pr_box,
    "ffl": generators.ffl_uniform,
    "nonconvex-mixture": generators.nonconvex_mixture,
    "uniform": generators.uniform,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_DOMAIN, "%s: error: %s\n" % (self.prog, message))


def _fmt(v) -> str:
    if isinstance(v, float) and math.isinf(v):
        return "infinity"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, float) and math.isinf(v):
        return "infinity"
    return v


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _emit(doc: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(_jsonable(doc)))
        return
    for key, value in doc.items():
        if isinstance(value, dict):
            inner = ", ".join("%s=%s" % (k, _fmt(v)) for k, v in value.items())
            print("%s: %s" % (key, inner))
        else:
            print("%s: %s" % (key, _fmt(value)))


def cmd_generate(args) -> int:
    if args.name == "pr-box":
        if args.d is None:
            raise UsageError("pr-box needs --d")
        p = generators.pr_box(args.d)
    else:
        if args.d is not None:
            raise UsageError("--d only applies to pr-box")
        p = GENERATORS[args.name]()
    _write(args.out, to_json(p))
    return EXIT_OK


def cmd_bound(args) -> int:
    p = from_json(_read(args.input), tol=args.tol)
    report = bounds.dimension_lower_bound(p)
    if args.json:
        print(json.dumps(report.to_dict()))
    else:
        print("f1: %s" % _fmt(report.f1))
        print("f2: %s" % _fmt(report.f2))
        print("dimension_lower_bound: %s" % _fmt(report.dimension_lower_bound))
    return EXIT_OK


def cmd_verify(args) -> int:
    orep = quantum.operator_representation_from_json(_read(args.rep))
    p = from_json(_read(args.corr), tol=args.tol)
    report = quantum.verify_operator_representation(orep, p, tol=args.tol)
    _emit(report.to_dict(), args.json)
    return EXIT_OK if report.verdict else EXIT_DOMAIN


def cmd_audit(args) -> int:
    orep = quantum.operator_representation_from_json(_read(args.rep))
    report = quantum.audit_derivation(orep, tol=args.tol)
    doc = report.to_dict()
    if not args.json:
        doc["f_weights"] = "; ".join(
            "y=%d: %s" % (y, " ".join("%.6g" % w for w in row)) for y, row in enumerate(doc["f_weights"])
        )
        doc["purity_values"] = " ".join("%.6g" % v for v in doc["purity_values"])
    _emit(doc, args.json)
    return EXIT_OK if report.chain_holds else EXIT_DOMAIN


def cmd_psdrank(args) -> int:
    p = from_json(_read(args.input), tol=args.tol)
    _emit(psdrank.compare_bounds(p).to_dict(), args.json)
    return EXIT_OK


def cmd_perturb(args) -> int:
    p = from_json(_read(args.input), tol=args.tol)
    summary = bounds.robustness_scan(p, args.eps, args.samples, args.seed)
    summary.pop("f1_values")
    summary.pop("f2_values")
    _emit(summary, args.json)
    return EXIT_OK


def cmd_sample_rep(args) -> int:
    orep = quantum.random_operator_representation(args.d, tuple(args.sizes), args.seed)
    _write(args.out, quantum.operator_representation_to_json(orep) + "\n")
    if args.corr_out:
        _write(args.corr_out, to_json(quantum.induced_correlation(orep)))
    return EXIT_OK


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _nonneg_float(text):
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hilbertdim", description="Dimension lower bounds for two-party quantum correlations.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a canonical correlation as JSON")
    g.add_argument("name", choices=sorted(GENERATORS))
    g.add_argument("--d", type=int, help="number of outcomes (pr-box only)")
    g.add_argument("--out", "-o", default=None, help="output path (default: stdout)")
    g.set_defaults(func=cmd_generate)

    def with_tol(p):
        p.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL)
        p.add_argument("--json", action="store_true", help="machine-readable output")

    b = sub.add_parser("bound", help="compute f1, f2 and the integer dimension bound")
    b.add_argument("input")
    with_tol(b)
    b.set_defaults(func=cmd_bound)

    v = sub.add_parser("verify", help="check an operator representation against a correlation")
    v.add_argument("rep")
    v.add_argument("corr")
    with_tol(v)
    v.set_defaults(func=cmd_verify)

    a = sub.add_parser("audit", help="replay the dimension-bound derivation on a representation")
    a.add_argument("rep")
    a.add_argument("--tol", type=_positive_float, default=1e-8)
    a.add_argument("--json", action="store_true")
    a.set_defaults(func=cmd_audit)

    r = sub.add_parser("psdrank", help="compare the flattened PSD-rank bound with f1/f2")
    r.add_argument("input")
    with_tol(r)
    r.set_defaults(func=cmd_psdrank)

    s = sub.add_parser("perturb", help="bound statistics over perturbed copies")
    s.add_argument("input")
    s.add_argument("--eps", type=_nonneg_float, required=True)
    s.add_argument("--samples", type=_positive_int, default=100)
    s.add_argument("--seed", type=int, default=0)
    with_tol(s)
    s.set_defaults(func=cmd_perturb)

    q = sub.add_parser("sample-rep", help="write a random operator representation")
    q.add_argument("--d", type=_positive_int, required=True)
    q.add_argument("--sizes", type=_positive_int, nargs=4, metavar=("NX", "NY", "NA", "NB"), default=[2, 2, 2, 2])
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out", "-o", default=None)
    q.add_argument("--corr-out", default=None, help="also write the induced correlation here")
    q.set_defaults(func=cmd_sample_rep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print("hilbertdim: %s" % exc, file=sys.stderr)
        return EXIT_DOMAIN
    except (OSError, ParseError) as exc:
        print("hilbertdim: %s" % exc, file=sys.stderr)
        return EXIT_IO
    except HilbertDimError as exc:
        print("hilbertdim: %s: %s" % (type(exc).__name__, exc), file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
