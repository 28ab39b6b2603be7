"""Command-line front end.

    specfact factor  --alg jle1 --input S.json --output F.json
    specfact verify  --density S.json --factor F.json [--tol 1e-6]
    specfact bench   --preset table1 --output rows.jsonl
    specfact fixture ieee0 --output S.json [--factor-output F.json]

Exit codes: 0 success, 1 usage / I/O / schema error, 2 numerical failure.
Nothing is written when a command fails.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import harness
from .errors import NumericalError, SchemaError, SpecfactError
from .io import load_coeffs, save_coeffs
from .msf import AlgoParams, factorization_error

__all__ = ["main", "cmd_factor", "cmd_verify", "cmd_bench", "cmd_fixture"]

EXIT_OK, EXIT_IO, EXIT_NUMERIC = 0, 1, 2
FACTOR_ALGS = ("jle1", "jle2", "jle3", "wilson")


class _Parser(argparse.ArgumentParser):
    # usage errors share the I/O exit code; 2 is reserved for numerical failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_IO, f"{self.prog}: error: {message}\n")


def _fail(code, msg):
    print(f"specfact: {msg}", file=sys.stderr)
    return code


def _params(args):
    kw = {}
    if getattr(args, "N", None) is not None:
        kw["N_schedule"] = args.N
    for flag, key in (("kappa", "kappa"), ("iters", "wilson_iters"),
                      ("scalar_iters", "scalar_iters"), ("det_method", "det_method")):
        v = getattr(args, flag, None)
        if v is not None:
            kw[key] = v
    return kw


def cmd_factor(args):
    try:
        S = load_coeffs(args.input, "density", args.shift_check)
        params = AlgoParams(**_params(args))
    except (OSError, SchemaError, ValueError) as exc:
        return _fail(EXIT_IO, str(exc))
    alg = harness.ALGORITHMS[args.alg]
    try:
        res = alg(S, params)
    except NumericalError as exc:
        return _fail(EXIT_NUMERIC, f"{args.alg} failed: {type(exc).__name__}: {exc}")
    except ValueError as exc:
        return _fail(EXIT_IO, f"{args.alg}: {exc}")
    diag_path = args.diagnostics or args.output + ".diag.json"
    try:
        save_coeffs(res.Splus, args.output, "factor")
        with open(diag_path, "w", encoding="utf-8") as fh:
            json.dump(res.to_json(), fh, indent=1)
            fh.write("\n")
    except (OSError, ValueError) as exc:
        return _fail(EXIT_IO, str(exc))
    print(f"err = {res.err!r}")
    return EXIT_OK


def cmd_verify(args):
    try:
        S = load_coeffs(args.density, "density", args.shift_check)
        F = load_coeffs(args.factor, "factor")
    except (OSError, SchemaError) as exc:
        return _fail(EXIT_IO, str(exc))
    if F.rows != S.rows or F.cols != S.cols:
        return _fail(EXIT_IO, f"factor is {F.rows} x {F.cols}, density is {S.rows} x {S.cols}")
    err = factorization_error(S, F)
    print(f"err = {err!r}")
    return EXIT_OK if err <= args.tol else EXIT_NUMERIC


def _bench_cases(args):
    if args.preset:
        return harness.preset(args.preset, args.seeds)
    if args.r is None or args.n is None:
        raise SchemaError("give --preset or both --r and --n")
    algs = [a.strip() for a in args.algs.split(",") if a.strip()]
    unknown = [a for a in algs if a not in harness.ALGORITHMS]
    if unknown:
        raise SchemaError(f"unknown algorithms {unknown}; known: {sorted(harness.ALGORITHMS)}")
    seeds = 1 if args.seeds is None else args.seeds
    return [harness.BenchCase(algs, harness.MatrixFamilySpec(args.r, args.n, s, args.shift),
                              params=_params(args))
            for s in range(seeds)]


def _print_row(row):
    err = "-" if row.err is None else f"{row.err:.3e}"
    who = row.input if row.seed is None else f"seed {row.seed}"
    print(f"{row.alg:8s} {row.r:3d}x{row.n:<3d} {who:10s} {row.time_s:8.3f}s  err {err:10s} "
          f"{row.status}")


def cmd_bench(args):
    try:
        cases = _bench_cases(args)
        # fail on an unwritable destination before spending time on the sweep
        with open(args.output, "a", encoding="utf-8"):
            pass
    except (OSError, SchemaError, ValueError) as exc:
        return _fail(EXIT_IO, str(exc))
    rows = harness.run_bench(cases, on_row=None if args.quiet else _print_row)
    try:
        harness.write_report(rows, args.output)
    except OSError as exc:
        return _fail(EXIT_IO, str(exc))
    return EXIT_OK


def cmd_fixture(args):
    try:
        S, meta = harness.fixture(args.name)
    except SpecfactError as exc:
        return _fail(EXIT_IO, str(exc))
    if args.factor_output and "factor" not in meta:
        return _fail(EXIT_IO, f"fixture {args.name!r} has no known factor")
    try:
        save_coeffs(S, args.output, "density")
        if args.factor_output:
            save_coeffs(meta["factor"], args.factor_output, "factor")
    except OSError as exc:
        return _fail(EXIT_IO, str(exc))
    return EXIT_OK


def _add_tuning(p):
    p.add_argument("--N", type=int, help="truncation N for every recursion step")
    p.add_argument("--kappa", type=int, help="log2 grid size (JLE-2, Wilson)")
    p.add_argument("--iters", type=int, help="Wilson iteration cap")
    p.add_argument("--scalar-iters", type=int, help="scalar refinement steps")
    p.add_argument("--det-method", choices=("auto", "fft", "direct"))


def build_parser():
    ap = _Parser(prog="specfact", description="Matrix spectral factorization.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("factor", help="factor a density coefficient file")
    p.add_argument("--alg", required=True, choices=FACTOR_ALGS)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--diagnostics", help="sidecar path (default OUTPUT.diag.json)")
    p.add_argument("--shift-check", type=float, default=1e-10, metavar="TOL",
                   help="relative tolerance of the Hermitian check on load")
    _add_tuning(p)
    p.set_defaults(func=cmd_factor)

    p = sub.add_parser("verify", help="residual of a factor against a density")
    p.add_argument("--density", required=True)
    p.add_argument("--factor", required=True)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--shift-check", type=float, default=1e-10, metavar="TOL")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="benchmark sweep, JSON-lines report")
    p.add_argument("--preset", choices=harness.PRESETS)
    p.add_argument("--r", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--seeds", type=int)
    p.add_argument("--shift", type=float, default=0.0)
    p.add_argument("--algs", default="jle1,jle2,jle3,wilson")
    p.add_argument("--output", required=True)
    p.add_argument("--quiet", action="store_true")
    _add_tuning(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("fixture", help="write a golden density to a file")
    p.add_argument("name", choices=sorted(harness.FIXTURES))
    p.add_argument("--output", required=True)
    p.add_argument("--factor-output", help="also write the known factor (ieee0)")
    p.set_defaults(func=cmd_fixture)
    return ap


def main(argv=None):
    """Run the CLI and return its exit code (usage errors give 1, --help 0)."""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_IO
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
