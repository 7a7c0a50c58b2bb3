"""
Command-line driver: ``fsaism {generate,classify,precondition,solve,inverse,bench}``.

Every subcommand prints JSON (``bench`` prints CSV by default).  Library
errors produce a JSON object ``{"error": <code>, "message": ...}`` on stderr
and exit status 1.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .errors import FsaiError
from .fsai import build_one_two_inverse, build_preconditioner
from .generators import FAMILIES, generate
from .krylov import SolveConfig, make_patterns, solve, solve_preconditioned
from .mmatrix import classify, penrose_residuals
from .mmio import read_matrix_market, write_matrix_market
from .pattern import Orientation, TriangularPattern, validate

SCHEMA_VERSION = 1
PATTERN_KINDS = ("none", "diag", "matrix", "band:5")

# (name, family, params); size analogs of the four Markov test matrices
DEFAULT_SUITE = (
    ("2D", "lattice2d", {"nx": 11, "ny": 11}),
    ("leaky", "birth_death", {"n": 530, "lam": 0.95, "mu": 1.0}),
    ("ncd", "ncd", {"num_blocks": 22, "block_size": 13, "coupling": 1e-2, "seed": 1}),
    ("ncd_hard", "ncd", {"num_blocks": 4, "block_size": 8, "coupling": 1e-5, "seed": 0}),
    ("telecom", "ncd", {"num_blocks": 74, "block_size": 9, "coupling": 1e-2, "seed": 0}),
)
SMALL_SUITE = (
    ("2D", "lattice2d", {"nx": 11, "ny": 11}),
    ("ncd_hard", "ncd", {"num_blocks": 4, "block_size": 8, "coupling": 1e-5, "seed": 0}),
    ("laplacian", "laplacian", {"n": 60, "extra": 60, "seed": 0}),
)
SUITES = {"default": DEFAULT_SUITE, "small": SMALL_SUITE}

CSV_FIELDS = ("matrix", "n", "nnz", "pattern", "iterations", "final_error",
              "true_residual", "converged", "breakdown")


def _default_seed() -> int:
    return int(os.environ.get("FSAI_SEED", "0"))


def _parse_value(text: str):
    if text.lower() == "none":
        return None
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def _parse_params(items):
    params = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep:
            raise argparse.ArgumentTypeError(f"parameter {item!r} is not key=value")
        params[key] = _parse_value(value)
    return params


def _emit(obj, out=None):
    text = json.dumps(obj, indent=2, sort_keys=True)
    (out or sys.stdout).write(text + "\n")


def _load_patterns(A, args):
    if not args.pattern_file:
        return make_patterns(A, args.pattern)
    data = json.loads(Path(args.pattern_file).read_text())
    pats = []
    for key, orient in (("lower", Orientation.LOWER), ("upper", Orientation.UPPER)):
        entry = data[key]
        if isinstance(entry, dict):
            pats.append(TriangularPattern.from_json(entry))
        else:
            pats.append(TriangularPattern.from_pairs(A.n, entry, orient))
    return tuple(pats)


def _pattern_label(args):
    return f"file:{args.pattern_file}" if args.pattern_file else args.pattern


def solve_report(name, A, kind, report):
    return {
        "schema_version": SCHEMA_VERSION,
        "matrix": name,
        "pattern": kind,
        "n": A.n,
        "nnz": A.nnz,
        "iterations": report.iterations,
        "final_error": report.final_error,
        "true_residual": report.true_residual,
        "converged": report.converged,
        "breakdown": report.breakdown,
    }


# -- subcommands ------------------------------------------------------------

def cmd_generate(args):
    A = generate(args.family, **_parse_params(args.params))
    write_matrix_market(A, args.output, comment=f"fsaism generate {args.family} {' '.join(args.params)}")
    _emit({"schema_version": SCHEMA_VERSION, "family": args.family, "n": A.n,
           "nnz": A.nnz, "output": str(args.output)})


def cmd_classify(args):
    A = read_matrix_market(args.matrix)
    rep = classify(A, args.tol)
    _emit({"schema_version": SCHEMA_VERSION, "matrix": str(args.matrix), **rep.to_json()})


def cmd_precondition(args):
    A = read_matrix_market(args.matrix)
    pats = _load_patterns(A, args)
    if pats is None:
        _emit({"schema_version": SCHEMA_VERSION, "pattern": "none", "n": A.n,
               "message": "identity preconditioner, nothing to build"})
        return
    P = build_preconditioner(A, *pats, workers=args.workers)
    if args.output:
        l_path, u_path, d_path = args.output
        write_matrix_market(P.L, l_path)
        write_matrix_market(P.U, u_path)
        Path(d_path).write_text("".join(f"{v:.17g}\n" for v in P.d))
    _emit({
        "schema_version": SCHEMA_VERSION,
        "matrix": str(args.matrix),
        "pattern": _pattern_label(args),
        "n": A.n,
        "nnz_L": P.L.nnz,
        "nnz_U": P.U.nnz,
        "pattern_violations": validate(pats[0]) + validate(pats[1]),
        "d_min": float(P.d.min()),
        "d_max": float(P.d.max()),
        "min_factor_entry": float(min(P.L.values.min(), P.U.values.min())),
    })


def cmd_solve(args):
    A = read_matrix_market(args.matrix)
    cfg = SolveConfig(args.tol, args.max_iters, args.seed)
    if args.pattern_file:
        P = build_preconditioner(A, *_load_patterns(A, args), workers=args.workers)
        rep = solve_preconditioned(A, P, np.zeros(A.n), cfg)
    else:
        rep = solve(A, args.pattern, None, cfg, workers=args.workers)
    _emit(solve_report(str(args.matrix), A, _pattern_label(args), rep))


def cmd_inverse(args):
    A = read_matrix_market(args.matrix)
    G = build_one_two_inverse(A, args.excluded_col, workers=args.workers)
    X = G.to_sparse()
    res = penrose_residuals(A, X)
    _emit({
        "schema_version": SCHEMA_VERSION,
        "matrix": str(args.matrix),
        "n": A.n,
        "excluded_col": G.excluded_col,
        "d": G.d.tolist(),
        "arrow_b": G.arrow_b,
        "arrow_c": G.arrow_c,
        "arrowhead_defect": G.arrowhead_defect(),
        "penrose": res.to_json(),
        "relative": {"ax1": res.ax1 / A.norm_fro(), "ax2": res.ax2 / max(X.norm_fro(), 1e-300)},
    })
    if args.output:
        write_matrix_market(X, args.output)


def run_bench(suite: str, seed: int, tol: float = 1e-11, max_iters: int = 500,
              workers: int | None = None):
    """Rows of the benchmark table, one per (matrix, pattern) cell, in suite order."""
    if suite not in SUITES:
        raise FsaiError(f"unknown suite {suite!r}; choose from {sorted(SUITES)}")
    cfg = SolveConfig(tol, max_iters, seed)
    cells = []
    for name, family, params in SUITES[suite]:
        A = generate(family, **params)
        cells.extend((name, A, kind) for kind in PATTERN_KINDS)

    def run(cell):
        name, A, kind = cell
        return solve_report(name, A, kind, solve(A, kind, None, cfg))

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, cells))
    return [run(c) for c in cells]


def format_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({**r, "final_error": repr(r["final_error"]),
                    "true_residual": repr(r["true_residual"])})
    return buf.getvalue()


def cmd_bench(args):
    rows = run_bench(args.suite, args.seed, args.tol, args.max_iters, args.workers)
    if args.format == "json":
        text = json.dumps({"schema_version": SCHEMA_VERSION, "suite": args.suite,
                           "seed": args.seed, "rows": rows}, indent=2, sort_keys=True) + "\n"
    else:
        text = format_csv(rows)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fsaism", description=__doc__.splitlines()[1])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a generated test matrix")
    g.add_argument("family", choices=sorted(FAMILIES))
    g.add_argument("params", nargs="*", help="key=value overrides of the family defaults")
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("classify", help="M-matrix classification report")
    c.add_argument("matrix")
    c.add_argument("--tol", type=float, default=1e-10)
    c.set_defaults(func=cmd_classify)

    def pattern_args(sp):
        sp.add_argument("--pattern", default="matrix",
                        help="none | diag | matrix | band:<k> | complete")
        sp.add_argument("--pattern-file", help="JSON with 'lower' and 'upper' (i, j) pair lists")
        sp.add_argument("--workers", type=int, default=None)

    pr = sub.add_parser("precondition", help="build FSAI factors")
    pr.add_argument("matrix")
    pattern_args(pr)
    pr.add_argument("-o", "--output", nargs=3, metavar=("L.mtx", "U.mtx", "d.txt"))
    pr.set_defaults(func=cmd_precondition)

    s = sub.add_parser("solve", help="Bi-CGSTAB with b = 0 from a random start")
    s.add_argument("matrix")
    pattern_args(s)
    s.add_argument("--tol", type=float, default=1e-11)
    s.add_argument("--max-iters", type=int, default=500)
    s.add_argument("--seed", type=int, default=_default_seed())
    s.set_defaults(func=cmd_solve)

    inv = sub.add_parser("inverse", help="complete-pattern (1,2)-inverse and Penrose residuals")
    inv.add_argument("matrix")
    inv.add_argument("--excluded-col", type=int, default=None)
    inv.add_argument("--workers", type=int, default=None)
    inv.add_argument("-o", "--output", help="write the inverse as Matrix Market")
    inv.set_defaults(func=cmd_inverse)

    b = sub.add_parser("bench", help="all suite matrices x all pattern kinds")
    b.add_argument("--suite", default="default", choices=sorted(SUITES))
    b.add_argument("--seed", type=int, default=_default_seed())
    b.add_argument("--tol", type=float, default=1e-11)
    b.add_argument("--max-iters", type=int, default=500)
    b.add_argument("--workers", type=int, default=None)
    b.add_argument("--format", choices=("csv", "json"), default="csv")
    b.add_argument("-o", "--output")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (FsaiError, OSError, KeyError, json.JSONDecodeError, argparse.ArgumentTypeError) as exc:
        code = getattr(exc, "code", type(exc).__name__)
        if not isinstance(code, str):
            code = type(exc).__name__
        _emit({"error": code, "message": str(exc)}, sys.stderr)
        return 1
    return 0


cli_run = main

if __name__ == "__main__":
    sys.exit(main())
