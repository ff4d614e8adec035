"""Command line entry point.

Exit codes: 0 success, 1 a check ran and failed, 2 validation error,
3 numerical non-convergence with ``--strict``.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__
from .apfun import APFunction, evaluate
from .config import ExperimentConfig, default_config
from .errors import ConvergenceError, ValidationError
from .fixtures import generate_fixtures, write_fixtures
from .harness import INEQUALITIES, default_x_grid
from .kernels import (QuadratureConfig, geometric_sine_sum_closed, geometric_sine_sum_direct,
                      kernel_threshold_sum)
from .moduli import (default_delta_grid, fit_modulus, membership_diagnostic,
                     omega_alpha_membership_report)
from .strong_means import threshold_partial_sum
from .summability import check_row_stochastic, generate_row, hierarchy_check

EXIT_OK, EXIT_FAIL, EXIT_VALIDATION, EXIT_NONCONVERGED = 0, 1, 2, 3


class _Output:
    """Single emitter for tables and JSON: a directory when ``--out`` is set, else stdout."""

    def __init__(self, out_dir):
        self.out_dir = out_dir
        if out_dir:
            os.makedirs(out_dir, exist_ok=True)

    def write(self, name: str, text: str):
        if self.out_dir:
            path = os.path.join(self.out_dir, name)
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            print(f"wrote {path}", file=sys.stderr)
        else:
            sys.stdout.write(text)


def _csv_text(header_lines, columns, rows) -> str:
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(columns)
    wr.writerows(rows)
    return buf.getvalue()


def _threads(args) -> int | None:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("APSUMMA_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValidationError(f"APSUMMA_THREADS must be an integer, got {env!r}") from None
        if n < 1:
            raise ValidationError("APSUMMA_THREADS must be >= 1")
        return n
    return None


def _quadrature(args, base: QuadratureConfig | None = None) -> QuadratureConfig:
    q = base or QuadratureConfig()
    changes = {}
    if args.tol is not None:
        changes["abs_tolerance"] = args.tol
    if args.tail_cutoff is not None:
        changes["tail_cutoff"] = args.tail_cutoff
    if args.panels_per_osc is not None:
        changes["panels_per_oscillation"] = args.panels_per_osc
    return dataclasses.replace(q, **changes) if changes else q


def _header(args, quad: QuadratureConfig, command: str) -> list[str]:
    return [f"apsumma {__version__} {command}",
            f"seed={args.seed}",
            f"tol={quad.abs_tolerance!r}",
            f"quadrature={json.dumps(quad.to_dict(), sort_keys=True)}"]


def _functions(args) -> list[tuple[str, APFunction]]:
    """Functions named by ``--function``, ``--fixture`` or ``--config``; default corpus otherwise."""
    if getattr(args, "function", None):
        out = []
        for path in args.function:
            try:
                with open(path, encoding="utf-8") as fh:
                    doc = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise ValidationError(f"cannot read function {path}: {exc}") from exc
            body = doc.get("function", doc)
            out.append((doc.get("id", os.path.splitext(os.path.basename(path))[0]),
                        APFunction.from_dict(body)))
        return out
    corpus = generate_fixtures(args.seed, 8)
    if getattr(args, "fixture", None):
        by_id = {fid: f for fid, f, _ in corpus}
        missing = [i for i in args.fixture if i not in by_id]
        if missing:
            raise ValidationError(f"unknown fixture ids {missing}; available {sorted(by_id)}")
        return [(i, by_id[i]) for i in args.fixture]
    if args.config:
        return ExperimentConfig.load(args.config).resolve_functions()
    return [(fid, f) for fid, f, _ in corpus]


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_range(text: str) -> list[int]:
    """``"0..64"`` (inclusive), ``"5"`` or ``"1,2,8"``."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return list(range(int(lo), int(hi) + 1))
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N, A..B or a comma list, got {text!r}") from None


# ---------------------------------------------------------------- subcommands

def cmd_eval(args) -> int:
    quad = _quadrature(args)
    rows = []
    for fid, f in _functions(args):
        xs = args.x if args.x else default_x_grid(f, 17)
        for x in xs:
            v = complex(evaluate(f, float(x)))
            rows.append([fid, repr(float(x)), repr(v.real), repr(v.imag)])
    _Output(args.out).write("eval.csv", _csv_text(_header(args, quad, "eval"),
                                                  ["f_id", "x", "re", "im"], rows))
    return EXIT_OK


def cmd_kernel_check(args) -> int:
    quad = _quadrature(args)
    rows, worst, nonconv = [], 0.0, 0
    for fid, f in _functions(args):
        xs = default_x_grid(f, args.x_points)
        for x in xs:
            for k in range(args.k_max + 1):
                ks = kernel_threshold_sum(f, float(x), k, quad)
                ref = complex(threshold_partial_sum(f, float(x), f.alpha * k / 2.0))
                diff = abs(ks.value - ref)
                worst = max(worst, diff / (quad.abs_tolerance + ks.tail_bound))
                nonconv += not ks.converged
                rows.append([fid, repr(float(x)), k, repr(ks.value.real), repr(ks.value.imag),
                             repr(ref.real), repr(ref.imag), repr(diff), repr(ks.tail_bound),
                             repr(ks.error_estimate), int(ks.converged)])
    cols = ["f_id", "x", "k", "kernel_re", "kernel_im", "threshold_re", "threshold_im",
            "abs_diff", "tail_bound", "error_estimate", "converged"]
    _Output(args.out).write("kernel_check.csv", _csv_text(_header(args, quad, "kernel-check"),
                                                          cols, rows))
    ok = worst <= 1.0
    print(f"{'PASS' if ok else 'FAIL'} kernel-check: max |diff|/(tol+tail) = {worst:.3e}, "
          f"non-converged = {nonconv}", file=sys.stderr)
    if nonconv and args.strict:
        return EXIT_NONCONVERGED
    return EXIT_OK if ok else EXIT_FAIL


def cmd_identity_check(args) -> int:
    if not 0 <= args.r_max < 1:
        raise ValidationError(f"--r-max must satisfy 0 <= r < 1, got {args.r_max}")
    quad = _quadrature(args)
    rs = np.round(np.arange(0.0, args.r_max + 1e-12, args.r_step), 12)
    grid = np.linspace(0.05, math.pi - 0.05, args.grid)
    worst, worst_at, rows = 0.0, None, []
    for r in rs:
        bound = 1e-10 + r ** args.N / (1.0 - r)
        for y in grid:
            for z in grid:
                closed = geometric_sine_sum_closed(float(r), float(y), float(z))
                direct = geometric_sine_sum_direct(float(r), float(y), float(z), args.N)
                rel = abs(closed - direct) / bound
                if rel > worst:
                    worst, worst_at = rel, (float(r), float(y), float(z), abs(closed - direct))
        rows.append([repr(float(r)), repr(bound)])
    ok = worst <= 1.0
    if args.out:
        _Output(args.out).write("identity_check.csv", _csv_text(
            _header(args, quad, "identity-check"), ["r", "bound"], rows))
    dev = worst_at[3] if worst_at else 0.0
    print(f"{'PASS' if ok else 'FAIL'} identity-check: max deviation {dev:.3e} "
          f"(ratio to bound {worst:.3e}) at r,y,z = {worst_at[:3] if worst_at else None}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_classify(args) -> int:
    params = {}
    for item in args.param or []:
        if "=" not in item:
            raise ValidationError(f"--param expects NAME=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        params[k] = float(v)
    rows = []
    for n in args.n:
        row = generate_row(args.family, n, **params)
        if not check_row_stochastic(row):
            raise ValidationError(f"row n={n} is not row-stochastic")
        for rep in hierarchy_check(row, args.c, args.m_max):
            rows.append(rep.csv_fields(n))
    quad = _quadrature(args)
    head = _header(args, quad, f"classify family={args.family} c={args.c!r} params={params}")
    _Output(args.out).write("classify.csv", _csv_text(head, ["n", "class", "member", "K", "witness_m"],
                                                      rows))
    return EXIT_OK


def cmd_moduli(args) -> int:
    quad = _quadrature(args)
    grid = default_delta_grid(args.delta_points)
    out = _Output(args.out)
    docs, rows = {}, []
    for fid, f in _functions(args):
        xs = args.x if args.x else [0.0]
        for x in xs:
            w = fit_modulus(f, float(x), grid)
            report = omega_alpha_membership_report(f, float(x), w)
            docs[f"{fid}@{float(x)!r}"] = {**w.to_dict(), "diagnostic": membership_diagnostic(report)}
            rows += [[fid, repr(float(x)), r.kind, repr(r.gamma_or_delta), repr(r.lhs),
                      repr(r.w_value), repr(r.ratio)] for r in report]
    out.write("moduli.json", json.dumps(docs, indent=2, sort_keys=True) + "\n")
    out.write("membership.csv", _csv_text(_header(args, quad, "moduli"),
                                          ["f_id", "x", "kind", "gamma_or_delta", "lhs", "w_value",
                                           "ratio"], rows))
    return EXIT_OK


def _load_config(args, inequality: str | None = None) -> ExperimentConfig:
    if args.config:
        cfg = ExperimentConfig.load(args.config)
    else:
        cfg = ExperimentConfig.from_dict(default_config(inequality or "prop4"))
    changes = {"quadrature": _quadrature(args, cfg.quadrature)}
    if inequality is not None:
        changes["inequalities"] = (inequality,)
    if args.seed_given:
        changes["seed"] = args.seed
    threads = _threads(args)
    if threads is not None:
        changes["threads"] = threads
    return dataclasses.replace(cfg, **changes)


def _run_and_emit(args, cfg: ExperimentConfig) -> int:
    from .sweep import run_sweep
    t0 = time.perf_counter()
    result = run_sweep(cfg)
    out = _Output(args.out)
    out.write(cfg.csv_name, result.csv_text())
    if args.out:
        out.write(cfg.summary_name, result.summary_text())
    else:
        sys.stderr.write(result.summary_text())
    for ineq in cfg.inequalities:
        s = result.summary[ineq]
        print(f"{ineq}: cells={s['cells']} max_ratio={s['max_ratio']} "
              f"nondivergence={'PASS' if s['nondivergence_pass'] else 'FAIL'}", file=sys.stderr)
    print(f"elapsed {time.perf_counter() - t0:.1f}s", file=sys.stderr)
    nonfinite = any(not result.summary[i]["all_finite"] for i in cfg.inequalities)
    if nonfinite and args.strict:
        return EXIT_NONCONVERGED
    diverged = any(not result.summary[i]["nondivergence_pass"] for i in cfg.inequalities)
    return EXIT_FAIL if diverged else EXIT_OK


def cmd_verify(args) -> int:
    return _run_and_emit(args, _load_config(args, args.inequality))


def cmd_sweep(args) -> int:
    if not args.config:
        raise ValidationError("sweep needs --config")
    return _run_and_emit(args, _load_config(args))


def cmd_fixtures(args) -> int:
    paths = write_fixtures(args.out or "fixtures", args.seed, args.count)
    for p in paths:
        print(p)
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="experiment config (JSON)")
    common.add_argument("--out", metavar="DIR", help="output directory (default: stdout)")
    common.add_argument("--seed", type=int, default=None, help="seed for generated functions (default 1)")
    common.add_argument("--tol", type=float, default=None, help="quadrature absolute tolerance")
    common.add_argument("--strict", action="store_true", help="exit 3 on non-convergence flags")
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads (fallback: APSUMMA_THREADS)")
    common.add_argument("--tail-cutoff", type=float, default=None, help="kernel integral cutoff T")
    common.add_argument("--panels-per-osc", type=int, default=None,
                        help="quadrature panels per oscillation (>= 4)")

    parser = argparse.ArgumentParser(prog="apsumma", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"apsumma {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def fn_args(p):
        p.add_argument("--function", action="append", metavar="PATH", help="function JSON file")
        p.add_argument("--fixture", action="append", metavar="ID", help="fixture id from the corpus")

    p = sub.add_parser("eval", parents=[common], help="evaluate functions on a grid")
    fn_args(p)
    p.add_argument("--x", type=_float_list, help="comma-separated points")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("kernel-check", parents=[common], help="kernel vs threshold partial sums")
    fn_args(p)
    p.add_argument("--k-max", type=int, default=32)
    p.add_argument("--x-points", type=int, default=17)
    p.set_defaults(func=cmd_kernel_check)

    p = sub.add_parser("identity-check", parents=[common], help="geometric sine-sum identity")
    p.add_argument("--r-max", type=float, default=0.9)
    p.add_argument("--r-step", type=float, default=0.1)
    p.add_argument("--grid", type=int, default=25)
    p.add_argument("--N", type=int, default=700)
    p.set_defaults(func=cmd_identity_check)

    p = sub.add_parser("classify", parents=[common], help="MS/RBVS/GM/GM(2beta) constants of a row family")
    p.add_argument("--family", required=True, choices=("cesaro", "riesz", "abel"))
    p.add_argument("--n", type=_int_range, default=list(range(0, 65)), help="N, A..B or list")
    p.add_argument("--c", type=float, default=2.0)
    p.add_argument("--m-max", type=int, default=None)
    p.add_argument("--param", action="append", metavar="NAME=VALUE", help="family parameter (s, r)")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("moduli", parents=[common], help="fitted modulus and membership report")
    fn_args(p)
    p.add_argument("--x", type=_float_list)
    p.add_argument("--delta-points", type=int, default=48)
    p.set_defaults(func=cmd_moduli)

    p = sub.add_parser("verify", parents=[common], help="ratio sweep for one inequality")
    p.add_argument("inequality", choices=INEQUALITIES)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", parents=[common], help="ratio sweep from a config")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fixtures", parents=[common], help="write the fixture corpus")
    p.add_argument("--count", type=int, default=8)
    p.set_defaults(func=cmd_fixtures)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.seed_given = args.seed is not None
    if args.seed is None:
        args.seed = 1
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED


if __name__ == "__main__":
    sys.exit(main())
