"""Parameter sweeps over the harness inequalities with ordered CSV emission.

Cells are independent and may run on a thread pool; results are collected in
input order so the CSV is byte-identical for identical configs.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import harness
from .config import ExperimentConfig
from .harness import CSV_COLUMNS, RatioReport
from .moduli import default_delta_grid, fit_modulus
from .apfun import default_u_grid, stepanov_norm
from .summability import gm2beta_constant, ms_check


@dataclass(frozen=True)
class Cell:
    inequality: str
    f_index: int
    row_index: int | None
    q: float
    x_index: int | None


def _cells(cfg: ExperimentConfig, functions, xs_by_f) -> list[Cell]:
    out = []
    for ineq in cfg.inequalities:
        for fi, _ in enumerate(functions):
            if ineq == "prop4":
                out += [Cell(ineq, fi, None, q, xi) for q in cfg.q_list if q <= 2
                        for xi in range(len(xs_by_f[fi]))]
            elif ineq in ("thm5", "thm6"):
                out += [Cell(ineq, fi, ri, q, xi) for ri in range(len(cfg.rows))
                        for q in cfg.q_list if q <= 2 for xi in range(len(xs_by_f[fi]))]
            elif ineq == "thm3":
                out += [Cell(ineq, fi, None, q, None) for q in cfg.q_list if q >= 2]
            elif ineq == "thm2":
                out += [Cell(ineq, fi, ri, q, None) for ri in range(len(cfg.rows))
                        for q in cfg.q_list if q <= 2]
            else:
                out.append(Cell(ineq, fi, None, 2.0, None))
    return out


class _Context:
    """Per-function shared state (x-grids, fitted moduli, omega curves)."""

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.functions = cfg.resolve_functions()
        self.xs = [np.array(cfg.x_points) if cfg.x_points is not None
                   else harness.default_x_grid(f, cfg.x_count) for _, f in self.functions]
        self.delta_grid = default_delta_grid(cfg.delta_grid_points)
        self._w = {}
        self._omega = {}
        self._norm = {}
        self._class = {}

    def modulus(self, fi, xi):
        key = (fi, xi)
        if key not in self._w:
            f = self.functions[fi][1]
            self._w[key] = fit_modulus(f, float(self.xs[fi][xi]), self.delta_grid)
        return self._w[key]

    def omega_inf(self, fi):
        if fi not in self._omega:
            self._omega[fi] = harness.OmegaCache(self.functions[fi][1], math.inf)
            self._norm[fi] = stepanov_norm(self.functions[fi][1], math.inf)
        return self._omega[fi], self._norm[fi]

    def class_flags(self, ri, n):
        key = (ri, n)
        if key not in self._class:
            row = self.cfg.rows[ri].row(n)
            self._class[key] = (gm2beta_constant(row, self.cfg.c).member, ms_check(row).member)
        return self._class[key]

    def warm(self):
        # shared caches are filled serially so worker threads only read them
        for fi in range(len(self.functions)):
            if {"prop4", "thm5", "thm6", "remark7"} & set(self.cfg.inequalities):
                for xi in range(len(self.xs[fi])):
                    self.modulus(fi, xi)
            if {"thm3", "remark7"} & set(self.cfg.inequalities):
                self.omega_inf(fi)
        if {"thm5", "thm6", "thm2"} & set(self.cfg.inequalities):
            for ri in range(len(self.cfg.rows)):
                for n in self.cfg.ns:
                    self.class_flags(ri, n)


def _run_cell(ctx: _Context, cell: Cell) -> list[RatioReport]:
    cfg = ctx.cfg
    f_id, f = ctx.functions[cell.f_index]
    ns = cfg.ns
    out = []
    if cell.inequality == "prop4":
        x = float(ctx.xs[cell.f_index][cell.x_index])
        return harness.prop4_table(f, x, ns, cell.q, ctx.modulus(cell.f_index, cell.x_index), f_id)
    if cell.inequality in ("thm5", "thm6"):
        x = float(ctx.xs[cell.f_index][cell.x_index])
        w = ctx.modulus(cell.f_index, cell.x_index)
        spec = cfg.rows[cell.row_index]
        divisor = 2.0 ** (1 + math.floor(cfg.c)) if cell.inequality == "thm5" else 2.0
        terms = harness.RhsTerms(f, w, divisor)
        for n in ns:
            row = spec.row(n)
            in_gm2, in_ms = ctx.class_flags(cell.row_index, n)
            if cell.inequality == "thm5":
                r = harness.thm5_ratio(f, x, n, cell.q, row, cfg.c, w, f_id, False, terms)
                if not in_gm2:
                    r.flags = r.flags + ("row_not_gm2beta",)
            elif in_ms:
                r = harness.thm6_ratio(f, x, n, cell.q, row, w, f_id, terms)
            else:
                continue
            out.append(r)
        return out
    if cell.inequality == "thm3":
        om, norm = ctx.omega_inf(cell.f_index)
        return [harness.thm3_comparison(f, n, cell.q, ctx.xs[cell.f_index], om, f_id, norm)
                for n in ns]
    if cell.inequality == "thm2":
        spec = cfg.rows[cell.row_index]
        u_grid = default_u_grid(f, 32)
        om = harness.OmegaCache(f, 2.0, u_grid)
        return harness.thm2_table(f, [(n, spec.row(n)) for n in ns], cell.q, cfg.c, 2.0, u_grid,
                                  om, f_id, lambda n: ctx.class_flags(cell.row_index, n)[0])
    om, norm = ctx.omega_inf(cell.f_index)
    ws = {float(x): ctx.modulus(cell.f_index, xi) for xi, x in enumerate(ctx.xs[cell.f_index])}
    return [harness.remark7_ratio(f, n, ws, om, f_id, norm) for n in ns]


@dataclass
class SweepResult:
    reports: list[RatioReport]
    summary: dict
    header: list[str]

    def csv_text(self) -> str:
        buf = io.StringIO()
        for line in self.header:
            buf.write(f"# {line}\n")
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(CSV_COLUMNS)
        for r in self.reports:
            wr.writerow(r.csv_row())
        return buf.getvalue()

    def summary_text(self) -> str:
        return json.dumps(self.summary, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _finite_or_str(v: float):
    if math.isnan(v):
        return "undefined"
    if math.isinf(v):
        return "inf"
    return v


def summarize(reports: list[RatioReport], cfg: ExperimentConfig) -> dict:
    """Max ratio and grouped non-divergence statistic per inequality."""
    ns = cfg.ns
    n_split = max(ns) // 2
    out = {}
    for ineq in cfg.inequalities:
        rs = [r for r in reports if r.inequality_id == ineq]
        ratios = np.array([r.ratio for r in rs], dtype=float)
        defined = ratios[~np.isnan(ratios)]
        groups = {}
        for r in rs:
            groups.setdefault((r.f_id, r.x, r.row_family, r.q), []).append(r)
        detail, all_pass = [], True
        for (f_id, x, fam, q), grp in groups.items():
            upper, lower = harness.nondivergence([g.n for g in grp], [g.ratio for g in grp], n_split)
            ok = harness.nondivergence_pass(upper, lower)
            all_pass &= ok
            detail.append({"f_id": f_id, "x": x, "row_family": fam, "q": q,
                           "upper_max": _finite_or_str(upper), "lower_max": _finite_or_str(lower),
                           "pass": ok})
        out[ineq] = {
            "cells": len(rs),
            "undefined": int(np.isnan(ratios).sum()),
            "max_ratio": _finite_or_str(float(defined.max())) if defined.size else "undefined",
            "all_finite": bool(np.all(np.isfinite(defined))),
            "flagged": sum(1 for r in rs if r.flags),
            "n_split": n_split,
            "nondivergence_factor": harness.NONDIVERGENCE_FACTOR,
            "nondivergence_pass": all_pass,
            "groups": detail,
        }
    a0 = {}
    for spec in cfg.rows:
        first = float(spec.row(min(ns)).entries(0)[0])
        last = float(spec.row(max(ns)).entries(0)[0])
        a0[spec.family] = {"a_n0_first": first, "a_n0_last": last, "decreasing": last < first}
    out["row_a_n0"] = a0
    return out


def header_lines(cfg: ExperimentConfig, tol: float | None = None) -> list[str]:
    return [f"apsumma sweep inequalities={','.join(cfg.inequalities)}",
            f"seed={cfg.seed}",
            f"tol={cfg.quadrature.abs_tolerance if tol is None else tol!r}",
            f"quadrature={json.dumps(cfg.quadrature.to_dict(), sort_keys=True)}",
            f"c={cfg.c!r} n_range={cfg.ns[0]}..{cfg.ns[-1]} q_list={list(cfg.q_list)}"]


def run_sweep(cfg: ExperimentConfig, threads: int | None = None) -> SweepResult:
    ctx = _Context(cfg)
    ctx.warm()
    cells = _cells(cfg, ctx.functions, ctx.xs)
    threads = cfg.threads if threads is None else threads
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda c: _run_cell(ctx, c), cells))
    else:
        chunks = [_run_cell(ctx, c) for c in cells]
    reports = [r for chunk in chunks for r in chunk]
    return SweepResult(reports, summarize(reports, cfg), header_lines(cfg))


def write_sweep(result: SweepResult, cfg: ExperimentConfig, out_dir) -> tuple[str, str]:
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, cfg.csv_name)
    summary_path = os.path.join(out_dir, cfg.summary_name)
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(result.csv_text())
    with open(summary_path, "w", encoding="utf-8") as fh:
        fh.write(result.summary_text())
    return csv_path, summary_path
