"""Experiment configuration: parsing, validation and round-tripping."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .apfun import APFunction
from .errors import ValidationError
from .fixtures import generate_fixtures, random_function
from .harness import INEQUALITIES
from .kernels import QuadratureConfig
from .summability import generate_row

ROW_FAMILIES = ("cesaro", "riesz", "abel")


def _require(cond, path, msg):
    if not cond:
        raise ValidationError(f"{path}: {msg}")


def _number(d, key, path, default=None):
    v = d.get(key, default)
    _require(isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v),
             f"{path}.{key}", f"expected a finite number, got {v!r}")
    return float(v)


@dataclass(frozen=True)
class RowSpec:
    family: str
    params: tuple = ()

    def row(self, n: int):
        return generate_row(self.family, n, **dict(self.params))

    def to_dict(self) -> dict:
        return {"family": self.family, "params": dict(self.params)}


@dataclass(frozen=True)
class ExperimentConfig:
    functions: tuple = ()
    rows: tuple[RowSpec, ...] = (RowSpec("cesaro"),)
    inequalities: tuple[str, ...] = ("prop4",)
    n_range: tuple[int, int] = (2, 256)
    n_list: tuple[int, ...] | None = None
    q_list: tuple[float, ...] = (1.0, 2.0)
    c: float = 2.0
    x_count: int = 17
    x_points: tuple[float, ...] | None = None
    delta_grid_points: int = 48
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    seed: int = 1
    threads: int = 1
    csv_name: str = "sweep.csv"
    summary_name: str = "summary.json"

    # ------------------------------------------------------------ parsing
    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        _require(isinstance(d, dict), "config", "must be a JSON object")
        known = {"functions", "rows", "inequalities", "n_range", "n_list", "q_list", "c",
                 "x_grid", "delta_grid", "quadrature", "seed", "threads", "output"}
        for key in d:
            _require(key in known, key, "unknown field")

        funcs = d.get("functions")
        _require(isinstance(funcs, list) and funcs, "functions", "must be a nonempty list")
        for i, fs in enumerate(funcs):
            _validate_function_spec(fs, f"functions[{i}]")

        rows = []
        for i, r in enumerate(d.get("rows", [{"family": "cesaro"}])):
            path = f"rows[{i}]"
            _require(isinstance(r, dict), path, "must be an object")
            _require(r.get("family") in ROW_FAMILIES, f"{path}.family",
                     f"unknown family {r.get('family')!r}; expected one of {ROW_FAMILIES}")
            params = r.get("params", {})
            _require(isinstance(params, dict), f"{path}.params", "must be an object")
            try:
                generate_row(r["family"], 1, **params)
            except ValidationError as exc:
                raise ValidationError(f"{path}.params: {exc}") from exc
            rows.append(RowSpec(r["family"], tuple(sorted((k, float(v)) for k, v in params.items()))))

        ineqs = d.get("inequalities", ["prop4"])
        _require(isinstance(ineqs, list) and ineqs, "inequalities", "must be a nonempty list")
        for i, name in enumerate(ineqs):
            _require(name in INEQUALITIES, f"inequalities[{i}]",
                     f"unknown inequality {name!r}; expected one of {INEQUALITIES}")

        n_range = d.get("n_range", [2, 256])
        _require(isinstance(n_range, list) and len(n_range) == 2
                 and all(isinstance(v, int) and not isinstance(v, bool) for v in n_range)
                 and 0 <= n_range[0] <= n_range[1], "n_range", "expected [n_min, n_max] with 0 <= n_min <= n_max")
        n_list = d.get("n_list")
        if n_list is not None:
            _require(isinstance(n_list, list) and n_list
                     and all(isinstance(v, int) and v >= 0 for v in n_list), "n_list",
                     "expected a nonempty list of nonnegative integers")

        q_list = d.get("q_list", [1.0, 2.0])
        _require(isinstance(q_list, list) and q_list, "q_list", "must be a nonempty list")
        for i, q in enumerate(q_list):
            _require(isinstance(q, (int, float)) and q > 0, f"q_list[{i}]", f"q must be > 0, got {q!r}")

        c = _number(d, "c", "config", 2.0)
        _require(c > 1, "c", f"must be > 1, got {c}")

        xg = d.get("x_grid", {"count": 17})
        _require(isinstance(xg, dict), "x_grid", "must be an object")
        x_points = xg.get("points")
        x_count = xg.get("count", 17)
        _require(isinstance(x_count, int) and x_count >= 1, "x_grid.count", "must be a positive integer")
        if x_points is not None:
            _require(isinstance(x_points, list) and x_points, "x_grid.points", "must be a nonempty list")

        dg = d.get("delta_grid", {"points": 48})
        _require(isinstance(dg, dict) and isinstance(dg.get("points", 48), int)
                 and dg.get("points", 48) >= 2, "delta_grid.points", "must be an integer >= 2")

        try:
            quad = QuadratureConfig.from_dict(d.get("quadrature", {}))
        except (ValidationError, TypeError, ValueError) as exc:
            raise ValidationError(f"quadrature: {exc}") from exc

        seed = d.get("seed", 1)
        _require(isinstance(seed, int), "seed", "must be an integer")
        threads = d.get("threads", 1)
        _require(isinstance(threads, int) and threads >= 1, "threads", "must be a positive integer")
        out = d.get("output", {})
        _require(isinstance(out, dict), "output", "must be an object")

        return cls(
            functions=tuple(json.dumps(fs, sort_keys=True) for fs in funcs),
            rows=tuple(rows),
            inequalities=tuple(ineqs),
            n_range=(int(n_range[0]), int(n_range[1])),
            n_list=None if n_list is None else tuple(int(v) for v in n_list),
            q_list=tuple(float(q) for q in q_list),
            c=c,
            x_count=int(x_count),
            x_points=None if x_points is None else tuple(float(v) for v in x_points),
            delta_grid_points=int(dg.get("points", 48)),
            quadrature=quad,
            seed=int(seed),
            threads=int(threads),
            csv_name=str(out.get("csv", "sweep.csv")),
            summary_name=str(out.get("summary", "summary.json")),
        )

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config: invalid JSON: {exc}") from exc
        return cls.from_dict(d)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ValidationError(f"cannot read config {path}: {exc}") from exc
        return cls.from_json(text)

    def to_dict(self) -> dict:
        d = {
            "functions": [json.loads(s) for s in self.functions],
            "rows": [r.to_dict() for r in self.rows],
            "inequalities": list(self.inequalities),
            "n_range": list(self.n_range),
            "q_list": list(self.q_list),
            "c": self.c,
            "x_grid": {"count": self.x_count},
            "delta_grid": {"points": self.delta_grid_points},
            "quadrature": self.quadrature.to_dict(),
            "seed": self.seed,
            "threads": self.threads,
            "output": {"csv": self.csv_name, "summary": self.summary_name},
        }
        if self.n_list is not None:
            d["n_list"] = list(self.n_list)
        if self.x_points is not None:
            d["x_grid"]["points"] = list(self.x_points)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @property
    def ns(self) -> list[int]:
        if self.n_list is not None:
            return list(self.n_list)
        return list(range(self.n_range[0], self.n_range[1] + 1))

    def resolve_functions(self) -> list[tuple[str, APFunction]]:
        out = []
        for s in self.functions:
            out.extend(_resolve_function_spec(json.loads(s), self.seed))
        ids = [fid for fid, _ in out]
        dup = {i for i in ids if ids.count(i) > 1}
        _require(not dup, "functions", f"duplicate ids {sorted(dup)}")
        return out


def _validate_function_spec(fs, path):
    _require(isinstance(fs, dict), path, "must be an object")
    kinds = [k for k in ("function", "generator", "fixtures") if k in fs]
    _require(len(kinds) == 1, path, "needs exactly one of 'function', 'generator', 'fixtures'")
    if "fixtures" not in fs:
        _require(isinstance(fs.get("id"), str) and fs["id"], f"{path}.id", "must be a nonempty string")
    try:
        _resolve_function_spec(fs, 1)
    except ValidationError as exc:
        raise ValidationError(f"{path}.{kinds[0]}: {exc}") from exc


def _resolve_function_spec(fs, default_seed):
    if "function" in fs:
        return [(fs["id"], APFunction.from_dict(fs["function"]))]
    if "generator" in fs:
        g = fs["generator"]
        if not isinstance(g, dict) or g.get("kind") != "random":
            raise ValidationError("only {'kind': 'random', 'seed': int, 'index': int} is supported")
        return [(fs["id"], random_function(int(g.get("seed", default_seed)), int(g.get("index", 0))))]
    fx = fs["fixtures"]
    if not isinstance(fx, dict):
        raise ValidationError("must be an object {'seed': int, 'count': int}")
    return [(fid, f) for fid, f, _ in generate_fixtures(int(fx.get("seed", default_seed)),
                                                        int(fx.get("count", 8)))]


def default_config(inequality: str = "prop4") -> dict:
    """Baseline sweep over the fixture corpus for one inequality."""
    rows = {"prop4": [{"family": "cesaro"}],
            "thm5": [{"family": "cesaro"}, {"family": "riesz"}, {"family": "abel"}],
            "thm6": [{"family": "cesaro"}, {"family": "abel"}],
            "thm3": [{"family": "cesaro"}],
            "thm2": [{"family": "cesaro"}],
            "remark7": [{"family": "cesaro"}]}[inequality]
    q_list = {"thm3": [2.0], "remark7": [2.0], "thm2": [2.0]}.get(inequality, [1.0, 2.0])
    return {"functions": [{"fixtures": {"seed": 1, "count": 8}}], "rows": rows,
            "inequalities": [inequality], "n_range": [2, 256], "q_list": q_list, "c": 2.0,
            "x_grid": {"count": 17}, "seed": 1}
