"""Runs, convergence studies and report output behind the ``quad`` command."""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
import time
from dataclasses import asdict, dataclass, field, replace
from importlib import resources
from typing import List, Optional, Sequence

import numpy as np

from .curve import integrate_curve
from .errors import EmptyStudy
from .fields import ExprField
from .geometry import Box
from .mesh import DisplacementConfig
from .region import integrate_region
from .surface import integrate_surface

MODES = ("curve", "surface", "region")
CSV_HEADER = ["n", "h", "q", "value", "abs_error", "observed_order"]
SATURATION = 100 * np.finfo(float).eps


@dataclass(frozen=True)
class RunConfig:
    dim: int
    mode: str
    levelset: str
    box: tuple
    n: int
    q: int
    integrand: str = "1"
    c: float = 0.25
    exact: Optional[float] = None

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError("dim must be 2 or 3")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.mode == "curve" and self.dim != 2:
            raise ValueError("curve mode is 2-D only")
        if self.mode == "surface" and self.dim != 3:
            raise ValueError("surface mode is 3-D only")
        if self.n < 1 or self.q < 1:
            raise ValueError("n and q must be positive")
        object.__setattr__(self, "box", tuple(float(b) for b in self.box))
        if len(self.box) != 2 * self.dim:
            raise ValueError(f"box needs {2 * self.dim} numbers for dim {self.dim}")
        Box.from_flat(self.box)


@dataclass
class RunResult:
    value: float
    error: Optional[float]
    element_counts: dict
    validation: dict
    min_effective_weight: float
    h: float
    wall_time: float

    def to_dict(self):
        return asdict(self)


def run(config: RunConfig) -> RunResult:
    F = ExprField.from_text(config.levelset, config.dim)
    f = ExprField.from_text(config.integrand, config.dim)
    box = Box.from_flat(config.box)
    integrator = {"curve": integrate_curve, "surface": integrate_surface, "region": integrate_region}[config.mode]
    start = time.perf_counter()
    res = integrator(box, config.n, F, f, config.q, DisplacementConfig(c=config.c), full_output=True)
    elapsed = time.perf_counter() - start
    error = None if config.exact is None else abs(res.value - config.exact)
    return RunResult(
        value=res.value,
        error=error,
        element_counts=res.counts,
        validation=asdict(res.report),
        min_effective_weight=res.min_effective_weight,
        h=res.h,
        wall_time=elapsed,
    )


@dataclass
class ConvergenceRow:
    n: int
    h: float
    q: int
    value: float
    abs_error: Optional[float]
    observed_order: Optional[float]
    saturated: bool = False


@dataclass
class ConvergenceReport:
    rows: List[ConvergenceRow] = field(default_factory=list)
    exact: Optional[float] = None

    def orders(self):
        return [r.observed_order for r in self.rows if r.observed_order is not None]

    def median_order(self):
        orders = self.orders()
        return statistics.median(orders) if orders else None

    def orders_until_saturation(self):
        """Unsaturated orders plus the step that first reaches saturation.

        The entering step uses the measured error, floored at one unit of
        eps*|exact| so an exact zero does not produce an infinite order.
        Rows after the first saturated one are noise and are dropped.
        """
        orders = []
        for k in range(1, len(self.rows)):
            prev, cur = self.rows[k - 1], self.rows[k]
            if prev.saturated or prev.abs_error is None:
                break
            if not cur.saturated:
                orders.append(cur.observed_order)
                continue
            floor = np.finfo(float).eps * abs(self.exact or 1.0)
            orders.append(math.log2(prev.abs_error / max(cur.abs_error, floor)))
            break
        return orders

    def to_dict(self):
        return {"exact": self.exact, "rows": [asdict(r) for r in self.rows]}


def observed_orders(errors, saturated):
    orders = [None]
    for k in range(1, len(errors)):
        prev, cur = errors[k - 1], errors[k]
        if prev is None or cur is None or saturated[k] or saturated[k - 1]:
            orders.append(None)
        else:
            orders.append(math.log2(prev / cur))
    return orders


def convergence(config: RunConfig, n_list: Sequence[int]) -> ConvergenceReport:
    n_list = list(n_list)
    if not n_list:
        raise EmptyStudy("convergence study needs at least one n")
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n values must be strictly increasing")
    rows = []
    for n in n_list:
        res = run(replace(config, n=n))
        rows.append(ConvergenceRow(n, res.h, config.q, res.value, res.error, None))
    exact = config.exact
    floor = SATURATION * abs(exact) if exact is not None else 0.0
    saturated = [r.abs_error is not None and r.abs_error <= floor for r in rows]
    for r, s, o in zip(rows, saturated, observed_orders([r.abs_error for r in rows], saturated)):
        r.saturated = bool(s)
        r.observed_order = o
    return ConvergenceReport(rows, exact)


def _num(x):
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.17g" % x


def report_csv(report: ConvergenceReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in report.rows:
        w.writerow([_num(r.n), _num(r.h), _num(r.q), _num(r.value), _num(r.abs_error), _num(r.observed_order)])
    return buf.getvalue()


def report_json(report: ConvergenceReport) -> str:
    return json.dumps(report.to_dict(), indent=2) + "\n"


def emit(report: ConvergenceReport, fmt: str, path) -> None:
    if not report.rows:
        raise EmptyStudy("nothing to write: the report has no rows")
    if fmt == "csv":
        text = report_csv(report)
    elif fmt == "json":
        text = report_json(report)
    else:
        raise ValueError("format must be csv or json")
    with open(path, "w") as fh:
        fh.write(text)


# ---------------------------------------------------------------- builtins

def load_builtins() -> dict:
    text = resources.files("implicitquad").joinpath("data/builtins.json").read_text()
    return json.loads(text)


def builtin_exact(entry: dict) -> float:
    if "exact" in entry:
        value = ExprField.from_text(entry["exact"], 2).constant
        if value is None:
            raise ValueError(f"exact value {entry['exact']!r} is not a constant")
        return value
    return float(entry["oracle"]["value"])


def builtin_config(test_id: str, n: Optional[int] = None, q: Optional[int] = None) -> RunConfig:
    builtins = load_builtins()
    if test_id not in builtins:
        raise KeyError(f"unknown builtin {test_id!r}; choose from {', '.join(builtins)}")
    entry = builtins[test_id]
    return RunConfig(
        dim=entry["dim"], mode=entry["mode"], levelset=entry["levelset"], integrand=entry["integrand"],
        box=tuple(entry["box"]), n=n or entry["n_list"][-1], q=q or entry["q"], exact=builtin_exact(entry),
    )


def builtin_n_list(test_id: str):
    return list(load_builtins()[test_id]["n_list"])


def run_oracle(test_id: str) -> float:
    from .oracles import RECIPES

    entry = load_builtins()[test_id]
    if "oracle" not in entry:
        raise KeyError(f"builtin {test_id!r} has a closed-form value, no oracle")
    oracle = entry["oracle"]
    params = dict(oracle["parameters"])
    if "semi_axes" in params:
        params["semi_axes"] = tuple(params["semi_axes"])
    return RECIPES[oracle["recipe"]](**params)
