"""Parameter sweeps, CSV tables and figure data for the three size regimes."""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .model import ModelParams
from .roots import bisect
from .simulator import worker_count
from .solvers import (
    ManagerVariant,
    PartnershipVariant,
    PlannerVariant,
    central_planner_optimum,
    manager_equilibrium,
    partnership_equilibrium,
)
from .svg import write_line_chart

NA, NOEQ, NOOPT = "NA", "NOEQ", "NOOPT"
SENTINELS = frozenset({NA, NOEQ, NOOPT})
REGIMES = ("manager", "planner", "partnership")

Cell = Union[float, str]

PRESETS = {
    "example1": ModelParams(K=20 / 3, p=2, eps=0, beta=0.4, theta=0.5, c=1, kappa0=2, k=1, delta=4),
    "example2": ModelParams(K=20 / 3, p=2, eps=1, beta=0.4, theta=0.5, c=1, kappa0=2, k=1, delta=4),
}
# sweep variable and interval for each preset
PRESET_SWEEPS = {"example1": ("theta", 0.0, 1.0), "example2": ("beta", 0.0, 0.8)}
VARIABLE_BOUNDS = {"theta": (0.0, 1.0), "beta": (0.0, 1.0)}


@dataclass
class SweepRow:
    value: float
    regime: str
    variant: str
    z_star: Cell
    v_member: Cell
    v_manager: Cell


@dataclass
class SweepTable:
    variable: str
    rows: list[SweepRow]

    def column(self, regime: str, name: str) -> list[Cell]:
        return [getattr(r, name) for r in self.rows if r.regime == regime]

    def values(self) -> list[float]:
        return sorted({r.value for r in self.rows})


def grid(lo: float, hi: float, steps: int) -> np.ndarray:
    """Cell midpoints ``lo + (i + 1/2) h``; never touches an open endpoint."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if not hi > lo:
        raise ValueError("sweep range must satisfy from < to")
    h = (hi - lo) / steps
    return lo + (np.arange(steps) + 0.5) * h


def regime_row(params: ModelParams, regime: str, value: float) -> SweepRow:
    if regime == "manager":
        out = manager_equilibrium(params)
        if out.variant is ManagerVariant.NO_EQUILIBRIUM:
            return SweepRow(value, regime, out.variant.value, NOEQ, NOEQ, NOEQ)
        return SweepRow(value, regime, out.variant.value, out.z_star, out.v_worker, out.v_manager)
    if regime == "planner":
        out = central_planner_optimum(params)
        v = out.variant
        if v is PlannerVariant.NO_OPTIMUM:
            return SweepRow(value, regime, f"{v.value}({out.limit.value})", NOOPT, NOOPT, NA)
        if v is PlannerVariant.UNCLASSIFIED:
            return SweepRow(value, regime, v.value, NA, NA, NA)
        z = out.z_star if out.z_star is not None else NA
        return SweepRow(value, regime, v.value, z, out.v_central, NA)
    if regime == "partnership":
        out = partnership_equilibrium(params)
        if out.variant is PartnershipVariant.UNCLASSIFIED:
            return SweepRow(value, regime, out.variant.value, NA, NA, NA)
        return SweepRow(value, regime, out.variant.value, out.z_star, out.v_partner, NA)
    raise ValueError(f"unknown regime {regime!r}")


def sweep(params: ModelParams, variable: str, lo: float, hi: float, steps: int,
          regimes=REGIMES) -> SweepTable:
    if variable not in VARIABLE_BOUNDS:
        raise ValueError(f"cannot sweep {variable!r}; choose theta or beta")
    b_lo, b_hi = VARIABLE_BOUNDS[variable]
    if lo < b_lo or hi > b_hi:
        raise ValueError(f"{variable} range must lie within [{b_lo}, {b_hi}]")
    xs = grid(lo, hi, steps)

    def at(x):
        q = params.replace(**{variable: float(x)})
        return [regime_row(q, reg, float(x)) for reg in regimes]

    workers = worker_count(len(xs))
    if workers == 1:
        chunks = [at(x) for x in xs]
    else:
        with ThreadPoolExecutor(workers) as pool:
            chunks = list(pool.map(at, xs))
    return SweepTable(variable, [row for chunk in chunks for row in chunk])


def format_cell(cell: Cell) -> str:
    if isinstance(cell, str):
        return cell
    return format(float(cell), ".17g")


def parse_cell(text: str) -> Cell:
    return text if text in SENTINELS else float(text)


def write_sweep_csv(table: SweepTable, path: Path | str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([table.variable, "regime", "variant", "z_star", "v_member", "v_manager"])
        for r in table.rows:
            w.writerow([format_cell(r.value), r.regime, r.variant,
                        format_cell(r.z_star), format_cell(r.v_member), format_cell(r.v_manager)])


def read_sweep_csv(path: Path | str) -> SweepTable:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [
            SweepRow(float(v), reg, var, parse_cell(z), parse_cell(vm), parse_cell(vman))
            for v, reg, var, z, vm, vman in reader
        ]
    return SweepTable(header[0], rows)


def regime_value(params: ModelParams, regime: str) -> Optional[float]:
    """Member value under ``regime``, or None when there is no solution."""
    cell = regime_row(params, regime, 0.0).v_member
    return None if isinstance(cell, str) else float(cell)


def find_crossing(params: ModelParams, variable: str, regime_a: str, regime_b: str,
                  lo: float, hi: float, steps: int = 1000, tol: float = 1e-12) -> Optional[float]:
    """First point where the member values of two regimes cross.

    Scans a ``steps``-point sweep for a sign change of the value difference
    (both values defined) and refines it by bisection on the solvers.
    """

    def diff(x: float) -> Optional[float]:
        q = params.replace(**{variable: x})
        a, b = regime_value(q, regime_a), regime_value(q, regime_b)
        return None if a is None or b is None else a - b

    xs = grid(lo, hi, steps)
    prev_x, prev_d = None, None
    for x in xs:
        d = diff(float(x))
        if d is not None and prev_d is not None and (d == 0 or (d > 0) != (prev_d > 0)):
            return bisect(diff, prev_x, float(x), rtol=tol)
        prev_x, prev_d = (float(x), d) if d is not None else (None, None)
    return None


# --------------------------------------------------------------------------
# figures

FIGURES = {
    "example1": [
        ("figure1", "member values", "v_member", ("manager", "planner", "partnership")),
        ("figure2", "team sizes", "z_star", ("manager", "planner", "partnership")),
    ],
    "example2": [
        ("figure3", "member values", "v_member", ("manager", "partnership")),
        ("figure4", "team sizes", "z_star", ("manager", "partnership")),
    ],
}
SERIES_LABELS = {
    ("v_member", "manager"): "V_w",
    ("v_member", "planner"): "V_c",
    ("v_member", "partnership"): "V_p",
    ("z_star", "manager"): "z_m",
    ("z_star", "planner"): "z_c",
    ("z_star", "partnership"): "z_p",
}


def write_wide_csv(path: Path | str, variable: str, xs, columns: list[tuple[str, list[Cell]]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([variable] + [name for name, _ in columns])
        for i, x in enumerate(xs):
            w.writerow([format_cell(x)] + [format_cell(col[i]) for _, col in columns])


def figures(preset: str, out_dir: Path | str, steps: int = 400) -> list[Path]:
    """Write the CSV and SVG files for one preset's pair of figures."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    params = PRESETS[preset]
    variable, lo, hi = PRESET_SWEEPS[preset]
    table = sweep(params, variable, lo, hi, steps)
    xs = table.values()
    written = []
    for name, title, field_name, regimes in FIGURES[preset]:
        columns = [(SERIES_LABELS[field_name, reg], table.column(reg, field_name)) for reg in regimes]
        csv_path = out / f"{name}.csv"
        write_wide_csv(csv_path, variable, xs, columns)
        series = [(label, [None if isinstance(c, str) else c for c in col]) for label, col in columns]
        svg_path = out / f"{name}.svg"
        write_line_chart(svg_path, f"{preset}: {title}", variable, "value" if field_name == "v_member" else "size",
                         xs, series)
        written += [csv_path, svg_path]
    return written


def sweep_charts(table: SweepTable, stem: Path | str) -> list[Path]:
    """Value and size charts for an arbitrary sweep table."""
    stem = Path(stem)
    xs = table.values()
    paths = []
    for field_name, suffix in (("v_member", "values"), ("z_star", "sizes")):
        series = []
        for reg in REGIMES:
            col = table.column(reg, field_name)
            if col:
                series.append((SERIES_LABELS[field_name, reg], [None if isinstance(c, str) else c for c in col]))
        path = stem.with_name(f"{stem.stem}_{suffix}.svg")
        write_line_chart(path, f"{suffix} vs {table.variable}", table.variable, suffix, xs, series)
        paths.append(path)
    return paths


def finite(cell: Cell) -> bool:
    return not isinstance(cell, str) and math.isfinite(cell)
