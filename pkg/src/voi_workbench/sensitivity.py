"""One-way sensitivity sweeps.

A sweep moves a single parameter through its range, recomputing every
alternative's expected utility exactly at each grid point, and pins down
the parameter values where the best alternative changes. Probability
entries sweep [0, 1] with the same sibling-rescaling rule used everywhere
else; utility entries need a caller-supplied range.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

from .errors import UnresolvedRefError
from .model import DecisionModel
from .paramref import ParamRef, ProbabilityRef, parse_ref

DEFAULT_GRID = 101
CROSSING_TOL = 1e-9


@dataclass(frozen=True)
class SweepResult:
    param: ParamRef
    grid: tuple[float, ...]
    series: dict[str, tuple[float, ...]]
    crossings: tuple[float, ...]
    baseline_value: float

    def to_dict(self) -> dict:
        return {
            "param": self.param.render(),
            "baseline_value": self.baseline_value,
            "grid": list(self.grid),
            "series": {alt: list(vals) for alt, vals in self.series.items()},
            "crossings": list(self.crossings),
        }


def sweep(
    model: DecisionModel,
    param,
    grid_size: int = DEFAULT_GRID,
    value_range: tuple[float, float] | None = None,
) -> SweepResult:
    """Expected utility of every alternative across a parameter's range,
    plus the crossing points where the decision flips."""
    model.assert_valid()
    ref = parse_ref(param) if isinstance(param, str) else param
    if grid_size < 2:
        raise ValueError("grid needs at least two points")
    baseline = model.point_value(ref)
    if isinstance(ref, ProbabilityRef):
        lo, hi = 0.0, 1.0
    else:
        if value_range is None:
            raise ValueError(f"sweeping utility entry {ref} needs an explicit value range")
        lo, hi = float(value_range[0]), float(value_range[1])
        if not lo < hi:
            raise ValueError(f"empty sweep range [{lo}, {hi}]")

    alternatives = model.decision.alternatives
    grid = tuple(lo + (hi - lo) * i / (grid_size - 1) for i in range(grid_size))

    def eu_at(value: float) -> list[float]:
        sub = model.substitute(ref, value)
        return [sub.expected_utility(alt) for alt in alternatives]

    columns = [eu_at(v) for v in grid]
    series = {
        alt: tuple(col[k] for col in columns) for k, alt in enumerate(alternatives)
    }

    def best(col: list[float]) -> int:
        top = max(col)
        return next(k for k, v in enumerate(col) if v == top)

    crossings = []
    for i in range(len(grid) - 1):
        a = best(columns[i])
        b = best(columns[i + 1])
        if a == b:
            continue

        def gap(value: float) -> float:
            col = eu_at(value)
            return col[a] - col[b]

        lo_v, hi_v = grid[i], grid[i + 1]
        g_lo = gap(lo_v)
        for _ in range(60):
            mid = 0.5 * (lo_v + hi_v)
            g_mid = gap(mid)
            if (g_mid < 0.0) == (g_lo < 0.0):
                lo_v, g_lo = mid, g_mid
            else:
                hi_v = mid
            if hi_v - lo_v <= CROSSING_TOL:
                break
        crossings.append(0.5 * (lo_v + hi_v))

    return SweepResult(ref, grid, series, tuple(crossings), baseline)


def emit_plot_data(result: SweepResult, format: str = "csv") -> bytes:
    """Serialize a sweep for plotting; CSV holds the grid and one column
    per alternative at full float precision, JSON carries everything."""
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        alts = list(result.series.keys())
        writer.writerow(["param_value"] + alts)
        for i, v in enumerate(result.grid):
            writer.writerow([repr(v)] + [repr(result.series[alt][i]) for alt in alts])
        return buf.getvalue().encode("utf-8")
    if format == "json":
        return json.dumps(result.to_dict(), indent=2).encode("utf-8")
    raise ValueError(f"unknown format {format!r}")
