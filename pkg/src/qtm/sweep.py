"""Two-dimensional parameter sweeps and mode-boundary location.

Grids are evaluated one row (fixed y) at a time. Every row is computed by
the same vectorized call whatever the number of workers, so results are
bitwise identical for any worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .classifier import (
    DEFAULT_TOLERANCE,
    MODE_CODES,
    UNRESOLVED,
    OperationalMode,
    classify_arrays,
    performance_arrays,
)
from .cycles import CARNOT, CYCLES, LEDGERS, STIRLING_REGEN
from .spectral import MachineParams

AXIS_NAMES = ("omega0", "omega1", "t_hot", "t_cold")

# per-cell flag bits
FLAG_NO_ISENTROPE = 1
FLAG_CLAUSIUS = 2
FLAG_DIV0 = 4
FLAG_REGEN_NO_GAIN = 8
FLAG_NAMES = {
    FLAG_NO_ISENTROPE: "no_isentrope",
    FLAG_CLAUSIUS: "clausius",
    FLAG_DIV0: "div0",
    FLAG_REGEN_NO_GAIN: "regen_no_gain",
}


def flag_names(bits: int) -> list:
    return [name for bit, name in FLAG_NAMES.items() if bits & bit]


def flag_bits(names) -> int:
    lookup = {v: k for k, v in FLAG_NAMES.items()}
    return sum(lookup[n] for n in names)


@dataclass(frozen=True)
class AxisSpec:
    name: str
    min: float
    max: float
    count: int

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ValueError(f"axis name must be one of {AXIS_NAMES}, got {self.name!r}")
        if int(self.count) != self.count or self.count < 2:
            raise ValueError(f"{self.name}: count must be an integer >= 2")
        if not self.min < self.max:
            raise ValueError(f"{self.name}: min must be < max")

    def values(self):
        return np.linspace(self.min, self.max, int(self.count))


@dataclass(frozen=True)
class GridSpec:
    cycle: str
    x_axis: AxisSpec
    y_axis: AxisSpec
    fixed: dict = field(default_factory=dict)
    params: MachineParams = MachineParams()
    tolerance: float = DEFAULT_TOLERANCE

    def __post_init__(self):
        if self.cycle not in CYCLES:
            raise ValueError(f"cycle must be one of {CYCLES}, got {self.cycle!r}")
        if self.x_axis.name == self.y_axis.name:
            raise ValueError("x and y axes must name distinct parameters")
        needed = set(AXIS_NAMES) - {self.x_axis.name, self.y_axis.name}
        missing = needed - set(self.fixed)
        if missing:
            raise ValueError(f"missing fixed values: {', '.join(sorted(missing))}")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be > 0")
        for name in AXIS_NAMES:
            lo = self.fixed[name] if name in needed else min(self._axis(name).min, self._axis(name).max)
            if name.startswith("t_") and lo <= 0:
                raise ValueError(f"{name} must be > 0")
            if name.startswith("omega") and lo < 0:
                raise ValueError(f"{name} must be >= 0")

    def _axis(self, name):
        return self.x_axis if self.x_axis.name == name else self.y_axis


@dataclass
class GridResult:
    """Row-major (y, x) arrays of the swept cycle; x varies fastest."""

    spec: Optional[GridSpec]
    x: np.ndarray
    y: np.ndarray
    q_hot: np.ndarray
    q_cold: np.ndarray
    work: np.ndarray
    mode: np.ndarray  # int codes, UNRESOLVED where no record exists
    metric: np.ndarray
    kappa: np.ndarray
    kappa_carnot: np.ndarray
    flags: np.ndarray

    @property
    def shape(self):
        return self.mode.shape

    def modes_present(self, include_unresolved=False):
        codes = set(np.unique(self.mode).tolist())
        out = {MODE_CODES_INV[c] for c in codes if c != UNRESOLVED}
        if include_unresolved and UNRESOLVED in codes:
            out.add(None)
        return out

    def area(self, mode: OperationalMode) -> float:
        """Fraction of grid cells in ``mode``."""
        return float(np.mean(self.mode == MODE_CODES[OperationalMode(mode)]))


MODE_CODES_INV = {v: k for k, v in MODE_CODES.items()}


def _row_values(spec: GridSpec, j: int):
    xs = spec.x_axis.values()
    y = spec.y_axis.values()[j]
    values = {name: np.full(xs.shape, float(v)) for name, v in spec.fixed.items() if name in AXIS_NAMES}
    values[spec.x_axis.name] = xs
    values[spec.y_axis.name] = np.full(xs.shape, y)
    return values


def evaluate_row(spec: GridSpec, j: int) -> dict:
    v = _row_values(spec, j)
    ledger = LEDGERS[spec.cycle](spec.params, v["omega0"], v["omega1"], v["t_cold"], v["t_hot"])
    n = v["omega0"].shape[0]
    flags = np.zeros(n, dtype=np.int64)
    ok = ledger.get("ok", np.ones(n, dtype=bool))
    flags[~ok] |= FLAG_NO_ISENTROPE
    q_hot = np.where(ok, ledger["q_hot"], np.nan)
    q_cold = np.where(ok, ledger["q_cold"], np.nan)
    work = np.where(ok, ledger["work"], np.nan)

    mode = np.where(ok, classify_arrays(q_hot, q_cold, work, spec.tolerance), UNRESOLVED)
    metric, kappa, kc, div0 = performance_arrays(
        q_hot, q_cold, work, mode, v["t_cold"], v["t_hot"], spec.tolerance
    )
    flags[div0] |= FLAG_DIV0
    with np.errstate(invalid="ignore"):
        residual = q_hot / v["t_hot"] + q_cold / v["t_cold"]
        flags[ok & (residual > spec.tolerance)] |= FLAG_CLAUSIUS
    if spec.cycle == STIRLING_REGEN:
        flags[ledger["regen_delta_flag"] == 0] |= FLAG_REGEN_NO_GAIN
    return {
        "q_hot": q_hot,
        "q_cold": q_cold,
        "work": work,
        "mode": mode.astype(np.int64),
        "metric": metric,
        "kappa": kappa,
        "kappa_carnot": kc,
        "flags": flags,
    }


def _rows_task(args):
    spec, rows = args
    return [evaluate_row(spec, j) for j in rows]


def worker_count(workers=None) -> int:
    if workers is None:
        env = os.environ.get("QTM_THREADS")
        if env is None:
            return 1
        try:
            workers = int(env)
        except ValueError:
            raise ValueError(f"QTM_THREADS must be a positive integer, got {env!r}") from None
    if workers < 1:
        raise ValueError("worker count must be >= 1")
    return workers


def run_grid(spec: GridSpec, workers: Optional[int] = None) -> GridResult:
    """Evaluate ``spec`` on its full grid.

    ``workers`` defaults to the ``QTM_THREADS`` environment variable (1 when
    unset). Rows are split into contiguous blocks, one per worker process.
    """
    workers = worker_count(workers)
    ny = spec.y_axis.count
    if workers == 1:
        rows = [evaluate_row(spec, j) for j in range(ny)]
    else:
        blocks = [b.tolist() for b in np.array_split(np.arange(ny), workers) if len(b)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = [row for chunk in pool.map(_rows_task, [(spec, b) for b in blocks]) for row in chunk]
    stacked = {k: np.stack([r[k] for r in rows]) for k in rows[0]}
    return GridResult(spec=spec, x=spec.x_axis.values(), y=spec.y_axis.values(), **stacked)


def locate_boundary(result: GridResult, mode, axis="x", line=None):
    """Smallest coordinate along ``axis`` at which ``mode`` first appears.

    ``line`` selects one grid line by the value of the other coordinate
    (nearest grid line is used); ``None`` scans every line and returns the
    smallest onset. The onset on a line is the midpoint between the last
    cell without ``mode`` and the first cell with it (the first coordinate
    itself if the mode is present at the start). Returns None if the mode is
    absent.
    """
    names = {}
    if result.spec is not None:
        names = {result.spec.x_axis.name: "x", result.spec.y_axis.name: "y"}
    axis = names.get(axis, axis)
    if axis not in ("x", "y"):
        raise ValueError(f"unknown axis {axis!r}")
    present = result.mode == MODE_CODES[OperationalMode(mode)]
    coords, other = (result.x, result.y) if axis == "x" else (result.y, result.x)
    lines = present if axis == "x" else present.T  # each row is one scan line
    if line is not None:
        k = int(np.argmin(np.abs(other - line)))
        lines = lines[k : k + 1]
    best = None
    for scan in lines:
        hits = np.flatnonzero(scan)
        if hits.size == 0:
            continue
        i = hits[0]
        onset = coords[0] if i == 0 else 0.5 * (coords[i - 1] + coords[i])
        best = onset if best is None else min(best, onset)
    return None if best is None else float(best)
