"""Parameter-sweep orchestration over the effective-model parameters.

Grids of one or two parameters are evaluated point by point through both the
master-equation pipeline and the closed-form expression; undefined
correlations (vacuum steady state) and analytic poles are carried as flags
rather than dropped. Grid points are independent, so they may be dispatched
to a thread pool; rows are always emitted in lexicographic index order and
the CSV output is byte-identical regardless of worker count.
"""

from __future__ import annotations

import dataclasses
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import analytic, model, steadystate
from .errors import AnalyticPoleError, SweepPointError, UndefinedCorrelationError
from .model import EffectiveParams

__all__ = [
    "AxisSpec",
    "SolverSpec",
    "OutputFlags",
    "SweepSpec",
    "SweepRow",
    "SweepResult",
    "ContrastResult",
    "run_sweep",
    "find_dips",
    "nonreciprocity_contrast",
    "write_csv",
]

SWEEPABLE_FIELDS = ("delta_p", "delta_m", "chi", "g", "F", "gamma", "kappa")

CSV_COLUMNS = ("g2_numeric", "g2_analytic", "n_magnon", "n_photon", "residual")

NA_TOKEN = "NA"
POLE_TOKEN = "POLE"


@dataclass(frozen=True)
class AxisSpec:
    """One linearly spaced sweep axis over an effective-model field."""

    field: str
    start: float
    stop: float
    num: int

    def __post_init__(self):
        if self.field not in SWEEPABLE_FIELDS:
            raise ValueError(f"cannot sweep field {self.field!r}; choose from {SWEEPABLE_FIELDS}")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ValueError("axis bounds must be finite")
        if not self.start < self.stop:
            raise ValueError(f"axis start {self.start} must be < stop {self.stop}")
        if self.num < 2:
            raise ValueError(f"axis needs at least 2 points, got {self.num}")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.num)


@dataclass(frozen=True)
class SolverSpec:
    cutoff_p: int = model.DEFAULT_EFFECTIVE_CUTOFFS[0]
    cutoff_m: int = model.DEFAULT_EFFECTIVE_CUTOFFS[1]
    method: str = "steady-linear"
    t_final: float = 50.0
    dt: float | None = None

    def __post_init__(self):
        if self.method not in ("steady-linear", "time-evolution"):
            raise ValueError(f"unknown solver method {self.method!r}")
        if self.cutoff_p < 2 or self.cutoff_m < 2:
            raise ValueError("cutoffs must be >= 2")


@dataclass(frozen=True)
class OutputFlags:
    numeric: bool = True
    analytic: bool = True
    occupations: bool = True


@dataclass(frozen=True)
class SweepSpec:
    base: EffectiveParams
    axes: tuple[AxisSpec, ...]
    solver: SolverSpec = SolverSpec()
    outputs: OutputFlags = OutputFlags()

    def __post_init__(self):
        axes = tuple(self.axes)
        object.__setattr__(self, "axes", axes)
        if len(axes) not in (1, 2):
            raise ValueError(f"sweep needs 1 or 2 axes, got {len(axes)}")

    def to_dict(self) -> dict:
        return {
            "base": dataclasses.asdict(self.base),
            "axes": [dataclasses.asdict(ax) for ax in self.axes],
            "solver": dataclasses.asdict(self.solver),
            "outputs": dataclasses.asdict(self.outputs),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SweepSpec":
        return cls(
            base=EffectiveParams(**data["base"]),
            axes=tuple(AxisSpec(**ax) for ax in data["axes"]),
            solver=SolverSpec(**data.get("solver", {})),
            outputs=OutputFlags(**data.get("outputs", {})),
        )


@dataclass(frozen=True)
class SweepRow:
    indices: tuple[int, ...]
    values: tuple[float, ...]
    g2_numeric: float | None
    g2_analytic: float | None
    analytic_pole: bool
    n_magnon: float | None
    n_photon: float | None
    residual: float | None


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    rows: tuple[SweepRow, ...]


@dataclass(frozen=True)
class ContrastResult:
    """Numeric correlation for both propagation directions of one parameter set."""

    g2_forward: float | None
    g2_backward: float | None
    contrast_db: float | None


def _point_params(spec: SweepSpec, values) -> EffectiveParams:
    updates = {ax.field: float(v) for ax, v in zip(spec.axes, values)}
    return dataclasses.replace(spec.base, **updates)


def _numeric_pipeline(params: EffectiveParams, solver: SolverSpec):
    space = model.effective_space(solver.cutoff_p, solver.cutoff_m)
    h = model.build_h_eff(params, space)
    channels = model.collapse_channels(params, space)
    lv = steadystate.build_liouvillian(h, channels)
    if solver.method == "time-evolution":
        dt = solver.dt if solver.dt is not None else steadystate.default_dt(lv)
        rho = steadystate.evolve(steadystate.vacuum_density(space), lv, solver.t_final, dt)
    else:
        rho = steadystate.solve_steady(lv)
    try:
        g2 = steadystate.g2_zero(rho, "m")
    except UndefinedCorrelationError:
        g2 = None
    return (
        g2,
        steadystate.occupation(rho, "m"),
        steadystate.occupation(rho, "p"),
        steadystate.steady_residual(lv, rho),
    )


def _eval_point(spec: SweepSpec, indices: tuple[int, ...], values: tuple[float, ...]) -> SweepRow:
    try:
        params = _point_params(spec, values)
        g2_num = n_m = n_p = residual = None
        if spec.outputs.numeric or spec.outputs.occupations:
            g2_num, n_m, n_p, residual = _numeric_pipeline(params, spec.solver)
            if not spec.outputs.numeric:
                g2_num = None
            if not spec.outputs.occupations:
                n_m = n_p = None
        g2_ana = None
        pole = False
        if spec.outputs.analytic:
            try:
                g2_ana = analytic.g2_analytic(params)
            except AnalyticPoleError:
                pole = True
    except Exception as exc:
        # undefined correlations and poles are flagged per row above; anything
        # else aborts the sweep with the grid point identified
        raise SweepPointError(indices, values, exc) from exc
    return SweepRow(indices, values, g2_num, g2_ana, pole, n_m, n_p, residual)


def run_sweep(spec: SweepSpec, workers: int = 1) -> SweepResult:
    """Evaluate every grid point; output order is index order regardless of workers."""
    axis_values = [ax.values() for ax in spec.axes]
    points = []
    if len(axis_values) == 1:
        for i, v in enumerate(axis_values[0]):
            points.append(((i,), (float(v),)))
    else:
        for i, v0 in enumerate(axis_values[0]):
            for j, v1 in enumerate(axis_values[1]):
                points.append(((i, j), (float(v0), float(v1))))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda p: _eval_point(spec, *p), points))
    else:
        rows = [_eval_point(spec, *p) for p in points]
    return SweepResult(spec, tuple(rows))


def _column(result: SweepResult, column: str):
    if column not in ("g2_numeric", "g2_analytic"):
        raise ValueError(f"unknown dip column {column!r}")
    return [getattr(row, column) for row in result.rows]


def find_dips(result: SweepResult, column: str = "g2_numeric") -> list[tuple[float, float]]:
    """Strict local minima of a 1D sweep column, refined parabolically in log10.

    Returns (axis value, depth) pairs sorted by depth, deepest first. Rows with
    undefined/pole/nonpositive entries break the refinement triples.
    """
    if len(result.spec.axes) != 1:
        raise ValueError("dip search requires a 1D sweep result")
    ys = _column(result, column)
    xs = [row.values[0] for row in result.rows]
    dips = []
    for i in range(1, len(xs) - 1):
        triple = ys[i - 1], ys[i], ys[i + 1]
        if any(v is None or v <= 0 for v in triple):
            continue
        left, center, right = (math.log10(v) for v in triple)
        if not (center < left and center < right):
            continue
        curvature = left - 2 * center + right
        h = xs[i + 1] - xs[i]
        x_min = xs[i] + 0.5 * h * (left - right) / curvature
        y_min = center - (left - right) ** 2 / (8 * curvature)
        dips.append((x_min, 10.0**y_min))
    dips.sort(key=lambda d: d[1])
    return dips


def nonreciprocity_contrast(params: EffectiveParams,
                            solver: SolverSpec = SolverSpec()) -> ContrastResult:
    """Steady-state correlation for both signs of the Kerr coefficient.

    The reversed direction flips chi and g together (both are odd in the
    signal detuning); only the chi sign affects the observables.
    """
    g2_fwd, *_ = _numeric_pipeline(params, solver)
    g2_bwd, *_ = _numeric_pipeline(model.flip_direction(params), solver)
    contrast = None
    if g2_fwd is not None and g2_bwd is not None and g2_fwd > 0:
        contrast = 10.0 * math.log10(g2_bwd / g2_fwd)
    return ContrastResult(g2_fwd, g2_bwd, contrast)


def _fmt(value: float | None, pole: bool = False) -> str:
    if value is None:
        return POLE_TOKEN if pole else NA_TOKEN
    return repr(float(value))


def write_csv(result: SweepResult, destination) -> None:
    """Write rows as delimited text with a config-echo comment header.

    Cells carry full round-trip precision; undefined correlations render as
    NA and analytic poles as POLE.
    """
    if hasattr(destination, "write"):
        _write_csv_stream(result, destination)
        return
    with open(Path(destination), "w", encoding="utf-8", newline="\n") as fh:
        _write_csv_stream(result, fh)


def _write_csv_stream(result: SweepResult, fh: io.TextIOBase) -> None:
    spec = result.spec
    fh.write("# config: " + json.dumps(spec.to_dict(), sort_keys=True) + "\n")
    header = [ax.field for ax in spec.axes] + list(CSV_COLUMNS)
    fh.write(",".join(header) + "\n")
    for row in result.rows:
        cells = [repr(float(v)) for v in row.values]
        cells.append(_fmt(row.g2_numeric))
        cells.append(_fmt(row.g2_analytic, pole=row.analytic_pole))
        cells.append(_fmt(row.n_magnon))
        cells.append(_fmt(row.n_photon))
        cells.append(_fmt(row.residual))
        fh.write(",".join(cells) + "\n")
