"""Command-line interface.

Subcommands: steady, sweep, analytic, reduce, validate. Every command reads a
single JSON config, prints a JSON report on stdout (human-readable progress
goes to stderr) and exits nonzero on error; validate also exits nonzero when
any cross-check fails. All quantities are in units of kappa.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import analytic, model, steadystate, sweep as sweep_mod, validate as validate_mod
from .errors import SingularConditionError, UndefinedCorrelationError, AnalyticPoleError
from .model import EffectiveParams, FullModelParams
from .sweep import AxisSpec, OutputFlags, SolverSpec, SweepSpec

__all__ = ["Config", "ConfigError", "parse_config", "load_config", "main"]

DEFAULT_SEED = 12345


class ConfigError(ValueError):
    """Configuration problem, with the offending field in the message."""


@dataclass(frozen=True)
class SolverConfig:
    cutoff_p: int = model.DEFAULT_EFFECTIVE_CUTOFFS[0]
    cutoff_m: int = model.DEFAULT_EFFECTIVE_CUTOFFS[1]
    cutoff_s: int = model.DEFAULT_FULL_CUTOFFS[1]
    method: str = "steady-linear"
    dt: float | None = None
    t_final: float = 50.0


@dataclass(frozen=True)
class SweepConfig:
    axes: tuple[AxisSpec, ...]
    outputs: OutputFlags = OutputFlags()
    nonreciprocal_pair: bool = False


@dataclass(frozen=True)
class OutputConfig:
    csv: str | None = None
    json: str | None = None


@dataclass(frozen=True)
class Config:
    effective: EffectiveParams | None = None
    full: FullModelParams | None = None
    solver: SolverConfig = SolverConfig()
    sweep: SweepConfig | None = None
    output: OutputConfig = OutputConfig()
    seed: int = DEFAULT_SEED

    def to_dict(self) -> dict:
        out: dict = {"model": {}, "solver": dataclasses.asdict(self.solver),
                     "output": dataclasses.asdict(self.output), "seed": self.seed}
        if self.effective is not None:
            out["model"]["effective"] = dataclasses.asdict(self.effective)
        if self.full is not None:
            full = dataclasses.asdict(self.full)
            if full["lab_frame"] is not None:
                full["lab_frame"] = list(full["lab_frame"])
            out["model"]["full"] = full
        if self.sweep is not None:
            out["sweep"] = {
                "axes": [dataclasses.asdict(ax) for ax in self.sweep.axes],
                "outputs": dataclasses.asdict(self.sweep.outputs),
                "nonreciprocal_pair": self.sweep.nonreciprocal_pair,
            }
        return out


def _take(mapping: dict, context: str, known: dict) -> dict:
    """Pull known keys out of a config mapping, failing on unknown ones."""
    if not isinstance(mapping, dict):
        raise ConfigError(f"config field {context}: expected an object, got {type(mapping).__name__}")
    extra = set(mapping) - set(known)
    if extra:
        raise ConfigError(f"config field {context}: unknown keys {sorted(extra)}")
    out = {}
    for key, convert in known.items():
        if key in mapping and mapping[key] is not None:
            try:
                out[key] = convert(mapping[key])
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"config field {context}.{key}: {exc}") from exc
    return out


def parse_config(data: dict) -> Config:
    if not isinstance(data, dict):
        raise ConfigError("top-level config must be a JSON object")
    known_top = {"model", "solver", "sweep", "output", "seed"}
    extra = set(data) - known_top
    if extra:
        raise ConfigError(f"unknown top-level config keys {sorted(extra)}")

    model_block = data.get("model", {})
    if not isinstance(model_block, dict) or not set(model_block) <= {"effective", "full"}:
        raise ConfigError("config field model: expected an object with 'effective' or 'full'")
    if len(model_block) > 1:
        raise ConfigError("config field model: exactly one of effective/full may be present")

    effective = full = None
    if "effective" in model_block:
        kwargs = _take(model_block["effective"], "model.effective", {
            "delta_p": float, "delta_m": float, "chi": float, "g": float,
            "F": float, "gamma": float, "kappa": float, "kappa_mhz": float,
        })
        try:
            effective = EffectiveParams(**kwargs)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"config field model.effective: {exc}") from exc
    if "full" in model_block:
        kwargs = _take(model_block["full"], "model.full", {
            "delta_p": float, "delta_s": float, "delta_m_tilde": float,
            "g_ms": float, "J": float, "F": float, "gamma": float,
            "kappa": float, "kappa_s": float, "kappa_mhz": float,
            "lab_frame": lambda v: tuple(float(x) for x in v),
        })
        try:
            full = FullModelParams(**kwargs)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"config field model.full: {exc}") from exc

    solver_kwargs = _take(data.get("solver", {}), "solver", {
        "cutoff_p": int, "cutoff_m": int, "cutoff_s": int,
        "method": str, "dt": float, "t_final": float,
    })
    solver = SolverConfig(**solver_kwargs)
    if solver.method not in ("steady-linear", "time-evolution"):
        raise ConfigError(f"config field solver.method: unknown method {solver.method!r}")

    sweep_cfg = None
    if "sweep" in data and data["sweep"] is not None:
        block = data["sweep"]
        fields = _take(block, "sweep", {
            "axes": list, "outputs": dict, "nonreciprocal_pair": bool,
        })
        axes_raw = fields.get("axes")
        if not axes_raw:
            raise ConfigError("config field sweep.axes: at least one axis required")
        axes = []
        for i, ax in enumerate(axes_raw):
            kwargs = _take(ax, f"sweep.axes[{i}]", {
                "field": str, "start": float, "stop": float, "num": int,
            })
            try:
                axes.append(AxisSpec(**kwargs))
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"config field sweep.axes[{i}]: {exc}") from exc
        out_kwargs = _take(fields.get("outputs", {}), "sweep.outputs", {
            "numeric": bool, "analytic": bool, "occupations": bool,
        })
        sweep_cfg = SweepConfig(
            axes=tuple(axes),
            outputs=OutputFlags(**out_kwargs),
            nonreciprocal_pair=fields.get("nonreciprocal_pair", False),
        )

    out_kwargs = _take(data.get("output", {}), "output", {"csv": str, "json": str})
    seed = data.get("seed", DEFAULT_SEED)
    if not isinstance(seed, int):
        raise ConfigError(f"config field seed: expected integer, got {seed!r}")

    return Config(effective=effective, full=full, solver=solver,
                  sweep=sweep_cfg, output=OutputConfig(**out_kwargs), seed=seed)


def load_config(path: str) -> Config:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"config parse error in {path} at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    return parse_config(data)


def _fmt_or_na(value: float | None, pole: bool = False) -> object:
    if value is None:
        return "POLE" if pole else "NA"
    return value


def _effective_pipeline(params: EffectiveParams, solver: SolverConfig):
    space = model.effective_space(solver.cutoff_p, solver.cutoff_m)
    h = model.build_h_eff(params, space)
    lv = steadystate.build_liouvillian(h, model.collapse_channels(params, space))
    return space, lv


def _full_pipeline(params: FullModelParams, solver: SolverConfig):
    space = model.full_space(solver.cutoff_p, solver.cutoff_s, solver.cutoff_m)
    h = model.build_h_full(params, space)
    lv = steadystate.build_liouvillian(h, model.collapse_channels(params, space))
    return space, lv


def cmd_steady(config: Config) -> dict:
    if config.effective is None and config.full is None:
        raise ConfigError("steady requires a model.effective or model.full block")
    solver = config.solver
    if config.effective is not None:
        space, lv = _effective_pipeline(config.effective, solver)
        cutoffs = {"p": solver.cutoff_p, "m": solver.cutoff_m}
    else:
        space, lv = _full_pipeline(config.full, solver)
        cutoffs = {"p": solver.cutoff_p, "s": solver.cutoff_s, "m": solver.cutoff_m}
    if solver.method == "time-evolution":
        dt = solver.dt if solver.dt is not None else steadystate.default_dt(lv)
        rho = steadystate.evolve(steadystate.vacuum_density(space), lv, solver.t_final, dt)
    else:
        rho = steadystate.solve_steady(lv)
    try:
        g2 = steadystate.g2_zero(rho, "m")
    except UndefinedCorrelationError:
        g2 = None
    occupations = {lbl: steadystate.occupation(rho, lbl) for lbl in space.labels}
    return {
        "command": "steady",
        "config": config.to_dict(),
        "cutoffs": cutoffs,
        "g2": _fmt_or_na(g2),
        "occupations": occupations,
        "residual": steadystate.steady_residual(lv, rho),
        "units": "kappa",
        "kappa_mhz": (config.effective or config.full).kappa_mhz,
    }


def _csv_pair_paths(base: str) -> tuple[str, str]:
    p = Path(base)
    return (str(p.with_name(p.stem + "_chi_pos" + p.suffix)),
            str(p.with_name(p.stem + "_chi_neg" + p.suffix)))


def cmd_sweep(config: Config, out_override: str | None = None, workers: int = 1) -> dict:
    if config.sweep is None:
        raise ConfigError("sweep requires a sweep block")
    if config.effective is None:
        raise ConfigError("sweep requires a model.effective block")
    csv_path = out_override or config.output.csv
    if not csv_path:
        raise ConfigError("sweep requires output.csv (or --out)")
    solver = SolverSpec(cutoff_p=config.solver.cutoff_p, cutoff_m=config.solver.cutoff_m,
                        method=config.solver.method, t_final=config.solver.t_final,
                        dt=config.solver.dt)
    report: dict = {"command": "sweep", "config": config.to_dict(), "csv": [], "dips": {}}

    def one_run(params: EffectiveParams, path: str, tag: str):
        spec = SweepSpec(base=params, axes=config.sweep.axes, solver=solver,
                         outputs=config.sweep.outputs)
        result = sweep_mod.run_sweep(spec, workers=workers)
        sweep_mod.write_csv(result, path)
        report["csv"].append(path)
        if len(config.sweep.axes) == 1:
            dips = {}
            for column in ("g2_numeric", "g2_analytic"):
                if (column == "g2_numeric" and config.sweep.outputs.numeric) or (
                        column == "g2_analytic" and config.sweep.outputs.analytic):
                    dips[column] = [[x, depth] for x, depth in
                                    sweep_mod.find_dips(result, column)]
            report["dips"][tag] = dips
        print(f"wrote {path}", file=sys.stderr)

    if config.sweep.nonreciprocal_pair:
        pos_path, neg_path = _csv_pair_paths(csv_path)
        base = config.effective
        forward, backward = base, model.flip_direction(base)
        for params in (forward, backward):
            path = pos_path if params.chi >= 0 else neg_path
            one_run(params, path, f"chi={params.chi:+g}")
    else:
        one_run(config.effective, csv_path, "base")
    return report


def cmd_analytic(config: Config) -> dict:
    if config.effective is None:
        raise ConfigError("analytic requires a model.effective block")
    params = config.effective
    x, y, z = analytic.correlation_factors(params)
    report: dict = {
        "command": "analytic",
        "config": config.to_dict(),
        "X": x,
        "Y": y,
        "Z": z,
        "units": "kappa",
        "conditions": {"umb_exact": x == 0, "cmb_exact": y == 0},
    }
    try:
        report["g2_analytic"] = analytic.g2_analytic(params)
    except AnalyticPoleError:
        report["g2_analytic"] = "POLE"
    try:
        amps = analytic.steady_amplitudes(params)
        report["amplitudes"] = {
            name: [getattr(amps, name).real, getattr(amps, name).imag]
            for name in ("c00", "c20", "c01", "c40", "c21", "c02")
        }
        report["singular_factor"] = None
    except SingularConditionError as exc:
        report["amplitudes"] = None
        report["singular_factor"] = exc.factor
    roots = analytic.optimal_deltas(params)
    report["roots"] = {"umb_delta_p": roots.umb_delta_p, "cmb_delta_p": roots.cmb_delta_p}
    return report


def cmd_reduce(config: Config) -> dict:
    if config.full is None:
        raise ConfigError("reduce requires a model.full block")
    full = config.full
    effective = model.reduce_to_effective(full)
    scale = max(abs(full.g_ms), abs(full.J))
    ratio = abs(full.delta_s) / scale if scale > 0 else float("inf")
    return {
        "command": "reduce",
        "config": config.to_dict(),
        "effective": dataclasses.asdict(effective),
        "validity_ratio": ratio,
        "dispersive_warning": ratio < model.DISPERSIVE_RATIO,
        "units": "kappa",
    }


def cmd_validate(config: Config | None) -> tuple[dict, bool]:
    seed = config.seed if config is not None else DEFAULT_SEED
    cutoffs = (model.DEFAULT_EFFECTIVE_CUTOFFS if config is None
               else (config.solver.cutoff_p, config.solver.cutoff_m))
    checks = validate_mod.run_all_checks(seed=seed, cutoffs=cutoffs)
    for check in checks:
        print(check.summary_line(), file=sys.stderr)
    all_passed = all(c.passed for c in checks)
    report = {
        "command": "validate",
        "config": config.to_dict() if config is not None else None,
        "seed": seed,
        "checks": [
            {"name": c.name, "passed": c.passed, "measured": c.measured, "detail": c.detail}
            for c in checks
        ],
        "all_passed": all_passed,
    }
    return report, all_passed


def _apply_overrides(config: Config, args) -> Config:
    solver = config.solver
    updates = {}
    if args.cutoff_p is not None:
        updates["cutoff_p"] = args.cutoff_p
    if args.cutoff_m is not None:
        updates["cutoff_m"] = args.cutoff_m
    if updates:
        solver = dataclasses.replace(solver, **updates)
        config = dataclasses.replace(config, solver=solver)
    if args.seed is not None:
        config = dataclasses.replace(config, seed=args.seed)
    return config


def _emit(report: dict, out_path: str | None, json_path: str | None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True)
    print(text)
    for path in {p for p in (out_path, json_path) if p}:
        Path(path).write_text(text + "\n", encoding="utf-8")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="magnonblockade",
        description="Steady-state magnon correlation simulations "
                    "(all quantities in units of kappa)",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("steady", "solve one steady state and report g2(0) and occupations"),
        ("sweep", "run a parameter sweep and write CSV output"),
        ("analytic", "evaluate the closed-form amplitudes and blockade conditions"),
        ("reduce", "map full three-mode parameters to the effective model"),
        ("validate", "run the oracle/consistency check suite"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", help="path to JSON config",
                       required=(name != "validate"))
        p.add_argument("--out", help="output path (CSV for sweep, report JSON otherwise)")
        p.add_argument("--cutoff-p", type=int, help="override pump cutoff (units of kappa config)")
        p.add_argument("--cutoff-m", type=int, help="override magnon cutoff")
        p.add_argument("--seed", type=int, help="seed for randomized checks (echoed in report)")
        if name == "sweep":
            p.add_argument("--workers", type=int, default=1,
                           help="worker threads for grid evaluation")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config) if args.config else None
        if config is not None:
            config = _apply_overrides(config, args)
        if args.command == "steady":
            report = cmd_steady(config)
        elif args.command == "sweep":
            report = cmd_sweep(config, out_override=args.out, workers=args.workers)
        elif args.command == "analytic":
            report = cmd_analytic(config)
        elif args.command == "reduce":
            report = cmd_reduce(config)
        elif args.command == "validate":
            report, all_passed = cmd_validate(config)
            _emit(report, args.out, config.output.json if config else None)
            return 0 if all_passed else 1
        else:  # pragma: no cover - argparse enforces choices
            raise ConfigError(f"unknown command {args.command}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    json_path = config.output.json if config else None
    out_path = args.out if args.command != "sweep" else None
    _emit(report, out_path, json_path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
