"""Command-line entry point: ``qtm {spectrum,state,cycle,sweep,render}``.

Exit status: 0 on success, 1 on invalid input, 2 when the solver could not
produce a result (a single-point isentrope failure, or a sweep in which no
cell resolved).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .classifier import MODES, UNRESOLVED, classify_arrays, performance_arrays
from .config import load_config, parse_config
from .cycles import CARNOT, CYCLES, STIRLING_REGEN, CyclePoint, run_cycle
from .serialize import read_grid, render_heatmap, write_grid, write_sidecar
from .spectral import MachineParams, build_spectrum, entropy, internal_energy, thermal_state
from .strokes import NoRootInBracket
from .sweep import FLAG_CLAUSIUS, FLAG_DIV0, FLAG_REGEN_NO_GAIN, flag_names, run_grid

EXIT_OK, EXIT_INVALID, EXIT_UNRESOLVED = 0, 1, 2


def _json_value(v):
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.ndarray):
        return _json_value(v.tolist())
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    return v


def _emit(obj):
    print(json.dumps({k: _json_value(v) for k, v in obj.items()}, indent=2))


def _machine_args(p):
    p.add_argument("--g", type=float, default=1.0, help="coupling strength (default 1)")
    p.add_argument("--r", type=float, default=1.0, help="left/right frequency ratio (default 1)")
    p.add_argument("--left-mode", choices=("scaled", "fixed"), default="scaled")
    p.add_argument("--omega-bar", type=float, help="left frequency when --left-mode fixed")


def _params(args):
    return MachineParams(
        g=args.g,
        r=args.r,
        left_mode=args.left_mode,
        omega_bar=args.omega_bar if args.left_mode == "fixed" else None,
    )


def cmd_spectrum(args):
    spec = build_spectrum(_params(args), args.omega)
    _emit(
        {
            "omega": spec.omega,
            "omega_bar": spec.omega_bar,
            "big_omega": spec.big_omega,
            "theta": spec.theta,
            "energies": spec.energies,
        }
    )
    return EXIT_OK


def cmd_state(args):
    if not args.t > 0:
        raise ValueError("t must be > 0")
    spec = build_spectrum(_params(args), args.omega)
    state = thermal_state(spec, args.t)
    _emit(
        {
            "omega": args.omega,
            "t": args.t,
            "beta": state.beta,
            "populations": state.populations,
            "log_z": state.log_z,
            "energy": internal_energy(state, spec),
            "entropy": entropy(state),
        }
    )
    return EXIT_OK


def point_summary(cycle, point: CyclePoint, tolerance=1e-9, kappa="plain") -> dict:
    """Flat dictionary describing one cycle evaluation (CSV names plus extras)."""
    record = run_cycle(cycle, point)
    code = int(classify_arrays(record.q_hot, record.q_cold, record.work_out, tolerance))
    metric, kap, kc, div0 = performance_arrays(
        record.q_hot, record.q_cold, record.work_out, code, point.t_cold, point.t_hot, tolerance
    )
    flags = 0
    if bool(div0):
        flags |= FLAG_DIV0
    residual = record.q_hot / point.t_hot + record.q_cold / point.t_cold
    if residual > tolerance:
        flags |= FLAG_CLAUSIUS
    if cycle == STIRLING_REGEN and record.regen_delta_flag == 0:
        flags |= FLAG_REGEN_NO_GAIN
    mode = MODES[code].value
    out = {
        "cycle": cycle,
        "omega0": point.omega0,
        "omega1": point.omega1,
        "t_cold": point.t_cold,
        "t_hot": point.t_hot,
        "q_hot": record.q_hot,
        "q_cold": record.q_cold,
        "work": record.work_out,
        "mode": mode,
        "metric": float(metric),
        "kappa": float(kap if kappa == "plain" else kc),
        "flags": "|".join(flag_names(flags)),
        "efficiency": float(metric) if mode == "engine" else None,
        "cop": float(metric) if mode in ("refrigerator", "heater", "accelerator") else None,
        "carnot_efficiency": 1.0 - point.t_cold / point.t_hot,
        "clausius_residual": residual,
        "q_iso1": record.q_iso1,
        "q_iso2": record.q_iso2,
        "regen_delta": record.regen_delta,
        "regen_delta_flag": record.regen_delta_flag,
    }
    if cycle == CARNOT:
        out["omega2"], out["omega3"] = record.aux_frequencies
    out.update(record.diagnostics)
    return out


def cmd_cycle(args):
    values = {"cycle": args.cycle, "t_cold": args.tc, "t_hot": args.th, "omega0": args.omega0, "omega1": args.omega1}
    overrides = [f"cycle.{k}={v}" for k, v in values.items() if v is not None]
    overrides += [f"machine.{k}={v}" for k, v in (("g", args.g), ("r", args.r)) if v is not None]
    if args.left_mode is not None:
        overrides.append(f"machine.left_mode={args.left_mode}")
    if args.omega_bar is not None:
        overrides.append(f"machine.omega_bar={args.omega_bar}")
    if args.tolerance is not None:
        overrides.append(f"cycle.tolerance={args.tolerance}")
    text = Path(args.config).read_text() if args.config else ""
    cfg = parse_config(text, overrides)
    v = cfg.point
    point = CyclePoint(v["omega0"], v["omega1"], v["t_cold"], v["t_hot"], cfg.grid.params)
    try:
        summary = point_summary(cfg.grid.cycle, point, cfg.grid.tolerance, cfg.kappa)
    except NoRootInBracket as exc:
        print(f"error: no isentrope in bracket {exc.bracket}", file=sys.stderr)
        return EXIT_UNRESOLVED
    _emit(summary)
    return EXIT_OK


def cmd_sweep(args):
    overrides = list(args.set or [])
    for key, section, value in (
        ("cycle", "cycle", args.cycle),
        ("g", "machine", args.g),
        ("r", "machine", args.r),
        ("t_cold", "cycle", args.tc),
        ("t_hot", "cycle", args.th),
        ("directory", "output", args.out_dir),
    ):
        if value is not None:
            overrides.append(f"{section}.{key}={value}")
    cfg = load_config(args.config, overrides)
    cfg.directory.mkdir(parents=True, exist_ok=True)
    result = run_grid(cfg.grid, workers=args.threads)
    written = []
    if cfg.csv:
        written.append(write_grid(result, cfg.output_path(cfg.csv), cfg.kappa))
    for layer, name in (("mode", cfg.mode_image), ("kappa", cfg.kappa_image)):
        if name:
            path = render_heatmap(result, layer, cfg.output_path(name), cfg.colors, cfg.kappa)
            written.append(path)
            if cfg.sidecar:
                written.append(write_sidecar(result, layer, path, cfg.colors))
    for path in written:
        print(f"wrote {path}")
    for m in MODES:
        print(f"{m.value}: {result.area(m):.4f}")
    unresolved = float(np.mean(result.mode == UNRESOLVED))
    print(f"unresolved: {unresolved:.4f}")
    if unresolved == 1.0:
        print("error: no cell of the grid resolved", file=sys.stderr)
        return EXIT_UNRESOLVED
    return EXIT_OK


def cmd_render(args):
    result = read_grid(args.csv)
    path = render_heatmap(result, args.layer, args.out)
    if not args.no_sidecar:
        write_sidecar(result, args.layer, path)
    print(f"wrote {path}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="qtm", description="Two-qubit quantum thermal machine cycles.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="eigenvalues at one frequency")
    _machine_args(p)
    p.add_argument("--omega", type=float, required=True)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("state", help="thermal populations, energy and entropy")
    _machine_args(p)
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--t", type=float, required=True, help="bath temperature")
    p.set_defaults(func=cmd_state)

    p = sub.add_parser("cycle", help="heats, work and mode of one cycle")
    p.add_argument("--config", help="optional config file; flags override it")
    p.add_argument("--cycle", choices=CYCLES)
    p.add_argument("--g", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--left-mode", choices=("scaled", "fixed"))
    p.add_argument("--omega-bar", type=float)
    p.add_argument("--tc", type=float, help="cold bath temperature")
    p.add_argument("--th", type=float, help="hot bath temperature")
    p.add_argument("--omega0", type=float)
    p.add_argument("--omega1", type=float)
    p.add_argument("--tolerance", type=float)
    p.set_defaults(func=cmd_cycle)

    p = sub.add_parser("sweep", help="evaluate a grid from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", help="output directory (overrides [output] directory)")
    p.add_argument("--cycle", choices=CYCLES)
    p.add_argument("--g", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--tc", type=float)
    p.add_argument("--th", type=float)
    p.add_argument("--threads", type=int, help="worker processes (default: QTM_THREADS or 1)")
    p.add_argument(
        "--set", action="append", metavar="SECTION.KEY=VALUE", help="override any config key (repeatable)"
    )
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("render", help="draw a heatmap from a grid CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--layer", choices=("mode", "kappa"), default="mode")
    p.add_argument("--out", required=True)
    p.add_argument("--no-sidecar", action="store_true")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
