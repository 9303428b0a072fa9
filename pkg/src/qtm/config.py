"""Run configuration: ``[section]`` headers, ``key = value`` lines, ``#`` comments.

Sections and keys (defaults in parentheses)::

    [machine]  g (1), r (1), left_mode (scaled), omega_bar (required if fixed)
    [cycle]    cycle (otto), t_cold (1), t_hot (2), omega0 (0), omega1 (1),
               tolerance (1e-9), kappa (plain | carnot)
    [grid]     x_axis (omega0), x_min (0.05), x_max (5), x_count (256),
               y_axis (omega1), y_min (0.05), y_max (5), y_count (256)
    [output]   directory (.), csv (grid.csv), mode_image (modes.ppm),
               kappa_image (none), sidecar (true),
               color_<mode> = R,G,B  for engine, refrigerator, heater,
               accelerator, idle, forbidden, unresolved

Values given for the two swept parameters are ignored by sweeps. Unknown sections or
keys are errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .cycles import CYCLES
from .serialize import DEFAULT_COLORS
from .spectral import FIXED, MachineParams
from .sweep import AXIS_NAMES, AxisSpec, GridSpec


class ConfigError(ValueError):
    pass


def _float(v):
    return float(v)


def _count(v):
    n = int(v)
    return n


def _bool(v):
    low = v.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


def _path_or_none(v):
    return None if v.lower() in ("", "none") else v


def _color(v):
    parts = [int(p) for p in v.split(",")]
    if len(parts) != 3 or not all(0 <= p <= 255 for p in parts):
        raise ValueError("expected R,G,B with components in 0..255")
    return tuple(parts)


SCHEMA = {
    "machine": {"g": _float, "r": _float, "left_mode": str, "omega_bar": _float},
    "cycle": {
        "cycle": str,
        "t_cold": _float,
        "t_hot": _float,
        "omega0": _float,
        "omega1": _float,
        "tolerance": _float,
        "kappa": str,
    },
    "grid": {
        "x_axis": str,
        "x_min": _float,
        "x_max": _float,
        "x_count": _count,
        "y_axis": str,
        "y_min": _float,
        "y_max": _float,
        "y_count": _count,
    },
    "output": {
        "directory": str,
        "csv": _path_or_none,
        "mode_image": _path_or_none,
        "kappa_image": _path_or_none,
        "sidecar": _bool,
        **{f"color_{m}": _color for m in DEFAULT_COLORS},
    },
}

DEFAULTS = {
    "machine": {"g": 1.0, "r": 1.0, "left_mode": "scaled", "omega_bar": None},
    "cycle": {
        "cycle": "otto",
        "t_cold": 1.0,
        "t_hot": 2.0,
        "omega0": 0.0,
        "omega1": 1.0,
        "tolerance": 1e-9,
        "kappa": "plain",
    },
    "grid": {
        "x_axis": "omega0",
        "x_min": 0.05,
        "x_max": 5.0,
        "x_count": 256,
        "y_axis": "omega1",
        "y_min": 0.05,
        "y_max": 5.0,
        "y_count": 256,
    },
    "output": {
        "directory": ".",
        "csv": "grid.csv",
        "mode_image": "modes.ppm",
        "kappa_image": None,
        "sidecar": True,
    },
}


@dataclass
class RunConfig:
    grid: GridSpec
    kappa: str = "plain"
    directory: Path = Path(".")
    csv: Optional[str] = "grid.csv"
    mode_image: Optional[str] = "modes.ppm"
    kappa_image: Optional[str] = None
    sidecar: bool = True
    colors: dict = field(default_factory=lambda: dict(DEFAULT_COLORS))
    # [cycle] values of all four parameters, swept or not
    point: dict = field(default_factory=dict)

    def output_path(self, name):
        return None if name is None else self.directory / name


def parse_sections(text: str) -> dict:
    """Split a document into ``{section: {key: (raw_value, line_no)}}``."""
    sections: dict = {}
    current = None
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]") or len(line) < 3:
                raise ConfigError(f"line {no}: malformed section header {raw.strip()!r}")
            current = line[1:-1].strip()
            if current not in SCHEMA:
                raise ConfigError(f"line {no}: unknown section [{current}]")
            sections.setdefault(current, {})
            continue
        if "=" not in line:
            raise ConfigError(f"line {no}: expected 'key = value', got {raw.strip()!r}")
        if current is None:
            raise ConfigError(f"line {no}: key outside of any section")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in SCHEMA[current]:
            raise ConfigError(f"line {no}: unknown key {key!r} in [{current}]")
        if key in sections[current]:
            first = sections[current][key][1]
            raise ConfigError(f"duplicate key {key!r} in [{current}] at lines {first} and {no}")
        sections[current][key] = (value, no)
    return sections


def apply_overrides(sections: dict, overrides) -> dict:
    """Apply ``section.key=value`` strings on top of parsed sections."""
    for item in overrides or ():
        name, sep, value = item.partition("=")
        section, dot, key = name.strip().partition(".")
        if not sep or not dot:
            raise ConfigError(f"override must look like section.key=value, got {item!r}")
        if section not in SCHEMA or key not in SCHEMA[section]:
            raise ConfigError(f"unknown override key {name.strip()!r}")
        sections.setdefault(section, {})[key] = (value.strip(), 0)
    return sections


def _typed(sections: dict) -> dict:
    values = {s: dict(d) for s, d in DEFAULTS.items()}
    for section, entries in sections.items():
        for key, (raw, no) in entries.items():
            where = f"line {no}: " if no else ""
            try:
                values[section][key] = SCHEMA[section][key](raw)
            except ValueError as exc:
                raise ConfigError(f"{where}invalid value for {key}: {exc}") from None
    return values


def _require(cond, message):
    if not cond:
        raise ConfigError(message)


def build_config(sections: dict) -> RunConfig:
    v = _typed(sections)
    m, c, g, o = v["machine"], v["cycle"], v["grid"], v["output"]
    for section in (m, c, g):
        for key, value in section.items():
            if isinstance(value, float):
                _require(math.isfinite(value), f"{key} must be finite")
    _require(m["g"] >= 0, "g must be >= 0")
    _require(m["r"] > 0, "r must be > 0")
    _require(m["left_mode"] in ("scaled", "fixed"), "left_mode must be scaled or fixed")
    if m["left_mode"] == FIXED:
        _require(m["omega_bar"] is not None, "omega_bar is required when left_mode = fixed")
        _require(m["omega_bar"] >= 0, "omega_bar must be >= 0")
    _require(c["cycle"] in CYCLES, f"cycle must be one of {', '.join(CYCLES)}")
    _require(c["t_cold"] > 0, "t_cold must be > 0")
    _require(c["t_hot"] > 0, "t_hot must be > 0")
    _require(c["omega0"] >= 0, "omega0 must be >= 0")
    _require(c["omega1"] >= 0, "omega1 must be >= 0")
    _require(c["tolerance"] > 0, "tolerance must be > 0")
    _require(c["kappa"] in ("plain", "carnot"), "kappa must be plain or carnot")
    for ax in ("x", "y"):
        _require(g[f"{ax}_axis"] in AXIS_NAMES, f"{ax}_axis must be one of {', '.join(AXIS_NAMES)}")
        _require(g[f"{ax}_count"] >= 2, f"{ax}_count must be >= 2")
        _require(g[f"{ax}_min"] < g[f"{ax}_max"], f"{ax}_min must be < {ax}_max")
        if g[f"{ax}_axis"].startswith("t_"):
            _require(g[f"{ax}_min"] > 0, f"{ax}_min must be > 0 for a temperature axis")
        else:
            _require(g[f"{ax}_min"] >= 0, f"{ax}_min must be >= 0 for a frequency axis")
    _require(g["x_axis"] != g["y_axis"], "x_axis and y_axis must differ")

    params = MachineParams(
        g=m["g"],
        r=m["r"],
        left_mode=m["left_mode"],
        omega_bar=m["omega_bar"] if m["left_mode"] == FIXED else None,
    )
    fixed = {name: c[name] for name in AXIS_NAMES if name not in (g["x_axis"], g["y_axis"])}
    spec = GridSpec(
        cycle=c["cycle"],
        x_axis=AxisSpec(g["x_axis"], g["x_min"], g["x_max"], g["x_count"]),
        y_axis=AxisSpec(g["y_axis"], g["y_min"], g["y_max"], g["y_count"]),
        fixed=fixed,
        params=params,
        tolerance=c["tolerance"],
    )
    colors = dict(DEFAULT_COLORS)
    for key, value in o.items():
        if key.startswith("color_"):
            colors[key[len("color_"):]] = value
    return RunConfig(
        grid=spec,
        kappa=c["kappa"],
        directory=Path(o["directory"]),
        csv=o["csv"],
        mode_image=o["mode_image"],
        kappa_image=o["kappa_image"],
        sidecar=o["sidecar"],
        colors=colors,
        point={name: c[name] for name in AXIS_NAMES},
    )


def parse_config(text: str, overrides=None) -> RunConfig:
    return build_config(apply_overrides(parse_sections(text), overrides))


def load_config(path, overrides=None) -> RunConfig:
    return parse_config(Path(path).read_text(), overrides)
