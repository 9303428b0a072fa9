"""CSV grids, binary PPM heatmaps and their JSON sidecars.

CSV: header ``x,y,q_hot,q_cold,work,mode,metric,kappa,flags``; one row per
cell, y-major with x varying fastest; floats printed with 12 significant
digits (``%.12g``); undefined values are empty fields; flags are names
joined by ``|``.

PPM: ``b"P6 <width> <height> 255\\n"`` followed by width*height RGB triples,
one pixel per cell. The first image row holds the largest y, so the picture
has y increasing upwards and x to the right.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .classifier import MODE_CODES, MODES, UNRESOLVED
from .sweep import GridResult, flag_bits, flag_names

CSV_HEADER = ["x", "y", "q_hot", "q_cold", "work", "mode", "metric", "kappa", "flags"]

DEFAULT_COLORS = {
    "engine": (0, 170, 0),
    "refrigerator": (0, 200, 200),
    "heater": (230, 210, 0),
    "accelerator": (220, 0, 0),
    "idle": (255, 255, 255),
    "forbidden": (0, 0, 0),
    "unresolved": (128, 128, 128),
}

# kappa in [0, 1] is linearly interpolated between these stops; luminance
# increases monotonically along the ramp
KAPPA_RAMP = [
    (0.00, (0, 0, 80)),
    (0.25, (0, 90, 200)),
    (0.50, (0, 170, 120)),
    (0.75, (200, 200, 0)),
    (1.00, (255, 255, 220)),
]


def _fmt(value) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    return format(float(value), ".12g")


def _mode_name(code) -> str:
    return "" if code == UNRESOLVED else MODES[code].value


def grid_to_csv(result: GridResult, kappa: str = "plain") -> str:
    k = result.kappa if kappa == "plain" else result.kappa_carnot
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    ny, nx = result.shape
    for j in range(ny):
        for i in range(nx):
            writer.writerow(
                [
                    _fmt(result.x[i]),
                    _fmt(result.y[j]),
                    _fmt(result.q_hot[j, i]),
                    _fmt(result.q_cold[j, i]),
                    _fmt(result.work[j, i]),
                    _mode_name(int(result.mode[j, i])),
                    _fmt(result.metric[j, i]),
                    _fmt(k[j, i]),
                    "|".join(flag_names(int(result.flags[j, i]))),
                ]
            )
    return buf.getvalue()


def write_grid(result: GridResult, path, kappa: str = "plain") -> Path:
    path = Path(path)
    path.write_bytes(grid_to_csv(result, kappa).encode("ascii"))
    return path


def read_grid(path) -> GridResult:
    """Parse a grid CSV written by :func:`write_grid` (spec is not recoverable)."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != CSV_HEADER:
        raise ValueError(f"{path}: not a grid CSV (bad header)")
    body = rows[1:]
    if not body:
        raise ValueError(f"{path}: empty grid")
    y0 = body[0][1]
    nx = next((n for n, r in enumerate(body) if r[1] != y0), len(body))
    if len(body) % nx:
        raise ValueError(f"{path}: row count {len(body)} is not a multiple of {nx}")
    ny = len(body) // nx

    def num(s):
        return float(s) if s else np.nan

    codes = {m.value: MODE_CODES[m] for m in MODES}
    cols = {name: np.empty((ny, nx)) for name in ("q_hot", "q_cold", "work", "metric", "kappa")}
    mode = np.empty((ny, nx), dtype=np.int64)
    flags = np.zeros((ny, nx), dtype=np.int64)
    for n, r in enumerate(body):
        j, i = divmod(n, nx)
        cols["q_hot"][j, i], cols["q_cold"][j, i], cols["work"][j, i] = num(r[2]), num(r[3]), num(r[4])
        mode[j, i] = codes[r[5]] if r[5] else UNRESOLVED
        cols["metric"][j, i], cols["kappa"][j, i] = num(r[6]), num(r[7])
        flags[j, i] = flag_bits(r[8].split("|")) if r[8] else 0
    x = np.array([float(r[0]) for r in body[:nx]])
    y = np.array([float(body[j * nx][1]) for j in range(ny)])
    return GridResult(
        spec=None, x=x, y=y, mode=mode, flags=flags, kappa_carnot=cols["kappa"].copy(), **cols
    )


def _ramp(values):
    stops = np.array([s for s, _ in KAPPA_RAMP])
    colors = np.array([c for _, c in KAPPA_RAMP], dtype=float)
    v = np.clip(values, 0.0, 1.0)
    channels = [np.interp(v, stops, colors[:, k]) for k in range(3)]
    return np.rint(np.stack(channels, axis=-1)).astype(np.uint8)


def heatmap_pixels(result: GridResult, layer: str = "mode", colors=None, kappa: str = "plain"):
    """RGB array (height, width, 3) with the largest y in the first row."""
    palette = dict(DEFAULT_COLORS)
    palette.update(colors or {})
    lut = np.array([palette[m.value] for m in MODES] + [palette["unresolved"]], dtype=np.uint8)
    # UNRESOLVED = -1 indexes the last entry
    pixels = lut[result.mode]
    if layer == "kappa":
        k = result.kappa if kappa == "plain" else result.kappa_carnot
        has = np.isfinite(k)
        ramp = _ramp(np.where(has, k, 0.0))
        no_data = ~has & (result.mode != MODE_CODES[MODES[4]]) & (result.mode != MODE_CODES[MODES[5]])
        pixels = np.where(has[..., None], ramp, pixels)
        pixels[no_data] = palette["unresolved"]
    elif layer != "mode":
        raise ValueError(f"layer must be 'mode' or 'kappa', got {layer!r}")
    return np.ascontiguousarray(pixels[::-1])


def ppm_bytes(pixels: np.ndarray) -> bytes:
    height, width, _ = pixels.shape
    return f"P6 {width} {height} 255\n".encode("ascii") + pixels.astype(np.uint8).tobytes()


def read_ppm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    header, _, payload = data.partition(b"\n")
    tag, width, height, maxval = header.split()
    if tag != b"P6" or maxval != b"255":
        raise ValueError(f"{path}: unsupported PPM header {header!r}")
    return np.frombuffer(payload, dtype=np.uint8).reshape(int(height), int(width), 3)


def render_heatmap(result: GridResult, layer, path, colors=None, kappa: str = "plain") -> Path:
    path = Path(path)
    path.write_bytes(ppm_bytes(heatmap_pixels(result, layer, colors, kappa)))
    return path


def sidecar(result: GridResult, layer: str, colors=None) -> dict:
    def axis(name, values):
        return {"name": name, "min": float(values[0]), "max": float(values[-1]), "count": int(len(values))}

    spec = result.spec
    xname = spec.x_axis.name if spec else "x"
    yname = spec.y_axis.name if spec else "y"
    meta = {
        "layer": layer,
        "width": int(result.shape[1]),
        "height": int(result.shape[0]),
        "x": axis(xname, result.x),
        "y": axis(yname, result.y),
        "row_order": "first image row is the largest y",
    }
    if layer == "mode":
        palette = dict(DEFAULT_COLORS)
        palette.update(colors or {})
        meta["palette"] = {k: list(v) for k, v in palette.items()}
    else:
        meta["kappa_ramp"] = [[s, list(c)] for s, c in KAPPA_RAMP]
    if spec is not None:
        meta["cycle"] = spec.cycle
        meta["fixed"] = dict(spec.fixed)
        meta["g"], meta["r"] = float(spec.params.g), float(spec.params.r)
    return meta


def write_sidecar(result: GridResult, layer: str, image_path, colors=None) -> Path:
    path = Path(str(image_path) + ".json")
    path.write_text(json.dumps(sidecar(result, layer, colors), indent=2, sort_keys=True) + "\n")
    return path
