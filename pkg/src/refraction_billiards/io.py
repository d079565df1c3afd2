"""CSV, JSON and SVG output.

Floats are written with ``repr``, the shortest decimal string that reads back
to the identical double, so identical inputs give byte-identical files.
"""

from __future__ import annotations

import enum
import io
import json
import math
import os
import sys
from contextlib import contextmanager
from dataclasses import asdict, is_dataclass

import numpy as np

PORTRAIT_COLUMNS = ("orbit_id", "iter", "xi", "alpha", "termination")
SCAN_COLUMNS = ("x", "y", "delta0", "delta1", "sign0", "sign1")
FREEFALL_COLUMNS = ("theta", "delta", "clamped")


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, enum.Enum):
        return str(v.value)
    return str(v)


@contextmanager
def _open_text(target):
    """Yield a text stream for a path, ``"-"``/``None`` (stdout) or an open stream."""
    if target is None or target == "-":
        yield sys.stdout
    elif isinstance(target, (str, os.PathLike)):
        with open(target, "w", encoding="utf-8", newline="") as fh:
            yield fh
    else:
        yield target


def csv_text(rows, columns) -> str:
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(format_value(v) for v in row) + "\n")
    return buf.getvalue()


def write_csv(rows, columns, target) -> None:
    text = csv_text(rows, columns)
    with _open_text(target) as fh:
        fh.write(text)


def portrait_rows(records):
    for orbit_id, rec in enumerate(records):
        last = len(rec.states) - 1
        for k, s in enumerate(rec.states):
            yield (orbit_id, k, s.xi, s.alpha, rec.termination if k == last else "")


def scan_rows(cells):
    for c in cells:
        yield (c.x, c.y, c.delta0, c.delta1, c.sign0, c.sign1)


def freefall_rows(samples):
    for s in samples:
        yield (s.theta, s.delta, s.clamped)


def _jsonable(obj):
    if is_dataclass(obj) and not isinstance(obj, type):
        return {k: _jsonable(v) for k, v in asdict(obj).items()}
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def json_text(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(obj, target) -> None:
    text = json_text(obj)
    with _open_text(target) as fh:
        fh.write(text)


# --- SVG ---

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _tick_label(v: float) -> str:
    return f"{v:.3g}"


def svg_text(
    points=(),
    lines=(),
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
    width: int = 640,
    height: int = 480,
    point_groups=None,
) -> str:
    """A self-contained scatter/polyline plot.

    ``points`` is a sequence of ``(x, y)``; ``point_groups`` (same length) picks
    a colour per point.  ``lines`` is a sequence of polylines.
    """
    pts = [(float(x), float(y)) for x, y in points if math.isfinite(x) and math.isfinite(y)]
    polys = [[(float(x), float(y)) for x, y in line if math.isfinite(x) and math.isfinite(y)] for line in lines]
    xs = [p[0] for p in pts] + [q[0] for line in polys for q in line]
    ys = [p[1] for p in pts] + [q[1] for line in polys for q in line]
    x0, x1 = (min(xs), max(xs)) if xs else (0.0, 1.0)
    y0, y1 = (min(ys), max(ys)) if ys else (0.0, 1.0)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    ml, mr, mt, mb = 70, 20, 40, 55
    pw, ph = width - ml - mr, height - mt - mb

    def sx(x):
        return ml + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return mt + (1.0 - (y - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for k in range(5):
        tx = x0 + (x1 - x0) * k / 4
        ty = y0 + (y1 - y0) * k / 4
        out.append(f'<line x1="{_fmt(sx(tx))}" y1="{mt + ph}" x2="{_fmt(sx(tx))}" y2="{mt + ph + 5}" stroke="black"/>')
        out.append(
            f'<text x="{_fmt(sx(tx))}" y="{mt + ph + 18}" font-size="11" text-anchor="middle">{_tick_label(tx)}</text>'
        )
        out.append(f'<line x1="{ml - 5}" y1="{_fmt(sy(ty))}" x2="{ml}" y2="{_fmt(sy(ty))}" stroke="black"/>')
        out.append(
            f'<text x="{ml - 8}" y="{_fmt(sy(ty) + 4)}" font-size="11" text-anchor="end">{_tick_label(ty)}</text>'
        )
    if title:
        out.append(f'<text x="{width / 2}" y="22" font-size="14" text-anchor="middle">{_escape(title)}</text>')
    if xlabel:
        out.append(f'<text x="{ml + pw / 2}" y="{height - 12}" font-size="12" text-anchor="middle">{_escape(xlabel)}</text>')
    if ylabel:
        cy = mt + ph / 2
        out.append(
            f'<text x="16" y="{cy}" font-size="12" text-anchor="middle" transform="rotate(-90 16 {cy})">{_escape(ylabel)}</text>'
        )
    for k, line in enumerate(polys):
        if len(line) < 2:
            continue
        coords = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in line)
        out.append(f'<polyline points="{coords}" fill="none" stroke="{_PALETTE[k % len(_PALETTE)]}" stroke-width="1.5"/>')
    groups = list(point_groups) if point_groups is not None else [0] * len(pts)
    for (x, y), g in zip(pts, groups):
        out.append(f'<circle cx="{_fmt(sx(x))}" cy="{_fmt(sy(y))}" r="0.8" fill="{_PALETTE[int(g) % len(_PALETTE)]}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def write_svg(target, **kwargs) -> None:
    text = svg_text(**kwargs)
    with _open_text(target) as fh:
        fh.write(text)


def portrait_svg(records, target, title: str = "") -> None:
    pts, groups = [], []
    for orbit_id, rec in enumerate(records):
        for s in rec.states:
            pts.append((s.xi % (2 * math.pi), s.alpha))
            groups.append(orbit_id)
    write_svg(target, points=pts, point_groups=groups, title=title, xlabel="xi", ylabel="alpha")
