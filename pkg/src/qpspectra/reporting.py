"""Deterministic CSV, SVG and JSON writers with atomic file replacement."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

__all__ = ["atomic_write", "write_points_csv", "write_rows_csv", "svg_scatter", "svg_curves",
           "svg_profile", "write_json", "tagged"]


def atomic_write(path, text: str) -> Path:
    """Write ``text`` to a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _num(x: float) -> str:
    return repr(float(x))


def write_points_csv(path, groups) -> Path:
    """``groups``: iterable of ``(tag, complex array)``; columns ``re,im,tag``."""
    lines = ["re,im,tag"]
    for tag, pts in groups:
        for z in np.asarray(pts, dtype=complex).ravel():
            lines.append(f"{_num(z.real)},{_num(z.imag)},{tag}")
    return atomic_write(path, "\n".join(lines) + "\n")


def write_rows_csv(path, header, rows) -> Path:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_num(v) if isinstance(v, (float, int, np.floating)) else str(v)
                              for v in row))
    return atomic_write(path, "\n".join(lines) + "\n")


def tagged(value, tolerance) -> dict:
    """Numeric report entry with its tolerance (0 for exact quantities)."""
    if isinstance(value, (np.floating, np.integer)):
        value = value.item()
    return {"value": value, "tolerance": tolerance}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, float) and not np.isfinite(obj):
        return str(obj)
    return obj


def write_json(path, obj) -> Path:
    return atomic_write(path, json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")


# ------------------------------------------------------- SVG

_W, _H, _PAD = 480.0, 480.0, 24.0


def _frame(points):
    pts = np.asarray(points, dtype=complex).ravel()
    lo_x, hi_x = float(pts.real.min()), float(pts.real.max())
    lo_y, hi_y = float(pts.imag.min()), float(pts.imag.max())
    span = max(hi_x - lo_x, hi_y - lo_y, 1e-12) * 1.05
    cx, cy = 0.5 * (lo_x + hi_x), 0.5 * (lo_y + hi_y)
    scale = (_W - 2 * _PAD) / span

    def to_px(z):
        z = np.asarray(z, dtype=complex)
        return (_W / 2 + (z.real - cx) * scale, _H / 2 - (z.imag - cy) * scale)

    return to_px


def _svg(body: list[str], title: str) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W:g}" height="{_H:g}" '
            f'viewBox="0 0 {_W:g} {_H:g}">')
    return "\n".join([head, f"<title>{title}</title>",
                      f'<rect width="{_W:g}" height="{_H:g}" fill="white"/>', *body, "</svg>"]) + "\n"


def svg_scatter(path, points, title: str = "points", radius: float = 1.5) -> Path:
    to_px = _frame(points)
    xs, ys = to_px(points)
    body = [f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{radius:g}" fill="#1f4e79"/>'
            for x, y in zip(np.ravel(xs), np.ravel(ys))]
    return atomic_write(path, _svg(body, title))


def svg_curves(path, curves, markers=(), title: str = "curves") -> Path:
    """Polylines for ``curves`` and open circles for ``markers``."""
    allpts = np.concatenate([np.ravel(c) for c in curves] + [np.asarray(markers, dtype=complex)])
    to_px = _frame(allpts)
    body = []
    for c in curves:
        xs, ys = to_px(c)
        pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))
        body.append(f'<polyline points="{pts}" fill="none" stroke="#1f4e79" stroke-width="0.6"/>')
    for m in markers:
        x, y = to_px(m)
        body.append(f'<circle cx="{float(x):.2f}" cy="{float(y):.2f}" r="4" fill="none" '
                    'stroke="#b22222" stroke-width="1.5"/>')
    return atomic_write(path, _svg(body, title))


def svg_profile(path, x, y, title: str = "profile") -> Path:
    """Log-log line plot of a positive profile."""
    x = np.log10(np.asarray(x, dtype=float))
    y = np.log10(np.maximum(np.asarray(y, dtype=float), 1e-300))
    return svg_curves(path, [x + 1j * y], title=title)
