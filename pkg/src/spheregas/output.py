"""Atomic file writers for the CLI: CSV with provenance headers, JSON, SVG."""

from __future__ import annotations

import json
import os
import sys
import tempfile
from datetime import datetime, timezone

import numpy as np

from . import __version__

__all__ = ["provenance", "write_csv", "write_json", "write_svg_polyline"]


def provenance(params: dict) -> dict:
    return {
        "command": " ".join(sys.argv),
        "version": __version__,
        "generated": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "parameters": params,
    }


def _atomic_write(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def write_csv(path: str, columns: list[str], rows, params: dict):
    head = provenance(params)
    lines = [f"# {k}: {v}" for k, v in head.items() if k != "parameters"]
    lines += [f"# param {k}: {v}" for k, v in head["parameters"].items()]
    lines.append(",".join(columns))
    for row in np.atleast_2d(np.asarray(rows)):
        lines.append(",".join(f"{v:.16g}" if isinstance(v, (float, np.floating)) else str(v)
                              for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def write_json(path: str, payload: dict, params: dict):
    doc = {"provenance": provenance(params), **payload}
    _atomic_write(path, json.dumps(doc, indent=2, default=_coerce) + "\n")


def _coerce(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serialisable: {type(obj)}")


def write_svg_polyline(path: str, curves, params: dict, size: int = 480):
    """Minimal SVG: axes plus one polyline per curve; CSV is the canonical output."""
    all_pts = np.concatenate([np.asarray(c, dtype=complex) for c in curves])
    lo = min(all_pts.real.min(), all_pts.imag.min()) - 0.1
    hi = max(all_pts.real.max(), all_pts.imag.max()) + 0.1
    scale = size / (hi - lo)

    def sx(v):
        return (v - lo) * scale

    def sy(v):
        return size - (v - lo) * scale

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f"<!-- {provenance(params)['command']} -->",
        f'<line x1="0" y1="{sy(0):.1f}" x2="{size}" y2="{sy(0):.1f}" stroke="#999"/>',
        f'<line x1="{sx(0):.1f}" y1="0" x2="{sx(0):.1f}" y2="{size}" stroke="#999"/>',
    ]
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"]
    for k, c in enumerate(curves):
        c = np.asarray(c, dtype=complex)
        pts = " ".join(f"{sx(p.real):.2f},{sy(p.imag):.2f}" for p in c)
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{colors[k % len(colors)]}" '
            f'stroke-width="1.5"/>'
        )
    parts.append("</svg>")
    _atomic_write(path, "\n".join(parts) + "\n")
