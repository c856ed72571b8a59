"""Output files: CSV series, SVG snapshots and plain-text polygons.

Every file is written to a temporary sibling first and moved into place, so
a reader never sees a half-written output.
"""

from __future__ import annotations

import csv
import io
import os
import tempfile
from pathlib import Path

import numpy as np

from ..errors import FlowError
from ..polycurve import as_points
from ..record import COLUMNS


class EmitError(FlowError):
    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = str(path)


def write_atomic(path, text):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        raise EmitError(path, exc.strerror or str(exc)) from None


def csv_text(series):
    S = np.asarray(series, dtype=float)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for row in S:
        w.writerow([f"{v:.17g}" for v in row])
    return buf.getvalue()


def read_csv(path):
    """Read a series CSV back into (columns, array)."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise EmitError(path, exc.strerror or str(exc)) from None
    if not rows:
        raise EmitError(path, "empty file")
    header = tuple(rows[0])
    data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float)
    return header, data.reshape(-1, len(header))


def _fmt(v):
    return f"{v:.6g}"


def svg_text(curve, reference=None, width=480, stroke=None):
    """Equal-aspect SVG drawing of a closed polygon and an optional reference."""
    pts = as_points(curve)
    every = [pts] if reference is None else [pts, as_points(reference)]
    allp = np.concatenate(every)
    lo, hi = allp.min(axis=0), allp.max(axis=0)
    span = float(max(hi - lo)) or 1.0
    pad = 0.05 * span
    x0, y0 = lo[0] - pad, lo[1] - pad
    w, h = (hi[0] - lo[0]) + 2 * pad, (hi[1] - lo[1]) + 2 * pad
    height = max(1, int(round(width * h / w)))
    sw = span / 400.0

    def polyline(p, style):
        closed = np.vstack([p, p[:1]])
        # flip y so the picture has the usual orientation
        coords = " ".join(f"{_fmt(x)},{_fmt(y0 + h - (y - y0))}" for x, y in closed)
        return f'<polyline points="{coords}" fill="none" {style}/>'

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="{_fmt(x0)} {_fmt(y0)} {_fmt(w)} {_fmt(h)}" preserveAspectRatio="xMidYMid meet">',
    ]
    if reference is not None:
        parts.append(polyline(as_points(reference),
                              f'stroke="#999999" stroke-width="{_fmt(sw)}" stroke-dasharray="{_fmt(4 * sw)}"'))
    parts.append(polyline(pts, f'stroke="{stroke or "#1f4e9c"}" stroke-width="{_fmt(sw)}"'))
    parts.append("</svg>\n")
    return "\n".join(parts)


def emit(record, out_dir, formats=("csv", "svg", "snapshots"), reference=None):
    """Write the requested formats under ``out_dir``; returns the written paths."""
    if not record.rows and not record.snapshots:
        raise EmitError(out_dir, "record is empty")
    out = Path(out_dir)
    written = []
    if "csv" in formats:
        p = out / "series.csv"
        write_atomic(p, csv_text(record.series))
        written.append(p)
    for k, (t, curve) in enumerate(record.snapshots):
        if "snapshots" in formats:
            p = out / "snapshots" / f"snap_{k:04d}.txt"
            write_atomic(p, f"# t = {t:.17g}\n" + curve.to_text())
            written.append(p)
        if "svg" in formats:
            p = out / "svg" / f"snap_{k:04d}.svg"
            write_atomic(p, svg_text(curve, reference))
            written.append(p)
    return written
