"""Offline checks on run records: crossings, drift and invariant re-checks."""

from __future__ import annotations

import numpy as np

from ..polycurve import as_points, hausdorff
from ..record import COLUMNS

_CHUNK = 512


def _orient(ax, ay, bx, by, cx, cy):
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def proper_intersections(curve, reference, exclude_pairs=()):
    """Index pairs (i, j) where edge i of ``curve`` properly crosses edge j of
    ``reference``.

    Edge i joins vertex i-1 to vertex i.  A proper crossing meets both
    segments at a single interior point; touching at an endpoint or
    collinear overlap does not count.  ``exclude_pairs`` are skipped.
    """
    p = as_points(curve)
    q = as_points(reference)
    p0, p1 = np.roll(p, 1, axis=0), p
    q0, q1 = np.roll(q, 1, axis=0), q
    hits = []
    for start in range(0, p.shape[0], _CHUNK):
        a = p0[start:start + _CHUNK, None, :]
        b = p1[start:start + _CHUNK, None, :]
        c = q0[None, :, :]
        d = q1[None, :, :]
        o1 = _orient(a[..., 0], a[..., 1], b[..., 0], b[..., 1], c[..., 0], c[..., 1])
        o2 = _orient(a[..., 0], a[..., 1], b[..., 0], b[..., 1], d[..., 0], d[..., 1])
        o3 = _orient(c[..., 0], c[..., 1], d[..., 0], d[..., 1], a[..., 0], a[..., 1])
        o4 = _orient(c[..., 0], c[..., 1], d[..., 0], d[..., 1], b[..., 0], b[..., 1])
        mask = (o1 * o2 < 0) & (o3 * o4 < 0)
        ii, jj = np.nonzero(mask)
        hits.extend(zip((ii + start).tolist(), jj.tolist()))
    if exclude_pairs:
        skip = {(int(i), int(j)) for i, j in exclude_pairs}
        hits = [h for h in hits if h not in skip]
    return hits


def detect_crossing(record, reference, exclude_pairs=()):
    """Earliest snapshot time at which the evolved polygon properly crosses
    ``reference``, or None.

    ``exclude_pairs`` lists (curve edge, reference edge) pairs that coincide
    by construction and are not counted.
    """
    for t, curve in record.snapshots:
        if proper_intersections(curve, reference, exclude_pairs):
            return float(t)
    return None


def self_intersections(curve):
    """Pairs of non-adjacent edges of one polygon that properly cross."""
    hits = proper_intersections(curve, curve)
    n = len(as_points(curve))
    return [(i, j) for i, j in hits if i < j and (j - i) % n not in (1, n - 1)]


def hausdorff_drift(record):
    """Hausdorff distance between the first and last snapshot."""
    first = record.snapshots[0][1]
    last = record.snapshots[-1][1]
    return hausdorff(first, last)


# Invariants re-checked from a CSV series.

def check_series(series, *, isotropic=False, convex=False, pi_tol=1e-9, phi_tol=1e-6,
                 area_scale=None):
    """Evaluate the record invariants on an (n, 14) array.

    Returns a list of (name, passed, detail).  Isotropic and convex checks
    only run when requested.
    """
    S = np.asarray(series, dtype=float)
    col = {name: S[:, i] for i, name in enumerate(COLUMNS)}
    out = []
    out.append(("finite", bool(np.all(np.isfinite(S))), f"{S.shape[0]} rows"))
    dt = np.diff(col["t"])
    out.append(("time increasing", bool(np.all(dt > 0)),
                f"min dt {dt.min():.3e}" if dt.size else "single row"))
    dpi = np.diff(col["Pi_sigma"])
    worst = float(dpi.max()) if dpi.size else 0.0
    out.append(("Pi_sigma non-increasing", worst <= pi_tol, f"max step change {worst:.3e}"))
    rows = S.shape[0]
    out.append(("Pi_sigma >= 1", bool(np.all(col["Pi_sigma"] >= 1.0 - 1e-9)),
                f"min {col['Pi_sigma'].min():.12g}"))
    if convex:
        m = float(col["min_phi"].min())
        out.append(("convexity", m > -phi_tol, f"min phi {m:.3e}"))
    if isotropic:
        scale = area_scale if area_scale is not None else abs(col["A"][0])
        dA = float(np.diff(col["A"]).min()) if rows > 1 else 0.0
        dL = float(np.diff(col["L"]).max()) if rows > 1 else 0.0
        out.append(("area non-decreasing", dA >= -1e-9 * scale, f"min step change {dA:.3e}"))
        out.append(("length non-increasing", dL <= 1e-9 * scale, f"max step change {dL:.3e}"))
    return out
