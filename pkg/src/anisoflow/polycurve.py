"""Closed polygons and their discrete geometry.

Indexing is zero-based and cyclic.  Edge ``i`` runs from vertex ``i-1`` to
vertex ``i`` (edge 0 closes the polygon from the last vertex), so vertex ``i``
sits between edge ``i`` and edge ``i+1``.  Per-edge arrays are r, T, N, nu, k,
delta, ksigma; per-vertex arrays are phi, c, s, t, r_star, nu_star.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DegenerateEdge, FoldedVertex, NonpositiveArea

# |D| at or below this counts as D == 0 in the angle lift.
LIFT_DEADBAND = 1e-14
FOLD_MARGIN = 1e-9


class PolyCurve:
    """Closed polygon given by its ordered vertices (no closing duplicate)."""

    def __init__(self, points):
        pts = np.array(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError(f"expected an (N, 2) array, got shape {pts.shape}")
        if pts.shape[0] < 3:
            raise ValueError(f"a polygon needs at least 3 vertices, got {pts.shape[0]}")
        pts.setflags(write=False)
        self.points = pts
        self.meta = {}

    def __len__(self):
        return self.points.shape[0]

    def __repr__(self):
        return f"PolyCurve(N={len(self)})"

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.points
        return self.points.astype(dtype)

    @property
    def edge_lengths(self):
        return np.hypot(*(self.points - np.roll(self.points, 1, axis=0)).T)

    @property
    def area(self):
        return shoelace_area(self.points)

    @property
    def length(self):
        return float(self.edge_lengths.sum())

    @property
    def diameter(self):
        p = self.points
        d = p[:, None, :] - p[None, :, :]
        return float(np.sqrt((d**2).sum(-1)).max())

    def reversed(self):
        return PolyCurve(self.points[::-1])

    def translated(self, offset):
        return PolyCurve(self.points + np.asarray(offset, dtype=float))

    def scaled(self, factor):
        return PolyCurve(self.points * float(factor))

    def to_text(self):
        return "".join(f"{x:.17g} {y:.17g}\n" for x, y in self.points)

    def save(self, path):
        Path(path).write_text(self.to_text())

    @classmethod
    def from_text(cls, text):
        rows = [
            line.split() for line in text.splitlines()
            if line.strip() and not line.lstrip().startswith("#")
        ]
        return cls([[float(a), float(b)] for a, b in rows])

    @classmethod
    def load(cls, path):
        return cls.from_text(Path(path).read_text())


def as_points(curve):
    if isinstance(curve, PolyCurve):
        return curve.points
    return np.asarray(curve, dtype=float)


def shoelace_area(points):
    x, y = points[:, 0], points[:, 1]
    xp, yp = np.roll(x, 1), np.roll(y, 1)
    return 0.5 * float(np.sum(xp * y - x * yp))


@dataclass(frozen=True)
class CurveFrames:
    """Edge and vertex frames of a polygon, plus the lifted tangent angles."""

    points: np.ndarray
    r: np.ndarray
    T: np.ndarray
    N: np.ndarray
    nu: np.ndarray
    nu_wrap: float  # lifted angle of edge 0 after one full turn
    phi: np.ndarray
    c: np.ndarray
    s: np.ndarray
    t: np.ndarray
    r_star: np.ndarray
    nu_star: np.ndarray

    @property
    def n(self):
        return self.r.size

    @property
    def length(self):
        return float(self.r.sum())

    @property
    def nu_before(self):
        """Lifted angle of the edge preceding edge 0 (nu_1 - (nu_{N+1} - nu_N))."""
        return float(self.nu[0] - (self.nu_wrap - self.nu[-1]))

    @property
    def rotation(self):
        return float(self.phi.sum())

    @property
    def winding(self):
        return int(round(self.rotation / (2.0 * math.pi)))

    @property
    def T_star(self):
        return np.stack([np.cos(self.nu_star), np.sin(self.nu_star)], axis=-1)

    @property
    def N_star(self):
        return np.stack([-np.sin(self.nu_star), np.cos(self.nu_star)], axis=-1)

    @property
    def is_convex(self):
        return bool(np.all(self.phi > 0.0))


def build_frames(curve):
    """Compute tangents, normals, lifted angles and vertex half-angle data.

    The first angle is taken in (-pi, pi]; each following angle adds the
    signed turning angle between consecutive tangents, whose sign is that of
    det(T_i, T_{i+1}) and whose magnitude is arccos(T_i . T_{i+1}).  Turning
    is evaluated as atan2(D, I), which is the same quantity without arccos's
    loss of precision near zero.  Raises DegenerateEdge for a zero-length
    edge and FoldedVertex once |phi| reaches pi - 1e-9.
    """
    x = as_points(curve)
    e = x - np.roll(x, 1, axis=0)
    r = np.hypot(e[:, 0], e[:, 1])
    bad = np.flatnonzero(r == 0.0)
    if bad.size:
        raise DegenerateEdge(int(bad[0]))
    T = e / r[:, None]
    N = np.stack([-T[:, 1], T[:, 0]], axis=-1)

    Tn = np.roll(T, -1, axis=0)
    D = T[:, 0] * Tn[:, 1] - T[:, 1] * Tn[:, 0]
    I = T[:, 0] * Tn[:, 0] + T[:, 1] * Tn[:, 1]
    flat = np.abs(D) <= LIFT_DEADBAND
    reversed_ = flat & (I < 0.0)
    if reversed_.any():
        i = int(np.flatnonzero(reversed_)[0])
        raise FoldedVertex(i, math.pi)
    phi = np.where(flat, 0.0, np.arctan2(D, I))
    folded = np.abs(phi) >= math.pi - FOLD_MARGIN
    if folded.any():
        i = int(np.flatnonzero(folded)[0])
        raise FoldedVertex(i, float(phi[i]))

    t11, t12 = T[0]
    nu0 = math.atan2(t12, t11)
    if t12 == 0.0 and t11 < 0.0:
        nu0 = math.pi
    lifted = nu0 + np.concatenate([[0.0], np.cumsum(phi)])
    nu = lifted[:-1]

    half = 0.5 * phi
    r_next = np.roll(r, -1)
    return CurveFrames(
        points=x,
        r=r,
        T=T,
        N=N,
        nu=nu,
        nu_wrap=float(lifted[-1]),
        phi=phi,
        c=np.cos(half),
        s=np.sin(half),
        t=np.tan(half),
        r_star=0.5 * (r + r_next),
        nu_star=nu + half,
    )


def curvature(frames):
    """Polygonal curvature k_i = (t_i + t_{i-1}) / r_i on each edge."""
    t = frames.t
    return (t + np.roll(t, 1)) / frames.r


def aniso_curvature(frames, sigma):
    """Discrete stability weights delta_i and anisotropic curvatures k_sigma_i.

    k_sigma_i is evaluated directly as numerator / (2 r_i), which stays
    defined when t_i + t_{i-1} = 0; delta_i then falls back to
    sigma(nu_i) + sigma''(nu_i).
    """
    s0, s1, s2 = sigma._derivs(frames.nu)
    s0 = np.broadcast_to(s0, frames.nu.shape)
    s1 = np.broadcast_to(s1, frames.nu.shape)
    t = frames.t
    t_prev = np.roll(t, 1)
    num = (
        np.roll(s1, -1)
        - np.roll(s1, 1)
        + np.roll(s0, -1) * t
        + s0 * (t + t_prev)
        + np.roll(s0, 1) * t_prev
    )
    ksigma = num / (2.0 * frames.r)
    den = 2.0 * (t + t_prev)
    safe = np.abs(den) > 1e-12
    delta = np.where(safe, num / np.where(safe, den, 1.0), s0 + s2)
    return delta, ksigma


@dataclass(frozen=True)
class CurveMetrics:
    L: float
    A: float
    L_sigma: float
    Pi_sigma: float
    k: np.ndarray
    delta: np.ndarray
    ksigma: np.ndarray
    sigma_values: np.ndarray
    sigma_d1: np.ndarray
    sum_ksigma_r: float

    @property
    def nonlocal_term(self):
        return self.L_sigma / (2.0 * self.A)


def metrics(curve, frames, sigma, wulff_area):
    """Global quantities L, A, L_sigma, Pi_sigma and the edge curvatures.

    Raises NonpositiveArea when the enclosed (signed) area is not positive.
    """
    if not wulff_area > 0:
        raise ValueError(f"wulff_area must be positive, got {wulff_area}")
    x = as_points(curve)
    A = shoelace_area(x)
    if not A > 0.0:
        raise NonpositiveArea(f"enclosed area {A:.6g} is not positive")
    k = curvature(frames)
    delta, ksigma = aniso_curvature(frames, sigma)
    s0, s1, _ = sigma._derivs(frames.nu)
    s0 = np.broadcast_to(s0, frames.nu.shape)
    s1 = np.broadcast_to(s1, frames.nu.shape)
    L = float(frames.r.sum())
    L_sigma = float(np.dot(s0, frames.r))
    return CurveMetrics(
        L=L,
        A=A,
        L_sigma=L_sigma,
        Pi_sigma=L_sigma**2 / (4.0 * wulff_area * A),
        k=k,
        delta=delta,
        ksigma=ksigma,
        sigma_values=s0,
        sigma_d1=s1,
        sum_ksigma_r=float(np.dot(ksigma, frames.r)),
    )


def normal_area(frames):
    """Area via -1/2 sum (x_i . N_i) r_i; agrees with the shoelace form."""
    return -0.5 * float(np.sum(np.einsum("ij,ij->i", frames.points, frames.N) * frames.r))


def mesh_ratio(r):
    h = r.sum() / r.size
    return float(np.max(np.abs(r - h)) / h)


def point_segment_distance(p, a, b):
    """Distance from each point of ``p`` (M,2) to the closed polygon edges a->b (K,2).

    Returns shape (M,).  Memory is O(M K); intended for N up to a few thousand.
    """
    d = b - a
    dd = np.einsum("ij,ij->i", d, d)
    w = p[:, None, :] - a[None, :, :]
    t = np.einsum("mkj,kj->mk", w, d) / np.where(dd > 0, dd, 1.0)
    t = np.clip(t, 0.0, 1.0)
    q = w - t[..., None] * d[None, :, :]
    return np.sqrt(np.einsum("mkj,mkj->mk", q, q).min(axis=1))


def hausdorff(curve_a, curve_b, refine=4):
    """Hausdorff distance between two closed polygons.

    Each polygon is sampled at its vertices and ``refine - 1`` interior points
    per edge, and measured against the other polygon's edges.
    """
    def dense(x):
        prev = np.roll(x, 1, axis=0)
        s = np.arange(refine)[:, None, None] / refine
        return (prev[None] + s * (x - prev)[None]).reshape(-1, 2)

    def one_sided(x, y):
        return float(point_segment_distance(dense(x), np.roll(y, 1, axis=0), y).max())

    a, b = as_points(curve_a), as_points(curve_b)
    return max(one_sided(a, b), one_sided(b, a))
