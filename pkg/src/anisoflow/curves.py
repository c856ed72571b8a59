"""Initial curves: the parametric test family, Wulff boundaries and the
comparison counterexample."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .anisotropy import (
    Constant,
    energy_of_wulff,
    from_config as sigma_from_config,
    wulff_boundary_point,
)
from .errors import ConfigError, DegenerateSpec, RadiusTooSmall
from .polycurve import PolyCurve

TWO_PI = 2.0 * math.pi
KINDS = ("ellipse", "dumbbell", "wave3", "wave5", "thin_dumbbell", "wulff", "counterexample", "file")


@dataclass
class CurveSpec:
    kind: str
    N: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError("curve.kind", f"unknown curve kind {self.kind!r}")
        if self.kind != "file" and int(self.N) < 16:
            raise ConfigError("curve.N", f"need N >= 16, got {self.N}")
        self.N = int(self.N)
        if self.kind == "thin_dumbbell":
            beam = self.params.get("beam", 3.0)
            rad = self.params.get("rad", 1.0)
            eps = self.params.get("eps", 0.1)
            if not (beam > 0 and 0 < eps < rad):
                raise ConfigError("curve.params", "thin_dumbbell needs beam > 0 and 0 < eps < rad")

    @classmethod
    def from_config(cls, cfg, path="curve"):
        if not isinstance(cfg, dict) or "kind" not in cfg:
            raise ConfigError(path, "expected a mapping with a 'kind' key")
        params = {k: v for k, v in cfg.items() if k not in ("kind", "N")}
        return cls(cfg["kind"], cfg.get("N", 0), params)


# Parametric curves on u in [0, 1).

def ellipse(u, a=1.0, b=1.0):
    z = TWO_PI * u
    return np.stack([a * np.cos(z), b * np.sin(z)], axis=-1)


def dumbbell(u):
    z = TWO_PI * u
    s = np.sin(z)
    return np.stack([np.cos(z), 2.0 * s - 1.99 * s**3], axis=-1)


def wave3(u):
    z = TWO_PI * u
    x1 = np.cos(z)
    x3 = np.sin(3 * z) * np.sin(z)
    return np.stack([x1, 0.7 * np.sin(z) + np.sin(x1) + x3**2], axis=-1)


def wave5(u):
    z = TWO_PI * u
    x1 = 1.5 * np.cos(z)
    x3 = np.sin(3 * z) * np.sin(z)
    x4 = 2.0 * x1**2
    x5 = 3.0 * np.exp(-x1)
    x2 = 1.5 * (0.6 * np.sin(z) + 0.5 * x3**2 + 0.4 * np.sin(x4) + 0.1 * np.sin(x5))
    return np.stack([x1, x2], axis=-1)


def thin_dumbbell(u, beam=3.0, rad=1.0, eps=0.1):
    """Two discs of radius ``rad`` joined by a neck of half-width ``eps``.

    Built from a quarter (lobe arc, then neck) by reflection in the x2 axis
    and then through the origin.
    """
    theta = math.asin(eps / rad)
    u = np.asarray(u, dtype=float)

    def quarter(v):
        arc = v < 0.125
        w = 8.0 * (math.pi - theta) * v
        x1 = np.where(arc, beam + rad * (1.0 + np.cos(w)),
                      2.0 * (beam + rad * (1.0 - math.cos(theta))) * (1.0 - 4.0 * v))
        x2 = np.where(arc, rad * np.sin(w), eps)
        return x1, x2

    def half(v):
        first = v < 0.25
        a1, a2 = quarter(np.where(first, v, 0.0))
        b1, b2 = quarter(np.where(first, 0.0, 0.5 - v))
        return np.where(first, a1, -b1), np.where(first, a2, b2)

    low = u < 0.5
    p1, p2 = half(np.where(low, u, 0.0))
    q1, q2 = half(np.where(low, 0.0, u - 0.5))
    return np.stack([np.where(low, p1, -q1), np.where(low, p2, -q2)], axis=-1)


_PARAMETRIC = {
    "ellipse": ellipse,
    "dumbbell": dumbbell,
    "wave3": wave3,
    "wave5": wave5,
    "thin_dumbbell": thin_dumbbell,
}


def _polygon(points, what):
    e = points - np.roll(points, 1, axis=0)
    if np.any(np.hypot(e[:, 0], e[:, 1]) == 0.0):
        raise DegenerateSpec(f"{what}: sampled polygon has a zero-length edge")
    return PolyCurve(points)


def generate(spec):
    """Sample the curve described by ``spec`` at u_i = i/N."""
    if spec.kind == "file":
        return PolyCurve.load(spec.params["path"])
    if spec.kind == "wulff":
        sigma = sigma_from_config(spec.params["sigma"], "curve.sigma")
        return sample_wulff(sigma, spec.N, spec.params.get("mode", "uniform_nu"),
                            spec.params.get("scale", 1.0))
    if spec.kind == "counterexample":
        sigma = sigma_from_config(spec.params["sigma"], "curve.sigma")
        curve, _ = counterexample_curve(sigma, spec.params.get("r", 1.5),
                                        spec.params.get("blend", 0.15), spec.N)
        return curve
    u = np.arange(spec.N) / spec.N
    fn = _PARAMETRIC[spec.kind]
    return _polygon(fn(u, **spec.params), spec.kind)


def _equal_chord_angles(sigma, n, nu_start=0.0, dense=None, tol=1e-12, max_iter=200):
    """Tangent angles of n Wulff points whose consecutive chords are equal."""
    dense = dense or max(64 * n, 8192)
    # start from equal arclength: ds = delta dnu
    grid = nu_start + np.linspace(0.0, TWO_PI, dense + 1)
    d = sigma.delta(grid)
    s = np.concatenate([[0.0], np.cumsum(0.5 * (d[1:] + d[:-1]) * np.diff(grid))])
    nu = np.interp(np.arange(n) * s[-1] / n, s, grid)
    for _ in range(max_iter):
        p = wulff_boundary_point(sigma, nu)
        chord = np.hypot(*(np.roll(p, -1, axis=0) - p).T)
        spread = (chord.max() - chord.min()) / chord.mean()
        if spread < tol:
            break
        cum = np.concatenate([[0.0], np.cumsum(chord)])
        knots = np.concatenate([nu, [nu[0] + TWO_PI]])
        target = np.arange(n) * cum[-1] / n
        new = np.interp(target, cum, knots)
        new[0] = nu[0]
        nu = new
    return nu


def sample_wulff(sigma, N, mode="uniform_nu", scale=1.0, nu_start=0.0, return_angles=False):
    """Polygon inscribed in scale * dW_sigma.

    ``uniform_nu`` places vertices at nu_i = nu_start + 2 pi i / N.
    ``uniform_arclength`` moves them along the exact boundary until all
    edges have equal length (relative spread below 1e-12).
    """
    if not scale > 0:
        raise ValueError(f"scale must be positive, got {scale}")
    if mode == "uniform_nu":
        nu = nu_start + TWO_PI * np.arange(N) / N
    elif mode == "uniform_arclength":
        nu = _equal_chord_angles(sigma, N, nu_start)
    else:
        raise ValueError(f"unknown sampling mode {mode!r}")
    curve = _polygon(scale * wulff_boundary_point(sigma, nu), "wulff")
    return (curve, nu) if return_angles else curve


def _quad_bezier(p0, p1, p2, n):
    """n interior points of a quadratic Bezier, equally spaced in arclength."""
    u = np.linspace(0.0, 1.0, 2001)
    pts = ((1 - u) ** 2)[:, None] * p0 + (2 * u * (1 - u))[:, None] * p1 + (u**2)[:, None] * p2
    s = np.concatenate([[0.0], np.cumsum(np.hypot(*np.diff(pts, axis=0).T))])
    us = np.interp(np.linspace(0.0, s[-1], n + 2)[1:-1], s, u)
    return (((1 - us) ** 2)[:, None] * p0 + (2 * us * (1 - us))[:, None] * p1
            + (us**2)[:, None] * p2), s[-1]


def _tangent_intersection(p, tp, q, tq):
    # p + a tp = q + b tq
    M = np.column_stack([tp, -tq])
    a, _ = np.linalg.solve(M, q - p)
    return p + a * tp


def counterexample_curve(sigma, r=1.5, blend=0.15, N=600):
    """Wulff boundary with an externally tangent circle, joined by fillets.

    Returns ``(curve, reference)``.  ``reference`` is an equal-edge polygon on
    dW_sigma; ``curve`` reuses its vertices on the arc of dW_sigma more than
    ``blend`` away (in tangent angle) from the touching point, follows the
    circle of radius ``r`` touching dW_sigma at its rightmost point, and
    switches between the two along quadratic Bezier fillets tangent to both.
    ``curve.meta['coincident_edges']`` lists (curve edge, reference edge)
    pairs that coincide at t = 0.
    """
    threshold = energy_of_wulff(sigma, Constant(1.0)) / TWO_PI
    if not r > threshold:
        raise RadiusTooSmall(f"r={r} must exceed L_sigma(dW_1)/(2 pi) = {threshold:.6g}")
    if not 0 < blend < 0.5 * math.pi:
        raise ValueError(f"blend must lie in (0, pi/2), got {blend}")

    nu_y = 0.5 * math.pi  # outward normal (sin nu, -cos nu) = +x
    y = wulff_boundary_point(sigma, nu_y)
    center = y + np.array([r, 0.0])

    # rough length budget to pick the reference resolution
    grid = np.linspace(0.0, TWO_PI, 4097)
    dl = sigma.delta(grid)
    arc_len = np.trapezoid(np.where(np.abs(((grid - nu_y + math.pi) % TWO_PI) - math.pi) > blend, dl, 0.0), grid)
    wl = np.trapezoid(dl, grid)
    circ_len = r * (TWO_PI - 2.0 * blend)
    fillet_guess = 2.0 * blend * (1.0 + r)
    h = (arc_len + circ_len + fillet_guess) / N
    M = max(16, int(round(wl / h)))

    reference, nus = sample_wulff(sigma, M, "uniform_arclength", nu_start=nu_y, return_angles=True)
    rel = (nus - nu_y) % TWO_PI
    keep = np.flatnonzero((rel > blend) & (rel < TWO_PI - blend))
    K = keep.size
    arc_pts = reference.points[keep]
    j0 = int(keep[0])

    p_bot, nu_bot = arc_pts[-1], nus[keep[-1]]
    p_top, nu_top = arc_pts[0], nus[keep[0]]
    th0, th1 = math.pi + blend, 3.0 * math.pi - blend
    q_low = center + r * np.array([math.cos(th0), math.sin(th0)])
    q_up = center + r * np.array([math.cos(th1), math.sin(th1)])
    t_bot = np.array([math.cos(nu_bot), math.sin(nu_bot)])
    t_top = np.array([math.cos(nu_top), math.sin(nu_top)])
    t_low = np.array([-math.sin(th0), math.cos(th0)])
    t_up = np.array([-math.sin(th1), math.cos(th1)])
    x_low = _tangent_intersection(p_bot, t_bot, q_low, t_low)
    x_up = _tangent_intersection(q_up, t_up, p_top, t_top)

    _, f1_len = _quad_bezier(p_bot, x_low, q_low, 1)
    _, f2_len = _quad_bezier(q_up, x_up, p_top, 1)
    rest = N - K
    total = f1_len + f2_len + circ_len
    n_f1 = max(1, int(round(rest * f1_len / total)) - 1)
    n_f2 = max(1, int(round(rest * f2_len / total)) - 1)
    n_c = rest - n_f1 - n_f2
    if n_c < 4:
        raise DegenerateSpec("counterexample: N too small for the requested geometry")
    f1, _ = _quad_bezier(p_bot, x_low, q_low, n_f1)
    f2, _ = _quad_bezier(q_up, x_up, p_top, n_f2)
    th = np.linspace(th0, th1, n_c)
    circ = center + r * np.stack([np.cos(th), np.sin(th)], axis=-1)

    pts = np.concatenate([arc_pts, f1, circ, f2])
    curve = _polygon(pts, "counterexample")
    curve.meta = {
        "coincident_edges": [(e, (j0 + e) % M) for e in range(1, K)],
        "touching_point": y.tolist(),
        "center": center.tolist(),
    }
    return curve, reference
