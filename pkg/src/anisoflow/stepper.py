"""Semi-implicit time stepping of the polygonal flow.

Each step freezes the velocities at the current polygon and solves, for both
coordinates, the cyclic tridiagonal system

    (x_i' - x_i)/tau = -a_- x'_{i-1} + a_0 x'_i - a_+ x'_{i+1}
                       + beta_i c_i (1 - mu) (N_i + N_{i+1}) / 2

whose coefficients blend the two equivalent vertex-velocity forms through mu.
The step size keeps the system diagonally dominant with margin lambda.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from . import flow
from .anisotropy import wulff_area as _wulff_area
from .errors import AllFlat, FlowError, SolveFailure, StepError
from .polycurve import PolyCurve, as_points, build_frames, mesh_ratio, metrics
from .record import RunRecord
from .tridiag import dominance_margin, residual, solve_cyclic

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class StepConfig:
    lam: float = 1.0
    omega: float = 1000.0
    c_min: float = flow.C_MIN
    R_min: Optional[float] = None
    max_tau: Optional[float] = None
    # tau <= cfl * min r^2 / max delta; the curvature term is frozen per step
    cfl: Optional[float] = 0.25
    # pin the closing equation (1, 2 or 3) instead of picking the largest |R|
    force_candidate: Optional[int] = None
    # optional omega(t); overrides the constant when given
    omega_schedule: Optional[Callable[[float], float]] = None

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")
        if not self.omega >= 0:
            raise ValueError(f"omega must be non-negative, got {self.omega}")
        if self.cfl is not None and not self.cfl > 0:
            raise ValueError(f"cfl must be positive or None, got {self.cfl}")
        if self.force_candidate not in (None, 1, 2, 3):
            raise ValueError(f"force_candidate must be 1, 2 or 3, got {self.force_candidate}")

    def omega_at(self, t):
        return self.omega if self.omega_schedule is None else self.omega_schedule(t)


@dataclass(frozen=True)
class FlowState:
    points: np.ndarray
    t: float = 0.0
    step_index: int = 0

    @property
    def curve(self):
        return PolyCurve(self.points)


@dataclass(frozen=True)
class StepResult:
    tau: float
    mu: float
    candidate: int
    frames: object
    metrics: object  # of the polygon the step started from
    field: flow.VelocityField
    err_A: float
    err_ratio: float
    residual: float
    dominance: float


def mu_parameter(frames):
    """min|s_i| / max|s_i|; exactly 0 when some vertex is flat."""
    a = np.abs(frames.s)
    top = a.max()
    if top == 0.0:
        raise AllFlat("all vertices are flat; not a closed polygon")
    return float(a.min() / top)


def b_coefficients(frames, mu):
    s = frames.s
    if mu == 0.0:
        return s.copy()
    if np.any(s == 0.0):
        raise FlowError("mu > 0 with a flat vertex; mu must come from mu_parameter")
    return (1.0 - mu) * s + mu / s


def adaptive_timestep(frames, alpha, beta, b, lam, max_tau=None):
    """min r / (2(1+lambda)(max|alpha/c| + max|beta b|)), capped by max_tau.

    A stationary polygon (both maxima zero) gets ``max_tau``.
    """
    speed = np.max(np.abs(alpha / frames.c)) + np.max(np.abs(beta * b))
    if speed == 0.0:
        if max_tau is None:
            raise FlowError("stationary polygon and no max_tau configured")
        return float(max_tau)
    tau = float(frames.r.min() / (2.0 * (1.0 + lam) * speed))
    if max_tau is not None:
        tau = min(tau, float(max_tau))
    return tau


def parabolic_limit(frames, m, cfl):
    """Step bound cfl * min r^2 / max|delta| for the explicitly frozen curvature."""
    d = float(np.max(np.abs(m.delta)))
    return cfl * float(frames.r.min()) ** 2 / max(d, np.finfo(float).tiny)


def coefficients(frames, alpha, beta, b, mu, tau):
    """Lower, diagonal, upper bands and the explicit forcing of one step."""
    ac = alpha / frames.c
    bb = beta * b
    r_next = np.roll(frames.r, -1)
    a_minus = (ac - bb) / (2.0 * frames.r)
    a_plus = -(ac + bb) / (2.0 * r_next)
    a0 = a_minus + a_plus
    N_next = np.roll(frames.N, -1, axis=0)
    force = (beta * frames.c * (1.0 - mu))[:, None] * 0.5 * (frames.N + N_next)
    return tau * a_minus, 1.0 - tau * a0, tau * a_plus, force


def assemble_and_solve(points, frames, alpha, beta, b, mu, tau, check=True):
    """Advance positions by one semi-implicit step; returns (new_points, residual, margin)."""
    x = as_points(points)
    lower, diag, upper, force = coefficients(frames, alpha, beta, b, mu, tau)
    margin = dominance_margin(lower, diag, upper)
    if check and not margin > 0.0:
        raise SolveFailure(f"dominance margin {margin:.3e} is not positive")
    rhs = x + tau * force
    new = solve_cyclic(lower, diag, upper, rhs, check=check)
    return new, residual(lower, diag, upper, new, rhs), margin


def step(state, sigma, wulff_area, config, t_end=None):
    """One full step: geometry, velocities, time step and linear solve.

    Errors are re-raised as StepError carrying the step index.  ``t_end``
    shortens the final step so the clock lands on it.
    """
    try:
        frames = build_frames(state.points)
        m = metrics(state.points, frames, sigma, wulff_area)
        fld = flow.velocities(
            frames, m, config.omega_at(state.t), c_min=config.c_min, R_min=config.R_min,
            force_candidate=config.force_candidate,
        )
        mu = mu_parameter(frames)
        b = b_coefficients(frames, mu)
        tau = adaptive_timestep(frames, fld.alpha, fld.beta, b, config.lam, config.max_tau)
        if config.cfl is not None:
            tau = min(tau, parabolic_limit(frames, m, config.cfl))
        # land on t_end; a rounding-sized remainder is absorbed instead of stepped
        if t_end is not None and state.t + tau * (1 + 1e-9) >= t_end:
            tau = t_end - state.t
        new, res, margin = assemble_and_solve(
            state.points, frames, fld.alpha, fld.beta, b, mu, tau
        )
    except FlowError as exc:
        raise StepError(state.step_index, exc) from exc
    result = StepResult(
        tau=tau,
        mu=mu,
        candidate=fld.report.chosen,
        frames=frames,
        metrics=m,
        field=fld,
        err_A=flow.err_area(frames, fld.beta_star, fld.alpha),
        err_ratio=flow.err_ratio(frames, fld.beta_star, fld.alpha, m),
        residual=res,
        dominance=margin,
    )
    t_new = t_end if (t_end is not None and tau == t_end - state.t) else state.t + tau
    return FlowState(new, t_new, state.step_index + 1), result


def _row(t, tau, frames, m, candidate, err_A, err_ratio):
    return dict(
        t=t,
        tau=tau,
        A=m.A,
        L=m.L,
        L_sigma=m.L_sigma,
        Pi_sigma=m.Pi_sigma,
        min_r=frames.r.min(),
        max_r=frames.r.max(),
        mesh_ratio=mesh_ratio(frames.r),
        min_phi=frames.phi.min(),
        candidate=candidate,
        err_A=err_A,
        err_ratio=err_ratio,
        sum_ksigma_r=m.sum_ksigma_r,
    )


@dataclass
class EvolveOptions:
    T: float
    step: StepConfig = field(default_factory=StepConfig)
    snapshot_every: Optional[int] = None  # steps
    snapshot_dt: Optional[float] = None  # flow time
    series_every: int = 1
    max_steps: int = 2_000_000
    wulff_area: Optional[float] = None


def evolve(initial, sigma, options):
    """Run the flow from ``initial`` until time ``options.T``.

    Returns a RunRecord.  Failures stop the run and leave a partial record
    with ``status='error'`` and the failing step index.
    """
    if not options.T > 0:
        raise ValueError(f"final time must be positive, got {options.T}")
    W = options.wulff_area if options.wulff_area is not None else _wulff_area(sigma)
    cfg = options.step
    if cfg.max_tau is None:
        cfg = replace(cfg, max_tau=1e-3 * options.T)

    rec = RunRecord()
    state = FlowState(np.array(as_points(initial), dtype=float))
    f0 = build_frames(state.points)
    if f0.winding != 1:
        rec.status = "error"
        rec.error = f"initial curve has winding {f0.winding}, expected +1"
        rec.error_step = 0
        return rec

    rec.snapshots.append((0.0, PolyCurve(state.points)))
    next_snap_t = options.snapshot_dt if options.snapshot_dt else math.inf
    last = None
    while state.t < options.T:
        if state.step_index >= options.max_steps:
            rec.status = "error"
            rec.error = f"max_steps={options.max_steps} reached at t={state.t:.6g}"
            rec.error_step = state.step_index
            break
        try:
            new_state, res = step(state, sigma, W, cfg, t_end=options.T)
        except StepError as exc:
            rec.status = "error"
            rec.error = str(exc)
            rec.error_step = exc.step_index
            log.warning("run stopped: %s", exc)
            break
        if state.step_index % options.series_every == 0:
            rec.append(
                **_row(state.t, res.tau, res.frames, res.metrics, res.candidate,
                       res.err_A, res.err_ratio)
            )
        rec.max_residual = max(rec.max_residual, res.residual)
        rec.min_dominance = min(rec.min_dominance, res.dominance)
        state = new_state
        rec.steps = state.step_index
        snap = False
        if options.snapshot_every and state.step_index % options.snapshot_every == 0:
            snap = True
        if state.t >= next_snap_t:
            snap = True
            while next_snap_t <= state.t:
                next_snap_t += options.snapshot_dt
        if snap and state.t < options.T:
            rec.snapshots.append((state.t, PolyCurve(state.points)))
        last = state

    # closing row and snapshot for the final polygon
    if last is not None:
        try:
            fr = build_frames(last.points)
            m = metrics(last.points, fr, sigma, W)
            rec.append(**_row(last.t, 0.0, fr, m, 0, 0.0, 0.0))
        except FlowError as exc:
            if rec.status == "running":
                rec.status = "error"
                rec.error = f"final state: {exc}"
                rec.error_step = last.step_index
        rec.snapshots.append((last.t, PolyCurve(last.points)))
    if rec.status == "running":
        rec.status = "completed"
    if last is not None:
        rec.final_points = last.points
    return rec
