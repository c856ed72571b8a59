"""Normal and tangential velocities of the semi-discrete flow.

Vertices move by  dx_i/dt = alpha_i T*_i + beta_i N*_i.  The normal part comes
from the edge velocities beta*_i = k_sigma_i - L_sigma/(2A); the tangential
part keeps edge lengths relaxing towards L/N at rate omega, with one free
constant fixed by the best-conditioned of three closing equations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NearlyFoldedVertex, NonpositiveArea

C_MIN = 1e-8


@dataclass(frozen=True)
class CandidateReport:
    R: tuple
    Q: tuple
    P: tuple
    chosen: int  # 1-based candidate number
    alpha1: float
    fallback_used: bool


@dataclass(frozen=True)
class VelocityField:
    beta_star: np.ndarray
    beta: np.ndarray
    alpha: np.ndarray
    psi: np.ndarray
    Psi: np.ndarray
    report: CandidateReport


def normal_velocity(metrics):
    """beta*_i = k_sigma_i - L_sigma / (2A) on every edge."""
    if not metrics.A > 0.0:
        raise NonpositiveArea(f"enclosed area {metrics.A:.6g} is not positive")
    return metrics.ksigma - metrics.L_sigma / (2.0 * metrics.A)


def _check_c(c, c_min):
    bad = np.abs(c) <= c_min
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise NearlyFoldedVertex(i, float(2.0 * np.arccos(np.clip(c[i], -1.0, 1.0))))


def vertex_velocity(beta_star, frames, c_min=C_MIN):
    """Vertex normal velocity beta_i = (beta*_i + beta*_{i+1}) / (2 c_i)."""
    _check_c(frames.c, c_min)
    return (beta_star + np.roll(beta_star, -1)) / (2.0 * frames.c)


def redistribution_rhs(frames, beta, L, omega):
    """Increments psi_i and their prefix sums Psi_i.

    From  c_i alpha_i - c_{i-1} alpha_{i-1} = psi_i  (i = 1..N-1), which is
    the requirement dr_i/dt - (dL/dt)/N = (L/N - r_i) omega.  ``psi[0]`` and
    ``Psi[0]`` are zero: vertex 0 carries the free constant alpha_0.
    """
    n = frames.n
    bs = beta * frames.s
    psi = bs + np.roll(bs, 1) - (2.0 / n) * bs.sum() + (L / n - frames.r) * omega
    psi[0] = 0.0
    return psi, np.cumsum(psi)


def p_tilde(frames, sigma_values, sigma_d1):
    """Tangential sensitivity of L_sigma: dL_sigma/dt gets sum p~_i alpha_i."""
    s_next = np.roll(sigma_values, -1)
    d_next = np.roll(sigma_d1, -1)
    return (sigma_d1 + d_next) * frames.s + (sigma_values - s_next) * frames.c


def _mesh_terms(frames, beta_star):
    r = frames.r
    r_next = np.roll(r, -1)
    p_area = frames.s * (r_next - r) / 2.0
    P_area = float(np.dot(beta_star, (r_next - 2.0 * r + np.roll(r, 1)) / 4.0))
    return p_area, P_area


def candidates(frames, beta_star, metrics):
    """The three closing equations sum p_i alpha_i = P as (p, P) pairs.

    1. zero area error, 2. zero mean tangential velocity, 3. zero ratio error.
    """
    p_area, P_area = _mesh_terms(frames, beta_star)
    pt = p_tilde(frames, metrics.sigma_values, metrics.sigma_d1)
    return [
        (p_area, P_area),
        (frames.r_star.copy(), 0.0),
        (p_area - (2.0 * metrics.A / metrics.L_sigma) * pt, P_area),
    ]


def tangential_velocity(frames, beta_star, beta, Psi, metrics, R_min=None, force_candidate=None):
    """Tangential velocities alpha_i and the candidate report.

    alpha_i = Psi_i / c_i + (c_0 / c_i) alpha_0, with alpha_0 = (P - Q) / R
    for the candidate of largest |R| (ties go to the lowest number).  When
    every |R| is below ``R_min`` (default 1e-12 N) alpha_0 is set to 0.
    The anisotropy enters through the samples carried by ``metrics``.
    """
    n = frames.n
    c = frames.c
    if R_min is None:
        R_min = 1e-12 * n
    cands = candidates(frames, beta_star, metrics)
    Rs, Qs, Ps = [], [], []
    for p, P in cands:
        pc = p / c
        Rs.append(float(c[0] * pc.sum()))
        Qs.append(float(np.dot(pc, Psi)))
        Ps.append(float(P))
    absR = np.abs(Rs)
    if force_candidate is not None:
        l = int(force_candidate) - 1
    else:
        l = int(np.argmax(absR))
    fallback = bool(absR[l] < R_min)
    alpha1 = 0.0 if fallback else (Ps[l] - Qs[l]) / Rs[l]
    alpha = (Psi + c[0] * alpha1) / c
    report = CandidateReport(
        R=tuple(Rs), Q=tuple(Qs), P=tuple(Ps), chosen=l + 1, alpha1=alpha1,
        fallback_used=fallback,
    )
    return alpha, report


def velocities(frames, metrics, omega, c_min=C_MIN, R_min=None, force_candidate=None):
    """Full velocity field for one configuration of the polygon."""
    beta_star = normal_velocity(metrics)
    beta = vertex_velocity(beta_star, frames, c_min)
    psi, Psi = redistribution_rhs(frames, beta, metrics.L, omega)
    alpha, report = tangential_velocity(
        frames, beta_star, beta, Psi, metrics, R_min=R_min, force_candidate=force_candidate
    )
    return VelocityField(beta_star, beta, alpha, psi, Psi, report)


# Semi-discrete rates, used for diagnostics and tests.

def edge_length_rate(frames, alpha, beta):
    """dr_i/dt = -beta_i s_i - beta_{i-1} s_{i-1} + c_i alpha_i - c_{i-1} alpha_{i-1}."""
    bs = beta * frames.s
    ca = alpha * frames.c
    return -bs - np.roll(bs, 1) + ca - np.roll(ca, 1)


def vertex_velocity_vectors(frames, alpha, beta):
    return alpha[:, None] * frames.T_star + beta[:, None] * frames.N_star


def err_area(frames, beta_star, alpha):
    p_area, P_area = _mesh_terms(frames, beta_star)
    return float(np.dot(alpha, p_area) - P_area)


def err_ratio(frames, beta_star, alpha, metrics):
    p_area, P_area = _mesh_terms(frames, beta_star)
    pt = p_tilde(frames, metrics.sigma_values, metrics.sigma_d1)
    return float(
        np.dot(pt, alpha) + metrics.nonlocal_term * (P_area - np.dot(alpha, p_area))
    )


def ratio_rate(frames, field, metrics):
    """d(L_sigma^2 / A)/dt from the semi-discrete identities."""
    bs = field.beta_star
    core = -float(np.sum((metrics.ksigma - metrics.nonlocal_term) * bs * frames.r))
    core += err_ratio(frames, bs, field.alpha, metrics)
    return 2.0 * metrics.L_sigma / metrics.A * core
