"""Cyclic tridiagonal systems.

Row i reads  lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]  with
indices taken modulo n.  The two corner entries are removed by a rank-one
(Sherman-Morrison) correction, leaving two ordinary tridiagonal solves that
share one banded factorisation.
"""

import numpy as np
from scipy.linalg import solve_banded

from .errors import SolveFailure

RESIDUAL_TOL = 1e-12


def cyclic_matvec(lower, diag, upper, x):
    """Apply the cyclic tridiagonal operator to ``x`` (vector or columns)."""
    if x.ndim == 1:
        return lower * np.roll(x, 1) + diag * x + upper * np.roll(x, -1)
    return (
        lower[:, None] * np.roll(x, 1, axis=0)
        + diag[:, None] * x
        + upper[:, None] * np.roll(x, -1, axis=0)
    )


def dominance_margin(lower, diag, upper):
    """min_i |diag_i| - |lower_i| - |upper_i|; positive means strictly dominant."""
    return float(np.min(np.abs(diag) - np.abs(lower) - np.abs(upper)))


def to_dense(lower, diag, upper):
    n = diag.size
    M = np.zeros((n, n))
    idx = np.arange(n)
    M[idx, idx] = diag
    M[idx, (idx - 1) % n] += lower
    M[idx, (idx + 1) % n] += upper
    return M


def solve_cyclic(lower, diag, upper, rhs, check=True, tol=RESIDUAL_TOL):
    """Solve the cyclic system for one or several right-hand sides.

    ``rhs`` may be shape (n,) or (n, k).  With ``check`` the matrix must be
    strictly diagonally dominant and the result must satisfy
    ||M x - rhs||_inf <= tol * ||rhs||_inf; otherwise SolveFailure is raised.
    """
    lower = np.asarray(lower, dtype=float)
    diag = np.asarray(diag, dtype=float)
    upper = np.asarray(upper, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    n = diag.size
    if n < 3:
        raise ValueError(f"cyclic system needs n >= 3, got {n}")
    if check and not dominance_margin(lower, diag, upper) > 0.0:
        raise SolveFailure("matrix is not strictly diagonally dominant")

    vec = rhs.ndim == 1
    B = rhs[:, None] if vec else rhs

    alpha = upper[n - 1]  # M[n-1, 0]
    beta = lower[0]  # M[0, n-1]
    gamma = -diag[0]
    bands = np.zeros((3, n))
    bands[0, 1:] = upper[:-1]
    bands[1] = diag
    bands[2, :-1] = lower[1:]
    bands[1, 0] -= gamma
    bands[1, n - 1] -= alpha * beta / gamma

    u = np.zeros(n)
    u[0] = gamma
    u[n - 1] = alpha
    sol = solve_banded((1, 1), bands, np.column_stack([B, u]), check_finite=False)
    y, z = sol[:, :-1], sol[:, -1]
    # v = (1, 0, ..., 0, beta/gamma)
    vz = z[0] + beta / gamma * z[n - 1]
    vy = y[0] + beta / gamma * y[n - 1]
    x = y - np.outer(z, vy / (1.0 + vz))

    if check:
        res = np.max(np.abs(cyclic_matvec(lower, diag, upper, x) - B))
        scale = np.max(np.abs(B))
        if not np.isfinite(res) or res > tol * max(scale, np.finfo(float).tiny):
            raise SolveFailure(f"residual {res:.3e} exceeds {tol:g} * {scale:.3e}")
    return x[:, 0] if vec else x


def residual(lower, diag, upper, x, rhs):
    """||M x - rhs||_inf / ||rhs||_inf."""
    r = np.max(np.abs(cyclic_matvec(lower, diag, upper, x) - rhs))
    return float(r / max(np.max(np.abs(rhs)), np.finfo(float).tiny))
