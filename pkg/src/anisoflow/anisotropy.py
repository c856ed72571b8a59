"""Anisotropy densities, Wulff shapes and the mixed anisoperimetric constant.

An anisotropy is a smooth, strictly positive, 2*pi-periodic function sigma of
the tangent angle nu.  Every family here has closed-form first and second
derivatives; nothing is differentiated numerically.  Integrals over one period
use the trapezoid rule, which converges spectrally for smooth periodic
integrands.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ConfigError, QuadratureError, UnstableAnisotropy

TWO_PI = 2.0 * math.pi
STABILITY_GRID = 4096
QUAD_NODES = 4096


class Anisotropy:
    """Base class.  Subclasses implement ``_derivs(nu) -> (s, s1, s2)``."""

    kind = "abstract"

    def _check_stability(self, n=STABILITY_GRID):
        nu = np.linspace(0.0, TWO_PI, n, endpoint=False)
        d = self.delta(nu)
        if not np.all(np.isfinite(d)) or d.min() <= 0.0:
            i = int(np.argmin(d))
            raise UnstableAnisotropy(
                f"{self!r}: sigma+sigma'' = {d[i]:.6g} <= 0 at nu={nu[i]:.6g}"
            )

    def _derivs(self, nu):
        raise NotImplementedError

    def value(self, nu):
        return self._derivs(nu)[0]

    def d1(self, nu):
        return self._derivs(nu)[1]

    def d2(self, nu):
        return self._derivs(nu)[2]

    def eval(self, nu, order=0):
        """Return sigma, sigma' or sigma'' at ``nu`` for ``order`` 0, 1 or 2."""
        if order not in (0, 1, 2):
            raise ValueError(f"order must be 0, 1 or 2, got {order!r}")
        return self._derivs(nu)[order]

    def delta(self, nu):
        """Stability function sigma + sigma'' (reciprocal Wulff curvature)."""
        s, _, s2 = self._derivs(nu)
        return s + s2

    def __call__(self, nu):
        return self.value(nu)

    @property
    def is_constant(self):
        return False

    # combinators
    def scaled(self, a, b=0.0):
        return Affine(self, a, b)


class Constant(Anisotropy):
    kind = "constant"

    def __init__(self, c=1.0):
        if not c > 0:
            raise UnstableAnisotropy(f"constant anisotropy must be positive, got {c}")
        self.c = float(c)

    def _derivs(self, nu):
        nu = np.asarray(nu, dtype=float)
        s = np.full_like(nu, self.c)
        z = np.zeros_like(nu)
        if s.ndim == 0:
            return float(s), 0.0, 0.0
        return s, z, z.copy()

    @property
    def is_constant(self):
        return True

    def __repr__(self):
        return f"Constant({self.c!r})"


class Cosine(Anisotropy):
    """sigma(nu) = 1 + eps*cos(m*nu).

    Stable iff eps*(m**2 - 1) < 1.  ``validate=False`` skips the construction
    checks; such an object may only be evaluated, never flowed.
    """

    kind = "cosine"

    def __init__(self, eps, m, validate=True):
        self.eps = float(eps)
        self.m = int(m)
        if self.m != m:
            raise ValueError(f"degree m must be an integer, got {m!r}")
        if validate:
            if not abs(self.eps) < 1.0:
                raise UnstableAnisotropy(f"{self!r}: sigma is not positive")
            if not abs(self.eps) * (self.m**2 - 1) < 1.0:
                raise UnstableAnisotropy(f"{self!r}: requires eps*(m^2-1) < 1")
            self._check_stability()

    def _derivs(self, nu):
        eps, m = self.eps, self.m
        mnu = np.multiply(m, nu)
        c = np.cos(mnu)
        s = np.sin(mnu)
        return 1.0 + eps * c, -eps * m * s, -eps * m * m * c

    def wulff_area_closed_form(self):
        return 0.5 * math.pi * (2.0 - self.eps**2 * (self.m**2 - 1))

    def __repr__(self):
        return f"Cosine(eps={self.eps!r}, m={self.m})"


class Affine(Anisotropy):
    """a*sigma + b."""

    kind = "affine"

    def __init__(self, base, a, b=0.0):
        self.base = base
        self.a = float(a)
        self.b = float(b)
        self._check_stability()

    def _derivs(self, nu):
        s, s1, s2 = self.base._derivs(nu)
        return self.a * s + self.b, self.a * s1, self.a * s2

    @property
    def is_constant(self):
        return self.base.is_constant

    def __repr__(self):
        return f"Affine({self.base!r}, a={self.a!r}, b={self.b!r})"


class Mixed(Anisotropy):
    """w1*sigma + w2*mu with both components kept as handles."""

    kind = "mixed"

    def __init__(self, sigma, mu, w1, w2):
        self.sigma = sigma
        self.mu = mu
        self.w1 = float(w1)
        self.w2 = float(w2)
        self._check_stability()

    def _derivs(self, nu):
        a = self.sigma._derivs(nu)
        b = self.mu._derivs(nu)
        return tuple(self.w1 * x + self.w2 * y for x, y in zip(a, b))

    @property
    def is_constant(self):
        return self.sigma.is_constant and self.mu.is_constant

    def __repr__(self):
        return f"Mixed({self.w1!r}*{self.sigma!r} + {self.w2!r}*{self.mu!r})"


def _nodes(n):
    if n < 8:
        raise ValueError(f"need at least 8 quadrature nodes, got {n}")
    return np.linspace(0.0, TWO_PI, n, endpoint=False)


def _periodic_integral(values):
    if not np.all(np.isfinite(values)):
        raise QuadratureError("non-finite integrand value")
    return float(values.sum() * (TWO_PI / values.size))


def wulff_boundary_point(sigma, nu):
    """Point of the Wulff boundary with tangent angle ``nu``.

    x = -sigma(nu) N + sigma'(nu) T with T = (cos nu, sin nu) and
    N = (-sin nu, cos nu).  Accepts scalar or array ``nu``; the result has a
    trailing axis of length 2.
    """
    nu = np.asarray(nu, dtype=float)
    s, s1, _ = sigma._derivs(nu)
    c, sn = np.cos(nu), np.sin(nu)
    x = s * sn + s1 * c
    y = -s * c + s1 * sn
    return np.stack([x, y], axis=-1)


def wulff_area(sigma, n=QUAD_NODES):
    """|W_sigma| = 1/2 * integral of sigma*(sigma + sigma'') over one period."""
    nu = _nodes(n)
    s, _, s2 = sigma._derivs(nu)
    return 0.5 * _periodic_integral(np.broadcast_to(s * (s + s2), nu.shape))


def energy_of_wulff(mu, sigma, n=QUAD_NODES):
    """Interfacial energy L_mu of the Wulff boundary of ``sigma``.

    Parameterising the boundary by its tangent angle, ds = delta_sigma dnu,
    so the energy is the integral of mu*(sigma + sigma'').
    """
    nu = _nodes(n)
    m = np.broadcast_to(mu.value(nu), nu.shape)
    d = np.broadcast_to(sigma.delta(nu), nu.shape)
    return _periodic_integral(m * d)


def wulff_length(sigma, n=QUAD_NODES):
    """Euclidean length of the Wulff boundary."""
    return energy_of_wulff(Constant(1.0), sigma, n)


def mixed_constant(sigma, mu, n=QUAD_NODES):
    """Sharp lower bound of L_sigma * L_mu / A over Jordan curves."""
    return 2.0 * math.sqrt(wulff_area(sigma, n) * wulff_area(mu, n)) + energy_of_wulff(
        sigma, mu, n
    )


def minimizer_anisotropy(sigma, mu, n=QUAD_NODES):
    """Anisotropy whose Wulff boundary attains ``mixed_constant(sigma, mu)``.

    The weights are sqrt|W_mu| on sigma and sqrt|W_sigma| on mu; with
    mu = Constant(1) this is sqrt(pi)*sigma + sqrt|W_sigma|.
    """
    w1 = math.sqrt(wulff_area(mu, n))
    w2 = math.sqrt(wulff_area(sigma, n))
    return Mixed(sigma, mu, w1, w2)


def initial_area_rate(sigma, n=QUAD_NODES):
    """dA/dt at t=0 for the flow started from the Wulff boundary of the minimizer.

    Equals sqrt(pi |W_sigma|) - L(dW_sigma)/2, negative for nonconstant sigma.
    """
    return math.sqrt(math.pi * wulff_area(sigma, n)) - 0.5 * wulff_length(sigma, n)


def from_config(spec, path="sigma"):
    """Build an anisotropy from a nested mapping.

    Recognised kinds: ``constant`` (c), ``cosine`` (eps, m), ``affine``
    (base, a, b), ``mixed`` (components: [s, m], weights: [w1, w2]) and
    ``minimizer`` (sigma, mu).
    """
    if isinstance(spec, Anisotropy):
        return spec
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError(path, "expected a mapping with a 'kind' key")
    kind = spec["kind"]
    try:
        if kind == "constant":
            return Constant(spec.get("c", 1.0))
        if kind == "cosine":
            return Cosine(spec["eps"], spec["m"])
        if kind == "affine":
            base = from_config(spec["base"], f"{path}.base")
            return Affine(base, spec.get("a", 1.0), spec.get("b", 0.0))
        if kind == "mixed":
            comps = spec["components"]
            weights = spec.get("weights", [1.0, 1.0])
            if len(comps) != 2 or len(weights) != 2:
                raise ConfigError(path, "mixed needs two components and two weights")
            s = from_config(comps[0], f"{path}.components[0]")
            m = from_config(comps[1], f"{path}.components[1]")
            return Mixed(s, m, weights[0], weights[1])
        if kind == "minimizer":
            s = from_config(spec["sigma"], f"{path}.sigma")
            m = from_config(spec.get("mu", {"kind": "constant", "c": 1.0}), f"{path}.mu")
            return minimizer_anisotropy(s, m)
    except KeyError as exc:
        raise ConfigError(path, f"missing field {exc.args[0]!r}") from None
    except UnstableAnisotropy as exc:
        raise ConfigError(path, str(exc)) from None
    raise ConfigError(path, f"unknown anisotropy kind {kind!r}")
