"""Conformal metric machinery: the kinetic-energy lift of a natural mechanical
system onto its energy surface, Christoffel symbols, and Gaussian curvature of
the radial two-dimensional case.

The central object is the conformally flat metric whose factor is
``2 m (E - U)`` (the energy form of the lift).  For curvature work in the
plane the radial convention ``f**2(r) = E - U(r)`` on the polar base
``dr**2 + r**2 dtheta**2`` is used; the two differ by the constant 2m, under
which Gaussian curvature scales as K -> K / (2m).
"""
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import numdiff
from .errors import HillBoundaryViolation

FAMILIES = ("kepler", "hooke", "power", "free")

# Relative half-width of the degeneracy guard band around E = U.
HILL_GUARD = 1e-9
# Collision guard, in units of the system's characteristic length.
COLLISION_GUARD = 1e-6


@dataclass(frozen=True)
class SystemSpec:
    """A natural mechanical system: kinetic term |p|^2/(2m) plus a radial potential.

    family: "kepler"  U(r) = -alpha/r
            "hooke"   U(r) = (a/2) r^2 - b
            "power"   U(r) = c * r^n
            "free"    U(r) = 0
    energy is the fixed value E used by the lift and by every on-surface check.
    """

    family: str
    mass: float = 1.0
    energy: float = 0.0
    dim: int = 2
    alpha: float = 1.0
    a: float = 1.0
    b: float = 0.0
    c: float = 1.0
    n: float = 2.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError("unknown potential family %r" % (self.family,))
        if self.mass <= 0.0:
            raise ValueError("mass must be positive")
        if self.dim not in (2, 3):
            raise ValueError("dim must be 2 or 3")
        if self.family == "kepler" and self.alpha <= 0.0:
            raise ValueError("kepler coupling alpha must be positive")

    # -- potential and derivatives ------------------------------------------

    def potential(self, r):
        r = np.asarray(r, dtype=float)
        if self.family == "kepler":
            return -self.alpha / r
        if self.family == "hooke":
            return 0.5 * self.a * r**2 - self.b
        if self.family == "power":
            return self.c * r**self.n
        return np.zeros_like(r)

    def dpotential(self, r):
        """U'(r)."""
        r = np.asarray(r, dtype=float)
        if self.family == "kepler":
            return self.alpha / r**2
        if self.family == "hooke":
            return self.a * r
        if self.family == "power":
            return self.c * self.n * r ** (self.n - 1.0)
        return np.zeros_like(r)

    def d2potential(self, r):
        """U''(r)."""
        r = np.asarray(r, dtype=float)
        if self.family == "kepler":
            return -2.0 * self.alpha / r**3
        if self.family == "hooke":
            return self.a * np.ones_like(r)
        if self.family == "power":
            return self.c * self.n * (self.n - 1.0) * r ** (self.n - 2.0)
        return np.zeros_like(r)

    def grad_potential(self, x):
        """Cartesian gradient of U at position x."""
        x = np.asarray(x, dtype=float)
        r = np.linalg.norm(x)
        if self.family == "free":
            return np.zeros_like(x)
        if self.family == "hooke":
            return self.a * x
        if r == 0.0:
            raise HillBoundaryViolation("potential gradient singular at the origin")
        return self.dpotential(r) / r * x

    # -- guards ---------------------------------------------------------------

    @property
    def singular_at_origin(self):
        return self.family == "kepler" or (self.family == "power" and self.n < 0)

    @property
    def length_scale(self):
        if self.family == "kepler" and self.energy < 0.0:
            return -self.alpha / (2.0 * self.energy)  # semi-major axis
        return 1.0

    @property
    def collision_radius(self):
        return COLLISION_GUARD * self.length_scale if self.singular_at_origin else 0.0

    def hill_band(self, u):
        """Half-width of the guard band around E = U at potential value u."""
        return HILL_GUARD * (abs(self.energy) + abs(u) + 1.0)

    def lam(self, r):
        """Conformal rate E - U(r), guarded against the degeneracy surface."""
        u = float(self.potential(r))
        lam = self.energy - u
        if lam <= self.hill_band(u):
            raise HillBoundaryViolation(
                "E - U = %g at r = %g lies inside the degeneracy guard band" % (lam, r)
            )
        return lam


@dataclass(frozen=True)
class ConformalMetric:
    """Metric Phi(x) * g_flat over a flat base in cartesian or polar coordinates.

    For base "polar" the coordinates are x = (r, theta) and the base metric is
    diag(1, r**2); the factor is assumed radial there.
    """

    base: str
    dim: int
    factor: Callable[[np.ndarray], float]
    factor_grad: Callable[[np.ndarray], np.ndarray]
    label: str = ""

    def components(self, x):
        x = np.asarray(x, dtype=float)
        phi = self.factor(x)
        if self.base == "cartesian":
            return phi * np.eye(self.dim)
        g = np.diag([1.0, x[0] ** 2])
        return phi * g

    def inverse(self, x):
        return np.linalg.inv(self.components(x))


def flat_metric(dim=2, base="cartesian"):
    return ConformalMetric(
        base=base,
        dim=dim,
        factor=lambda x: 1.0,
        factor_grad=lambda x: np.zeros(dim),
        label="flat-%s" % base,
    )


def jm_lift(spec: SystemSpec, base="cartesian") -> ConformalMetric:
    """Kinetic lift 2 m (E - U) g_flat of the system onto its energy surface.

    Evaluation raises HillBoundaryViolation inside the guard band around E = U.
    """

    def radius(x):
        return float(np.linalg.norm(x)) if base == "cartesian" else float(x[0])

    def phi(x):
        return 2.0 * spec.mass * spec.lam(radius(x))

    def phi_grad(x):
        x = np.asarray(x, dtype=float)
        r = radius(x)
        spec.lam(r)  # guard
        if base == "cartesian":
            return -2.0 * spec.mass * spec.grad_potential(x)
        g = np.zeros(2)
        g[0] = -2.0 * spec.mass * float(spec.dpotential(r))
        return g

    return ConformalMetric(
        base=base,
        dim=spec.dim if base == "cartesian" else 2,
        factor=phi,
        factor_grad=phi_grad,
        label="jm-%s" % spec.family,
    )


def jacobi_radial_metric(spec: SystemSpec) -> ConformalMetric:
    """Planar radial convention f**2(r) (dr**2 + r**2 dtheta**2), f**2 = E - U."""

    def phi(x):
        return spec.lam(float(np.asarray(x, dtype=float).reshape(-1)[0]))

    def phi_grad(x):
        r = float(np.asarray(x, dtype=float).reshape(-1)[0])
        spec.lam(r)  # guard
        return np.array([-float(spec.dpotential(r)), 0.0])

    return ConformalMetric(
        base="polar", dim=2, factor=phi, factor_grad=phi_grad,
        label="jacobi-radial-%s" % spec.family,
    )


# -- Christoffel symbols ------------------------------------------------------


def christoffel(metric: ConformalMetric, x):
    """Gamma^i_jk of a conformal metric, closed form.

    cartesian base:  (d_j Phi delta^i_k + d_k Phi delta^i_j - delta_jk d_i Phi)
                     / (2 Phi)
    polar base (radial factor): the same conformal terms stacked on the flat
    polar symbols Gamma^r_thth = -r, Gamma^th_rth = 1/r.
    """
    x = np.asarray(x, dtype=float)
    d = metric.dim
    phi = metric.factor(x)
    dphi = np.asarray(metric.factor_grad(x), dtype=float)
    gam = np.zeros((d, d, d))
    if metric.base == "cartesian":
        for i in range(d):
            for j in range(d):
                for k in range(d):
                    val = 0.0
                    if i == j:
                        val += dphi[k]
                    if i == k:
                        val += dphi[j]
                    if j == k:
                        val -= dphi[i]
                    gam[i, j, k] = val / (2.0 * phi)
        return gam
    # polar, radial factor: g = diag(Phi, Phi r^2)
    r = x[0]
    dphi_dr = dphi[0]
    half = dphi_dr / (2.0 * phi)
    gam[0, 0, 0] = half
    gam[0, 1, 1] = -r - r**2 * half
    gam[1, 0, 1] = gam[1, 1, 0] = 1.0 / r + half
    return gam


def christoffel_fd(metric: ConformalMetric, x, step=1e-5):
    """Finite-difference Gamma^i_jk from metric components (test oracle)."""
    x = np.asarray(x, dtype=float)
    d = metric.dim
    dg = np.zeros((d, d, d))  # dg[l, i, j] = d_l g_ij
    for l in range(d):
        e = np.zeros(d)
        e[l] = step
        dg[l] = (metric.components(x + e) - metric.components(x - e)) / (2.0 * step)
    ginv = metric.inverse(x)
    gam = np.zeros((d, d, d))
    for i in range(d):
        for j in range(d):
            for k in range(d):
                s = 0.0
                for m in range(d):
                    s += ginv[i, m] * (dg[j, m, k] + dg[k, m, j] - dg[m, j, k])
                gam[i, j, k] = 0.5 * s
    return gam


# -- Gaussian curvature -------------------------------------------------------


def gaussian_curvature(metric: ConformalMetric, r, step=5e-3):
    """Gaussian curvature of a radial planar metric f^2 (dr^2 + r^2 dth^2).

    Evaluates  K = -(1/(r f^2)) d/dr[ (1/f) d(r f)/dr ]  with nested
    high-order central differences of f = sqrt(factor).  The default step
    balances the sixth-order truncation error of the stencils against the
    roundoff amplification eps/h^2 of the nested application.
    """
    if metric.base != "polar":
        raise ValueError("gaussian_curvature expects a polar radial metric")

    def f(rho):
        val = metric.factor(np.array([rho, 0.0]))
        if val <= 0.0:
            raise HillBoundaryViolation("metric factor nonpositive at r = %g" % rho)
        return float(np.sqrt(val))

    def inner(rho):
        return numdiff.derivative(lambda u: u * f(u), rho, step=step, order=6) / f(rho)

    outer = numdiff.derivative(inner, r, step=step, order=6)
    return -outer / (r * f(r) ** 2)


def kepler_curvature(spec: SystemSpec, r):
    """Closed-form K of the radial E - U metric for U = -alpha/r:
    K = -alpha E / (2 (r E + alpha)^3)."""
    if spec.family != "kepler":
        raise ValueError("kepler_curvature requires a kepler spec")
    r = np.asarray(r, dtype=float)
    e, al = spec.energy, spec.alpha
    return -al * e / (2.0 * (r * e + al) ** 3)


def radial_curvature(spec: SystemSpec, r):
    """Closed-form K of the radial E - U metric for any potential family:

        K = [ (r U')' (E - U) + r U'^2 ] / ( 2 r (E - U)^3 )

    with (r U')' = U' + r U''.
    """
    r = np.asarray(r, dtype=float)
    u = spec.potential(r)
    du = spec.dpotential(r)
    d2u = spec.d2potential(r)
    lam = spec.energy - u
    num = (du + r * d2u) * lam + r * du**2
    return num / (2.0 * r * lam**3)


def classify_orbit(spec: SystemSpec, tol=1e-12):
    """Kepler orbit class from the sign of E (scale set by alpha)."""
    e = spec.energy
    if abs(e) <= tol * spec.alpha:
        return "parabolic"
    return "elliptic" if e < 0.0 else "hyperbolic"


@dataclass
class CurvatureReport:
    """Curvature along an r grid, with per-row degeneracy exclusions."""

    spec: SystemSpec
    r: np.ndarray
    curvature: np.ndarray  # nan where excluded
    excluded: np.ndarray  # bool mask: row fell inside the Hill guard band
    orbit_class: str = ""
    rows: list = field(default_factory=list)

    @property
    def admissible(self):
        return ~self.excluded


def curvature_scan(spec: SystemSpec, r_values) -> CurvatureReport:
    """Closed-form curvature along a grid, flagging degenerate rows."""
    r_values = np.asarray(r_values, dtype=float)
    kvals = np.full_like(r_values, np.nan)
    excluded = np.zeros(r_values.shape, dtype=bool)
    for i, rv in enumerate(r_values):
        try:
            spec.lam(rv)
        except HillBoundaryViolation:
            excluded[i] = True
            continue
        kvals[i] = float(radial_curvature(spec, rv))
    return CurvatureReport(
        spec=spec,
        r=r_values,
        curvature=kvals,
        excluded=excluded,
        orbit_class=classify_orbit(spec) if spec.family == "kepler" else "",
    )
