"""Canonical maps and regularizations connecting the Kepler and Hooke flows.

Covers: the planar square map between oscillator and Kepler orbits (z = r^2/2),
the position/momentum swap, momentum inversion w = p/|p|^2 with the
arc-parameter speed identities, the on-surface quadratic first integral whose
flow is the reparameterized Kepler flow, the eccentric-anomaly clock, the
Laplace-Runge-Lenz vector, and the degenerate-clock generator on the swapped
surface.

Conventions: unit mass where a map's derivation fixes it (checked), Kepler
coupling written alpha (or beta/mu in the regularization contexts, following
the usual letters for those constructions).
"""
import math
from dataclasses import replace

import numpy as np

from . import numdiff
from .dynamics import (
    HamiltonianSystem,
    PhaseState,
    Trajectory,
    newtonian_system,
    scaled_kepler_system,
)
from .errors import (
    EnergySurfaceViolation,
    OriginSingularity,
    PositiveEnergy,
    ZeroMomentum,
)
from .geometry import SystemSpec

ORIGIN_EPS = 1e-12
SURFACE_TOL = 1e-10


def _require_unit_mass(spec, what):
    if spec.mass != 1.0:
        raise ValueError("%s is derived at unit mass; got m = %g" % (what, spec.mass))


def _rows(v):
    """View input as (n, d) rows plus a flag to undo it."""
    v = np.asarray(v, dtype=float)
    if v.ndim == 1:
        return v[None, :], True
    return v, False


# -- oscillator <-> Kepler square map -------------------------------------------


def bohlin_map(q, p):
    """Planar square map z = r^2/2 (r = q1 + i q2) with its momentum map.

        z = ((q1^2 - q2^2)/2, q1 q2)
        P = [[q1, -q2], [q2, q1]] (p1, p2) / |q|^2

    Accepts single points (shape (2,)) or batches (n, 2).
    """
    q, single = _rows(q)
    p, _ = _rows(p)
    n2 = q[:, 0] ** 2 + q[:, 1] ** 2
    if np.any(n2 < ORIGIN_EPS**2):
        raise OriginSingularity("square map momentum is singular at q = 0")
    z = np.column_stack([0.5 * (q[:, 0] ** 2 - q[:, 1] ** 2), q[:, 0] * q[:, 1]])
    big_p = np.column_stack([
        (q[:, 0] * p[:, 0] - q[:, 1] * p[:, 1]) / n2,
        (q[:, 1] * p[:, 0] + q[:, 0] * p[:, 1]) / n2,
    ])
    if single:
        return z[0], big_p[0]
    return z, big_p


def bohlin_identity_residual(q, p):
    """| (p1^2+p2^2)/|q|^2 - |P|^2 |, the kinetic proportionality of the map."""
    q, single = _rows(q)
    p, _ = _rows(p)
    _, big_p = bohlin_map(q, p)
    lhs = (p[:, 0] ** 2 + p[:, 1] ** 2) / (q[:, 0] ** 2 + q[:, 1] ** 2)
    rhs = big_p[:, 0] ** 2 + big_p[:, 1] ** 2
    res = np.abs(lhs - rhs)
    return float(res[0]) if single else res


def bohlin_hamiltonians(a, b):
    """The oscillator Hamiltonian and its Kepler-side image.

        H_osc(q, p) = |p|^2/2 + (a/2)|q|^2 - b
        H_kep(z, P) = |P|^2 - b/|z| + a

    On H_osc = 0 the square map sends states onto H_kep = 0; in fact
    H_kep = 2 H_osc / |q|^2 identically, which the tests pin.
    """

    def h_osc(q, p):
        q = np.asarray(q, dtype=float)
        p = np.asarray(p, dtype=float)
        return 0.5 * float(p @ p) + 0.5 * a * float(q @ q) - b

    def h_kep(z, big_p):
        z = np.asarray(z, dtype=float)
        big_p = np.asarray(big_p, dtype=float)
        rz = float(np.linalg.norm(z))
        if rz < ORIGIN_EPS:
            raise OriginSingularity("Kepler image evaluated at z = 0")
        return float(big_p @ big_p) - b / rz + a
    return h_osc, h_kep


# -- position/momentum swap ------------------------------------------------------


def houri_swap(state: PhaseState) -> PhaseState:
    """Exchange coordinates and momenta: (x, p) -> (p, x)."""
    return PhaseState(x=state.p.copy(), p=state.x.copy(), t=state.t,
                      sigma=state.sigma)


def houri_hamiltonian(spec: SystemSpec, state: PhaseState):
    """(E - |x|^2/2)^2 |p|^2 on swapped variables; equals alpha^2 whenever the
    pre-swap state lies on the Kepler energy surface H = E."""
    _require_unit_mass(spec, "the swap Hamiltonian")
    x2 = float(state.x @ state.x)
    p2 = float(state.p @ state.p)
    return (spec.energy - 0.5 * x2) ** 2 * p2


# -- momentum inversion ----------------------------------------------------------


def milnor_invert(p):
    """w = p/|p|^2 (an involution away from p = 0)."""
    p, single = _rows(p)
    n2 = np.einsum("ij,ij->i", p, p)
    if np.any(n2 < ORIGIN_EPS**2):
        raise ZeroMomentum("momentum inversion undefined at p = 0")
    w = p / n2[:, None]
    return w[0] if single else w


def levi_civita_system(spec: SystemSpec) -> HamiltonianSystem:
    """Kepler flow in the collision-regularizing parameter, d sigma/dt = 1/r."""
    if spec.family != "kepler":
        raise ValueError("the 1/r clock is a kepler construction")
    return scaled_kepler_system(spec, ("levi-civita", None),
                                label="levi-civita-kepler", parameter="sigma")


def milnor_reconstruct(w, wprime, energy, alpha):
    """Position from the inverted momentum and its arc derivative:

        x = 4 alpha [ 2 (w.w') w - |w|^2 w' ] / (1 - 2 E |w|^2)^2
    """
    w, single = _rows(w)
    wp, _ = _rows(wprime)
    w2 = np.einsum("ij,ij->i", w, w)
    dot = np.einsum("ij,ij->i", w, wp)
    denom = (1.0 - 2.0 * energy * w2) ** 2
    x = 4.0 * alpha * (2.0 * dot[:, None] * w - w2[:, None] * wp) / denom[:, None]
    return x[0] if single else x


def milnor_series(traj: Trajectory, spec: SystemSpec):
    """Identity residuals along a 1/r-clock Kepler orbit on a uniform grid.

    Derivatives in the regularized parameter are 4th-order finite differences,
    so all returned arrays live on the interior samples (two trimmed per end).

    Returns dict with keys: interior (slice), w, wprime, speed_residual
    (|4|w'|^2 - (2E|w|^2-1)^2|), momentum_rate_residual (||dp/dsigma| - alpha/r|),
    reconstruction_error (max-norm against the sampled positions).
    """
    _require_unit_mass(spec, "momentum inversion")
    h = np.diff(traj.param)
    if h.size < 4 or np.max(np.abs(h - h[0])) > 1e-9 * abs(h[0]):
        raise ValueError("uniform parameter grid required for the series checks")
    h = float(h[0])
    e = spec.energy
    w = milnor_invert(traj.p)
    wp = numdiff.series_derivative(w, h)
    dp = numdiff.series_derivative(traj.p, h)
    sl = slice(2, -2)
    w_i, wp_i = w[sl], wp[sl]
    w2 = np.einsum("ij,ij->i", w_i, w_i)
    wp2 = np.einsum("ij,ij->i", wp_i, wp_i)
    speed_res = np.abs(4.0 * wp2 - (2.0 * e * w2 - 1.0) ** 2)
    r = np.linalg.norm(traj.x[sl], axis=1)
    dp_norm = np.linalg.norm(dp[sl], axis=1)
    rate_res = np.abs(dp_norm - spec.alpha / r)
    x_rec = milnor_reconstruct(w_i, wp_i, e, spec.alpha)
    rec_err = np.max(np.abs(x_rec - traj.x[sl]), axis=1)
    return {
        "interior": sl,
        "w": w_i,
        "wprime": wp_i,
        "speed_residual": speed_res,
        "momentum_rate_residual": rate_res,
        "reconstruction_error": rec_err,
    }


# -- the on-surface quadratic integral and its flow ------------------------------


def moser_liouville(spec: SystemSpec, x):
    """Radial Liouville derivative Y(H) = q . dH/dq = r U'(r); equals beta/|q|
    for the Kepler potential."""
    x = np.asarray(x, dtype=float)
    r = float(np.linalg.norm(x))
    return r * float(spec.dpotential(r))


def moser_h0(spec: SystemSpec, x, p):
    """(H - E)/Y(H) = (|p|^2 - 2E)|q|/(2 beta) - 1; zero on the energy surface."""
    _require_unit_mass(spec, "the rescaled Hamiltonian")
    beta = spec.alpha
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    r = float(np.linalg.norm(x))
    return (float(p @ p) - 2.0 * spec.energy) * r / (2.0 * beta) - 1.0


def moser_f(spec: SystemSpec, x, p):
    """F = (H0 + 1)^2 / 2 = (|p|^2 - 2E)^2 |q|^2 / (8 beta^2); 1/2 on-surface."""
    _require_unit_mass(spec, "the quadratic integral")
    beta = spec.alpha
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    r2 = float(x @ x)
    return (float(p @ p) - 2.0 * spec.energy) ** 2 * r2 / (8.0 * beta**2)


def moser_f_system(spec: SystemSpec) -> HamiltonianSystem:
    """Hamiltonian flow of F in the fictitious time tau (d tau/dt = beta/|q|).

    On the energy surface this flow is the Kepler flow divided by Y(H) (the
    normalized/Reeb direction); off the surface it is simply X_F.
    """
    _require_unit_mass(spec, "the quadratic integral")
    beta = spec.alpha
    e = spec.energy

    def value(x, p):
        return moser_f(spec, x, p)

    def grad_x(x, p):
        return (float(p @ p) - 2.0 * e) ** 2 / (4.0 * beta**2) * np.asarray(x, float)

    def grad_p(x, p):
        x = np.asarray(x, dtype=float)
        return (float(p @ p) - 2.0 * e) * float(x @ x) / (2.0 * beta**2) * np.asarray(p, float)

    return HamiltonianSystem(
        label="quadratic-integral-kepler",
        parameter="tau",
        value=value,
        grad_x=grad_x,
        grad_p=grad_p,
        time_rate=lambda x, p: float(np.linalg.norm(x)) / beta,
        spec=spec,
    )


def require_on_surface(spec: SystemSpec, x, p, tol=SURFACE_TOL):
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    h = float(p @ p) / (2.0 * spec.mass) + float(spec.potential(np.linalg.norm(x)))
    err = abs(h - spec.energy)
    if err > tol * max(1.0, abs(spec.energy)):
        raise EnergySurfaceViolation(
            "state misses H = E by %g (tolerance %g)" % (err, tol))


def moser_flow_residual(spec: SystemSpec, x, p):
    """Max-abs component difference between X_F and X_H / Y(H) at an
    on-surface point (they agree there; EnergySurfaceViolation otherwise)."""
    require_on_surface(spec, x, p)
    fsys = moser_f_system(spec)
    nsys = newtonian_system(spec)
    fx, fp = fsys.flow(x, p)
    hx, hp = nsys.flow(x, p)
    y = moser_liouville(spec, x)
    return float(max(np.max(np.abs(fx - hx / y)), np.max(np.abs(fp - hp / y))))


def reeb_field(spec: SystemSpec, x, p):
    """X_H / Y(H): the unit-clock direction on the energy surface."""
    require_on_surface(spec, x, p)
    nsys = newtonian_system(spec)
    hx, hp = nsys.flow(x, p)
    y = moser_liouville(spec, x)
    return hx / y, hp / y


# -- eccentric anomaly and the Laplace-Runge-Lenz vector --------------------------


def lrl_vector(spec: SystemSpec, x, p):
    """A = (1/mu)[ |p|^2 x - (x.p) p ]/m - x/|x|; at unit mass this is the
    textbook (1/mu)(2H + mu/|x|) x - (1/mu)(x.v) v.  |A| is the eccentricity.
    """
    if spec.family != "kepler":
        raise ValueError("the LRL vector is a kepler quantity")
    mu, m = spec.alpha, spec.mass
    x, single = _rows(x)
    p, _ = _rows(p)
    r = np.linalg.norm(x, axis=1)
    p2 = np.einsum("ij,ij->i", p, p)
    xp = np.einsum("ij,ij->i", x, p)
    a = (p2[:, None] * x - xp[:, None] * p) / (m * mu) - x / r[:, None]
    return a[0] if single else a


def anomaly_frequency(spec: SystemSpec):
    """eps = sqrt(-2E); the clock dt = (|x|/eps) ds needs a bound orbit."""
    if spec.energy >= 0.0:
        raise PositiveEnergy("eccentric-anomaly clock requires E < 0")
    return math.sqrt(-2.0 * spec.energy)


def anomaly_system(spec: SystemSpec) -> HamiltonianSystem:
    """Kepler flow in the eccentric-anomaly parameter s, dt = (|x|/eps) ds."""
    if spec.family != "kepler":
        raise ValueError("the anomaly clock is a kepler construction")
    eps = anomaly_frequency(spec)
    return scaled_kepler_system(spec, ("anomaly", eps),
                                label="kepler-anomaly", parameter="s")


def anomaly_residual(traj: Trajectory, spec: SystemSpec):
    """|| x'' + x + (mu/eps^2) A ||_inf along a uniform s grid (4th-order
    interior second differences; two samples trimmed per end).

    Returns (interior slice, residual array)."""
    _require_unit_mass(spec, "the anomaly oscillator equation")
    h = np.diff(traj.param)
    if h.size < 4 or np.max(np.abs(h - h[0])) > 1e-9 * abs(h[0]):
        raise ValueError("uniform parameter grid required")
    h = float(h[0])
    eps = anomaly_frequency(spec)
    mu = spec.alpha
    xpp = numdiff.series_second_derivative(traj.x, h)
    sl = slice(2, -2)
    a = lrl_vector(spec, traj.x[sl], traj.p[sl])
    res = np.max(np.abs(xpp[sl] + traj.x[sl] + (mu / eps**2) * a), axis=1)
    return sl, res


def regularized_g(spec: SystemSpec, x, p):
    """G~ = (1/(2 eps)) (eps^2 + |x|^2) |p| - mu/eps.

    Vanishes on the image of the bound energy surface under the swap map."""
    eps = anomaly_frequency(spec)
    mu = spec.alpha
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    pn = float(np.linalg.norm(p))
    if pn < ORIGIN_EPS:
        raise ZeroMomentum("G~ gradients degenerate at p = 0")
    return (eps**2 + float(x @ x)) * pn / (2.0 * eps) - mu / eps


def regularized_g_system(spec: SystemSpec) -> HamiltonianSystem:
    """Flow generator for G~, from its analytic gradients."""
    eps = anomaly_frequency(spec)

    def value(x, p):
        return regularized_g(spec, x, p)

    def grad_x(x, p):
        pn = float(np.linalg.norm(p))
        if pn < ORIGIN_EPS:
            raise ZeroMomentum("G~ gradients degenerate at p = 0")
        return np.asarray(x, dtype=float) * pn / eps

    def grad_p(x, p):
        x = np.asarray(x, dtype=float)
        p = np.asarray(p, dtype=float)
        pn = float(np.linalg.norm(p))
        if pn < ORIGIN_EPS:
            raise ZeroMomentum("G~ gradients degenerate at p = 0")
        return (eps**2 + float(x @ x)) / (2.0 * eps) * p / pn

    return HamiltonianSystem(
        label="regularized-anomaly-generator",
        parameter="stilde",
        value=value,
        grad_x=grad_x,
        grad_p=grad_p,
        spec=spec,
    )


# -- Kepler flow on momentum space ------------------------------------------------


def momentum_kepler_value(k, x, p):
    """H~ = (1/4) (1 + k |x|^2)^2 |p|^2."""
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    return 0.25 * (1.0 + k * float(x @ x)) ** 2 * float(p @ p)


def momentum_kepler_system(k) -> HamiltonianSystem:
    if k <= 0.0:
        raise ValueError("curvature parameter k must be positive")

    def value(x, p):
        return momentum_kepler_value(k, x, p)

    def grad_x(x, p):
        x = np.asarray(x, dtype=float)
        p = np.asarray(p, dtype=float)
        return k * (1.0 + k * float(x @ x)) * float(p @ p) * x

    def grad_p(x, p):
        x = np.asarray(x, dtype=float)
        p = np.asarray(p, dtype=float)
        return 0.5 * (1.0 + k * float(x @ x)) ** 2 * p

    return HamiltonianSystem(
        label="momentum-kepler",
        parameter="t",
        value=value,
        grad_x=grad_x,
        grad_p=grad_p,
    )


def momentum_kepler_field(k, x, p):
    """Exact Hamiltonian field of H~ and its unit-speed rescaling.

    Returns ((dx, dp), (dx_r, dp_r)) where the second pair is
    X / (2 sqrt(H~) |p|) = ( sqrt(H~) p / |p|^3 , -k x ).
    """
    sys_ = momentum_kepler_system(k)
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    pn = float(np.linalg.norm(p))
    if pn < ORIGIN_EPS:
        raise ZeroMomentum("rescaled field undefined at p = 0")
    dx, dp = sys_.flow(x, p)
    denom = 2.0 * math.sqrt(momentum_kepler_value(k, x, p)) * pn
    return (dx, dp), (dx / denom, dp / denom)


def quasi_hamiltonian_residual(k, x, p, step=1e-5):
    """Contraction check i_{Lambda X} omega = dH~ with Lambda = 2 k^2 sqrt(H~) |p|
    and X the Lambda-rescaled field: the recombined field must match central
    finite differences of H~ componentwise.  Returns the max-abs mismatch.

    The default step balances truncation against roundoff for order-one
    points (H~ is quartic in x, so 1e-6 already sits on the roundoff side).
    """
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    pn = float(np.linalg.norm(p))
    if pn < ORIGIN_EPS:
        raise ZeroMomentum("rescaled field undefined at p = 0")
    sys_ = momentum_kepler_system(k)
    dx, dp = sys_.flow(x, p)
    lam = 2.0 * k**2 * math.sqrt(momentum_kepler_value(k, x, p)) * pn
    xx_dir, pp_dir = dx / lam, dp / lam  # the Lambda-rescaled direction field
    x_part, p_part = lam * xx_dir, lam * pp_dir  # i_{Lambda X} omega components
    dh_dx = numdiff.gradient(lambda xx: momentum_kepler_value(k, xx, p), x, step=step)
    dh_dp = numdiff.gradient(lambda pp: momentum_kepler_value(k, x, pp), p, step=step)
    return float(max(np.max(np.abs(x_part - dh_dp)), np.max(np.abs(p_part + dh_dx))))
