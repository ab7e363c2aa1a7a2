"""Pure-Python integrator kernels.

Same call signatures and status codes as the compiled extension; selected at
import time when the extension is unavailable (see package __init__).  Fixed-step
loops over the named potential families only — generic callable Hamiltonians are
integrated by the generic paths in ``dynamics``.
"""
import numpy as np

# potential families
FREE, KEPLER, HOOKE, POWER = 0, 1, 2, 3
# parameter scalings s(r): field and clock both multiply by s
SCALE_NONE, SCALE_LC, SCALE_ANOM = 0, 1, 2
# methods
RK4, VERLET, MIDPOINT = 0, 1, 2
# statuses
OK, HIT_RMIN, HIT_HILL, NO_CONVERGE = 0, 1, 2, 3

BACKEND = "python"


def _grad_u(kind, params, x, r):
    """Cartesian gradient of U."""
    if kind == KEPLER:
        return (params[0] / r**3) * x
    if kind == HOOKE:
        return params[0] * x
    if kind == POWER:
        c, n = params[0], params[1]
        return (c * n * r ** (n - 2.0)) * x
    return np.zeros_like(x)


def _u(kind, params, r):
    if kind == KEPLER:
        return -params[0] / r
    if kind == HOOKE:
        return 0.5 * params[0] * r * r - params[1]
    if kind == POWER:
        return params[0] * r ** params[1]
    return 0.0


def _scale(scale_kind, scale_param, r):
    if scale_kind == SCALE_LC:
        return r
    if scale_kind == SCALE_ANOM:
        return r / scale_param
    return 1.0


def newton_fixed(kind, params, m, scale_kind, scale_param, x0, p0, h,
                 n_steps, stride, method, r_min, fp_tol, fp_maxit):
    """Fixed-step flow of dx = s(r) p/m, dp = -s(r) grad U, clock dt = s(r) dparam.

    Returns (status, idx, xs, ps, ts): recorded step indices and samples.
    """
    x = np.array(x0, dtype=float)
    p = np.array(p0, dtype=float)
    d = x.size
    t = 0.0

    cap = n_steps // stride + 2
    idx = np.empty(cap, dtype=np.int64)
    xs = np.empty((cap, d))
    ps = np.empty((cap, d))
    ts = np.empty(cap)
    k = 0

    def record(i):
        nonlocal k
        idx[k] = i
        xs[k] = x
        ps[k] = p
        ts[k] = t
        k += 1

    def field(xx, pp):
        r = float(np.linalg.norm(xx))
        s = _scale(scale_kind, scale_param, r)
        return (s / m) * pp, -s * _grad_u(kind, params, xx, r), s

    record(0)
    status = OK
    for i in range(1, n_steps + 1):
        if method == RK4:
            k1x, k1p, k1t = field(x, p)
            k2x, k2p, k2t = field(x + 0.5 * h * k1x, p + 0.5 * h * k1p)
            k3x, k3p, k3t = field(x + 0.5 * h * k2x, p + 0.5 * h * k2p)
            k4x, k4p, k4t = field(x + h * k3x, p + h * k3p)
            xn = x + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
            pn = p + (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
            tn = t + (h / 6.0) * (k1t + 2.0 * k2t + 2.0 * k3t + k4t)
        elif method == VERLET:
            # kick-drift-kick; only valid unscaled (separable H)
            r = float(np.linalg.norm(x))
            ph = p - 0.5 * h * _grad_u(kind, params, x, r)
            xn = x + (h / m) * ph
            rn = float(np.linalg.norm(xn))
            pn = ph - 0.5 * h * _grad_u(kind, params, xn, rn)
            tn = t + h
        else:  # MIDPOINT, fixed-point iteration
            fx, fp, _ = field(x, p)
            yx, yp = x + h * fx, p + h * fp
            ok = False
            hit = False
            for _ in range(fp_maxit):
                mx, mp = 0.5 * (x + yx), 0.5 * (p + yp)
                rm = float(np.linalg.norm(mx))
                if r_min > 0.0 and rm < r_min:
                    hit = True
                    break
                fx, fp, _ = field(mx, mp)
                nx, np_ = x + h * fx, p + h * fp
                delta = max(np.max(np.abs(nx - yx)), np.max(np.abs(np_ - yp)))
                yx, yp = nx, np_
                if delta < fp_tol:
                    ok = True
                    break
            if hit:
                status = HIT_RMIN
                break
            if not ok:
                status = NO_CONVERGE
                break
            xn, pn = yx, yp
            mx = 0.5 * (x + xn)
            _, _, smid = field(mx, 0.5 * (p + pn))
            tn = t + h * smid

        rn = float(np.linalg.norm(xn))
        if r_min > 0.0 and rn < r_min:
            status = HIT_RMIN
            break
        x, p, t = xn, pn, tn
        if i % stride == 0 or i == n_steps:
            record(i)

    if status != OK and (k == 0 or idx[k - 1] != i - 1):
        record(i - 1)
    return status, idx[:k].copy(), xs[:k].copy(), ps[:k].copy(), ts[:k].copy()


def jm_fixed(kind, params, m, energy, x0, p0, h, n_steps, stride, method,
             r_min, hill_tol, fp_tol, fp_maxit):
    """Fixed-step flow of the lifted Hamiltonian |p|^2 / (2 m (E - U)).

    dx/dsigma = p / (m lam),  dp/dsigma = -|p|^2 grad U / (2 m lam^2),
    clock dt/dsigma = 1/lam.  Methods: RK4 or implicit midpoint.
    """
    x = np.array(x0, dtype=float)
    p = np.array(p0, dtype=float)
    d = x.size
    t = 0.0

    cap = n_steps // stride + 2
    idx = np.empty(cap, dtype=np.int64)
    xs = np.empty((cap, d))
    ps = np.empty((cap, d))
    ts = np.empty(cap)
    k = 0

    def record(i):
        nonlocal k
        idx[k] = i
        xs[k] = x
        ps[k] = p
        ts[k] = t
        k += 1

    def lam_of(r):
        u = _u(kind, params, r)
        return energy - u, hill_tol * (abs(energy) + abs(u) + 1.0)

    def field(xx, pp):
        r = float(np.linalg.norm(xx))
        lam, band = lam_of(r)
        if lam <= band:
            return None
        gu = _grad_u(kind, params, xx, r)
        p2 = float(pp @ pp)
        return pp / (m * lam), -(p2 / (2.0 * m * lam * lam)) * gu, 1.0 / lam

    record(0)
    status = OK
    for i in range(1, n_steps + 1):
        if method == RK4:
            stages = []
            zx, zp = x, p
            bad = False
            for cf in (0.0, 0.5, 0.5, 1.0):
                if cf:
                    kx, kp, _ = stages[-1]
                    zx, zp = x + cf * h * kx, p + cf * h * kp
                f = field(zx, zp)
                if f is None:
                    bad = True
                    break
                stages.append(f)
            if bad:
                status = HIT_HILL
                break
            (k1x, k1p, k1t), (k2x, k2p, k2t), (k3x, k3p, k3t), (k4x, k4p, k4t) = stages
            xn = x + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
            pn = p + (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
            tn = t + (h / 6.0) * (k1t + 2.0 * k2t + 2.0 * k3t + k4t)
        else:  # MIDPOINT
            f = field(x, p)
            if f is None:
                status = HIT_HILL
                break
            fx, fp, _ = f
            yx, yp = x + h * fx, p + h * fp
            ok = False
            hill = False
            for _ in range(fp_maxit):
                mx, mp = 0.5 * (x + yx), 0.5 * (p + yp)
                f = field(mx, mp)
                if f is None:
                    hill = True
                    break
                fx, fp, _ = f
                nx, np_ = x + h * fx, p + h * fp
                delta = max(np.max(np.abs(nx - yx)), np.max(np.abs(np_ - yp)))
                yx, yp = nx, np_
                if delta < fp_tol:
                    ok = True
                    break
            if hill:
                status = HIT_HILL
                break
            if not ok:
                status = NO_CONVERGE
                break
            xn, pn = yx, yp
            f = field(0.5 * (x + xn), 0.5 * (p + pn))
            if f is None:
                status = HIT_HILL
                break
            tn = t + h * f[2]

        rn = float(np.linalg.norm(xn))
        if r_min > 0.0 and rn < r_min:
            status = HIT_RMIN
            break
        ln, band = lam_of(rn)
        if ln <= band:
            status = HIT_HILL
            break
        x, p, t = xn, pn, tn
        if i % stride == 0 or i == n_steps:
            record(i)

    if status != OK and (k == 0 or idx[k - 1] != i - 1):
        record(i - 1)
    return status, idx[:k].copy(), xs[:k].copy(), ps[:k].copy(), ts[:k].copy()
