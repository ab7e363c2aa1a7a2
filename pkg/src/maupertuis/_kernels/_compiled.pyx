# Fixed-step integrator kernels, compiled core.
# Mirrors _python.py: same signatures, same status codes, same recording rules.
import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt, fabs, pow as c_pow

cnp.import_array()

# potential families
DEF FREE = 0
DEF KEPLER = 1
DEF HOOKE = 2
DEF POWER = 3
# parameter scalings
DEF SCALE_NONE = 0
DEF SCALE_LC = 1
DEF SCALE_ANOM = 2
# methods
DEF RK4 = 0
DEF VERLET = 1
DEF MIDPOINT = 2
# statuses
DEF OK = 0
DEF HIT_RMIN = 1
DEF HIT_HILL = 2
DEF NO_CONVERGE = 3

BACKEND = "compiled"


cdef inline double _norm(double* v, int d) nogil:
    cdef double s = 0.0
    cdef int j
    for j in range(d):
        s += v[j] * v[j]
    return sqrt(s)


cdef inline double _u(int kind, double* par, double r) nogil:
    if kind == KEPLER:
        return -par[0] / r
    if kind == HOOKE:
        return 0.5 * par[0] * r * r - par[1]
    if kind == POWER:
        return par[0] * c_pow(r, par[1])
    return 0.0


cdef inline void _grad_u(int kind, double* par, double* x, double r, int d,
                         double* out) nogil:
    cdef double c
    cdef int j
    if kind == KEPLER:
        c = par[0] / (r * r * r)
    elif kind == HOOKE:
        c = par[0]
    elif kind == POWER:
        c = par[0] * par[1] * c_pow(r, par[1] - 2.0)
    else:
        c = 0.0
    for j in range(d):
        out[j] = c * x[j]


cdef inline double _scl(int sk, double sp, double r) nogil:
    if sk == SCALE_LC:
        return r
    if sk == SCALE_ANOM:
        return r / sp
    return 1.0


cdef inline void _newton_field(int kind, double* par, double m, int sk, double sp,
                               double* x, double* p, int d,
                               double* fx, double* fp, double* ft) nogil:
    cdef double r = _norm(x, d)
    cdef double s = _scl(sk, sp, r)
    cdef double gu[3]
    cdef int j
    _grad_u(kind, par, x, r, d, gu)
    for j in range(d):
        fx[j] = s * p[j] / m
        fp[j] = -s * gu[j]
    ft[0] = s


cdef inline int _jm_field(int kind, double* par, double m, double energy,
                          double hill_tol, double* x, double* p, int d,
                          double* fx, double* fp, double* ft) nogil:
    # returns OK or HIT_HILL
    cdef double r = _norm(x, d)
    cdef double u = _u(kind, par, r)
    cdef double lam = energy - u
    cdef double band = hill_tol * (fabs(energy) + fabs(u) + 1.0)
    cdef double gu[3]
    cdef double p2 = 0.0
    cdef int j
    if lam <= band:
        return HIT_HILL
    _grad_u(kind, par, x, r, d, gu)
    for j in range(d):
        p2 += p[j] * p[j]
    for j in range(d):
        fx[j] = p[j] / (m * lam)
        fp[j] = -(p2 / (2.0 * m * lam * lam)) * gu[j]
    ft[0] = 1.0 / lam
    return OK


def newton_fixed(int kind, double[::1] params, double m, int scale_kind,
                 double scale_param, double[::1] x0, double[::1] p0, double h,
                 long n_steps, long stride, int method, double r_min,
                 double fp_tol, int fp_maxit):
    cdef int d = x0.shape[0]
    cdef long cap = n_steps // stride + 2
    idx_arr = np.empty(cap, dtype=np.int64)
    xs_arr = np.empty((cap, d), dtype=np.float64)
    ps_arr = np.empty((cap, d), dtype=np.float64)
    ts_arr = np.empty(cap, dtype=np.float64)
    cdef long[::1] idx = idx_arr
    cdef double[:, ::1] xs = xs_arr
    cdef double[:, ::1] ps = ps_arr
    cdef double[::1] ts = ts_arr

    cdef double par[4]
    cdef int j
    for j in range(min(params.shape[0], 4)):
        par[j] = params[j]

    cdef double x[3]
    cdef double p[3]
    cdef double xn[3]
    cdef double pn[3]
    cdef double ph[3]
    cdef double gu[3]
    cdef double k1x[3]
    cdef double k1p[3]
    cdef double k2x[3]
    cdef double k2p[3]
    cdef double k3x[3]
    cdef double k3p[3]
    cdef double k4x[3]
    cdef double k4p[3]
    cdef double zx[3]
    cdef double zp[3]
    cdef double yx[3]
    cdef double yp[3]
    cdef double mx[3]
    cdef double mp[3]
    cdef double fx[3]
    cdef double fp[3]
    cdef double k1t, k2t, k3t, k4t, smid
    cdef double t = 0.0, tn = 0.0, r, rn, rm, delta, dv
    cdef long i = 0, k = 0
    cdef int status = OK, it, converged, hit
    for j in range(d):
        x[j] = x0[j]
        p[j] = p0[j]

    # record step 0
    idx[k] = 0
    for j in range(d):
        xs[k, j] = x[j]
        ps[k, j] = p[j]
    ts[k] = t
    k += 1

    with nogil:
        for i in range(1, n_steps + 1):
            if method == RK4:
                _newton_field(kind, par, m, scale_kind, scale_param, x, p, d, k1x, k1p, &k1t)
                for j in range(d):
                    zx[j] = x[j] + 0.5 * h * k1x[j]
                    zp[j] = p[j] + 0.5 * h * k1p[j]
                _newton_field(kind, par, m, scale_kind, scale_param, zx, zp, d, k2x, k2p, &k2t)
                for j in range(d):
                    zx[j] = x[j] + 0.5 * h * k2x[j]
                    zp[j] = p[j] + 0.5 * h * k2p[j]
                _newton_field(kind, par, m, scale_kind, scale_param, zx, zp, d, k3x, k3p, &k3t)
                for j in range(d):
                    zx[j] = x[j] + h * k3x[j]
                    zp[j] = p[j] + h * k3p[j]
                _newton_field(kind, par, m, scale_kind, scale_param, zx, zp, d, k4x, k4p, &k4t)
                for j in range(d):
                    xn[j] = x[j] + (h / 6.0) * (k1x[j] + 2.0 * k2x[j] + 2.0 * k3x[j] + k4x[j])
                    pn[j] = p[j] + (h / 6.0) * (k1p[j] + 2.0 * k2p[j] + 2.0 * k3p[j] + k4p[j])
                tn = t + (h / 6.0) * (k1t + 2.0 * k2t + 2.0 * k3t + k4t)
            elif method == VERLET:
                r = _norm(x, d)
                _grad_u(kind, par, x, r, d, gu)
                for j in range(d):
                    ph[j] = p[j] - 0.5 * h * gu[j]
                    xn[j] = x[j] + (h / m) * ph[j]
                rn = _norm(xn, d)
                _grad_u(kind, par, xn, rn, d, gu)
                for j in range(d):
                    pn[j] = ph[j] - 0.5 * h * gu[j]
                tn = t + h
            else:  # MIDPOINT
                _newton_field(kind, par, m, scale_kind, scale_param, x, p, d, fx, fp, &smid)
                for j in range(d):
                    yx[j] = x[j] + h * fx[j]
                    yp[j] = p[j] + h * fp[j]
                converged = 0
                hit = 0
                for it in range(fp_maxit):
                    for j in range(d):
                        mx[j] = 0.5 * (x[j] + yx[j])
                        mp[j] = 0.5 * (p[j] + yp[j])
                    rm = _norm(mx, d)
                    if r_min > 0.0 and rm < r_min:
                        hit = 1
                        break
                    _newton_field(kind, par, m, scale_kind, scale_param, mx, mp, d, fx, fp, &smid)
                    delta = 0.0
                    for j in range(d):
                        dv = fabs(x[j] + h * fx[j] - yx[j])
                        if dv > delta:
                            delta = dv
                        dv = fabs(p[j] + h * fp[j] - yp[j])
                        if dv > delta:
                            delta = dv
                        yx[j] = x[j] + h * fx[j]
                        yp[j] = p[j] + h * fp[j]
                    if delta < fp_tol:
                        converged = 1
                        break
                if hit == 1:
                    status = HIT_RMIN
                    break
                if converged == 0:
                    status = NO_CONVERGE
                    break
                for j in range(d):
                    xn[j] = yx[j]
                    pn[j] = yp[j]
                    mx[j] = 0.5 * (x[j] + xn[j])
                    mp[j] = 0.5 * (p[j] + pn[j])
                _newton_field(kind, par, m, scale_kind, scale_param, mx, mp, d, fx, fp, &smid)
                tn = t + h * smid

            rn = _norm(xn, d)
            if r_min > 0.0 and rn < r_min:
                status = HIT_RMIN
                break
            for j in range(d):
                x[j] = xn[j]
                p[j] = pn[j]
            t = tn
            if i % stride == 0 or i == n_steps:
                idx[k] = i
                for j in range(d):
                    xs[k, j] = x[j]
                    ps[k, j] = p[j]
                ts[k] = t
                k += 1

    if status != OK and (k == 0 or idx[k - 1] != i - 1):
        idx[k] = i - 1
        for j in range(d):
            xs[k, j] = x[j]
            ps[k, j] = p[j]
        ts[k] = t
        k += 1
    return status, idx_arr[:k].copy(), xs_arr[:k].copy(), ps_arr[:k].copy(), ts_arr[:k].copy()


def jm_fixed(int kind, double[::1] params, double m, double energy,
             double[::1] x0, double[::1] p0, double h, long n_steps, long stride,
             int method, double r_min, double hill_tol, double fp_tol, int fp_maxit):
    cdef int d = x0.shape[0]
    cdef long cap = n_steps // stride + 2
    idx_arr = np.empty(cap, dtype=np.int64)
    xs_arr = np.empty((cap, d), dtype=np.float64)
    ps_arr = np.empty((cap, d), dtype=np.float64)
    ts_arr = np.empty(cap, dtype=np.float64)
    cdef long[::1] idx = idx_arr
    cdef double[:, ::1] xs = xs_arr
    cdef double[:, ::1] ps = ps_arr
    cdef double[::1] ts = ts_arr

    cdef double par[4]
    cdef int j
    for j in range(min(params.shape[0], 4)):
        par[j] = params[j]

    cdef double x[3]
    cdef double p[3]
    cdef double xn[3]
    cdef double pn[3]
    cdef double k1x[3]
    cdef double k1p[3]
    cdef double k2x[3]
    cdef double k2p[3]
    cdef double k3x[3]
    cdef double k3p[3]
    cdef double k4x[3]
    cdef double k4p[3]
    cdef double zx[3]
    cdef double zp[3]
    cdef double yx[3]
    cdef double yp[3]
    cdef double mx[3]
    cdef double mp[3]
    cdef double fx[3]
    cdef double fp[3]
    cdef double k1t, k2t, k3t, k4t, rate
    cdef double t = 0.0, tn = 0.0, rn, rm, delta, dv, un, lamn, bandn
    cdef long i = 0, k = 0
    cdef int status = OK, st, it, converged, hill
    for j in range(d):
        x[j] = x0[j]
        p[j] = p0[j]

    idx[k] = 0
    for j in range(d):
        xs[k, j] = x[j]
        ps[k, j] = p[j]
    ts[k] = t
    k += 1

    with nogil:
        for i in range(1, n_steps + 1):
            if method == RK4:
                st = _jm_field(kind, par, m, energy, hill_tol, x, p, d, k1x, k1p, &k1t)
                if st != OK:
                    status = st
                    break
                for j in range(d):
                    zx[j] = x[j] + 0.5 * h * k1x[j]
                    zp[j] = p[j] + 0.5 * h * k1p[j]
                st = _jm_field(kind, par, m, energy, hill_tol, zx, zp, d, k2x, k2p, &k2t)
                if st != OK:
                    status = st
                    break
                for j in range(d):
                    zx[j] = x[j] + 0.5 * h * k2x[j]
                    zp[j] = p[j] + 0.5 * h * k2p[j]
                st = _jm_field(kind, par, m, energy, hill_tol, zx, zp, d, k3x, k3p, &k3t)
                if st != OK:
                    status = st
                    break
                for j in range(d):
                    zx[j] = x[j] + h * k3x[j]
                    zp[j] = p[j] + h * k3p[j]
                st = _jm_field(kind, par, m, energy, hill_tol, zx, zp, d, k4x, k4p, &k4t)
                if st != OK:
                    status = st
                    break
                for j in range(d):
                    xn[j] = x[j] + (h / 6.0) * (k1x[j] + 2.0 * k2x[j] + 2.0 * k3x[j] + k4x[j])
                    pn[j] = p[j] + (h / 6.0) * (k1p[j] + 2.0 * k2p[j] + 2.0 * k3p[j] + k4p[j])
                tn = t + (h / 6.0) * (k1t + 2.0 * k2t + 2.0 * k3t + k4t)
            else:  # MIDPOINT
                st = _jm_field(kind, par, m, energy, hill_tol, x, p, d, fx, fp, &rate)
                if st != OK:
                    status = st
                    break
                for j in range(d):
                    yx[j] = x[j] + h * fx[j]
                    yp[j] = p[j] + h * fp[j]
                converged = 0
                hill = 0
                for it in range(fp_maxit):
                    for j in range(d):
                        mx[j] = 0.5 * (x[j] + yx[j])
                        mp[j] = 0.5 * (p[j] + yp[j])
                    rm = _norm(mx, d)
                    if r_min > 0.0 and rm < r_min:
                        hill = HIT_RMIN
                        break
                    st = _jm_field(kind, par, m, energy, hill_tol, mx, mp, d, fx, fp, &rate)
                    if st != OK:
                        hill = st
                        break
                    delta = 0.0
                    for j in range(d):
                        dv = fabs(x[j] + h * fx[j] - yx[j])
                        if dv > delta:
                            delta = dv
                        dv = fabs(p[j] + h * fp[j] - yp[j])
                        if dv > delta:
                            delta = dv
                        yx[j] = x[j] + h * fx[j]
                        yp[j] = p[j] + h * fp[j]
                    if delta < fp_tol:
                        converged = 1
                        break
                if hill != 0:
                    status = hill
                    break
                if converged == 0:
                    status = NO_CONVERGE
                    break
                for j in range(d):
                    xn[j] = yx[j]
                    pn[j] = yp[j]
                    mx[j] = 0.5 * (x[j] + xn[j])
                    mp[j] = 0.5 * (p[j] + pn[j])
                st = _jm_field(kind, par, m, energy, hill_tol, mx, mp, d, fx, fp, &rate)
                if st != OK:
                    status = st
                    break
                tn = t + h * rate

            rn = _norm(xn, d)
            if r_min > 0.0 and rn < r_min:
                status = HIT_RMIN
                break
            un = _u(kind, par, rn)
            lamn = energy - un
            bandn = hill_tol * (fabs(energy) + fabs(un) + 1.0)
            if lamn <= bandn:
                status = HIT_HILL
                break
            for j in range(d):
                x[j] = xn[j]
                p[j] = pn[j]
            t = tn
            if i % stride == 0 or i == n_steps:
                idx[k] = i
                for j in range(d):
                    xs[k, j] = x[j]
                    ps[k, j] = p[j]
                ts[k] = t
                k += 1

    if status != OK and (k == 0 or idx[k - 1] != i - 1):
        idx[k] = i - 1
        for j in range(d):
            xs[k, j] = x[j]
            ps[k, j] = p[j]
        ts[k] = t
        k += 1
    return status, idx_arr[:k].copy(), xs_arr[:k].copy(), ps_arr[:k].copy(), ts_arr[:k].copy()
