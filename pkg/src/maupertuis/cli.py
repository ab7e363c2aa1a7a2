"""Command-line front end.

Subcommands:

    integrate   run one scenario, write trajectory + drift diagnostics
    compare     integrate the same bound orbit as a Newtonian flow and as a
                lifted geodesic, report the max position deviation on a
                shared time grid
    transform   apply a canonical map along an orbit and report identity
                residuals
    curvature   tabulate the lifted metric's Gaussian curvature on an r-grid

Scenarios are INI files (flat key/value sections).  Unknown sections or keys
are errors: a typo in a tolerance must not silently change a verdict.

Exit codes: 0 all verdicts pass, 2 a verdict failed, 1 usage/config/runtime
error.
"""
import argparse
import configparser
import io
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import invariants, transforms
from .dynamics import (
    METHODS,
    PhaseState,
    Trajectory,
    energy_of,
    integrate,
    jm_geodesic,
    kepler_period,
    newtonian_system,
    perihelion_state,
)
from .errors import ConfigError, MaupertuisError, NearCollision
from .geometry import FAMILIES, SystemSpec, classify_orbit, curvature_scan
from dataclasses import replace

PARAMETERS = ("t", "sigma", "s", "tau")
TRANSFORMS = ("bohlin", "houri", "milnor", "moser", "anomaly")
BACKENDS = ("auto", "python", "compiled", "generic")

# residual tolerance per transform kind when the config does not set one
DEFAULT_TRANSFORM_TOL = {
    "bohlin": 1e-8,
    "houri": 1e-10,
    "moser": 1e-10,
    "milnor": 1e-5,
    "anomaly": 1e-6,
}

_SCHEMA = {
    "system": {"family", "m", "e", "alpha", "a", "b", "c", "n", "dimension"},
    "initial": {"x", "p", "semi_major_axis", "eccentricity"},
    "integrator": {"parameter", "method", "step", "tolerance", "span",
                   "backend"},
    "output": {"format", "path", "stride"},
    "transform": {"kind", "tolerance", "sweep_points"},
    "compare": {"tolerance", "samples", "reference"},
    "curvature": {"r_values", "grid"},
    "diagnostics": set(invariants.KNOWN),
}


# -- config ------------------------------------------------------------------------


def load_config(path):
    cp = configparser.ConfigParser(interpolation=None,
                                   inline_comment_prefixes=("#", ";"))
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigError("cannot read config %s: %s" % (path, exc))
    except configparser.Error as exc:
        raise ConfigError("config parse error in %s: %s" % (path, exc))
    for sec in cp.sections():
        if sec not in _SCHEMA:
            raise ConfigError("unknown section [%s]" % sec)
        for key in cp[sec]:
            if key not in _SCHEMA[sec]:
                raise ConfigError("unknown key '%s' in [%s]" % (key, sec))
    return cp


def _get(cp, sec, key, conv, default=None, required=False):
    if not cp.has_option(sec, key):
        if required:
            raise ConfigError("missing required key '%s' in [%s]" % (key, sec))
        return default
    raw = cp.get(sec, key)
    try:
        return conv(raw)
    except (ValueError, TypeError):
        raise ConfigError("bad value for [%s] %s: %r" % (sec, key, raw))


def _floats(raw):
    return [float(tok) for tok in raw.replace(",", " ").split()]


def _choice(options, what):
    def conv(raw):
        val = raw.strip().lower()
        if val not in options:
            raise ValueError(what)
        return val
    return conv


def build_spec(cp):
    if not cp.has_section("system"):
        raise ConfigError("missing [system] section")
    family = _get(cp, "system", "family", _choice(FAMILIES, "family"),
                  required=True)
    mass = _get(cp, "system", "m", float, required=True)
    if mass <= 0.0:
        raise ConfigError("[system] m must be positive")
    declared_e = _get(cp, "system", "e", float)
    kwargs = {
        "family": family,
        "mass": mass,
        "energy": declared_e if declared_e is not None else 0.0,
        "dim": _get(cp, "system", "dimension", int, default=2),
    }
    for key in ("alpha", "a", "b", "c", "n"):
        val = _get(cp, "system", key, float)
        if val is not None:
            kwargs[key] = val
    try:
        spec = SystemSpec(**kwargs)
    except ValueError as exc:
        raise ConfigError("invalid [system]: %s" % exc)
    return spec, declared_e


def build_state(cp, spec, declared_e, need_energy):
    """Initial state from explicit (x, p) or orbital elements.

    Returns (spec_with_energy, state, energy_fixed flag)."""
    if not cp.has_section("initial"):
        raise ConfigError("missing [initial] section")
    has_xp = cp.has_option("initial", "x") or cp.has_option("initial", "p")
    has_elem = (cp.has_option("initial", "semi_major_axis")
                or cp.has_option("initial", "eccentricity"))
    if has_xp and has_elem:
        raise ConfigError("[initial] gives both x/p and orbital elements")
    if has_elem:
        a = _get(cp, "initial", "semi_major_axis", float, required=True)
        ecc = _get(cp, "initial", "eccentricity", float, required=True)
        try:
            spec, state = perihelion_state(spec, a, ecc)
        except (ValueError, MaupertuisError) as exc:
            raise ConfigError("invalid [initial] elements: %s" % exc)
        if declared_e is not None and abs(declared_e - spec.energy) > 1e-8:
            raise ConfigError(
                "[system] e = %g conflicts with elements (imply E = %g)"
                % (declared_e, spec.energy))
        return spec, state, True
    if not (cp.has_option("initial", "x") and cp.has_option("initial", "p")):
        raise ConfigError("[initial] needs both x and p (or orbital elements)")
    x = _get(cp, "initial", "x", _floats, required=True)
    p = _get(cp, "initial", "p", _floats, required=True)
    if len(x) != spec.dim or len(p) != spec.dim:
        raise ConfigError("[initial] x/p must have %d components" % spec.dim)
    state = PhaseState(x=np.array(x, dtype=float), p=np.array(p, dtype=float))
    if declared_e is None:
        if need_energy:
            raise ConfigError(
                "[system] e (or orbital elements) required for this mode")
        spec = replace(spec, energy=energy_of(spec, state.x, state.p))
        return spec, state, False
    return spec, state, True


def integrator_options(cp):
    parameter = _get(cp, "integrator", "parameter",
                     _choice(PARAMETERS, "parameter"), default="t")
    method = _get(cp, "integrator", "method", _choice(METHODS, "method"))
    if method is None:
        method = "implicit-midpoint" if parameter == "sigma" else "rk4-fixed"
    return {
        "parameter": parameter,
        "method": method,
        "step": _get(cp, "integrator", "step", float, default=1e-3),
        "tol": _get(cp, "integrator", "tolerance", float, default=1e-10),
        "span": _get(cp, "integrator", "span", _floats),
        "backend": _get(cp, "integrator", "backend",
                        _choice(BACKENDS, "backend"), default="auto"),
    }


def output_options(cp, args):
    fmt = _get(cp, "output", "format", _choice(("csv", "json"), "format"),
               default="csv") if cp.has_section("output") else "csv"
    path = _get(cp, "output", "path", str) if cp.has_section("output") else None
    stride = _get(cp, "output", "stride", int, default=1) \
        if cp.has_section("output") else 1
    if stride < 1:
        raise ConfigError("[output] stride must be >= 1")
    if args.format is not None:
        fmt = args.format
    outdir = args.out or path or "."
    return fmt, outdir, stride


def _span_or_error(opts):
    span = opts["span"]
    if span is None:
        raise ConfigError("missing required key 'span' in [integrator]")
    if len(span) != 2 or not span[1] > span[0]:
        raise ConfigError("[integrator] span must be 'start, end' with end > start")
    return tuple(span)


# -- output files -------------------------------------------------------------------


def atomic_write(path, text):
    outdir = os.path.dirname(os.path.abspath(path))
    os.makedirs(outdir, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=outdir, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(v):
    if v is None:
        return ""
    v = float(v)
    if math.isnan(v):
        return ""
    return "%.17g" % v


def trajectory_columns(traj: Trajectory, spec: SystemSpec, energy_fixed):
    """Column name -> list of floats/None in the pinned trajectory schema."""
    d = traj.dim
    names = ["energy"]
    if energy_fixed:
        names.append("jacobi")
    names.append("angular_momentum")
    kepler = spec.family == "kepler"
    if kepler:
        names.append("lrl")
    if energy_fixed and kepler and spec.mass == 1.0:
        names.append("quadratic_integral")
    series = invariants.quantity_series(traj, spec, names)
    n = len(traj)
    cols = {"param": list(traj.param)}
    cols["t"] = list(traj.t) if traj.t is not None else [None] * n
    cols["sigma"] = list(traj.sigma) if traj.sigma is not None else [None] * n
    for j in range(d):
        cols["x%d" % (j + 1)] = list(traj.x[:, j])
    for j in range(d):
        cols["p%d" % (j + 1)] = list(traj.p[:, j])
    cols["H"] = list(series["energy"])
    cols["Htilde"] = list(series["jacobi"]) if "jacobi" in series else [None] * n
    cols["L"] = list(series["angular_momentum"])
    for j in range(d):
        key = "A%d" % (j + 1)
        cols[key] = list(series["lrl"][:, j]) if kepler else [None] * n
    cols["F"] = (list(series["quadratic_integral"])
                 if "quadratic_integral" in series else [None] * n)
    return cols


def column_order(d):
    return (["param", "t", "sigma"]
            + ["x%d" % (j + 1) for j in range(d)]
            + ["p%d" % (j + 1) for j in range(d)]
            + ["H", "Htilde", "L"]
            + ["A%d" % (j + 1) for j in range(d)]
            + ["F"])


def write_trajectory(path, traj, spec, energy_fixed, fmt):
    cols = trajectory_columns(traj, spec, energy_fixed)
    order = column_order(traj.dim)
    if fmt == "json":
        payload = {
            "columns": order,
            "rows": [
                [None if (cols[c][i] is None or
                          (isinstance(cols[c][i], float) and math.isnan(cols[c][i])))
                 else float(cols[c][i]) for c in order]
                for i in range(len(traj))
            ],
        }
        atomic_write(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")
        return
    buf = io.StringIO()
    buf.write(",".join(order) + "\n")
    for i in range(len(traj)):
        buf.write(",".join(_fmt(cols[c][i]) for c in order) + "\n")
    atomic_write(path, buf.getvalue())


def read_trajectory_csv(path):
    """Re-ingest a trajectory file written by write_trajectory (CSV form)."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    idx = {name: k for k, name in enumerate(header)}
    d = sum(1 for name in header if name.startswith("x"))
    if d not in (2, 3) or not rows:
        raise ConfigError("unrecognized trajectory file %s" % path)

    def col(name):
        vals = [row[idx[name]] for row in rows]
        if any(v == "" for v in vals):
            return None
        return np.array([float(v) for v in vals])

    x = np.column_stack([col("x%d" % (j + 1)) for j in range(d)])
    p = np.column_stack([col("p%d" % (j + 1)) for j in range(d)])
    t = col("t")
    param = col("param")
    parameter = "t" if (t is not None and np.array_equal(t, param)) else "param"
    return Trajectory(parameter=parameter, param=param, x=x, p=p, t=t,
                      sigma=col("sigma"), system_label="ingested",
                      method="ingested", step=float("nan"))


# -- scenario runners ---------------------------------------------------------------


def run_scenario(cp, stride):
    """Build and integrate the configured flow.  Returns (spec, traj, fixed)."""
    spec, declared_e = build_spec(cp)
    opts = integrator_options(cp)
    parameter = opts["parameter"]
    need_energy = parameter in ("sigma", "s", "tau")
    spec, state, energy_fixed = build_state(cp, spec, declared_e, need_energy)
    span = _span_or_error(opts)
    if need_energy and parameter != "sigma":
        # sigma mode defers to jm_geodesic, which distinguishes forbidden-region
        # starts (HillBoundaryViolation) from off-surface ones.
        viol = abs(energy_of(spec, state.x, state.p) - spec.energy)
        if viol > 1e-8 * max(1.0, abs(spec.energy)):
            raise ConfigError(
                "initial state misses the declared energy surface by %g" % viol)
    backend = None if opts["backend"] == "auto" else opts["backend"]
    if parameter == "t":
        traj = integrate(newtonian_system(spec), state, span,
                         method=opts["method"], step=opts["step"],
                         tol=opts["tol"], stride=stride, backend=backend)
    elif parameter == "sigma":
        traj = jm_geodesic(spec, state, span, method=opts["method"],
                           step=opts["step"], tol=opts["tol"], stride=stride,
                           backend=backend)
    elif parameter == "s":
        traj = integrate(transforms.anomaly_system(spec), state, span,
                         method=opts["method"], step=opts["step"],
                         tol=opts["tol"], stride=stride, backend=backend)
    else:  # tau
        transforms.require_on_surface(spec, state.x, state.p, tol=1e-8)
        traj = integrate(transforms.moser_f_system(spec), state, span,
                         method=opts["method"], step=opts["step"],
                         tol=opts["tol"], stride=stride, backend=backend)
    return spec, traj, energy_fixed


def diagnostics_tols(cp):
    if not cp.has_section("diagnostics"):
        return {}
    return {key: _get(cp, "diagnostics", key, float)
            for key in cp["diagnostics"]}


# -- subcommands --------------------------------------------------------------------


def cmd_integrate(args):
    cp = load_config(args.config)
    fmt, outdir, stride = output_options(cp, args)
    spec, traj, energy_fixed = run_scenario(cp, stride)
    report = invariants.evaluate_all(traj, spec, tols=diagnostics_tols(cp))
    ext = "json" if fmt == "json" else "csv"
    write_trajectory(os.path.join(outdir, "trajectory.%s" % ext),
                     traj, spec, energy_fixed, fmt)
    atomic_write(os.path.join(outdir, "diagnostics.json"),
                 report.to_json() + "\n")
    for line in report.lines():
        print(line)
    print("wrote %s" % os.path.join(outdir, "trajectory.%s" % ext))
    return 0 if report.passed in (None, True) else 2


def cmd_compare(args):
    from scipy.integrate import cumulative_simpson
    from scipy.interpolate import CubicSpline

    cp = load_config(args.config)
    _, outdir, _ = output_options(cp, args)
    spec, declared_e = build_spec(cp)
    if spec.family != "kepler":
        raise ConfigError("compare mode runs bound Kepler scenarios")
    spec, state, _ = build_state(cp, spec, declared_e, need_energy=True)
    if spec.energy >= 0.0:
        raise ConfigError("bound orbit required (E < 0)")
    opts = integrator_options(cp)
    tol = opts["tol"] if cp.has_option("integrator", "tolerance") else 1e-12
    span = tuple(opts["span"]) if opts["span"] else (0.0, kepler_period(spec))
    pass_tol = 1e-6
    n_grid = 1024
    if cp.has_section("compare"):
        pass_tol = _get(cp, "compare", "tolerance", float, default=pass_tol)
        n_grid = _get(cp, "compare", "samples", int, default=n_grid)

    reference = (_get(cp, "compare", "reference", str)
                 if cp.has_section("compare") else None)
    if reference is not None:
        newton = read_trajectory_csv(reference)
        if newton.t is None:
            raise ConfigError("reference trajectory lacks a time column")
    else:
        newton = integrate(newtonian_system(spec), state, span,
                           method="rkf45-adaptive", tol=tol)

    # total lifted parameter over the span, from a fine fixed-step run:
    # d sigma/d t = E - U along the orbit.
    fine = integrate(newtonian_system(spec), state, span, method="rk4-fixed",
                     step=min(1e-4, (span[1] - span[0]) / 1000.0))
    lam = spec.energy - np.asarray(
        spec.potential(np.linalg.norm(fine.x, axis=1)), dtype=float)
    sigma_end = float(cumulative_simpson(lam, x=fine.param, initial=0.0)[-1])

    geo = jm_geodesic(spec, state, (0.0, sigma_end), method="rkf45-adaptive",
                      tol=tol)
    t_lo = max(newton.t[0], geo.t[0])
    t_hi = min(newton.t[-1], geo.t[-1])
    grid = np.linspace(t_lo, t_hi, n_grid)
    dev = 0.0
    for j in range(newton.dim):
        s_n = CubicSpline(newton.t, newton.x[:, j])
        s_g = CubicSpline(geo.t, geo.x[:, j])
        dev = max(dev, float(np.max(np.abs(s_n(grid) - s_g(grid)))))
    verdict = dev < pass_tol
    payload = {
        "span_t": [span[0], span[1]],
        "sigma_end": sigma_end,
        "newton_samples": len(newton),
        "geodesic_samples": len(geo),
        "grid_points": int(n_grid),
        "max_deviation": dev,
        "tolerance": pass_tol,
        "verdict": "pass" if verdict else "fail",
    }
    atomic_write(os.path.join(outdir, "compare.json"),
                 json.dumps(payload, sort_keys=True, indent=2) + "\n")
    print("max position deviation %.3e over t in [%.6g, %.6g]: %s"
          % (dev, t_lo, t_hi, payload["verdict"]))
    return 0 if verdict else 2


def _surface_samples(spec, rng, count):
    """Random on-surface phase points for identity sweeps (bound Kepler)."""
    pts = []
    r_lo = 0.55 * spec.alpha / abs(spec.energy)  # inside the Hill region
    r_hi = 1.60 * spec.alpha / (2.0 * abs(spec.energy))
    while len(pts) < count:
        r = rng.uniform(r_lo, r_hi)
        lam = spec.energy - float(spec.potential(r))
        if lam <= 0.0:
            continue
        u = rng.normal(size=spec.dim)
        u /= np.linalg.norm(u)
        v = rng.normal(size=spec.dim)
        v /= np.linalg.norm(v)
        pts.append((r * u, math.sqrt(2.0 * spec.mass * lam) * v))
    return pts


def _transform_sweep(kind, spec, rng, count):
    """Max residual of the map's algebraic identity at random points."""
    worst = 0.0
    if kind == "bohlin":
        for _ in range(count):
            q = rng.normal(size=2)
            if np.linalg.norm(q) < 0.1:
                continue
            p = rng.normal(size=2)
            worst = max(worst, float(transforms.bohlin_identity_residual(q, p)))
    elif kind == "milnor":
        for _ in range(count):
            p = rng.normal(size=spec.dim)
            if np.linalg.norm(p) < 0.1:
                continue
            back = transforms.milnor_invert(transforms.milnor_invert(p))
            worst = max(worst, float(np.max(np.abs(back - p))))
    elif kind in ("houri", "moser", "anomaly"):
        for x, p in _surface_samples(spec, rng, count):
            st = PhaseState(x=x, p=p)
            if kind == "houri":
                res = abs(transforms.houri_hamiltonian(spec, transforms.houri_swap(st))
                          - spec.alpha**2)
            elif kind == "moser":
                res = abs(transforms.moser_f(spec, x, p) - 0.5)
            else:
                sw = transforms.houri_swap(st)
                res = abs(transforms.regularized_g(spec, sw.x, sw.p))
            worst = max(worst, float(res))
    return worst


def cmd_transform(args):
    cp = load_config(args.config)
    fmt, outdir, stride = output_options(cp, args)
    if not cp.has_section("transform"):
        raise ConfigError("missing [transform] section")
    kind = _get(cp, "transform", "kind", _choice(TRANSFORMS, "kind"),
                required=True)
    tol = _get(cp, "transform", "tolerance", float,
               default=DEFAULT_TRANSFORM_TOL[kind])
    spec, declared_e = build_spec(cp)
    opts = integrator_options(cp)
    span = _span_or_error(opts)
    backend = None if opts["backend"] == "auto" else opts["backend"]

    natural = {"bohlin": "t", "houri": "t", "moser": "t",
               "milnor": "sigma", "anomaly": "s"}[kind]
    if opts["parameter"] != natural and cp.has_option("integrator", "parameter"):
        raise ConfigError("transform '%s' integrates in parameter '%s'"
                          % (kind, natural))

    need_energy = kind in ("houri", "moser", "milnor", "anomaly")
    spec, state, energy_fixed = build_state(cp, spec, declared_e, need_energy)
    if kind == "bohlin" and spec.family != "hooke":
        raise ConfigError("bohlin transform expects the hooke family")
    if kind != "bohlin" and spec.family != "kepler":
        raise ConfigError("transform '%s' expects the kepler family" % kind)
    if need_energy:
        transforms.require_on_surface(spec, state.x, state.p, tol=1e-8)

    if kind == "milnor":
        system = transforms.levi_civita_system(spec)
    elif kind == "anomaly":
        system = transforms.anomaly_system(spec)
    else:
        system = newtonian_system(spec)
    method = opts["method"]
    if kind in ("milnor", "anomaly") and method == "rkf45-adaptive":
        raise ConfigError("transform '%s' needs a fixed-step method" % kind)
    traj = integrate(system, state, span, method=method, step=opts["step"],
                     tol=opts["tol"], stride=stride, backend=backend)

    if kind == "bohlin":
        z, big_p = transforms.bohlin_map(traj.x, traj.p)
        _, h_kep = transforms.bohlin_hamiltonians(spec.a, spec.b)
        residuals = np.array([abs(h_kep(z[i], big_p[i])) for i in range(len(traj))])
        out_x, out_p, out_param = z, big_p, traj.param
    elif kind == "houri":
        target = spec.alpha**2
        residuals = np.empty(len(traj))
        for i in range(len(traj)):
            sw = transforms.houri_swap(traj.state(i))
            residuals[i] = abs(transforms.houri_hamiltonian(spec, sw) - target)
        out_x, out_p, out_param = traj.p, traj.x, traj.param
    elif kind == "moser":
        residuals = np.array([
            abs(transforms.moser_f(spec, traj.x[i], traj.p[i]) - 0.5)
            for i in range(len(traj))])
        out_x, out_p, out_param = traj.x, traj.p, traj.param
    elif kind == "milnor":
        checks = transforms.milnor_series(traj, spec)
        residuals = checks["speed_residual"]
        out_x = checks["w"]
        out_p = checks["wprime"]
        out_param = traj.param[checks["interior"]]
    else:  # anomaly
        sl, residuals = transforms.anomaly_residual(traj, spec)
        out_x, out_p, out_param = traj.x[sl], traj.p[sl], traj.param[sl]

    sweep = None
    if args.seed is not None:
        count = _get(cp, "transform", "sweep_points", int, default=100)
        rng = np.random.default_rng(args.seed)
        sweep = {
            "seed": args.seed,
            "points": count,
            "max_residual": _transform_sweep(kind, spec, rng, count),
        }

    max_res = float(np.max(residuals)) if residuals.size else 0.0
    verdict = max_res <= tol
    payload = {
        "transform": kind,
        "n_samples": int(residuals.size),
        "max_residual": max_res,
        "tolerance": tol,
        "verdict": "pass" if verdict else "fail",
        "residuals": [float(v) for v in residuals],
        "sweep": sweep,
    }
    atomic_write(os.path.join(outdir, "residuals.json"),
                 json.dumps(payload, sort_keys=True, indent=2) + "\n")

    buf = io.StringIO()
    d = out_x.shape[1]
    head = (["param"] + ["x%d" % (j + 1) for j in range(d)]
            + ["p%d" % (j + 1) for j in range(d)] + ["residual"])
    buf.write(",".join(head) + "\n")
    for i in range(out_x.shape[0]):
        row = ([_fmt(out_param[i])]
               + [_fmt(v) for v in out_x[i]] + [_fmt(v) for v in out_p[i]]
               + [_fmt(residuals[i])])
        buf.write(",".join(row) + "\n")
    atomic_write(os.path.join(outdir, "transformed.csv"), buf.getvalue())

    print("%s: max residual %.3e over %d samples (tolerance %g): %s"
          % (kind, max_res, residuals.size, tol, payload["verdict"]))
    if sweep is not None:
        print("random sweep (%d points): max residual %.3e"
              % (sweep["points"], sweep["max_residual"]))
    return 0 if verdict else 2


def cmd_curvature(args):
    cp = load_config(args.config)
    _, outdir, _ = output_options(cp, args)
    spec, _ = build_spec(cp)
    if spec.family != "kepler":
        raise ConfigError("curvature tables are generated for the kepler family")
    if not cp.has_section("curvature"):
        raise ConfigError("missing [curvature] section")
    r_values = _get(cp, "curvature", "r_values", _floats)
    grid = _get(cp, "curvature", "grid", str)
    if (r_values is None) == (grid is None):
        raise ConfigError("[curvature] needs exactly one of r_values or grid")
    if grid is not None:
        try:
            lo, hi, count = grid.split(":")
            r = np.linspace(float(lo), float(hi), int(count))
        except ValueError:
            raise ConfigError("[curvature] grid must be 'start:stop:count'")
    else:
        r = np.asarray(r_values, dtype=float)
    if np.any(r <= 0.0):
        raise ConfigError("curvature grid radii must be positive")
    report = curvature_scan(spec, r)
    label = classify_orbit(spec)
    buf = io.StringIO()
    buf.write("r,K,class\n")
    for i in range(r.size):
        k = report.curvature[i]
        buf.write("%s,%s,%s\n" % (_fmt(r[i]), _fmt(k), label))
        if report.excluded[i]:
            print("warning: r = %g lies outside the allowed region; "
                  "K left empty" % r[i], file=sys.stderr)
    atomic_write(os.path.join(outdir, "curvature.csv"), buf.getvalue())
    print("wrote %s (%d rows, class %s)"
          % (os.path.join(outdir, "curvature.csv"), r.size, label))
    return 0


# -- entry point --------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract reserves 2 for verdict
    failures, so remap usage problems to exit 1."""

    def error(self, message):
        self.exit(1, "%s: error: %s\n" % (self.prog, message))


def make_parser():
    parser = _Parser(prog="maupertuis",
                     description="geodesic-reformulation toolbox for "
                                 "central-force flows")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func, blurb in (
            ("integrate", cmd_integrate, "run one scenario"),
            ("compare", cmd_compare,
             "Newtonian flow vs lifted geodesic, same orbit"),
            ("transform", cmd_transform, "apply a canonical map along an orbit"),
            ("curvature", cmd_curvature, "tabulate Gaussian curvature")):
        p = sub.add_parser(name, help=blurb)
        p.add_argument("--config", required=True, help="scenario INI file")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--format", choices=("csv", "json"), default=None,
                       help="trajectory file format")
        p.add_argument("--seed", type=int, default=None,
                       help="seed for random-point identity sweeps")
        p.set_defaults(func=func)
    return parser


def main(argv=None):
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 1
    except NearCollision as exc:
        print("error: %s" % exc, file=sys.stderr)
        traj = getattr(exc, "trajectory", None)
        if traj is not None and len(traj):
            print("last valid sample: param = %.17g, x = %s"
                  % (traj.param[-1], traj.x[-1].tolist()), file=sys.stderr)
        return 1
    except MaupertuisError as exc:
        print("error: %s: %s" % (type(exc).__name__, exc), file=sys.stderr)
        return 1
    except ValueError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
