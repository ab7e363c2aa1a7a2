"""Conserved-quantity tracking along trajectories.

Evaluates energy, the lifted (geodesic) Hamiltonian, angular momentum, the
Laplace-Runge-Lenz vector, the lifted-Lagrangian normalization and the
on-surface quadratic integral as time series over a Trajectory, reports worst
drifts, and checks the transfer rule for quadratic invariants between the
Newtonian flow and the lifted geodesic flow.
"""
import json
from dataclasses import dataclass, field

import numpy as np

from . import transforms
from .dynamics import Trajectory
from .errors import EnergySurfaceViolation
from .geometry import SystemSpec

SCALARS = ("energy", "jacobi", "angular_momentum", "lifted_lagrangian",
           "quadratic_integral")
VECTORS = ("lrl",)
KNOWN = SCALARS + VECTORS

_TINY = 1e-30


def quantity_series(traj: Trajectory, spec: SystemSpec, names):
    """Per-sample values of the named quantities along a trajectory.

    Scalar quantities come back as (n,) arrays, vector ones as (n, d).
    Samples outside the allowed region of a quantity (e.g. the lifted
    Hamiltonian where E - U <= 0) are nan rather than an error.
    """
    x, p = traj.x, traj.p
    r = np.linalg.norm(x, axis=1)
    p2 = np.einsum("ij,ij->i", p, p)
    u = np.asarray(spec.potential(r), dtype=float)
    band = spec.energy - u
    out = {}
    for name in names:
        if name == "energy":
            out[name] = p2 / (2.0 * spec.mass) + u
        elif name == "jacobi":
            out[name] = np.where(band > 0.0,
                                 p2 / (2.0 * spec.mass * np.where(band > 0.0, band, 1.0)),
                                 np.nan)
        elif name == "lifted_lagrangian":
            # g~(x', x') along the lifted geodesic equals 4 H~.
            out[name] = 4.0 * quantity_series(traj, spec, ["jacobi"])["jacobi"]
        elif name == "angular_momentum":
            if traj.dim == 2:
                out[name] = x[:, 0] * p[:, 1] - x[:, 1] * p[:, 0]
            else:
                out[name] = np.linalg.norm(np.cross(x, p), axis=1)
        elif name == "lrl":
            out[name] = transforms.lrl_vector(spec, x, p)
        elif name == "quadratic_integral":
            beta = spec.alpha
            out[name] = (p2 - 2.0 * spec.energy) ** 2 * r**2 / (8.0 * beta**2)
        else:
            raise ValueError("unknown quantity %r" % (name,))
    return out


def drift(values):
    """Worst absolute deviation from the initial value.

    Scalars: max_i |Q_i - Q_0|.  Vectors: max_i ||Q_i - Q_0||_inf.
    nan samples are ignored (they mark out-of-domain points)."""
    values = np.asarray(values, dtype=float)
    dev = np.abs(values - values[0])
    if dev.ndim > 1:
        dev = np.max(dev, axis=1)
    return float(np.nanmax(dev))


@dataclass
class QuantityTrack:
    name: str
    initial: object  # float, or list for vector quantities
    max_drift: float
    rel_drift: float
    tol: object = None
    passed: object = None

    def as_dict(self):
        if self.passed is None:
            verdict = None
        else:
            verdict = "pass" if self.passed else "fail"
        return {
            "name": self.name,
            "initial": self.initial,
            "max_drift": self.max_drift,
            "rel_drift": self.rel_drift,
            "tol": self.tol,
            "verdict": verdict,
        }


@dataclass
class DiagnosticsReport:
    system_label: str
    parameter: str
    n_samples: int
    tracks: dict = field(default_factory=dict)

    @property
    def passed(self):
        """True/False once any track carries a tolerance; None when purely
        informational."""
        judged = [t.passed for t in self.tracks.values() if t.passed is not None]
        if not judged:
            return None
        return all(judged)

    def as_dict(self):
        return {
            "system": self.system_label,
            "parameter": self.parameter,
            "n_samples": self.n_samples,
            "passed": self.passed,
            "quantities": [self.tracks[k].as_dict() for k in sorted(self.tracks)],
        }

    def to_json(self):
        return json.dumps(self.as_dict(), sort_keys=True, indent=2)

    def lines(self):
        rows = []
        for name in sorted(self.tracks):
            t = self.tracks[name]
            verdict = "" if t.passed is None else ("  PASS" if t.passed else "  FAIL")
            rows.append("%-20s drift %.3e  (rel %.3e)%s"
                        % (name, t.max_drift, t.rel_drift, verdict))
        return rows


def default_quantities(traj: Trajectory, spec: SystemSpec):
    names = ["energy", "angular_momentum"]
    if spec.family == "kepler":
        names.append("lrl")
    if traj.system_label.startswith("jacobi"):
        names += ["jacobi", "lifted_lagrangian"]
    if traj.system_label.startswith("quadratic-integral"):
        names.append("quadratic_integral")
    return names


def evaluate_all(traj: Trajectory, spec: SystemSpec, names=None, tols=None):
    """Drift report for the named quantities (defaults chosen per system)."""
    if names is None:
        names = default_quantities(traj, spec)
    tols = dict(tols or {})
    series = quantity_series(traj, spec, names)
    report = DiagnosticsReport(system_label=traj.system_label,
                               parameter=traj.parameter, n_samples=len(traj))
    for name in names:
        vals = series[name]
        d = drift(vals)
        first = np.asarray(vals, dtype=float)[0]
        scale = float(np.max(np.abs(first))) if first.ndim else abs(float(first))
        # relative to |initial| + tiny; meaningless when the initial value is
        # ~0 (circular-orbit LRL) — verdicts always use the absolute drift
        rel = d / (scale + _TINY)
        tol = tols.get(name)
        track = QuantityTrack(
            name=name,
            initial=first.tolist() if first.ndim else float(first),
            max_drift=d,
            rel_drift=rel,
            tol=tol,
            passed=None if tol is None else bool(d <= tol),
        )
        report.tracks[name] = track
    return report


def quadratic_invariant_transfer(traj: Trajectory, spec: SystemSpec,
                                 k2, k0, surface_tol=1e-6):
    """Transfer of a Newtonian quadratic invariant K = p.K2(x).p + K0(x) to the
    lifted flow, where it becomes K~ = p.K2(x).p + K0(x) H~.

    Requires the trajectory to sit on the unit level of the lifted Hamiltonian
    (max |H~ - 1| <= surface_tol, else EnergySurfaceViolation).  Pointwise,
    |K~ - K| = |K0| |H~ - 1|, so the two versions agree on-surface.

    k2: callable x -> (d, d) array;  k0: callable x -> float.

    Returns a dict with the two series, the lifted drift, the worst pointwise
    difference and its a-priori bound max|K0| * max|H~ - 1|."""
    ser = quantity_series(traj, spec, ["jacobi"])
    htilde = ser["jacobi"]
    if np.any(~np.isfinite(htilde)):
        raise EnergySurfaceViolation("trajectory leaves the allowed region")
    surf = float(np.max(np.abs(htilde - 1.0)))
    if surf > surface_tol:
        raise EnergySurfaceViolation(
            "lifted Hamiltonian misses 1 by %g (tolerance %g)" % (surf, surface_tol))
    quad = np.empty(len(traj))
    k0_vals = np.empty(len(traj))
    for i in range(len(traj)):
        quad[i] = float(traj.p[i] @ np.asarray(k2(traj.x[i]), dtype=float) @ traj.p[i])
        k0_vals[i] = float(k0(traj.x[i]))
    k_newton = quad + k0_vals
    k_lifted = quad + k0_vals * htilde
    return {
        "newtonian": k_newton,
        "lifted": k_lifted,
        "lifted_drift": drift(k_lifted),
        "max_difference": float(np.max(np.abs(k_lifted - k_newton))),
        "bound": float(np.max(np.abs(k0_vals)) * surf),
        "surface_deviation": surf,
    }
