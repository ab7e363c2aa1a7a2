"""Geodesic reformulation of central-force dynamics.

Conformally rescaled (Jacobi-type) metrics for Newtonian systems at fixed
energy, the geodesic flow they induce, the classical canonical maps linking
the Kepler and Hooke problems, and drift diagnostics for the conserved
quantities that travel across those maps.
"""
from . import _kernels
from .dynamics import (
    HamiltonianSystem,
    PhaseState,
    Trajectory,
    angular_momentum,
    eccentricity,
    energy_of,
    integrate,
    jacobi_system,
    jm_geodesic,
    kepler_period,
    newtonian_system,
    perihelion_state,
    poisson_bracket,
    reparameterize,
    semi_major_axis,
)
from .errors import (
    ConfigError,
    ConvergenceFailure,
    EnergySurfaceViolation,
    HillBoundaryViolation,
    MaupertuisError,
    NearCollision,
    OriginSingularity,
    PositiveEnergy,
    StepUnderflow,
    ZeroMomentum,
)
from .geometry import (
    ConformalMetric,
    SystemSpec,
    christoffel,
    christoffel_fd,
    classify_orbit,
    curvature_scan,
    gaussian_curvature,
    jacobi_radial_metric,
    jm_lift,
    kepler_curvature,
    radial_curvature,
)
from .invariants import DiagnosticsReport, evaluate_all, quantity_series

__version__ = "0.1.0"


def kernel_backend():
    """Which integration kernels are active: "compiled" or "python"."""
    return _kernels.backend()
