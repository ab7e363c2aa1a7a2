"""Exception taxonomy for geometric/dynamical failure modes.

Every guard in the package raises one of these; nothing is silently clamped.
Integrator errors carry the partial trajectory computed so far in
``exc.trajectory`` when one exists.
"""


class MaupertuisError(Exception):
    """Base class for all package errors."""


class HillBoundaryViolation(MaupertuisError):
    """Metric evaluated at or beyond the E = U degeneracy surface."""


class NearCollision(MaupertuisError):
    """Trajectory entered the collision guard radius of a singular potential."""

    def __init__(self, msg, trajectory=None):
        super().__init__(msg)
        self.trajectory = trajectory


class StepUnderflow(MaupertuisError):
    """Adaptive step control pushed the step below the representable floor."""

    def __init__(self, msg, trajectory=None):
        super().__init__(msg)
        self.trajectory = trajectory


class ConvergenceFailure(MaupertuisError):
    """An implicit solve did not converge within its iteration budget."""

    def __init__(self, msg, trajectory=None):
        super().__init__(msg)
        self.trajectory = trajectory


class EnergySurfaceViolation(MaupertuisError):
    """State does not lie on (or near enough to) the required H = E surface."""


class OriginSingularity(MaupertuisError):
    """Map evaluated at a coordinate singularity (|q| or |x| too small)."""


class ZeroMomentum(MaupertuisError):
    """Momentum inversion w = p/|p|**2 evaluated at p = 0."""


class PositiveEnergy(MaupertuisError):
    """Operation requires a bound orbit (E < 0)."""


class ConfigError(MaupertuisError):
    """Malformed, incomplete, or unknown-key run configuration."""
