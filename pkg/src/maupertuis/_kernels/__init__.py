"""Kernel backend selection: compiled extension if built, else pure Python.

``backend()`` reports which one is active; ``get(name)`` fetches a kernel
module explicitly ("compiled" may be unavailable, "python" always exists).
"""
from . import _python

try:
    from . import _compiled  # type: ignore[attr-defined]

    _active = _compiled
except ImportError:  # extension not built
    _compiled = None
    _active = _python

# status / method / family codes are defined identically in both backends
FREE = _python.FREE
KEPLER = _python.KEPLER
HOOKE = _python.HOOKE
POWER = _python.POWER
SCALE_NONE = _python.SCALE_NONE
SCALE_LC = _python.SCALE_LC
SCALE_ANOM = _python.SCALE_ANOM
RK4 = _python.RK4
VERLET = _python.VERLET
MIDPOINT = _python.MIDPOINT
OK = _python.OK
HIT_RMIN = _python.HIT_RMIN
HIT_HILL = _python.HIT_HILL
NO_CONVERGE = _python.NO_CONVERGE


def backend():
    return _active.BACKEND


def get(name=None):
    """Kernel module by name: None -> active, "python", or "compiled"."""
    if name in (None, "auto"):
        return _active
    if name == "python":
        return _python
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not available in this build")
        return _compiled
    raise ValueError("unknown backend %r" % (name,))


newton_fixed = _active.newton_fixed
jm_fixed = _active.jm_fixed
