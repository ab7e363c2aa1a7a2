"""Central finite-difference stencils used by the test oracles and the
derivative-free checks (gradient cross-validation, curvature evaluation,
residuals along sampled trajectories)."""
import numpy as np

# 6th-order first-derivative weights at offsets -3h..+3h
_W6 = np.array([-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0]) / 60.0
# 4th-order first-derivative weights at offsets -2h..+2h
_W4 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
# 4th-order second-derivative weights at offsets -2h..+2h
_W4_2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0


def derivative(f, x, step=1e-3, order=6):
    """First derivative of scalar callable f at x."""
    if order == 6:
        vals = [f(x + k * step) for k in range(-3, 4)]
        return float(np.dot(_W6, vals)) / step
    if order == 4:
        vals = [f(x + k * step) for k in range(-2, 3)]
        return float(np.dot(_W4, vals)) / step
    if order == 2:
        return (f(x + step) - f(x - step)) / (2.0 * step)
    raise ValueError("order must be 2, 4 or 6")


def second_derivative(f, x, step=1e-3):
    """Second derivative of scalar callable f at x (4th-order stencil)."""
    vals = [f(x + k * step) for k in range(-2, 3)]
    return float(np.dot(_W4_2, vals)) / step**2


def gradient(f, x, step=1e-6):
    """Central-difference gradient of scalar f: R^n -> R."""
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = step
        g[i] = (f(x + e) - f(x - e)) / (2.0 * step)
    return g


def series_derivative(y, step):
    """First derivative of a uniformly sampled series, 4th-order interior stencil.

    Returns an array of the same shape with the two first/last samples set to nan.
    """
    y = np.asarray(y, dtype=float)
    d = np.full_like(y, np.nan)
    d[2:-2] = (y[:-4] - 8.0 * y[1:-3] + 8.0 * y[3:-1] - y[4:]) / (12.0 * step)
    return d


def series_second_derivative(y, step):
    """Second derivative of a uniformly sampled series, 4th-order interior stencil."""
    y = np.asarray(y, dtype=float)
    d = np.full_like(y, np.nan)
    d[2:-2] = (
        -y[:-4] + 16.0 * y[1:-3] - 30.0 * y[2:-2] + 16.0 * y[3:-1] - y[4:]
    ) / (12.0 * step**2)
    return d
