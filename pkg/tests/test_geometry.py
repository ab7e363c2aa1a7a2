"""Metric construction, Christoffel symbols, curvature, orbit classification."""
import numpy as np
import pytest

from maupertuis.errors import HillBoundaryViolation
from maupertuis.geometry import (
    ConformalMetric,
    SystemSpec,
    christoffel,
    christoffel_fd,
    classify_orbit,
    curvature_scan,
    flat_metric,
    gaussian_curvature,
    jacobi_radial_metric,
    jm_lift,
    kepler_curvature,
    radial_curvature,
)


def kepler(energy=-0.5, dim=2, **kw):
    return SystemSpec(family="kepler", energy=energy, dim=dim, **kw)


# -- system spec --------------------------------------------------------------------


def test_potential_values():
    spec = kepler()
    assert spec.potential(2.0) == -0.5
    assert spec.dpotential(2.0) == 0.25
    hooke = SystemSpec(family="hooke", energy=1.0, a=2.0, b=0.5)
    assert hooke.potential(1.0) == 2.0 * 0.5 - 0.5
    power = SystemSpec(family="power", c=3.0, n=2.0)
    assert power.potential(2.0) == 12.0
    free = SystemSpec(family="free", energy=1.0)
    assert free.potential(17.0) == 0.0


def test_spec_validation():
    with pytest.raises(ValueError):
        SystemSpec(family="coulomb")
    with pytest.raises(ValueError):
        SystemSpec(family="kepler", dim=4)
    with pytest.raises(ValueError):
        SystemSpec(family="kepler", mass=-1.0)


def test_grad_potential_matches_radial_derivative():
    rng = np.random.default_rng(42)
    for spec in (kepler(), SystemSpec(family="hooke", energy=1.0, a=1.3, b=0.2),
                 SystemSpec(family="power", c=-2.0, n=-1.5, energy=1.0)):
        for _ in range(10):
            x = rng.uniform(0.5, 2.0, size=2) * rng.choice([-1.0, 1.0], size=2)
            r = np.linalg.norm(x)
            expected = float(spec.dpotential(r)) * x / r
            np.testing.assert_allclose(spec.grad_potential(x), expected,
                                       rtol=1e-12, atol=1e-14)


def test_hill_guard_band():
    spec = kepler(energy=-0.5)  # allowed region r < 2
    assert spec.lam(1.0) == pytest.approx(0.5)
    with pytest.raises(HillBoundaryViolation):
        spec.lam(2.0)
    with pytest.raises(HillBoundaryViolation):
        spec.lam(3.0)


# -- metrics and Christoffel symbols -------------------------------------------------


def test_jm_lift_factor():
    spec = kepler(energy=-0.375, mass=2.0)
    g = jm_lift(spec)
    x = np.array([0.8, 0.3])
    lam = -0.375 + 1.0 / np.linalg.norm(x)
    assert g.factor(x) == pytest.approx(2.0 * 2.0 * lam, rel=1e-14)
    comps = g.components(x)
    np.testing.assert_allclose(comps, g.factor(x) * np.eye(2), rtol=1e-14)
    np.testing.assert_allclose(g.inverse(x) @ comps, np.eye(2), atol=1e-14)


def test_jm_lift_rejects_forbidden_points():
    spec = kepler(energy=-0.5)
    g = jm_lift(spec)
    with pytest.raises(HillBoundaryViolation):
        g.factor(np.array([3.0, 0.0]))


def test_christoffel_against_fd_oracle():
    """Closed-form symbols match the generic finite-difference oracle."""
    rng = np.random.default_rng(7)
    metrics = [
        jm_lift(kepler(energy=-0.5)),
        jm_lift(kepler(energy=-0.375, dim=3)),
        jm_lift(SystemSpec(family="hooke", energy=2.0, a=1.0, b=0.0)),
        jm_lift(SystemSpec(family="power", energy=2.0, c=0.5, n=3.0)),
    ]
    for metric in metrics:
        for _ in range(25):
            x = rng.uniform(0.4, 1.2, size=metric.dim)
            x *= rng.choice([-1.0, 1.0], size=metric.dim)
            gam = christoffel(metric, x)
            gam_fd = christoffel_fd(metric, x)
            np.testing.assert_allclose(gam, gam_fd, atol=1e-7)


def test_christoffel_polar_radial():
    spec = kepler(energy=-0.5)
    metric = jacobi_radial_metric(spec)
    rng = np.random.default_rng(11)
    for _ in range(25):
        x = np.array([rng.uniform(0.3, 1.6), rng.uniform(0.0, 2.0 * np.pi)])
        np.testing.assert_allclose(christoffel(metric, x),
                                   christoffel_fd(metric, x), atol=1e-7)


def test_flat_metric_symbols_vanish():
    g = flat_metric(2)
    assert np.all(christoffel(g, np.array([0.3, -1.2])) == 0.0)
    polar = flat_metric(2, base="polar")
    # flat plane in polar coordinates: Gamma^r_thth = -r, Gamma^th_rth = 1/r
    gam = christoffel(polar, np.array([2.0, 0.7]))
    assert gam[0, 1, 1] == pytest.approx(-2.0)
    assert gam[1, 0, 1] == pytest.approx(0.5)
    np.testing.assert_allclose(gam, christoffel_fd(polar, np.array([2.0, 0.7])),
                               atol=1e-8)


# -- curvature -----------------------------------------------------------------------


def test_kepler_curvature_frozen_values():
    # K = -alpha E / (2 (r E + alpha)^3), hand-evaluated rows
    spec = kepler(energy=-0.5)
    assert kepler_curvature(spec, 1.0) == pytest.approx(2.0, rel=1e-15)
    assert kepler_curvature(spec, 0.5) == pytest.approx(0.5 / (2.0 * 0.75**3))
    assert kepler_curvature(spec, 1.5) == pytest.approx(16.0, rel=1e-12)
    hyper = kepler(energy=0.5)
    assert kepler_curvature(hyper, 1.0) == pytest.approx(-2.0 / 27.0, rel=1e-14)


def test_gaussian_curvature_matches_closed_form():
    # grid keeps clear of both the Hill boundary (elliptic case, r = 2) and
    # the short-radius region where the fixed stencil step loses accuracy
    for energy in (-0.5, 0.5):
        spec = kepler(energy=energy)
        metric = jacobi_radial_metric(spec)
        for r in (0.5, 0.7, 0.8, 0.9, 1.0, 1.1):
            k_fd = gaussian_curvature(metric, r)
            k_an = float(kepler_curvature(spec, r))
            assert k_fd == pytest.approx(k_an, rel=1e-10)


def test_gaussian_curvature_parabolic_vanishes():
    spec = kepler(energy=0.0)
    metric = jacobi_radial_metric(spec)
    for r in (0.5, 1.0, 2.0):
        assert abs(gaussian_curvature(metric, r)) < 1e-11


def test_radial_curvature_general_formula():
    spec = kepler(energy=-0.5)
    for r in (0.5, 1.0, 1.5):
        assert radial_curvature(spec, r) == pytest.approx(
            float(kepler_curvature(spec, r)), rel=1e-13)
    hooke = SystemSpec(family="hooke", energy=2.0, a=1.0, b=0.0)
    metric = jacobi_radial_metric(hooke)
    for r in (0.7, 1.1):
        assert radial_curvature(hooke, r) == pytest.approx(
            gaussian_curvature(metric, r), rel=1e-9)


def test_gaussian_curvature_beyond_hill_raises():
    spec = kepler(energy=-0.5)
    metric = jacobi_radial_metric(spec)
    with pytest.raises(HillBoundaryViolation):
        gaussian_curvature(metric, 3.0)


def test_curvature_sign_tracks_energy():
    for energy, sign in ((-0.5, 1.0), (0.0, 0.0), (0.5, -1.0)):
        spec = kepler(energy=energy)
        r = np.linspace(0.4, 1.5, 12)
        k = np.asarray(kepler_curvature(spec, r))
        if sign == 0.0:
            assert np.all(k == 0.0)
        else:
            assert np.all(np.sign(k) == sign)


def test_classify_orbit():
    assert classify_orbit(kepler(energy=-0.1)) == "elliptic"
    assert classify_orbit(kepler(energy=0.0)) == "parabolic"
    assert classify_orbit(kepler(energy=1e-15)) == "parabolic"
    assert classify_orbit(kepler(energy=0.1)) == "hyperbolic"


def test_curvature_scan_flags_forbidden_rows():
    spec = kepler(energy=-0.5)
    r = np.array([0.5, 1.0, 1.9, 2.5])
    report = curvature_scan(spec, r)
    assert report.orbit_class == "elliptic"
    assert list(report.excluded) == [False, False, False, True]
    assert np.isnan(report.curvature[3])
    np.testing.assert_allclose(report.curvature[:3],
                               np.asarray(kepler_curvature(spec, r[:3])),
                               rtol=1e-12)
