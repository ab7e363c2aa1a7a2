"""Canonical maps: frozen worked examples and identity residuals."""
import math

import numpy as np
import pytest

from maupertuis import transforms
from maupertuis.dynamics import (
    PhaseState,
    hamiltonian_flow_field,
    integrate,
    perihelion_state,
)
from maupertuis.errors import (
    EnergySurfaceViolation,
    OriginSingularity,
    PositiveEnergy,
    ZeroMomentum,
)
from maupertuis.geometry import SystemSpec


# -- the planar square map --------------------------------------------------------


def test_bohlin_map_worked_example():
    z, big_p = transforms.bohlin_map(np.array([1.0, 1.0]), np.array([1.0, 0.0]))
    np.testing.assert_allclose(z, [0.0, 1.0], atol=1e-15)
    np.testing.assert_allclose(big_p, [0.5, 0.5], atol=1e-15)


def test_bohlin_map_batch_shapes():
    rng = np.random.default_rng(7)
    q = rng.normal(size=(40, 2))
    p = rng.normal(size=(40, 2))
    z, big_p = transforms.bohlin_map(q, p)
    assert z.shape == big_p.shape == (40, 2)
    # z is the complex square of q/sqrt(2): |z| = |q|^2/2
    np.testing.assert_allclose(np.linalg.norm(z, axis=1),
                               0.5 * np.einsum("ij,ij->i", q, q), rtol=1e-13)


def test_bohlin_map_origin_guard():
    with pytest.raises(OriginSingularity):
        transforms.bohlin_map(np.zeros(2), np.array([1.0, 0.0]))


def test_bohlin_identity_random_points():
    rng = np.random.default_rng(11)
    q = rng.normal(size=(500, 2))
    p = rng.normal(size=(500, 2))
    keep = np.linalg.norm(q, axis=1) > 0.1
    res = transforms.bohlin_identity_residual(q[keep], p[keep])
    kinetic = np.einsum("ij,ij->i", p[keep], p[keep]) / np.einsum(
        "ij,ij->i", q[keep], q[keep])
    assert np.max(res / (kinetic + 1e-30)) < 1e-13


def test_bohlin_zero_level_correspondence():
    h_osc, h_kep = transforms.bohlin_hamiltonians(1.0, 2.0)
    q = np.array([1.0, 1.0])
    p = np.array([math.sqrt(2.0), 0.0])
    assert h_osc(q, p) == pytest.approx(0.0, abs=1e-15)
    z, big_p = transforms.bohlin_map(q, p)
    assert h_kep(z, big_p) == pytest.approx(0.0, abs=1e-14)


def test_bohlin_hamiltonian_proportionality():
    # H_kep(image) = 2 H_osc / |q|^2 identically, not just at zero level
    h_osc, h_kep = transforms.bohlin_hamiltonians(0.7, 1.3)
    rng = np.random.default_rng(23)
    for _ in range(50):
        q = rng.normal(size=2)
        p = rng.normal(size=2)
        if np.linalg.norm(q) < 0.1:
            continue
        z, big_p = transforms.bohlin_map(q, p)
        lhs = h_kep(z, big_p)
        rhs = 2.0 * h_osc(q, p) / float(q @ q)
        assert lhs == pytest.approx(rhs, abs=1e-12)


# -- swap map ----------------------------------------------------------------------


def test_houri_swap_involution():
    state = PhaseState(x=np.array([0.3, -0.8, 0.1]),
                       p=np.array([1.1, 0.0, -0.4]))
    twice = transforms.houri_swap(transforms.houri_swap(state))
    np.testing.assert_array_equal(twice.x, state.x)
    np.testing.assert_array_equal(twice.p, state.p)


def test_houri_hamiltonian_circular_value():
    spec = SystemSpec(family="kepler", energy=-0.5, dim=3)
    state = PhaseState(x=np.array([1.0, 0.0, 0.0]), p=np.array([0.0, 1.0, 0.0]))
    swapped = transforms.houri_swap(state)
    val = transforms.houri_hamiltonian(spec, swapped)
    assert val == pytest.approx(spec.alpha**2, rel=1e-14)


def test_houri_hamiltonian_equals_alpha_sq_on_surface():
    spec = SystemSpec(family="kepler", energy=-0.5, dim=3)
    rng = np.random.default_rng(5)
    for _ in range(100):
        x = rng.normal(size=3)
        r = np.linalg.norm(x)
        if not 0.3 < r < 1.9:  # bound region for E = -1/2
            continue
        lam = spec.lam(r)
        direction = rng.normal(size=3)
        p = direction / np.linalg.norm(direction) * math.sqrt(2.0 * lam)
        swapped = transforms.houri_swap(PhaseState(x=x, p=p))
        val = transforms.houri_hamiltonian(spec, swapped)
        assert val == pytest.approx(spec.alpha**2, rel=1e-12)


def test_houri_hamiltonian_requires_unit_mass():
    spec = SystemSpec(family="kepler", energy=-0.5, mass=2.0)
    state = PhaseState(x=np.array([1.0, 0.0]), p=np.array([0.0, 1.0]))
    with pytest.raises(ValueError):
        transforms.houri_hamiltonian(spec, state)


# -- momentum inversion --------------------------------------------------------------


def test_milnor_invert_involution():
    rng = np.random.default_rng(2)
    p = rng.normal(size=(30, 2)) + 0.2
    np.testing.assert_allclose(
        transforms.milnor_invert(transforms.milnor_invert(p)), p, rtol=1e-13)
    with pytest.raises(ZeroMomentum):
        transforms.milnor_invert(np.zeros(2))


def test_milnor_series_residuals_on_regularized_orbit():
    spec, state = perihelion_state(SystemSpec(family="kepler"), 1.0, 0.3)
    system = transforms.levi_civita_system(spec)
    traj = integrate(system, state, (0.0, 2.0 * math.pi), method="rk4-fixed",
                     step=1e-4)
    out = transforms.milnor_series(traj, spec)
    assert np.max(out["speed_residual"]) < 1e-5
    assert np.max(out["momentum_rate_residual"]) < 1e-6
    assert np.max(out["reconstruction_error"]) < 1e-4


def test_milnor_series_rejects_nonuniform_grid():
    spec, state = perihelion_state(SystemSpec(family="kepler"), 1.0, 0.3)
    traj = integrate(transforms.levi_civita_system(spec), state, (0.0, 1.0),
                     method="rk4-fixed", step=1e-3)
    traj.param = traj.param**1.01  # warp the grid
    with pytest.raises(ValueError):
        transforms.milnor_series(traj, spec)


def test_milnor_reconstruct_worked_value():
    # circular orbit at E = -1/2: p = (0, 1) so w = (0, 1), w' = dw/dsigma;
    # with |w| = 1 and w.w' = 0, x = -4 alpha w' / (1 - 2E)^2 = -w'
    spec = SystemSpec(family="kepler", energy=-0.5)
    w = np.array([0.0, 1.0])
    wprime = np.array([-1.0, 0.0])
    x = transforms.milnor_reconstruct(w, wprime, spec.energy, spec.alpha)
    np.testing.assert_allclose(x, [1.0, 0.0], atol=1e-15)


# -- the quadratic integral and its normalized flow ------------------------------------


def test_moser_liouville_frozen_value():
    spec = SystemSpec(family="kepler", energy=-0.5, dim=3)
    y = transforms.moser_liouville(spec, np.array([3.0, 4.0, 0.0]))
    assert y == pytest.approx(0.2, rel=1e-15)


def test_moser_h0_vanishes_on_surface():
    spec = SystemSpec(family="kepler", energy=-0.5)
    state = PhaseState(x=np.array([1.0, 0.0]), p=np.array([0.0, 1.0]))
    assert transforms.moser_h0(spec, state.x, state.p) == pytest.approx(
        0.0, abs=1e-15)


def test_moser_f_frozen_off_surface_value():
    spec = SystemSpec(family="kepler", energy=-0.5)
    x = np.array([0.6, 0.8])
    p = np.array([2.0, 0.0])
    assert transforms.moser_f(spec, x, p) == pytest.approx(25.0 / 8.0,
                                                           rel=1e-14)


def test_moser_f_half_on_surface():
    spec = SystemSpec(family="kepler", energy=-0.5)
    rng = np.random.default_rng(17)
    for _ in range(50):
        x = rng.normal(size=2)
        r = np.linalg.norm(x)
        if not 0.3 < r < 1.9:
            continue
        u = rng.normal(size=2)
        p = u / np.linalg.norm(u) * math.sqrt(2.0 * spec.lam(r))
        assert transforms.moser_f(spec, x, p) == pytest.approx(0.5, abs=1e-12)


def test_moser_flow_matches_normalized_kepler_flow():
    spec = SystemSpec(family="kepler", energy=-0.5)
    rng = np.random.default_rng(29)
    worst = 0.0
    for _ in range(200):
        x = rng.normal(size=2)
        r = np.linalg.norm(x)
        if not 0.3 < r < 1.9:
            continue
        u = rng.normal(size=2)
        p = u / np.linalg.norm(u) * math.sqrt(2.0 * spec.lam(r))
        worst = max(worst, transforms.moser_flow_residual(spec, x, p))
    assert worst < 1e-10


def test_moser_flow_residual_rejects_off_surface():
    spec = SystemSpec(family="kepler", energy=-0.5)
    with pytest.raises(EnergySurfaceViolation):
        transforms.moser_flow_residual(spec, np.array([1.0, 0.0]),
                                       np.array([0.0, 2.0]))


def test_reeb_field_is_unit_clock():
    # X_H/Y integrated in tau advances t at rate 1/Y = r/beta
    spec = SystemSpec(family="kepler", energy=-0.5)
    x = np.array([1.0, 0.0])
    p = np.array([0.0, 1.0])
    dx, dp = transforms.reeb_field(spec, x, p)
    np.testing.assert_allclose(dx, [0.0, 1.0], atol=1e-14)
    np.testing.assert_allclose(dp, [-1.0, 0.0], atol=1e-14)


def test_moser_f_system_flow_is_hamiltonian():
    spec = SystemSpec(family="kepler", energy=-0.5)
    system = transforms.moser_f_system(spec)
    state = PhaseState(x=np.array([0.9, 0.2]), p=np.array([0.1, 1.1]))
    dx, dp = hamiltonian_flow_field(system, state)
    from maupertuis import numdiff
    fd_x = numdiff.gradient(
        lambda xx: transforms.moser_f(spec, xx, state.p), state.x, step=1e-6)
    fd_p = numdiff.gradient(
        lambda pp: transforms.moser_f(spec, state.x, pp), state.p, step=1e-6)
    np.testing.assert_allclose(dx, fd_p, atol=1e-8)
    np.testing.assert_allclose(dp, -fd_x, atol=1e-8)


def test_quadratic_integral_constant_along_kepler_flow():
    spec, state = perihelion_state(SystemSpec(family="kepler"), 1.0, 0.4)
    from maupertuis.dynamics import newtonian_system
    traj = integrate(newtonian_system(spec), state, (0.0, 10.0),
                     method="rk4-fixed", step=1e-3, stride=20)
    vals = np.array([transforms.moser_f(spec, x, p)
                     for x, p in zip(traj.x, traj.p)])
    assert np.max(np.abs(vals - 0.5)) < 1e-10


# -- LRL vector and the anomaly clock ---------------------------------------------------


def test_lrl_perihelion_frozen_value():
    spec, state = perihelion_state(SystemSpec(family="kepler"), 4.0 / 3.0, 0.5)
    a = transforms.lrl_vector(spec, state.x, state.p)
    np.testing.assert_allclose(a, [0.5, 0.0], atol=1e-14)


def test_lrl_magnitude_is_eccentricity():
    spec, state = perihelion_state(SystemSpec(family="kepler"), 1.0, 0.3)
    from maupertuis.dynamics import newtonian_system
    traj = integrate(newtonian_system(spec), state, (0.0, 5.0),
                     method="rk4-fixed", step=1e-3, stride=100)
    a = transforms.lrl_vector(spec, traj.x, traj.p)
    np.testing.assert_allclose(np.linalg.norm(a, axis=1), 0.3, atol=1e-10)


def test_anomaly_frequency_guards():
    assert transforms.anomaly_frequency(
        SystemSpec(family="kepler", energy=-0.5)) == pytest.approx(1.0)
    with pytest.raises(PositiveEnergy):
        transforms.anomaly_frequency(SystemSpec(family="kepler", energy=0.1))


def test_anomaly_oscillator_residual():
    spec, state = perihelion_state(SystemSpec(family="kepler"), 4.0 / 3.0, 0.5)
    traj = integrate(transforms.anomaly_system(spec), state,
                     (0.0, 2.0 * math.pi), method="rk4-fixed", step=1e-3)
    _, res = transforms.anomaly_residual(traj, spec)
    assert np.max(res) < 1e-5


def test_anomaly_period_is_two_pi():
    # one anomaly cycle covers one radial period: t advances by T
    from maupertuis.dynamics import kepler_period
    spec, state = perihelion_state(SystemSpec(family="kepler"), 4.0 / 3.0, 0.5)
    traj = integrate(transforms.anomaly_system(spec), state,
                     (0.0, 2.0 * math.pi), method="rk4-fixed", step=1e-4)
    assert traj.t[-1] == pytest.approx(kepler_period(spec), rel=1e-9)
    np.testing.assert_allclose(traj.x[-1], state.x, atol=1e-8)


# -- swap-image generator ------------------------------------------------------------------


def test_regularized_g_vanishes_on_swapped_surface():
    spec = SystemSpec(family="kepler", energy=-0.5, dim=3)
    rng = np.random.default_rng(41)
    count = 0
    for _ in range(200):
        x = rng.normal(size=3)
        r = np.linalg.norm(x)
        if not 0.3 < r < 1.9:
            continue
        u = rng.normal(size=3)
        p = u / np.linalg.norm(u) * math.sqrt(2.0 * spec.lam(r))
        sw = transforms.houri_swap(PhaseState(x=x, p=p))
        assert abs(transforms.regularized_g(spec, sw.x, sw.p)) < 1e-12
        count += 1
    assert count > 50


def test_regularized_g_gradients_match_fd():
    from maupertuis import numdiff
    spec = SystemSpec(family="kepler", energy=-0.5)
    system = transforms.regularized_g_system(spec)
    x = np.array([0.4, -0.7])
    p = np.array([1.2, 0.3])
    fd_x = numdiff.gradient(lambda xx: transforms.regularized_g(spec, xx, p),
                            x, step=1e-6)
    fd_p = numdiff.gradient(lambda pp: transforms.regularized_g(spec, x, pp),
                            p, step=1e-6)
    np.testing.assert_allclose(system.grad_x(x, p), fd_x, atol=1e-8)
    np.testing.assert_allclose(system.grad_p(x, p), fd_p, atol=1e-8)
    with pytest.raises(ZeroMomentum):
        transforms.regularized_g(spec, x, np.zeros(2))


# -- momentum-space Kepler flow ---------------------------------------------------------


def test_momentum_kepler_frozen_triple():
    x = np.array([1.0, 0.0, 0.0])
    p = np.array([0.0, 1.0, 0.0])
    assert transforms.momentum_kepler_value(1.0, x, p) == pytest.approx(1.0)
    (dx, dp), (dxr, dpr) = transforms.momentum_kepler_field(1.0, x, p)
    np.testing.assert_allclose(dx, [0.0, 2.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(dp, [-2.0, 0.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(dxr, [0.0, 1.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(dpr, [-1.0, 0.0, 0.0], atol=1e-15)


def test_momentum_kepler_requires_positive_curvature():
    with pytest.raises(ValueError):
        transforms.momentum_kepler_system(-1.0)


def test_rescaled_field_has_unit_speed_on_momentum_sphere():
    # |dp_r| = k |x|: the rescaled flow moves p along a sphere at fixed rate
    rng = np.random.default_rng(3)
    for _ in range(20):
        x = rng.normal(size=3)
        p = rng.normal(size=3)
        if np.linalg.norm(p) < 0.3:
            continue
        _, (dxr, dpr) = transforms.momentum_kepler_field(0.7, x, p)
        assert np.linalg.norm(dpr) == pytest.approx(0.7 * np.linalg.norm(x),
                                                    rel=1e-12)


def test_quasi_hamiltonian_residual_small():
    rng = np.random.default_rng(19)
    worst = 0.0
    for _ in range(100):
        x = rng.normal(size=3)
        p = rng.normal(size=3)
        if np.linalg.norm(p) < 0.3:
            continue
        worst = max(worst,
                    transforms.quasi_hamiltonian_residual(1.0, x, p))
    assert worst < 1e-8
