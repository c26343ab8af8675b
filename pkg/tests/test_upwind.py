import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypstab import (
    BoundaryCoupling,
    ConstantSpeeds,
    DegenerateSystemError,
    Mesh,
    SaintVenantSpeeds,
    StateField,
    StepCoefficients,
    SystemSpec,
    Topology,
    TopologyError,
    apply_boundaries,
    cfl_time_step,
    make_example,
    monitor_bounds,
    simulate,
    upwind_step,
)

LAM1 = 2.5 + math.sqrt(40.0)


def scalar_spec(lam=1.0, b=0.0, delta=1.0):
    src = (b,) if b else ()
    return SystemSpec(p=1, m=1, speeds=ConstantSpeeds((lam,)), source=src, delta=delta)


class TestCflTimeStep:
    def test_unit_speed(self):
        assert cfl_time_step(scalar_spec(1.0), Mesh(100), 1.0) == pytest.approx(0.01)

    def test_half_courant(self):
        assert cfl_time_step(scalar_spec(2.0), Mesh(10), 0.5) == pytest.approx(0.025)

    def test_shallow_water_speed(self):
        spec = SystemSpec(p=2, m=1,
                          speeds=ConstantSpeeds((LAM1, 2.5 - math.sqrt(40.0))))
        dt = cfl_time_step(spec, Mesh(100), 1.0)
        assert dt == pytest.approx(1.13320e-3, abs=1e-8)

    def test_horizon_landing_exact(self):
        spec = SystemSpec(p=2, m=1,
                          speeds=ConstantSpeeds((LAM1, 2.5 - math.sqrt(40.0))))
        dt = cfl_time_step(spec, Mesh(100), 1.0, T=6.0)
        n = 6.0 / dt
        assert n == pytest.approx(round(n), abs=1e-9)
        assert dt <= 1.13320e-3 * (1 + 1e-12)

    def test_source_guard(self):
        spec = scalar_spec(1.0, b=5.0)
        mesh = Mesh(10)
        dt = cfl_time_step(spec, mesh, 1.0)
        assert dt * 1.0 / mesh.dx + dt * 5.0 <= 1.0 + 1e-12

    def test_degenerate_speed(self):
        with pytest.raises(DegenerateSystemError):
            cfl_time_step(scalar_spec(0.0), Mesh(10), 1.0)


class TestApplyBoundaries:
    def test_same_index_positive(self):
        state = StateField.zeros(1, 8, 2)
        state.values[0, 8, :] = 1.0
        apply_boundaries(state, BoundaryCoupling(Topology.SAME_INDEX, (0.75,)), 1)
        assert np.all(state.values[0, 0, :] == 0.75)

    def test_same_index_negative_family(self):
        state = StateField.zeros(2, 8, 2)
        state.values[1, 1, :] = 2.0
        bc = BoundaryCoupling(Topology.SAME_INDEX, (0.8, 0.5))
        apply_boundaries(state, bc, 1)
        assert np.all(state.values[1, 9, :] == 1.0)

    def test_zero_gain_propagates_zero(self):
        state = StateField.zeros(1, 8, 2)
        state.values[0, 8, :] = 3.0
        apply_boundaries(state, BoundaryCoupling(Topology.SAME_INDEX, (0.0,)), 1)
        assert np.all(state.values[0, 0, :] == 0.0)

    def test_cross_coupling(self):
        state = StateField.zeros(2, 8, 2)
        state.values[1, 1, :] = 2.0
        state.values[0, 8, :] = 1.0
        bc = BoundaryCoupling(Topology.CROSS_2X2, (0.6, 0.6))
        apply_boundaries(state, bc, 1)
        assert np.all(state.values[0, 0, :] == pytest.approx(1.2))
        assert np.all(state.values[1, 9, :] == pytest.approx(0.6))

    def test_cross_needs_two_components(self):
        state = StateField.zeros(1, 8, 2)
        with pytest.raises(TopologyError):
            apply_boundaries(state, BoundaryCoupling(Topology.CROSS_2X2, (0.6, 0.6)), 1)


class TestUpwindStep:
    def test_exact_shift_at_unit_courant(self):
        rng = np.random.default_rng(11)
        state = StateField.zeros(1, 16, 3)
        state.values[0, 0:17, :] = rng.uniform(-1, 1, (17, 4))
        bc = BoundaryCoupling(Topology.SAME_INDEX, (0.75,))
        before = state.values[0, 0:16, :].copy()
        new = upwind_step(state, scalar_spec(1.0), bc, dt=1.0 / 16)
        # u - 1*(u - u_prev) costs at most one rounding of the difference
        assert np.max(np.abs(new.values[0, 1:17, :] - before)) <= 2 ** -50

    def test_convex_combination_identity(self):
        rng = np.random.default_rng(5)
        state = StateField.zeros(1, 32, 4)
        state.values[0, 0:33, :] = rng.uniform(-1, 1, (33, 5))
        bc = BoundaryCoupling(Topology.SAME_INDEX, (0.5,))
        D = 0.375
        new = upwind_step(state, scalar_spec(1.0), bc, dt=D / 32)
        u = state.values[0]
        expected = u[1:33] * (1 - D) + u[0:32] * D
        np.testing.assert_allclose(new.values[0, 1:33, :], expected,
                                   rtol=0, atol=1e-15)

    def test_half_courant_midpoint(self):
        state = StateField.zeros(1, 4, 1)
        state.values[0, 2, :] = 1.0    # neighbor at j=1 is zero
        bc = BoundaryCoupling(Topology.SAME_INDEX, (0.0,))
        new = upwind_step(state, scalar_spec(1.0), bc, dt=0.5 / 4)
        assert new.values[0, 2, 0] == pytest.approx(0.5)

    def test_constant_state_pure_damping(self):
        # zero spatial difference: one step multiplies by (1 - dt*b) exactly
        state = StateField.zeros(1, 8, 2)
        state.values[0, :, :] = 1.0
        bc = BoundaryCoupling(Topology.SAME_INDEX, (1.0,))
        spec = scalar_spec(lam=0.7, b=0.1)
        new = upwind_step(state, spec, bc, dt=0.1)
        assert np.allclose(new.values[0, 1:9, :], 0.99, atol=1e-15)

    def test_appendix_damping_factor_per_step(self):
        cfg = make_example(4, sigma=0.5, dx=0.05)
        spec = SystemSpec(p=2, m=1, speeds=cfg.system.speeds, source=(0.2, 0.2),
                          delta=cfg.system.delta)
        state = StateField.zeros(2, 20, 2)
        state.values[:, :, :] = 0.5
        bc = BoundaryCoupling(Topology.SAME_INDEX, (1.0, 1.0))
        dt = 0.01
        new = upwind_step(state, spec, bc, dt)
        assert np.allclose(new.values[:, 1:21, :], 0.5 * (1 - dt * 0.2), atol=1e-15)

    def test_negative_family_upwinds_from_right(self):
        lam2 = -2.0
        spec = SystemSpec(p=2, m=1, speeds=ConstantSpeeds((1.0, lam2)))
        state = StateField.zeros(2, 8, 1)
        state.values[1, 5, 0] = 1.0
        bc = BoundaryCoupling(Topology.SAME_INDEX, (0.0, 0.0))
        new = upwind_step(state, spec, bc, dt=0.25 / 8 / 2)
        # mass moves left: slot 4 rises, slot 5 falls
        assert new.values[1, 4, 0] > 0
        assert new.values[1, 5, 0] < 1.0


class TestStepCoefficients:
    def test_constant_speeds_tight(self):
        spec = SystemSpec(p=2, m=1,
                          speeds=ConstantSpeeds((LAM1, 2.5 - math.sqrt(40.0))))
        mesh = Mesh(100)
        dt = cfl_time_step(spec, mesh, 1.0)
        co = StepCoefficients.from_spec(spec, mesh, dt)
        assert co.dmax[0] == pytest.approx(1.0)
        assert co.dmin[0] == pytest.approx(co.dmax[0])
        assert co.dmax[1] == pytest.approx(0.433400, abs=1e-6)

    def test_courant_field_in_unit_interval(self):
        speeds = SaintVenantSpeeds(vbar=2.5, g=10.0, hbar=4.0)
        spec = SystemSpec(p=2, m=1, speeds=speeds, delta=0.5)
        mesh = Mesh(16)
        dt = cfl_time_step(spec, mesh, 1.0)
        co = StepCoefficients.from_spec(spec, mesh, dt)
        rng = np.random.default_rng(2)
        state = StateField.zeros(2, 16, 2)
        state.values[:, 1:17, :] = rng.uniform(-0.5, 0.5, (2, 16, 3))
        D = co.courant_field(state, spec)
        assert np.all(D > 0)
        assert np.all(D <= 1.0 + 1e-12)
        assert np.all(D <= co.dmax[:, None, None] + 1e-12)
        assert np.all(D >= co.dmin[:, None, None] - 1e-12)


class TestMonitors:
    def test_linear_derivative_bound_is_constant(self):
        state = StateField.zeros(1, 8, 2)
        spec = scalar_spec(delta=0.5)
        rep = monitor_bounds(state, spec, n=100, dt=0.01, jmax=(0.0,))
        assert rep.deriv_bound == pytest.approx(0.5)

    def test_initial_sup_of_first_example(self):
        cfg = make_example(1, sigma=0.5, dx=0.1)
        x = np.arange(11) / 10
        xi = np.linspace(-0.5, 0.5, 11)
        vals = cfg.psi(x, xi)
        assert np.max(np.abs(vals)) == pytest.approx(0.25)

    def test_constant_data_zero_derivative(self):
        state = StateField.zeros(1, 8, 2)
        state.values[0, :, :] = 0.3
        rep = monitor_bounds(state, scalar_spec(), n=0, dt=0.01, jmax=(0.0,))
        assert rep.deriv_sup == 0.0
        assert rep.deriv_ok


class TestSimulateBasics:
    def test_zero_data_stays_zero(self):
        cfg = make_example(1, sigma=0.5, dx=0.1).with_overrides(
            T=1.0, psi=lambda x, xi: np.zeros((1, len(x), len(xi))))
        traj = simulate(cfg)
        assert np.all(traj.lyapunov == 0.0)

    def test_exact_transport_at_unit_courant(self):
        # scalar unit-speed run at Courant 1 is exact recycling: after M steps
        # every interior value is the gain times its value one cycle earlier
        cfg = make_example(1, sigma=0.5, dx=0.05, K=4).with_overrides(T=2.0)
        traj = simulate(cfg)
        M = cfg.M
        L = traj.lyapunov
        assert L[M] == pytest.approx(0.75 ** 2 * L[0], rel=1e-12)
        assert L[2 * M] == pytest.approx(0.75 ** 4 * L[0], rel=1e-12)

    @given(st.floats(min_value=0.2, max_value=0.99))
    @settings(max_examples=10, deadline=None)
    def test_sup_never_grows(self, kappa):
        cfg = make_example(1, sigma=0.5, dx=0.1, K=4).with_overrides(
            T=1.0, bc=BoundaryCoupling(Topology.SAME_INDEX, (kappa,)))
        traj = simulate(cfg)
        assert np.max(traj.sup_norms) <= traj.sup_norms[0] + 1e-14
