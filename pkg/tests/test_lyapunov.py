import math

import numpy as np
import pytest

from hypstab import (
    REGIME_CROSS,
    REGIME_GENERAL,
    REGIME_LINEAR,
    UNBOUNDED_RATE,
    InadmissibleGainError,
    LyapunovWeights,
    Mesh,
    StateField,
    Trajectory,
    UndefinedRateError,
    admissible_mu,
    decay_envelope_error,
    delta_threshold,
    empirical_nu,
    lyapunov_value,
    theoretical_nu,
    uniform_random_ensemble,
)


class TestAdmissibleMu:
    def test_linear_closed_form(self):
        w = admissible_mu((0.75,), (1.0,), (1.0,), REGIME_LINEAR, 0.01)
        assert w.mu[0] == pytest.approx(math.log(0.75 ** -2), abs=1e-12)
        assert w.mu[0] == pytest.approx(0.575364, abs=1e-6)

    def test_linear_rejects_unit_gain(self):
        with pytest.raises(InadmissibleGainError):
            admissible_mu((1.0,), (1.0,), (1.0,), REGIME_LINEAR, 0.01)

    def test_linear_gain_near_one_degenerates(self):
        w = admissible_mu((1.0 - 1e-9,), (1.0,), (1.0,), REGIME_LINEAR, 0.01)
        assert 0 < w.mu[0] < 1e-8

    def test_negative_gain_same_magnitude(self):
        pos = admissible_mu((0.75,), (1.0,), (1.0,), REGIME_LINEAR, 0.01)
        neg = admissible_mu((-0.75,), (1.0,), (1.0,), REGIME_LINEAR, 0.01)
        assert pos.mu == neg.mu

    def test_zero_gain_unbounded(self):
        w = admissible_mu((0.0,), (1.0,), (1.0,), REGIME_LINEAR, 0.01)
        assert w.mu[0] == UNBOUNDED_RATE

    def test_general_bound_names_inequality(self):
        with pytest.raises(InadmissibleGainError, match="Dmin/Dmax"):
            admissible_mu((0.9,), (0.5,), (1.0,), REGIME_GENERAL, 0.01)

    def test_cross_example_values(self):
        # D1 = 1, D2 = |lam2|/lam1 at unit Courant number
        lam1 = 2.5 + math.sqrt(40.0)
        d2 = (math.sqrt(40.0) - 2.5) / lam1
        w = admissible_mu((0.6, 0.6), (1.0, d2), (1.0, d2), REGIME_CROSS, 0.01)
        assert w.mu[0] == pytest.approx(0.924248, abs=5e-6)
        assert w.mu[0] == w.mu[1]

    def test_cross_rejects_violating_gain(self):
        lam1 = 2.5 + math.sqrt(40.0)
        d2 = (math.sqrt(40.0) - 2.5) / lam1
        with pytest.raises(InadmissibleGainError, match="kappa_2"):
            admissible_mu((0.6, 0.7), (1.0, d2), (1.0, d2), REGIME_CROSS, 0.01)


class TestTheoreticalNu:
    def test_scalar_linear_rate(self):
        w = admissible_mu((0.75,), (1.0,), (1.0,), REGIME_LINEAR, 0.01)
        # dmin encodes dt*|lam|/dx; with lam=1 and unit Courant, dt = dx
        nu = theoretical_nu(w, (1.0,), 0.01, 0.01, REGIME_LINEAR)
        assert nu == pytest.approx(0.572063, abs=1e-6)

    def test_two_component_linear_rate(self):
        lam1 = 2.5 + math.sqrt(40.0)
        lam2 = math.sqrt(40.0) - 2.5
        dt = 0.01 / lam1
        w = admissible_mu((0.8, 0.8), (1.0, dt * lam2 / 0.01),
                          (1.0, dt * lam2 / 0.01), REGIME_LINEAR, 0.01, m=1)
        nu = theoretical_nu(w, (1.0, dt * lam2 / 0.01), 0.01, dt, REGIME_LINEAR)
        assert nu == pytest.approx(1.699, abs=1e-3)

    def test_cross_rate(self):
        lam1 = 2.5 + math.sqrt(40.0)
        d2 = (math.sqrt(40.0) - 2.5) / lam1
        dt = 0.01 / lam1
        w = admissible_mu((0.6, 0.6), (1.0, d2), (1.0, d2), REGIME_CROSS, 0.01)
        nu = theoretical_nu(w, (1.0, d2), 0.01, dt, REGIME_CROSS)
        assert nu == pytest.approx(1.751, abs=1e-3)

    def test_unbounded_sentinel_propagates(self):
        w = admissible_mu((0.0,), (1.0,), (1.0,), REGIME_LINEAR, 0.01)
        assert theoretical_nu(w, (1.0,), 0.01, 0.01, REGIME_LINEAR) == UNBOUNDED_RATE


class TestDeltaThreshold:
    def test_linear_limit(self):
        w = LyapunovWeights(mu=(0.5,), m=1)
        assert delta_threshold(w, (1.0,), (0.0,), 6.0, 0.01, 0.01, 0.25) == 0.25
        assert delta_threshold(w, (1.0,), (0.0,), 6.0, 0.01, 0.01, math.inf) == 1.0

    def test_unit_case(self):
        # mu=1, dmin=1, jmax=1, T=0, dx/(2 dt)=1 -> min(1, eps, 1) = 1
        w = LyapunovWeights(mu=(1.0,), m=1)
        val = delta_threshold(w, (1.0,), (1.0,), 0.0, 2.0, 1.0, math.inf)
        assert val == pytest.approx(1.0)

    def test_gradient_restriction_shrinks(self):
        w = LyapunovWeights(mu=(0.4463,), m=1)
        val = delta_threshold(w, (0.25,), (0.9,), 6.0, 0.01, 0.0005, math.inf)
        assert 0 < val < 0.01


class TestLyapunovValue:
    def test_zero_state(self):
        mesh = Mesh(8)
        ens = uniform_random_ensemble(1.0, 4)
        state = StateField.zeros(1, 8, 4)
        w = LyapunovWeights(mu=(0.3,), m=1)
        assert lyapunov_value(state, w, ens, mesh, 1) == 0.0

    def test_hand_sum_single_cell(self):
        # M=1 rejected by Mesh (needs >= 2); use M=2 with one loaded slot:
        # L = dx*dxi * u^2 * exp(-mu x_1) * rho = 0.5*1.0 * 1 * 1 * 0.5 = 0.25
        mesh = Mesh(2)
        ens = uniform_random_ensemble(1.0, 2)
        state = StateField.zeros(1, 2, 2)
        state.values[0, 1, 1] = 1.0
        w = LyapunovWeights(mu=(0.0,), m=1)
        val = lyapunov_value(state, w, ens, mesh, 1)
        assert val == pytest.approx(0.5 * 1.0 * 1.0 * 0.5, abs=1e-15)

    def test_excludes_first_random_node(self):
        mesh = Mesh(2)
        ens = uniform_random_ensemble(1.0, 2)
        state = StateField.zeros(1, 2, 2)
        state.values[0, 1, 0] = 7.0   # k = 0 carries no quadrature weight
        w = LyapunovWeights(mu=(0.0,), m=1)
        assert lyapunov_value(state, w, ens, mesh, 1) == 0.0

    def test_sandwich_bounds(self):
        rng = np.random.default_rng(7)
        mesh = Mesh(16)
        ens = uniform_random_ensemble(0.5, 8)
        state = StateField.zeros(1, 16, 8)
        state.values[0, 1:17, :] = rng.uniform(-1, 1, (16, 9))
        mu = 0.6
        w = LyapunovWeights(mu=(mu,), m=1)
        weighted = lyapunov_value(state, w, ens, mesh, 1)
        plain = lyapunov_value(state, LyapunovWeights(mu=(0.0,), m=1), ens, mesh, 1)
        x_last = mesh.x[16]
        assert math.exp(-mu * x_last) * plain <= weighted * (1 + 1e-12)
        assert weighted <= plain * (1 + 1e-12)

    def test_matches_direct_quadrature(self):
        rng = np.random.default_rng(3)
        mesh = Mesh(12)
        ens = uniform_random_ensemble(2.0, 5)
        state = StateField.zeros(2, 12, 5)
        state.values[:, 1:13, :] = rng.normal(size=(2, 12, 6))
        w = LyapunovWeights(mu=(0.3, 0.7), m=1)
        got = lyapunov_value(state, w, ens, mesh, 1)
        x = mesh.x
        expected = 0.0
        for i in range(2):
            sign = -1 if i < 1 else 1
            for j in range(1, 13):
                for k in range(1, 6):
                    expected += (state.values[i, j, k] ** 2
                                 * math.exp(sign * w.mu[i] * x[j])
                                 * ens.density[k])
        expected *= mesh.dx * ens.dxi
        assert got == pytest.approx(expected, rel=1e-13)


class TestEmpiricalNu:
    def test_log_identity(self):
        assert empirical_nu(1.0, math.exp(-12.0), 12.0) == pytest.approx(1.0)

    def test_zero_start_rejected(self):
        with pytest.raises(UndefinedRateError):
            empirical_nu(0.0, 1.0, 1.0)

    def test_envelope_error_zero_on_exact_decay(self):
        t = np.linspace(0, 3, 50)
        nu = 0.7
        L = np.exp(-nu * t) * 2.0
        traj = Trajectory(times=t, lyapunov=L, sup_norms=np.zeros(50),
                          deriv_sups=np.zeros(50))
        assert decay_envelope_error(traj, nu) <= 1e-15

    def test_envelope_error_detects_gap(self):
        t = np.array([0.0, 1.0, 2.0])
        L = np.array([1.0, 0.6, 0.36])
        traj = Trajectory(times=t, lyapunov=L, sup_norms=np.zeros(3),
                          deriv_sups=np.zeros(3))
        nu = 1.0
        expected = max(abs(math.exp(-nu * ti) - Li) for ti, Li in zip(t, L))
        assert decay_envelope_error(traj, nu) == pytest.approx(expected)
