"""First-order upwind stepping with feedback boundary closure and monitors."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .grid import Mesh, uniform_random_ensemble
from .lyapunov import (
    REGIME_CROSS,
    REGIME_GENERAL,
    REGIME_LINEAR,
    LyapunovWeights,
    Trajectory,
    admissible_mu,
    combine_lanes,
    theoretical_nu,
)
from .state import StateField
from .system import (
    BoundaryCoupling,
    ConstantSpeeds,
    SaintVenantSpeeds,
    SystemSpec,
    Topology,
    TopologyError,
)


class DegenerateSystemError(ValueError):
    """All characteristic speeds vanish on the sampled box."""


def kernel_model(spec: SystemSpec):
    """(kind, params) encoding of the speed model shared by both backends."""
    if isinstance(spec.speeds, ConstantSpeeds):
        return 0, np.asarray(spec.speeds.values, dtype=np.float64)
    if isinstance(spec.speeds, SaintVenantSpeeds):
        s = spec.speeds
        inv2sq = 1.0 / (2.0 * math.sqrt(s.g / s.hbar))
        return 1, np.array([s.vbar, s.g, s.hbar, inv2sq])
    raise TypeError(f"unsupported speed model {type(spec.speeds).__name__}")


@dataclass(frozen=True)
class StepCoefficients:
    """Courant-number extremes over the sup-norm box for a fixed time step."""

    dt: float
    dx: float
    dmin: np.ndarray
    dmax: np.ndarray

    @classmethod
    def from_spec(cls, spec: SystemSpec, mesh: Mesh, dt: float,
                  delta: float | None = None) -> "StepCoefficients":
        lo, hi = spec.speed_extremes(delta)
        return cls(dt=dt, dx=mesh.dx, dmin=dt * lo / mesh.dx, dmax=dt * hi / mesh.dx)

    def courant_field(self, state: StateField, spec: SystemSpec) -> np.ndarray:
        """Per-component/cell/node Courant numbers |Lambda| dt/dx at the state."""
        lam = np.abs(spec.speeds(state.values[:, 1:state.M + 1, :]))
        return (self.dt / self.dx) * lam


def cfl_time_step(spec: SystemSpec, mesh: Mesh, cfl: float,
                  T: float | None = None, delta: float | None = None) -> float:
    """Stable explicit step: cfl*dx/lambda, shrunk for exact horizon landing.

    With diagonal damping the step also satisfies D_i + dt*b_i <= 1 for every
    component, again by shrinking.
    """
    if not (0 < cfl <= 1):
        raise ValueError(f"cfl must lie in (0, 1], got {cfl}")
    lam = spec.max_speed(delta)
    if lam == 0.0:
        raise DegenerateSystemError("largest characteristic speed is zero")
    dt = cfl * mesh.dx / lam
    if spec.has_source:
        _, hi = spec.speed_extremes(delta)
        for lam_i, b_i in zip(hi, spec.source):
            if b_i > 0.0:
                dt = min(dt, 1.0 / (lam_i / mesh.dx + b_i))
    if T is not None:
        n = max(1, int(math.ceil(T / dt - 1e-12)))
        dt = T / n
    return dt


def apply_boundaries(state: StateField, bc: BoundaryCoupling, m: int) -> StateField:
    """Close the inflow slots from the outflow values at the same time level."""
    u = state.values
    M = state.M
    if bc.topology is Topology.SAME_INDEX:
        if len(bc.kappa) != state.p:
            raise TopologyError("same-index coupling needs one gain per component")
        for i in range(state.p):
            if i < m:
                u[i, 0, :] = bc.kappa[i] * u[i, M, :]
            else:
                u[i, M + 1, :] = bc.kappa[i] * u[i, 1, :]
    else:
        if state.p != 2 or m != 1:
            raise TopologyError("cross coupling requires p = 2 with m = 1")
        u[0, 0, :] = bc.kappa[1] * u[1, 1, :]
        u[1, M + 1, :] = bc.kappa[0] * u[0, M, :]
    return state


def upwind_step(state: StateField, spec: SystemSpec, bc: BoundaryCoupling,
                dt: float, out: StateField | None = None) -> StateField:
    """Advance one step: interior upwind sweep, then boundary closure."""
    if out is None:
        out = state.copy()
    kind, params = kernel_model(spec)
    src = np.asarray(spec.source, dtype=np.float64)
    dx = 1.0 / state.M
    _kernels.active.upwind_interior(state.values, out.values, spec.m, dt, dx,
                                    src, kind, params)
    out.time = state.time + dt
    apply_boundaries(out, bc, spec.m)
    return out


@dataclass(frozen=True)
class MonitorReport:
    """Sup-norm and discrete-derivative monitors against their certified bounds."""

    sup: float
    deriv_sup: float
    inflow_deriv: float
    sup_bound: float
    deriv_bound: float

    @property
    def sup_ok(self) -> bool:
        return self.sup <= self.sup_bound + 1e-10

    @property
    def deriv_ok(self) -> bool:
        return self.deriv_sup <= self.deriv_bound + 1e-10


def monitor_bounds(state: StateField, spec: SystemSpec, n: int, dt: float,
                   jmax) -> MonitorReport:
    """Evaluate the induction monitors after step n (report only, never aborts)."""
    jmax = np.atleast_1d(np.asarray(jmax, dtype=np.float64))
    sup, dmax = _kernels.active.family_stats(state.values, spec.m)
    dx = 1.0 / state.M
    u = state.values
    M = state.M
    inflow = 0.0
    for i in range(state.p):
        if i < spec.m:
            d = np.max(np.abs(u[i, 1, :] - u[i, 0, :]))
        else:
            d = np.max(np.abs(u[i, M + 1, :] - u[i, M, :]))
        inflow = max(inflow, float(d))
    growth = math.exp(n * dt * float(jmax.max()))
    return MonitorReport(
        sup=sup,
        deriv_sup=dmax / dx,
        inflow_deriv=inflow / dx,
        sup_bound=spec.delta,
        deriv_bound=spec.delta * growth,
    )


def build_initial_state(config, mesh: Mesh, ensemble) -> StateField:
    """Evaluate the initial profile on interior nodes and close the boundaries."""
    spec = config.system
    state = StateField.zeros(spec.p, mesh.M, ensemble.K)
    vals = config.psi(mesh.x[1:mesh.M + 1], ensemble.nodes)
    vals = np.asarray(vals, dtype=np.float64)
    if vals.shape != (spec.p, mesh.M, ensemble.K + 1):
        raise ValueError(f"initial profile shape {vals.shape} does not match grid")
    state.values[:, 1:mesh.M + 1, :] = vals
    apply_boundaries(state, config.bc, spec.m)
    return state


def prepare_weights(config, coeffs: StepCoefficients):
    """(weights, nu, certified) for the run's feedback regime.

    Uncertified runs (state-dependent speeds whose gains violate the general
    admissibility bound) fall back to the linear-formula weights for
    reporting and carry no certified rate.
    """
    kappa = config.bc.kappa
    dx = coeffs.dx
    if config.regime == REGIME_CROSS:
        w = admissible_mu(kappa, coeffs.dmin, coeffs.dmax, REGIME_CROSS, dx)
        return w, theoretical_nu(w, coeffs.dmin, dx, coeffs.dt, REGIME_CROSS), True
    if config.regime == REGIME_LINEAR:
        w = admissible_mu(kappa, coeffs.dmin, coeffs.dmax, REGIME_LINEAR, dx,
                          m=config.system.m)
        return w, theoretical_nu(w, coeffs.dmin, dx, coeffs.dt, REGIME_LINEAR), True
    if config.regime == REGIME_GENERAL:
        w = admissible_mu(kappa, coeffs.dmin, coeffs.dmax, REGIME_GENERAL, dx,
                          m=config.system.m)
        return w, theoretical_nu(w, coeffs.dmin, dx, coeffs.dt, REGIME_GENERAL), True
    # uncertified: report with the linear-formula weights, no rate claim
    mu = tuple(math.log(abs(k) ** -2.0) if k != 0.0 else math.inf for k in kappa)
    w = LyapunovWeights(mu=mu, m=config.system.m)
    return w, None, False


def simulate(config, recorder=None, weights: LyapunovWeights | None = None) -> Trajectory:
    """Run the first-order scheme over the configured horizon.

    The recorder, if given, receives (t_n, L_n, sup_n, derivsup_n) at every
    recorded level including t = 0.  Functional reductions use a fixed
    traversal order, so results are independent of worker count.
    """
    spec = config.system
    mesh = Mesh(config.M)
    ensemble = uniform_random_ensemble(config.sigma, config.K)
    dt = cfl_time_step(spec, mesh, config.cfl, T=config.T)
    N = int(round(config.T / dt))
    coeffs = StepCoefficients.from_spec(spec, mesh, dt)
    if weights is None:
        weights, nu, certified = prepare_weights(config, coeffs)
    else:
        nu, certified = None, False
    W2 = weights.spatial_weights(mesh)

    state = build_initial_state(config, mesh, ensemble)
    out = state.copy()
    kind, params = kernel_model(spec)
    src = np.asarray(spec.source, dtype=np.float64)

    times = np.empty(N + 1)
    lyap = np.empty(N + 1)
    sups = np.empty(N + 1)
    dsups = np.empty(N + 1)

    def record(n, st):
        lanes = _kernels.active.lyap_lanes(st.values, W2, 1, mesh.M + 1)
        L = combine_lanes(lanes, ensemble, mesh)
        sup, dmax = _kernels.active.family_stats(st.values, spec.m)
        times[n] = st.time
        lyap[n] = L
        sups[n] = sup
        dsups[n] = dmax / mesh.dx
        if not math.isfinite(L):
            st.check_finite()
        if recorder is not None:
            recorder(st.time, L, sup, dmax / mesh.dx)

    record(0, state)
    for n in range(1, N + 1):
        _kernels.active.upwind_interior(state.values, out.values, spec.m, dt,
                                        mesh.dx, src, kind, params)
        out.time = state.time + dt
        apply_boundaries(out, config.bc, spec.m)
        state, out = out, state
        record(n, state)

    meta = {
        "scheme": "upwind",
        "dt": dt,
        "steps": N,
        "dmin": coeffs.dmin,
        "dmax": coeffs.dmax,
        "weights": weights,
        "nu": nu,
        "certified": certified,
        "delta": spec.delta,
        "sup_exceeded_delta": bool(np.max(sups) > spec.delta + 1e-10),
        "final_state": state.values.copy(),
    }
    return Trajectory(times=times, lyapunov=lyap, sup_norms=sups,
                      deriv_sups=dsups, meta=meta)
