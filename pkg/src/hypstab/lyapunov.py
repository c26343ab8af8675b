"""Weighted stochastic energy functionals, admissible weights, and decay rates.

The functional is a density-weighted, exponentially tilted squared-l2 sum of
the solution: positive-speed components carry the weight exp(-mu_i x_j),
negative-speed components exp(+mu_i x_j), summed over j = 1..M and over the
random nodes k = 1..K.  Admissible weight exponents mu_i and the certified
decay rate nu depend on the feedback regime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .grid import Mesh, RandomEnsemble
from .state import StateField

#: sentinel for the "zero gain" case where any decay rate is certifiable
UNBOUNDED_RATE = math.inf

#: feedback regimes with distinct admissibility bounds
REGIME_GENERAL = "general"
REGIME_LINEAR = "linear"
REGIME_CROSS = "cross"


class InadmissibleGainError(ValueError):
    """A feedback gain violates its admissibility inequality (named inside)."""


class UndefinedRateError(ValueError):
    """Empirical rate requested for a trajectory starting at zero energy."""


@dataclass(frozen=True)
class LyapunovWeights:
    """Exponential tilt exponents mu_i, oriented by the sign split m."""

    mu: tuple
    m: int

    def __post_init__(self):
        object.__setattr__(self, "mu", tuple(float(v) for v in self.mu))
        if any(v < 0 for v in self.mu):
            raise ValueError("weight exponents must be nonnegative")

    def spatial_weights(self, mesh: Mesh) -> np.ndarray:
        """Weight table w[i, j] = exp(-+ mu_i x_j) over all grid slots."""
        p = len(self.mu)
        W = np.empty((p, mesh.M + 2))
        for i, mu_i in enumerate(self.mu):
            sign = -1.0 if i < self.m else 1.0
            W[i] = np.exp(sign * mu_i * mesh.x)
        return W


def admissible_mu(kappa, dmin, dmax, regime: str, dx: float,
                  m: int | None = None) -> LyapunovWeights:
    """Largest admissible weight exponents for the given gains and regime.

    Gains must lie strictly inside the admissible interval; negative gains of
    the same magnitude are accepted.  A zero gain leaves its exponent
    unconstrained and is returned as the unbounded sentinel.  ``m`` orients
    the weights for same-index regimes (defaults to all-positive speeds).
    """
    kappa = tuple(float(k) for k in kappa)
    dmin = np.atleast_1d(np.asarray(dmin, dtype=np.float64))
    dmax = np.atleast_1d(np.asarray(dmax, dtype=np.float64))
    p = len(kappa)
    if regime == REGIME_CROSS:
        if p != 2:
            raise InadmissibleGainError("cross regime requires exactly two gains")
        k1, k2 = abs(kappa[0]), abs(kappa[1])
        lim2 = math.sqrt(dmin[1] / dmax[0])
        lim1 = math.sqrt(dmin[0] / dmax[1])
        if k2 >= lim2:
            raise InadmissibleGainError(
                f"|kappa_2| = {k2:.6g} must be below sqrt(Dmin_2/Dmax_1) = {lim2:.6g}"
            )
        if k1 >= lim1:
            raise InadmissibleGainError(
                f"|kappa_1| = {k1:.6g} must be below sqrt(Dmin_1/Dmax_2) = {lim1:.6g}"
            )
        if k1 == 0.0:
            return LyapunovWeights(mu=(UNBOUNDED_RATE, UNBOUNDED_RATE), m=1)
        mut = (1.0 / (2.0 + dx)) * math.log((math.sqrt(dmax[1] / dmin[0]) * k1) ** -2.0)
        return LyapunovWeights(mu=(mut, mut), m=1)

    mu = []
    for i, k in enumerate(kappa):
        a = abs(k)
        if a == 0.0:
            mu.append(UNBOUNDED_RATE)
            continue
        if regime == REGIME_LINEAR:
            if a >= 1.0:
                raise InadmissibleGainError(
                    f"component {i}: |kappa| = {a:.6g} must be below 1"
                )
            mu.append(math.log(a ** -2.0))
        elif regime == REGIME_GENERAL:
            lim = math.sqrt(dmin[i] / dmax[i])
            if a >= lim:
                raise InadmissibleGainError(
                    f"component {i}: |kappa| = {a:.6g} must be below "
                    f"sqrt(Dmin/Dmax) = {lim:.6g}"
                )
            mu.append(math.log((math.sqrt(dmax[i] / dmin[i]) * a) ** -2.0))
        else:
            raise ValueError(f"unknown regime {regime!r}")
    return LyapunovWeights(mu=tuple(mu), m=len(mu) if m is None else m)


def theoretical_nu(weights: LyapunovWeights, dmin, dx: float, dt: float,
                   regime: str) -> float:
    """Certified decay rate for admissible weights.

    Linear same-index feedback admits the sharper bound without the 1/2
    prefactor; the general and cross-coupled regimes carry it.
    """
    dmin = np.atleast_1d(np.asarray(dmin, dtype=np.float64))
    if any(v == UNBOUNDED_RATE for v in weights.mu):
        return UNBOUNDED_RATE
    vals = []
    for i, mu_i in enumerate(weights.mu):
        vals.append(mu_i * dmin[i] * math.exp(-mu_i * dx))
    if regime == REGIME_LINEAR:
        # dmin * dx/dt recovers |Lambda_i| exactly for constant speeds
        return min(v * (dx / dt) for v in vals)
    return (dx / (2.0 * dt)) * min(vals)


def delta_threshold(weights: LyapunovWeights, dmin, jmax, T: float,
                    dx: float, dt: float, epsilon: float) -> float:
    """Sup-norm radius under which the nonlinear decay certificate applies.

    Components with zero speed-gradient bound contribute no restriction; a
    fully gradient-free (linear) system yields min(1, epsilon).
    """
    dmin = np.atleast_1d(np.asarray(dmin, dtype=np.float64))
    jmax = np.atleast_1d(np.asarray(jmax, dtype=np.float64))
    third = math.inf
    for i, mu_i in enumerate(weights.mu):
        if jmax[i] == 0.0:
            continue
        third = min(third, mu_i * dmin[i] * math.exp(-T * jmax[i]) / jmax[i])
    if third != math.inf:
        third = (dx / (2.0 * dt)) * third
    return min(1.0, epsilon, third)


def lyapunov_value(state: StateField, weights: LyapunovWeights,
                   ensemble: RandomEnsemble, mesh: Mesh, m: int) -> float:
    """Evaluate the weighted functional with compensated, fixed-order summation."""
    W2 = weights.spatial_weights(mesh)
    lanes = _kernels.active.lyap_lanes(state.values, W2, 1, state.M + 1)
    return combine_lanes(lanes, ensemble, mesh)


def combine_lanes(lanes: np.ndarray, ensemble: RandomEnsemble, mesh: Mesh) -> float:
    """Fold per-(i, k) lane sums with density weights, skipping node k = 0.

    Neumaier combination in (i, k) order; shared by both kernel backends so
    the reduction order never depends on the backend or worker count.
    """
    rho = ensemble.density
    total = 0.0
    comp = 0.0
    p, Kp = lanes.shape
    for i in range(p):
        lane = lanes[i]
        for k in range(1, Kp):
            x = lane[k] * rho[k]
            t = total + x
            if abs(total) >= abs(x):
                comp += (total - t) + x
            else:
                comp += (x - t) + total
            total = t
    return (mesh.dx * ensemble.dxi) * (total + comp)


def empirical_nu(L0: float, LT: float, T: float) -> float:
    """Endpoint decay-rate estimate -(1/T) ln(L_T / L_0)."""
    if L0 <= 0.0:
        raise UndefinedRateError("initial functional value must be positive")
    if T <= 0.0:
        raise ValueError("horizon must be positive")
    return -math.log(LT / L0) / T


@dataclass
class Trajectory:
    """Per-step record of the run: times, functional values, and monitors."""

    times: np.ndarray
    lyapunov: np.ndarray
    sup_norms: np.ndarray
    deriv_sups: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=np.float64)
        L = np.asarray(self.lyapunov, dtype=np.float64)
        if np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")
        if np.any(L < 0):
            raise ValueError("functional values must be nonnegative")
        self.times = t
        self.lyapunov = L
        self.sup_norms = np.asarray(self.sup_norms, dtype=np.float64)
        self.deriv_sups = np.asarray(self.deriv_sups, dtype=np.float64)

    @property
    def L0(self) -> float:
        return float(self.lyapunov[0])

    @property
    def LT(self) -> float:
        return float(self.lyapunov[-1])

    @property
    def T(self) -> float:
        return float(self.times[-1])

    def empirical_nu(self) -> float:
        return empirical_nu(self.L0, self.LT, self.T)


def decay_envelope_error(traj: Trajectory, nu: float) -> float:
    """Sup over recorded steps of |exp(-nu t_n) L_0 - L_n|."""
    if traj.times.size == 0:
        raise ValueError("empty trajectory")
    envelope = np.exp(-nu * traj.times) * traj.L0
    return float(np.max(np.abs(envelope - traj.lyapunov)))


@dataclass(frozen=True)
class DecayReport:
    """Certified rate, empirical rate, and envelope sup-error for one run."""

    nu: float | None
    nu_emp: float
    E: float

    def __post_init__(self):
        if self.E < 0:
            raise ValueError("envelope error must be nonnegative")
