"""System description: characteristic speeds, sign split, sources, feedback gains."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

#: lattice points per component dimension for box sampling
BOX_SAMPLES = 5


class Topology(Enum):
    SAME_INDEX = "same-index"
    CROSS_2X2 = "cross-2x2"


class TopologyError(ValueError):
    pass


@dataclass(frozen=True)
class ConstantSpeeds:
    """Constant characteristic speeds, one per component."""

    values: tuple

    def __call__(self, u: np.ndarray) -> np.ndarray:
        lam = np.asarray(self.values, dtype=np.float64)
        return np.broadcast_to(lam.reshape((-1,) + (1,) * (u.ndim - 1)), u.shape).copy()

    @property
    def p(self) -> int:
        return len(self.values)

    @property
    def is_constant(self) -> bool:
        return True


@dataclass(frozen=True)
class SaintVenantSpeeds:
    """State-dependent shallow-water speeds in diagonalizing variables.

    Component 0 travels at vbar + dv + sqrt(g*(hbar + dh)) and component 1 at
    vbar + dv - sqrt(g*(hbar + dh)), with (dh, dv) recovered from the
    diagonalizing transform.
    """

    vbar: float
    g: float
    hbar: float

    def __call__(self, u: np.ndarray) -> np.ndarray:
        if u.shape[0] != 2:
            raise ValueError("state-dependent shallow-water speeds need p = 2")
        sq = np.sqrt(self.g / self.hbar)
        dv = 0.5 * (u[0] + u[1])
        dh = (u[0] - u[1]) / (2.0 * sq)
        depth = self.hbar + dh
        if np.any(depth <= 0):
            raise DryStateError("water depth reached zero")
        c = np.sqrt(self.g * depth)
        return np.stack([self.vbar + dv + c, self.vbar + dv - c])

    @property
    def p(self) -> int:
        return 2

    @property
    def is_constant(self) -> bool:
        return False


class DryStateError(ValueError):
    pass


@dataclass(frozen=True)
class SystemSpec:
    """Speeds, sign split, diagonal source coefficients, and box radii."""

    p: int
    m: int
    speeds: object                      # ConstantSpeeds or SaintVenantSpeeds
    source: tuple = ()                  # diagonal damping b_i >= 0, empty means zero
    delta: float = 1.0                  # sup-norm box radius
    epsilon: float = float("inf")       # analytic ball radius, metadata only

    def __post_init__(self):
        if not (0 <= self.m <= self.p):
            raise ValueError(f"sign split m={self.m} outside 0..p={self.p}")
        src = tuple(self.source) if self.source else (0.0,) * self.p
        if len(src) != self.p:
            raise ValueError("source coefficients must have one entry per component")
        if any(b < 0 for b in src):
            raise ValueError("source coefficients must be nonnegative")
        object.__setattr__(self, "source", src)
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if self.epsilon < self.delta:
            raise ValueError("epsilon must be at least delta")

    @property
    def has_source(self) -> bool:
        return any(b != 0.0 for b in self.source)

    def box_lattice(self, delta: float | None = None) -> np.ndarray:
        """Sample lattice of the sup-norm box, shape (p, BOX_SAMPLES**p)."""
        d = self.delta if delta is None else delta
        axis = np.linspace(-d, d, BOX_SAMPLES)
        pts = np.array(list(itertools.product(axis, repeat=self.p)))
        return pts.T.copy()

    def speed_extremes(self, delta: float | None = None) -> tuple:
        """(min_i |Lambda_i|, max_i |Lambda_i|) arrays over the box lattice."""
        lam = np.abs(self.speeds(self.box_lattice(delta)))
        return lam.min(axis=1), lam.max(axis=1)

    def max_speed(self, delta: float | None = None) -> float:
        """Largest |Lambda_i| over the box, the CFL speed."""
        return float(self.speed_extremes(delta)[1].max())


@dataclass(frozen=True)
class BoundaryCoupling:
    """Feedback gains and coupling topology for the inflow boundaries."""

    topology: Topology
    kappa: tuple

    def __post_init__(self):
        object.__setattr__(self, "kappa", tuple(float(k) for k in self.kappa))
        if self.topology is Topology.CROSS_2X2 and len(self.kappa) != 2:
            raise TopologyError("cross coupling needs exactly two gains")

    def spectral_radius(self) -> float:
        return max(abs(k) for k in self.kappa)


@dataclass(frozen=True)
class SystemDiagnostics:
    """Outcome of the sanity checks; callers decide whether to abort."""

    sign_ok: tuple
    coincident_pairs: tuple
    spectral_radius: float | None
    strictly_dissipative: bool | None
    messages: tuple

    @property
    def ok(self) -> bool:
        return all(self.sign_ok) and not self.coincident_pairs and (
            self.strictly_dissipative is not False
        )


def validate_system(spec: SystemSpec, delta: float | None = None,
                    bc: BoundaryCoupling | None = None) -> SystemDiagnostics:
    """Check sign pattern, strict hyperbolicity, and boundary dissipativity.

    Signs and eigenvalue coincidences are sampled on the box lattice; the
    boundary check reports whether max |kappa_i| < 1 when gains are given.
    """
    lam = spec.speeds(spec.box_lattice(delta))
    sign_ok = []
    msgs = []
    for i in range(spec.p):
        if i < spec.m:
            good = bool(np.all(lam[i] > 0))
            if not good:
                msgs.append(f"component {i}: expected positive speeds, found min {lam[i].min():.6g}")
        else:
            good = bool(np.all(lam[i] < 0))
            if not good:
                msgs.append(f"component {i}: expected negative speeds, found max {lam[i].max():.6g}")
        sign_ok.append(good)
    coincident = []
    for i in range(spec.p):
        for j in range(i + 1, spec.p):
            if np.any(lam[i] == lam[j]):
                coincident.append((i, j))
                msgs.append(f"components {i} and {j} share a speed on the sample lattice")
    rad = None
    dissip = None
    if bc is not None:
        rad = bc.spectral_radius()
        dissip = rad < 1.0
        if not dissip:
            msgs.append(f"boundary not strictly dissipative: max |kappa| = {rad:.6g}")
    return SystemDiagnostics(
        sign_ok=tuple(sign_ok),
        coincident_pairs=tuple(coincident),
        spectral_radius=rad,
        strictly_dissipative=dissip,
        messages=tuple(msgs),
    )


def gradient_sup(spec: SystemSpec, delta: float | None = None,
                 step: float = 1e-6) -> np.ndarray:
    """Per-component sup of ||grad_u Lambda_i||_inf over the box lattice.

    Central finite differences; exact zero for constant speeds.
    """
    if spec.speeds.is_constant:
        return np.zeros(spec.p)
    pts = spec.box_lattice(delta)
    out = np.zeros(spec.p)
    for ell in range(spec.p):
        hi = pts.copy()
        lo = pts.copy()
        hi[ell] += step
        lo[ell] -= step
        dlam = np.abs(spec.speeds(hi) - spec.speeds(lo)) / (2.0 * step)
        out = np.maximum(out, dlam.max(axis=1))
    return out
