"""Spatial mesh and stochastic collocation ensemble.

The spatial grid is uniform on [0, 1] with nodes x_j = j*dx, j = 0..M, plus
one ghost abscissa at j = M+1 used by the negative-speed boundary closure.
The random parameter is collocated on K+1 equispaced nodes spanning
[-sigma, sigma] with tabulated density values; no Monte Carlo sampling is
involved anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_EPS = np.finfo(np.float64).eps


@dataclass(frozen=True)
class Mesh:
    """Uniform grid on the unit interval with M cells of width dx = 1/M."""

    M: int
    dx: float = field(init=False)
    x: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.M < 2:
            raise ValueError(f"cell count must be >= 2, got {self.M}")
        dx = 1.0 / self.M
        object.__setattr__(self, "dx", dx)
        # nodes 0..M plus the ghost abscissa at M+1
        object.__setattr__(self, "x", np.arange(self.M + 2, dtype=np.float64) * dx)
        if abs(dx * self.M - 1.0) > 4 * _EPS:
            raise ValueError("dx*M deviates from 1 beyond roundoff")

    @property
    def interior_x(self) -> np.ndarray:
        """Nodes x_1..x_M carrying functional weight."""
        return self.x[1:self.M + 1]

    @property
    def centers(self) -> np.ndarray:
        """Cell midpoints x_{j+1/2}, j = 0..M-1, used by the cell-average scheme."""
        return (np.arange(self.M, dtype=np.float64) + 0.5) * self.dx


@dataclass(frozen=True)
class RandomEnsemble:
    """Collocation nodes xi_k = -sigma + k*dxi, k = 0..K, with density values.

    Functional sums run over k = 1..K; node k = 0 carries density but no
    quadrature weight, matching the discrete functional convention.
    """

    sigma: float
    K: int
    nodes: np.ndarray = field(repr=False)
    density: np.ndarray = field(repr=False)
    dxi: float = field(init=False)

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.K < 1:
            raise ValueError(f"node count K must be >= 1, got {self.K}")
        object.__setattr__(self, "dxi", 2.0 * self.sigma / self.K)
        nodes = np.asarray(self.nodes, dtype=np.float64)
        density = np.asarray(self.density, dtype=np.float64)
        if nodes.shape != (self.K + 1,) or density.shape != (self.K + 1,):
            raise ValueError("nodes and density must have K+1 entries")
        if np.any(density < 0):
            raise ValueError("density values must be nonnegative")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "density", density)

    def quadrature_mass(self) -> float:
        """dxi * sum_{k=1..K} rho(xi_k); equals 1 for the uniform density."""
        return self.dxi * float(np.sum(self.density[1:]))


def uniform_random_ensemble(sigma: float, K: int) -> RandomEnsemble:
    """Equispaced ensemble on [-sigma, sigma] with constant density 1/(2*sigma)."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if K < 1:
        raise ValueError(f"node count K must be >= 1, got {K}")
    dxi = 2.0 * sigma / K
    nodes = -sigma + np.arange(K + 1, dtype=np.float64) * dxi
    density = np.full(K + 1, 1.0 / (2.0 * sigma))
    return RandomEnsemble(sigma=sigma, K=K, nodes=nodes, density=density)
