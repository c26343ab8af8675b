"""Discrete solution field over components x space x random nodes."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class BlowUpError(RuntimeError):
    """A step produced a non-finite value; carries the first offending index."""

    def __init__(self, component: int, j: int, k: int, time: float):
        self.component = component
        self.j = j
        self.k = k
        self.time = time
        super().__init__(
            f"non-finite value in component {component} at (j={j}, k={k}), t={time:.6g}"
        )


@dataclass
class StateField:
    """Values u[i, j, k] for i = 0..p-1, j = 0..M+1, k = 0..K.

    Positive-speed components use slots j = 0..M (j = 0 is the inflow value);
    negative-speed components use j = 1..M+1.  The remaining slot per family
    is kept zeroed and never read.
    """

    values: np.ndarray
    time: float = 0.0
    p: int = field(init=False)
    M: int = field(init=False)
    K: int = field(init=False)

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=np.float64)
        if v.ndim != 3 or v.shape[1] < 4:
            raise ValueError(f"expected (p, M+2, K+1) array, got shape {self.values.shape}")
        self.values = v
        self.p = v.shape[0]
        self.M = v.shape[1] - 2
        self.K = v.shape[2] - 1

    @classmethod
    def zeros(cls, p: int, M: int, K: int) -> "StateField":
        return cls(values=np.zeros((p, M + 2, K + 1)), time=0.0)

    def copy(self) -> "StateField":
        return StateField(values=self.values.copy(), time=self.time)

    def interior(self, i: int) -> np.ndarray:
        """View of the meaningful interior slots j = 1..M for component i."""
        return self.values[i, 1:self.M + 1, :]

    def check_finite(self) -> None:
        """Raise BlowUpError at the first non-finite entry, if any."""
        if np.isfinite(self.values).all():
            return
        bad = np.argwhere(~np.isfinite(self.values))
        i, j, k = (int(n) for n in bad[0])
        raise BlowUpError(i, j, k, self.time)
