"""Single-run experiments and table sweeps producing decay-report rows."""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cu import CU_CFL, cu_simulate
from .lyapunov import (
    REGIME_LINEAR,
    DecayReport,
    Trajectory,
    decay_envelope_error,
    empirical_nu,
)
from .problems import REGIME_UNCERTIFIED, ProblemConfig, make_example
from .upwind import simulate

#: environment variable naming the sweep worker count (never affects values)
WORKERS_ENV = "HYPSTAB_WORKERS"

DEFAULT_DX = (1 / 100, 1 / 200, 1 / 400, 1 / 800, 1 / 1600)
DEFAULT_SIGMA = (0.5, 1.0, 2.0)


@dataclass(frozen=True)
class TableRow:
    """One decay-table entry; nu_theory is None for uncertified runs."""

    example: int
    dx: float
    sigma: float
    E: float
    nu_emp: float | None
    nu_theory: float | None
    flags: tuple = ()

    def __post_init__(self):
        if self.E < 0 or not math.isfinite(self.E):
            raise ValueError("envelope error must be finite and nonnegative")


def _equilibrium_linear_rate(config: ProblemConfig) -> float:
    """Reporting envelope rate from the equilibrium linearization.

    Used for runs without an admissibility certificate: the smallest
    equilibrium speed magnitude times the linear-regime weight exponent.
    """
    lam0 = np.abs(config.system.speeds(np.zeros((config.system.p, 1))))[:, 0]
    mu = min(math.log(abs(k) ** -2.0) for k in config.bc.kappa if k != 0.0)
    return float(lam0.min()) * mu * math.exp(-mu * config.dx)


def run_experiment(config: ProblemConfig, recorder=None):
    """Run one configuration and summarize it as (TableRow, Trajectory).

    Deterministic for a fixed config regardless of worker count: all
    reductions use a fixed traversal order.
    """
    if config.scheme == "cu":
        traj = cu_simulate(config, recorder=recorder, cfl=config.cfl)
    elif config.scheme == "upwind":
        traj = simulate(config, recorder=recorder)
    else:
        raise ValueError(f"unknown scheme {config.scheme!r}")
    nu = traj.meta["nu"]
    flags = []
    if config.regime == REGIME_UNCERTIFIED:
        envelope_rate = _equilibrium_linear_rate(config)
        flags.append("uncertified: envelope rate from equilibrium linearization")
    else:
        envelope_rate = nu
    if traj.L0 == 0.0:
        E = 0.0
        nu_emp = None
        flags.append("zero initial functional: empirical rate undefined")
    else:
        E = decay_envelope_error(traj, envelope_rate)
        nu_emp = empirical_nu(traj.L0, traj.LT, traj.T)
    if traj.meta.get("sup_exceeded_delta"):
        flags.append("sup-norm exceeded the configured box radius")
    row = TableRow(example=config.example, dx=config.dx, sigma=config.sigma,
                   E=E, nu_emp=nu_emp, nu_theory=nu, flags=tuple(flags))
    return row, traj


def _row_for(args):
    example, dx, sigma, overrides = args
    config = make_example(example, sigma=sigma, dx=dx, **overrides)
    row, _ = run_experiment(config)
    return row


def worker_count() -> int:
    env = os.environ.get(WORKERS_ENV, "")
    if env.strip():
        n = int(env)
        if n < 1:
            raise ValueError(f"{WORKERS_ENV} must be a positive integer")
        return n
    return os.cpu_count() or 1


def table(example: int, dx_list=DEFAULT_DX, sigma_list=DEFAULT_SIGMA,
          workers: int | None = None, **overrides) -> list:
    """Sweep rows ordered dx outer, sigma inner; values worker-independent."""
    if not dx_list or not sigma_list:
        raise ValueError("dx and sigma lists must be non-empty")
    jobs = [(example, dx, sigma, overrides)
            for dx in dx_list for sigma in sigma_list]
    n = worker_count() if workers is None else workers
    if n > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=n) as pool:
            rows = list(pool.map(_row_for, jobs))
    else:
        rows = [_row_for(j) for j in jobs]
    return rows


def _fmt(v) -> str:
    if v is None:
        return ""
    return f"{v:.6g}"


def emit_csv(rows, destination) -> None:
    """Write rows as CSV with 6 significant digits and a fixed header."""
    lines = ["dx,sigma,E,nu_emp,nu_theory"]
    for r in rows:
        lines.append(",".join([
            _fmt(r.dx), _fmt(r.sigma), _fmt(r.E), _fmt(r.nu_emp), _fmt(r.nu_theory),
        ]))
    text = "\n".join(lines) + "\n"
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(destination, "w", newline="") as fh:
            fh.write(text)
