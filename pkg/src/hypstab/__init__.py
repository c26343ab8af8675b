"""Finite-volume laboratory for boundary-feedback stabilization of random
1-D hyperbolic systems: first- and second-order schemes, stochastic discrete
energy functionals, certified and empirical decay rates, and a benchmark
table harness.
"""

from ._kernels import BACKEND
from .grid import Mesh, RandomEnsemble, uniform_random_ensemble
from .state import BlowUpError, StateField
from .system import (
    BoundaryCoupling,
    ConstantSpeeds,
    DryStateError,
    SaintVenantSpeeds,
    SystemSpec,
    Topology,
    TopologyError,
    validate_system,
)
from .lyapunov import (
    REGIME_CROSS,
    REGIME_GENERAL,
    REGIME_LINEAR,
    UNBOUNDED_RATE,
    DecayReport,
    InadmissibleGainError,
    LyapunovWeights,
    Trajectory,
    UndefinedRateError,
    admissible_mu,
    decay_envelope_error,
    delta_threshold,
    empirical_nu,
    lyapunov_value,
    theoretical_nu,
)
from .upwind import (
    DegenerateSystemError,
    MonitorReport,
    StepCoefficients,
    apply_boundaries,
    cfl_time_step,
    monitor_bounds,
    simulate,
    upwind_step,
)
from .cu import (
    CU_CFL,
    ClosureError,
    Reconstruction,
    boundary_closure,
    cu_flux,
    cu_simulate,
    local_speeds,
    minmod,
    reconstruct,
    semidiscrete_rhs,
    ssp_rk3_step,
)
from .problems import (
    EXAMPLE_IDS,
    ProblemConfig,
    SaintVenantParams,
    make_example,
    nonlinear_sv_speeds,
    saint_venant_inverse,
    saint_venant_transform,
)
from .experiments import TableRow, emit_csv, run_experiment, table

__version__ = "0.1.0"
