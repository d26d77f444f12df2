"""Steady-state simulations of magnon blockade in a driven cavity-magnon model."""

from .analytic import (
    AmplitudeSet,
    ConditionRoots,
    amplitude_derivative,
    correlation_factors,
    evolve_amplitudes,
    g2_analytic,
    optimal_deltas,
    steady_amplitudes,
)
from .errors import (
    AnalyticPoleError,
    NoUniqueSteadyStateError,
    SingularConditionError,
    SweepPointError,
    UndefinedCorrelationError,
)
from .fock import HilbertSpec, Ket, Operator, basis_ket, embed, expectation, ladder_ops, vacuum_ket
from .model import (
    CollapseChannel,
    EffectiveParams,
    FullModelParams,
    build_h_eff,
    build_h_full,
    build_h_nonhermitian,
    collapse_channels,
    effective_space,
    flip_direction,
    full_space,
    reduce_to_effective,
)
from .steadystate import (
    DensityMatrix,
    Superoperator,
    build_liouvillian,
    evolve,
    g2_zero,
    occupation,
    solve_steady,
    steady_state_svd,
    trace_distance,
    vacuum_density,
)
from .sweep import (
    AxisSpec,
    ContrastResult,
    OutputFlags,
    SolverSpec,
    SweepResult,
    SweepRow,
    SweepSpec,
    find_dips,
    nonreciprocity_contrast,
    run_sweep,
    write_csv,
)

__version__ = "0.1.0"
