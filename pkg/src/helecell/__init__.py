"""Numerical lab for congested tissue growth.

Density n spreads down its own pressure gradient and multiplies where
pressure sits below a homeostatic threshold.  Two pressure laws are
implemented: a stiff law that becomes singular as n -> 1 (and therefore
keeps the density strictly below an explicit ceiling) and a power law
that lets the density overshoot 1.  The package provides monotone
explicit and semi-implicit solvers, runtime-verified bounds (ceiling,
mass budget, comparison ordering, propagation barrier, entropy budget),
and a closed-form saturated-front reference that the stiff-limit sweep
converges to.
"""

from .config import ParseError, config_dict, config_hash, parse_config
from .diagnostics import (
    BarrierReport,
    BarrierSpec,
    DiagnosticsRecord,
    EntropyReport,
    SpecInvalid,
    ab_monitor,
    barrier_check,
    complementary_residual,
    complementary_residual_weak,
    entropy_budget,
    entropy_total,
    record,
    support_radius,
)
from .experiments import (
    ConvergenceResult,
    Fig1Result,
    HarnessReport,
    SweepResult,
    comparison_harness,
    convergence_study,
    epsilon_sweep,
    fig1_experiment,
    manufactured_solution,
    mms_base,
    safety_consistency,
)
from .hele_shaw import FrontState, evolve_front, front_speed, patch_pressure
from .model import (
    DomainError,
    GaussianProfile,
    Grid1D,
    GrowthLaw,
    PlateauProfile,
    PowerLaw,
    RunConfig,
    SimState,
    SingularLaw,
    TableProfile,
    ValidationError,
    density_ceiling,
    support_margin_deficit,
    validate_config,
)
from .output import emit_front, emit_profile, emit_series, parse_series, write_json
from .solver import (
    CflViolation,
    NewtonDiverged,
    OverlapViolation,
    SolverError,
    StepReport,
    Trajectory,
    cfl_dt,
    run,
    run_with_source,
    step_explicit_upwind,
    step_semi_implicit,
)

__version__ = "0.1.0"

__all__ = [
    "BarrierReport",
    "BarrierSpec",
    "CflViolation",
    "ConvergenceResult",
    "DiagnosticsRecord",
    "DomainError",
    "EntropyReport",
    "Fig1Result",
    "FrontState",
    "GaussianProfile",
    "Grid1D",
    "GrowthLaw",
    "HarnessReport",
    "NewtonDiverged",
    "OverlapViolation",
    "ParseError",
    "PlateauProfile",
    "PowerLaw",
    "RunConfig",
    "SimState",
    "SingularLaw",
    "SolverError",
    "SpecInvalid",
    "StepReport",
    "SweepResult",
    "TableProfile",
    "Trajectory",
    "ValidationError",
    "ab_monitor",
    "barrier_check",
    "cfl_dt",
    "comparison_harness",
    "complementary_residual",
    "complementary_residual_weak",
    "config_dict",
    "config_hash",
    "convergence_study",
    "density_ceiling",
    "emit_front",
    "emit_profile",
    "emit_series",
    "entropy_budget",
    "entropy_total",
    "epsilon_sweep",
    "evolve_front",
    "fig1_experiment",
    "front_speed",
    "manufactured_solution",
    "mms_base",
    "parse_config",
    "parse_series",
    "patch_pressure",
    "record",
    "run",
    "run_with_source",
    "safety_consistency",
    "step_explicit_upwind",
    "step_semi_implicit",
    "support_margin_deficit",
    "support_radius",
    "validate_config",
    "write_json",
]
