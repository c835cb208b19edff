"""Conditional-gradient solvers for sparse inverse problems over measures."""

from ._adcg import (
    AtomicMeasure,
    DimensionError,
    ForwardModel,
    LtiModel,
    MatCompModel,
    MomentCurveModel,
    NumericalError,
    SolveResult,
    SolverConfig,
    SuperresModel,
    Variant,
    apply_forward,
    caratheodory_prune,
    match_sources,
    run,
    run_experiment,
    solve_weights,
    sysid_score,
)

__all__ = [
    "AtomicMeasure",
    "DimensionError",
    "ForwardModel",
    "LtiModel",
    "MatCompModel",
    "MomentCurveModel",
    "NumericalError",
    "SolveResult",
    "SolverConfig",
    "SuperresModel",
    "Variant",
    "apply_forward",
    "caratheodory_prune",
    "match_sources",
    "run",
    "run_experiment",
    "solve_weights",
    "sysid_score",
]
