"""Seed-based percolation matching of sampled social graphs."""

from ._core import (
    DataError,
    EstimationError,
    Graph,
    MatchResult,
    ObservedPair,
    ParameterError,
    UnreachableSeedsError,
    boundary_edges,
    calibrate_w_bar,
    critical_seed_count,
    detect_transition,
    estimate_power_law_exponent,
    fit_power_law_tail,
    generate_chung_lu,
    generate_gnp,
    load_graph,
    p1_seed_exponent,
    run_ddm,
    run_pgm,
    run_sweep_config,
    sample_observed_pair,
    save_graph,
    select_seeds,
)

__all__ = [
    "DataError",
    "EstimationError",
    "Graph",
    "MatchResult",
    "ObservedPair",
    "ParameterError",
    "UnreachableSeedsError",
    "boundary_edges",
    "calibrate_w_bar",
    "critical_seed_count",
    "detect_transition",
    "estimate_power_law_exponent",
    "fit_power_law_tail",
    "generate_chung_lu",
    "generate_gnp",
    "load_graph",
    "p1_seed_exponent",
    "run_ddm",
    "run_pgm",
    "run_sweep_config",
    "sample_observed_pair",
    "save_graph",
    "select_seeds",
]
