"""Linkage-kernel GOMEA: single- and multi-objective optimizers over binary strings."""

from ._core import (
    Instance,
    ParseError,
    StopRun,
    deserialize_instance,
    generate_bot,
    generate_maxcut,
    generate_worst_of_maxcuts,
    holm_bonferroni,
    hypervolume_2d,
    learn_model,
    mann_whitney_u,
    neighborhoods,
    normalized_hv,
    pairwise_nmi,
    pareto_front,
    run,
    run_mo,
    solve_exact,
    trap,
)

__all__ = [
    "Instance",
    "ParseError",
    "StopRun",
    "deserialize_instance",
    "generate_bot",
    "generate_maxcut",
    "generate_worst_of_maxcuts",
    "holm_bonferroni",
    "hypervolume_2d",
    "learn_model",
    "mann_whitney_u",
    "neighborhoods",
    "normalized_hv",
    "pairwise_nmi",
    "pareto_front",
    "run",
    "run_mo",
    "solve_exact",
    "trap",
]
