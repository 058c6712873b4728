"""Aggregation-based algebraic multigrid for spline Poisson problems."""

from ._igamg import (
    PreconditionerBreakdown,
    ResourceLimitError,
    assemble,
    benchmark_names,
    report_fields,
    run_benchmark,
    solve,
    sweep_csv,
)

__all__ = [
    "PreconditionerBreakdown",
    "ResourceLimitError",
    "assemble",
    "benchmark_names",
    "report_fields",
    "run_benchmark",
    "solve",
    "sweep_csv",
]
