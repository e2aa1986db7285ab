"""Distributed Dykstra consensus solver."""

from ._core import (
    ConvexFunction,
    oracle,
    oracle_allocation,
    run_experiment_file,
    solve_allocation,
    solve_apg,
    solve_consensus,
)

__all__ = [
    "ConvexFunction",
    "oracle",
    "oracle_allocation",
    "run_experiment_file",
    "solve_allocation",
    "solve_apg",
    "solve_consensus",
]
