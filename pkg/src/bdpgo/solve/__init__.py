"""Distributed solvers over an arbitrary partitioning."""

from .asapp import asapp_solve, asapp_solve_arrays, riemannian_gradient
from .dgs import dgs_solve, dgs_solve_arrays, component_anchors
from .engine import AnchoringError, BlockSweepSystem
from .report import SolveReport, iteration_imbalance, utilization_of
from .subproblem import (
    ConnectivityError,
    Subproblem,
    build_subproblems,
    decomposition_cost_arrays,
)

__all__ = [
    "Subproblem", "build_subproblems", "ConnectivityError",
    "decomposition_cost_arrays",
    "dgs_solve", "dgs_solve_arrays", "component_anchors",
    "asapp_solve", "asapp_solve_arrays", "riemannian_gradient",
    "SolveReport", "utilization_of", "iteration_imbalance",
    "AnchoringError", "BlockSweepSystem",
]
