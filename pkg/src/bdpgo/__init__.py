"""Balanced distributed pose graph optimization for robot swarms.

Redistributes pose-graph vertices across a swarm with two-stage incremental
partitioning (streaming greedy assignment + periodic balanced repartitioning)
so that distributed optimization subproblems stay balanced, cheap to
communicate, and robust to robot failures. Ships two solvers, a deterministic
swarm simulator, and a benchmark harness.
"""

from ._kernels import BACKEND_NAME

__version__ = "0.1.0"
__all__ = ["BACKEND_NAME", "__version__"]
