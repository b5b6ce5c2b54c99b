"""Deterministic swarm protocol simulator."""

from .network import ADHOC, INFRASTRUCTURE, NetworkModel, SubSwarm, sub_swarms
from .sim import SimInvariantError, SimResult, SolveRecord, SwarmSimulator
from .state import BASELINE, METHODS, NOFENNEL, PROPOSED, SwarmState

__all__ = [
    "NetworkModel", "SubSwarm", "sub_swarms", "INFRASTRUCTURE", "ADHOC",
    "SwarmSimulator", "SimResult", "SolveRecord", "SimInvariantError",
    "SwarmState", "BASELINE", "NOFENNEL", "PROPOSED", "METHODS",
]
