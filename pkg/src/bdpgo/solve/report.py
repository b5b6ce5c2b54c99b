"""Per-solve bookkeeping shared by both solvers."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class SolveReport:
    solver: str
    k: int
    iterations: list = field(default_factory=list)
    wall_times: list = field(default_factory=list)
    time_sim: float = 0.0
    utilization: float = 0.0
    iter_imbalance: float = 0.0
    initial_cost: float = 0.0
    final_cost: float = 0.0
    comm_volume_total: int = 0
    sweeps_phase1: int = 0
    sweeps_phase2: int = 0
    diverged: bool = False

    CSV_HEADER = ("solver,k,iterations_max,time_sim,utilization,iter_imbalance,"
                  "initial_cost,final_cost,comm_total")

    @property
    def iterations_max(self) -> int:
        return max(self.iterations) if self.iterations else 0

    def csv_row(self) -> str:
        return "%s,%d,%d,%s,%s,%s,%s,%s,%d" % (
            self.solver,
            self.k,
            self.iterations_max,
            format(self.time_sim, ".12g"),
            format(self.utilization, ".12g"),
            format(self.iter_imbalance, ".12g"),
            format(self.initial_cost, ".12g"),
            format(self.final_cost, ".12g"),
            self.comm_volume_total,
        )


def utilization_of(busy_times) -> float:
    """Sum of per-robot busy time over swarm capacity (robots x slowest)."""
    times = [t for t in busy_times]
    if not times:
        return 0.0
    t_max = max(times)
    if t_max <= 0.0:
        return 0.0
    return sum(times) / (len(times) * t_max)


def iteration_imbalance(iterations) -> float:
    """min/max iteration count over robots that actually hold variables."""
    active = [i for i in iterations if i > 0]
    if not active:
        return 0.0
    return min(active) / max(active)
