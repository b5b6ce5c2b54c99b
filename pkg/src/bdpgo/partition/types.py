"""Partitioning containers and streaming-heuristic parameters."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace


class CapacityError(RuntimeError):
    """Every partition is at capacity; the caller must repartition."""


class InfeasiblePartitionError(ValueError):
    """Requested more partitions than vertices."""


class Partitioning:
    """Assignment of every vertex to one of ``k`` partitions.

    The per-partition vertex sets are maintained alongside the assignment map
    and kept consistent by the mutation helpers.
    """

    def __init__(self, k: int):
        if k < 1:
            raise ValueError("k must be >= 1")
        self.k = k
        self.assignment: dict = {}
        self.sets: list[set] = [set() for _ in range(k)]

    @classmethod
    def from_assignment(cls, assignment: dict, k: int) -> "Partitioning":
        parts = cls(k)
        for kf, i in assignment.items():
            parts.assign(kf, i)
        return parts

    def assign(self, kf, i: int):
        if kf in self.assignment:
            raise ValueError(f"{kf} already assigned")
        if not 0 <= i < self.k:
            raise ValueError(f"partition index {i} out of range [0, {self.k})")
        self.assignment[kf] = i
        self.sets[i].add(kf)

    def move(self, kf, i: int):
        old = self.assignment[kf]
        self.sets[old].discard(kf)
        self.assignment[kf] = i
        self.sets[i].add(kf)

    def part_of(self, kf) -> int:
        return self.assignment[kf]

    def sizes(self) -> list[int]:
        return [len(s) for s in self.sets]

    def copy(self) -> "Partitioning":
        out = Partitioning(self.k)
        out.assignment = dict(self.assignment)
        out.sets = [set(s) for s in self.sets]
        return out

    def __len__(self):
        return len(self.assignment)

    def validate(self, graph=None):
        union = set()
        total = 0
        for i, s in enumerate(self.sets):
            for kf in s:
                if self.assignment.get(kf) != i:
                    raise AssertionError(f"set/assignment mismatch for {kf}")
            total += len(s)
            union |= s
        if total != len(union) or total != len(self.assignment):
            raise AssertionError("partition sets are not disjoint or out of sync")
        if graph is not None and union != set(graph.vertices):
            raise AssertionError("partitioning does not cover the graph exactly")


@dataclass(frozen=True)
class FennelParams:
    """Streaming-heuristic state.

    ``est_vertices``/``est_edges`` estimate the final graph size (refreshed
    after each repartition); ``capacity`` is the hard per-partition vertex cap
    nu * est_vertices / k, rounded up.
    """

    k: int
    gamma: float = 1.5
    nu: float = 1.1
    est_vertices: int = 0
    est_edges: float = 0.0
    capacity: int = 0

    def __post_init__(self):
        if self.gamma <= 1.0:
            raise ValueError("gamma must be > 1")
        if self.nu < 1.0:
            raise ValueError("nu must be >= 1")

    @classmethod
    def initial(cls, k: int, dn: int, gamma: float = 1.5, nu: float = 1.1) -> "FennelParams":
        # Before the first repartition no graph statistics exist; seed the
        # estimates with the repartition window (vertices) and twice that
        # (edges), which matches sparse pose graphs well enough to start.
        est_v = max(dn, k)
        return cls(k=k, gamma=gamma, nu=nu, est_vertices=est_v,
                   est_edges=2.0 * est_v, capacity=math.ceil(nu * est_v / k))

    @property
    def alpha(self) -> float:
        """Size-penalty coefficient sqrt(k) * m / n^(3/2)."""
        return math.sqrt(self.k) * self.est_edges / float(self.est_vertices) ** 1.5

    def rescaled(self, k: int) -> "FennelParams":
        """Same estimates, different partition count (sub-swarm changes)."""
        return replace(self, k=k, capacity=math.ceil(self.nu * self.est_vertices / k))


def update_fennel_params(params: FennelParams, current_v: int, current_e: int,
                         dn: int) -> FennelParams:
    """Refresh the size estimates after a repartition.

    est_vertices <- |V| + dn and est_edges <- (|V| + dn) / |V| * |E|: the
    graph is expected to grow by one repartition window at the observed
    edge density.
    """
    if current_v < 1:
        raise ZeroDivisionError("parameter update requires a nonempty graph")
    est_v = current_v + dn
    est_e = (current_v + dn) / current_v * current_e
    capacity = math.ceil(params.nu * est_v / params.k)
    return replace(params, est_vertices=est_v, est_edges=est_e, capacity=capacity)
