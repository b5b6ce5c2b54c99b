"""Swarm connectivity: infrastructure vs range-limited ad hoc, with failures."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

INFRASTRUCTURE = "infrastructure"
ADHOC = "adhoc"


@dataclass
class NetworkModel:
    """Connectivity oracle for the simulator.

    ``positions`` is an (n_robots, n_ticks, 3) array of robot positions
    (ad hoc mode only; robots keep their last position after their route
    ends). ``failures`` maps robot -> tick of permanent failure; a failed
    robot is connected to nobody from that tick on.
    """

    n_robots: int
    mode: str = INFRASTRUCTURE
    radius: float = 10.0
    positions: np.ndarray | None = None
    failures: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.mode not in (INFRASTRUCTURE, ADHOC):
            raise ValueError(f"unknown network mode {self.mode!r}")
        if self.mode == ADHOC and self.positions is None:
            raise ValueError("ad hoc mode requires robot positions")

    def alive(self, robot: int, tick: int) -> bool:
        return tick < self.failures.get(robot, math.inf)

    def position(self, robot: int, tick: int):
        t = min(tick, self.positions.shape[1] - 1)
        return self.positions[robot, t]

    def connected(self, a: int, b: int, tick: int) -> bool:
        if a == b:
            return True
        if not (self.alive(a, tick) and self.alive(b, tick)):
            return False
        if self.mode == INFRASTRUCTURE:
            return True
        d = self.position(a, tick) - self.position(b, tick)
        return float(np.dot(d, d)) <= self.radius * self.radius


@dataclass(frozen=True)
class SubSwarm:
    members: tuple  # sorted robot ids

    @property
    def main(self) -> int:
        return self.members[0]


def sub_swarms(net: NetworkModel, tick: int):
    """Connected components of the live-robot connectivity graph at ``tick``."""
    live = [r for r in range(net.n_robots) if net.alive(r, tick)]
    if net.mode == INFRASTRUCTURE:
        return [SubSwarm(tuple(live))] if live else []
    groups = []
    unassigned = set(live)
    while unassigned:
        start = min(unassigned)
        comp = {start}
        stack = [start]
        unassigned.discard(start)
        while stack:
            a = stack.pop()
            for b in sorted(unassigned):
                if net.connected(a, b, tick):
                    unassigned.discard(b)
                    comp.add(b)
                    stack.append(b)
        groups.append(SubSwarm(tuple(sorted(comp))))
    return groups
