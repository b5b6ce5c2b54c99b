"""Per-robot protocol state and message handlers."""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, field

import numpy as np

from ..core import ODOMETRY, LOOP, REPAIR, PoseGraph
from ..partition import FennelParams, update_fennel_params
from .. import _kernels

_KIND_CODE = {ODOMETRY: 0, LOOP: 1, REPAIR: 2}

BASELINE = "baseline"
NOFENNEL = "nofennel"
PROPOSED = "proposed"
METHODS = (BASELINE, NOFENNEL, PROPOSED)


@dataclass
class OwnerEntry:
    owner: int
    epoch: int


class SwarmState:
    """One robot's replica: graph, ownership view, heuristic parameters, counters."""

    def __init__(self, robot: int, fennel: FennelParams, dn: int):
        self.robot = robot
        self.graph = PoseGraph()
        self.owners: dict = {}            # keyframe -> OwnerEntry
        self.owner_counts: dict = {}      # owner robot -> vertex count
        self.fennel = fennel
        self.dn = dn
        self.epoch = 0
        self.keyframes_since_repart = 0
        self.keyframes_since_solve = 0
        self.last_topology: frozenset | None = None
        self.pending_edges: dict = {}     # edge key -> edge
        self.fennel_time = 0.0            # host seconds spent scoring arrivals
        # cheap content fingerprint so in-sync replicas can skip deep syncs
        self._fp = 0

    # -- bookkeeping -------------------------------------------------------

    def _fp_vertex(self, kf):
        return hash((1, kf.robot, kf.seq))

    def _fp_edge(self, key):
        (fr, to, kind) = key
        return hash((2, fr, to, _KIND_CODE[kind]))

    def _fp_owner(self, kf, entry):
        return hash((3, kf.robot, kf.seq, entry.owner, entry.epoch))

    @property
    def fingerprint(self):
        return (self.graph.n_vertices, self.graph.n_edges, len(self.owners),
                self.epoch, self._fp)

    def digest(self) -> str:
        """Order-independent content hash of (graph, ownership view)."""
        h = hashlib.sha256()
        for kf in sorted(self.graph.vertices):
            h.update(repr((kf.robot, kf.seq)).encode())
        for key in sorted(e.key() for e in self.graph.edges):
            h.update(repr(key).encode())
        for kf in sorted(self.owners):
            e = self.owners[kf]
            h.update(repr((kf.robot, kf.seq, e.owner, e.epoch)).encode())
        return h.hexdigest()

    # -- primitive mutations ------------------------------------------------

    def add_vertex(self, kf, pose):
        self.graph.add_vertex(kf, pose)
        self._fp ^= self._fp_vertex(kf)

    def try_add_edge(self, edge):
        """Insert when both endpoints are known, else park it as pending."""
        key = edge.key()
        if self.graph.has_edge_key(key):
            return False
        if self.graph.has_vertex(edge.from_id) and self.graph.has_vertex(edge.to_id):
            self.graph.add_edge(edge)
            self._fp ^= self._fp_edge(key)
            return True
        self.pending_edges.setdefault(key, edge)
        return False

    def flush_pending(self):
        ready = [k for k, e in self.pending_edges.items()
                 if self.graph.has_vertex(e.from_id) and self.graph.has_vertex(e.to_id)]
        for k in sorted(ready):
            edge = self.pending_edges.pop(k)
            if not self.graph.has_edge_key(k):
                self.graph.add_edge(edge)
                self._fp ^= self._fp_edge(k)

    def set_owner(self, kf, owner: int, epoch: int) -> bool:
        """Apply an ownership claim; older epochs never overwrite newer ones."""
        cur = self.owners.get(kf)
        if cur is not None:
            if epoch < cur.epoch or (epoch == cur.epoch and owner == cur.owner):
                return False
            self._fp ^= self._fp_owner(kf, cur)
            self.owner_counts[cur.owner] = self.owner_counts.get(cur.owner, 0) - 1
        entry = OwnerEntry(owner, epoch)
        self.owners[kf] = entry
        self.owner_counts[owner] = self.owner_counts.get(owner, 0) + 1
        self._fp ^= self._fp_owner(kf, entry)
        return True

    # -- protocol handlers ---------------------------------------------------

    def handle_new_keyframe(self, kf, pose, edges, members, method: str):
        """Local keyframe arrival: assign a partition, integrate, return the owner.

        ``members`` is the robot's current sub-swarm (sorted). The return
        value plus ``edges`` forms the broadcast payload for connected robots.
        Duplicate arrivals are ignored.
        """
        if self.graph.has_vertex(kf):
            return self.owners[kf].owner
        self.add_vertex(kf, pose)
        for e in edges:
            self.try_add_edge(e)
        if method == PROPOSED:
            owner = self._fennel_pick(kf, members)
        else:
            owner = self.robot
        self.set_owner(kf, owner, self.epoch)
        self.keyframes_since_repart += 1
        self.keyframes_since_solve += 1
        return owner

    def _fennel_pick(self, kf, members) -> int:
        t0 = time.perf_counter()
        try:
            return self._fennel_pick_timed(kf, members)
        finally:
            self.fennel_time += time.perf_counter() - t0

    def _fennel_pick_timed(self, kf, members) -> int:
        params = self.fennel if self.fennel.k == len(members) \
            else self.fennel.rescaled(len(members))
        rank = {r: i for i, r in enumerate(members)}
        counts = np.zeros(len(members), dtype=np.int64)
        for w in self.graph.neighbors(kf):
            entry = self.owners.get(w)
            if entry is not None and entry.owner in rank:
                counts[rank[entry.owner]] += 1
        sizes = np.fromiter((self.owner_counts.get(r, 0) for r in members),
                            dtype=np.int64, count=len(members))
        pick = _kernels.backend.fennel_pick(counts, sizes, int(params.capacity),
                                            params.alpha, params.gamma)
        if pick < 0:
            # capacity exhausted: the estimates were stale; fall back to the
            # emptiest partition (the next repartition absorbs the error)
            pick = int(np.argmin(sizes))
        return members[int(pick)]

    def handle_remote_keyframe(self, kf, pose, edges, owner: int, epoch: int):
        """Integrate a broadcast keyframe; idempotent under re-delivery."""
        known = self.graph.has_vertex(kf)
        if not known:
            self.add_vertex(kf, pose)
            self.keyframes_since_repart += 1
            self.keyframes_since_solve += 1
        for e in edges:
            self.try_add_edge(e)
        self.set_owner(kf, owner, epoch)

    def handle_remote_partitions(self, owners: dict, epoch: int,
                                 union_v: int, union_e: int):
        """Adopt a pushed repartition result (newer epochs only)."""
        if epoch <= self.epoch:
            return False
        for kf, owner in owners.items():
            self.set_owner(kf, owner, epoch)
        self.epoch = epoch
        self.keyframes_since_repart = 0
        self.fennel = update_fennel_params(self.fennel, union_v, union_e, self.dn)
        return True

    def need_repartition(self, topology_now) -> bool:
        """Topology changed or a full window of keyframes arrived."""
        topo = frozenset(topology_now)
        changed = self.last_topology is not None and topo != self.last_topology
        due = self.keyframes_since_repart >= self.dn
        if self.last_topology is None:
            self.last_topology = topo
        if changed or due:
            self.last_topology = topo
            self.keyframes_since_repart = 0
            return True
        return False
