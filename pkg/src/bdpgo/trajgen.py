"""Per-robot trajectory generation over a dataset graph and stream scheduling.

Stands in for an external multi-vehicle route solver: seeds are spread by
farthest-point sampling over hop distance, then each path greedily grows to
its nearest unvisited vertex, teleporting when its frontier dies out. The
``even`` profile balances path lengths within a vertex of each other; the
``skewed`` profile draws route lengths from a stick-breaking split, matching
the strongly uneven coverage that route solvers produce on real maps (this is
what makes the native-assignment baseline imbalanced).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import KeyframeId, PoseGraph, PoseGraphEdge


class InfeasiblePathsError(ValueError):
    pass


@dataclass
class RobotPath:
    robot: int
    vertices: list  # original keyframe ids, visit order
    ticks: list = field(default_factory=list)

    def __len__(self):
        return len(self.vertices)


@dataclass
class StreamEvent:
    """One keyframe arrival: replay id, pose, and edges to already-known keyframes."""

    tick: int
    robot: int
    kf: KeyframeId
    pose: object
    edges: list


def _bfs_distances(indptr, indices, start, out):
    out.fill(-1)
    out[start] = 0
    queue = [start]
    head = 0
    while head < len(queue):
        v = queue[head]
        head += 1
        for e in range(indptr[v], indptr[v + 1]):
            w = indices[e]
            if out[w] < 0:
                out[w] = out[v] + 1
                queue.append(w)
    return out


def _farthest_seeds(indptr, indices, n, n_robots, rng):
    start = int(rng.integers(n))
    dist = np.empty(n, dtype=np.int64)
    _bfs_distances(indptr, indices, start, dist)
    dist[dist < 0] = np.iinfo(np.int64).max // 2  # other components count as far
    seeds = [int(np.argmax(dist))]
    min_dist = np.empty(n, dtype=np.int64)
    _bfs_distances(indptr, indices, seeds[0], min_dist)
    min_dist[min_dist < 0] = np.iinfo(np.int64).max // 2
    scratch = np.empty(n, dtype=np.int64)
    while len(seeds) < n_robots:
        nxt = int(np.argmax(min_dist))
        seeds.append(nxt)
        _bfs_distances(indptr, indices, nxt, scratch)
        scratch[scratch < 0] = np.iinfo(np.int64).max // 2
        np.minimum(min_dist, scratch, out=min_dist)
    return seeds


def _target_lengths(n, n_robots, profile, rng):
    if profile == "even":
        base = n // n_robots
        rem = n - base * n_robots
        return [base + (1 if r < rem else 0) for r in range(n_robots)]
    if profile == "skewed":
        # stick-breaking split with a small floor per route
        floor = min(3, n // n_robots) or 1
        cuts = np.sort(rng.uniform(0.0, 1.0, size=n_robots - 1))
        props = np.diff(np.concatenate([[0.0], cuts, [1.0]]))
        free = n - floor * n_robots
        lengths = floor + np.floor(props * free).astype(int)
        # largest-remainder top-up to hit n exactly
        short = n - int(lengths.sum())
        order = np.argsort(-(props * free - np.floor(props * free)))
        for i in range(short):
            lengths[order[i % n_robots]] += 1
        return [int(x) for x in lengths]
    raise ValueError(f"unknown length profile {profile!r}")


def _nearest_unvisited(indptr, indices, tail, visited, rng):
    """All unvisited vertices at the smallest hop distance from ``tail``; one picked."""
    n = len(visited)
    seen = np.zeros(n, dtype=bool)
    seen[tail] = True
    frontier = [tail]
    while frontier:
        found = [v for v in frontier if not visited[v]]
        if found:
            found.sort()
            return found[int(rng.integers(len(found)))] if len(found) > 1 else found[0]
        nxt = []
        for v in frontier:
            for e in range(indptr[v], indptr[v + 1]):
                w = indices[e]
                if not seen[w]:
                    seen[w] = True
                    nxt.append(w)
        frontier = nxt
    return -1  # component exhausted


def generate_paths(graph: PoseGraph, n_robots: int, seed: int = 0,
                   profile: str = "even"):
    """Vertex-disjoint robot paths covering the whole graph exactly once."""
    arrays = graph.csr()
    n = arrays.n
    if n_robots > n:
        raise InfeasiblePathsError(f"n_robots={n_robots} exceeds |V|={n}")
    rng = np.random.default_rng(seed)
    indptr, indices = arrays.indptr, arrays.indices
    seeds = _farthest_seeds(indptr, indices, n, n_robots, rng)
    targets = _target_lengths(n, n_robots, profile, rng)

    visited = np.zeros(n, dtype=bool)
    paths = [[] for _ in range(n_robots)]
    # seeds may collide on tiny graphs; fall back to the smallest free vertex
    for r, s in enumerate(seeds):
        if visited[s]:
            s = int(np.flatnonzero(~visited)[0])
        visited[s] = True
        paths[r].append(s)

    remaining = n - n_robots
    while remaining > 0:
        progressed = False
        for r in range(n_robots):
            if len(paths[r]) >= targets[r] or remaining == 0:
                continue
            nxt = _nearest_unvisited(indptr, indices, paths[r][-1], visited, rng)
            if nxt < 0:  # teleport anywhere
                free = np.flatnonzero(~visited)
                nxt = int(free[int(rng.integers(len(free)))]) if len(free) > 1 else int(free[0])
            visited[nxt] = True
            paths[r].append(nxt)
            remaining -= 1
            progressed = True
        if not progressed:
            # all targets met but vertices remain (rounding): give them to the
            # robot with the shortest path
            r = int(np.argmin([len(p) for p in paths]))
            targets[r] += remaining
    out = []
    for r in range(n_robots):
        verts = [arrays.ids[i] for i in paths[r]]
        out.append(RobotPath(robot=r, vertices=verts, ticks=list(range(len(verts)))))
    return out


def schedule_stream(paths, graph: PoseGraph):
    """Round-robin interleaving: tick t delivers the t-th keyframe of each path.

    Each event carries the keyframe (re-keyed to its replay id), its pose from
    the dataset, and every dataset edge whose other endpoint was already
    delivered. Returns (events, mapping original id -> replay id).
    """
    mapping = {}
    order = {}  # original id -> (tick, robot)
    for path in paths:
        for seq, orig in enumerate(path.vertices):
            replay = KeyframeId(path.robot, seq, tick=seq)
            mapping[orig] = replay
            order[orig] = (seq, path.robot)

    edges_by_later = {}
    for e in graph.edges:
        a, b = order[e.from_id], order[e.to_id]
        later = e.from_id if a > b else e.to_id
        edges_by_later.setdefault(later, []).append(e)

    events = []
    max_len = max(len(p) for p in paths)
    for tick in range(max_len):
        for path in paths:
            if tick >= len(path.vertices):
                continue
            orig = path.vertices[tick]
            replay_edges = []
            for e in edges_by_later.get(orig, ()):
                replay_edges.append(PoseGraphEdge(
                    mapping[e.from_id], mapping[e.to_id],
                    e.rel_rotation, e.rel_translation,
                    e.weight_t, e.weight_r, e.kind))
            events.append(StreamEvent(
                tick=tick, robot=path.robot, kf=mapping[orig],
                pose=graph.vertices[orig], edges=replay_edges))
    return events, mapping


def paths_csv(paths) -> str:
    lines = ["robot,tick,keyframe_id"]
    for p in paths:
        for t, orig in zip(p.ticks, p.vertices):
            lines.append("%d,%d,%d" % (p.robot, t, orig.seq))
    return "\n".join(lines) + "\n"
