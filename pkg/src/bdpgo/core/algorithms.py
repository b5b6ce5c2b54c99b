"""Graph utilities: induced components, min-hop search, measurement composition."""

from __future__ import annotations

import numpy as np

from .. import _kernels
from .graph import Pose, PoseGraph, PoseGraphEdge, REPAIR


class UnreachableError(RuntimeError):
    """No path exists between the requested source and target sets."""


class PathError(ValueError):
    """A supplied vertex sequence is not a path in the graph."""


def connected_components(graph: PoseGraph, subset):
    """Components of the subgraph induced by ``subset``.

    Returned as a list of sets ordered by each component's smallest id.
    """
    subset = set(subset)
    for kf in subset:
        if not graph.has_vertex(kf):
            raise KeyError(f"{kf} not in graph")
    seen = set()
    components = []
    for start in sorted(subset):
        if start in seen:
            continue
        comp = {start}
        stack = [start]
        seen.add(start)
        while stack:
            v = stack.pop()
            for w in graph.neighbors(v):
                if w in subset and w not in seen:
                    seen.add(w)
                    comp.add(w)
                    stack.append(w)
        components.append(comp)
    return components


def shortest_path(graph: PoseGraph, sources, targets):
    """Minimum-hop path from any source to any target over the whole graph.

    Unit edge weights; ties resolved by expanding ascending vertex ids, so the
    result is deterministic.
    """
    sources, targets = set(sources), set(targets)
    if not sources or not targets:
        raise ValueError("sources and targets must be nonempty")
    if sources & targets:
        raise ValueError("sources and targets must be disjoint")
    arrays = graph.csr()
    src = np.fromiter(sorted(arrays.index[s] for s in sources), dtype=np.int64)
    dst = np.fromiter(sorted(arrays.index[t] for t in targets), dtype=np.int64)
    path = _kernels.backend.bfs_path(arrays.indptr, arrays.indices, src, dst)
    if path is None:
        raise UnreachableError("no path between source and target sets")
    return [arrays.ids[i] for i in path]


def _find_edge(graph: PoseGraph, a, b):
    # returns (edge, forward) where forward means traversal from -> to
    for e in graph.edges:
        if e.from_id == a and e.to_id == b:
            return e, True
        if e.from_id == b and e.to_id == a:
            return e, False
    raise PathError(f"consecutive path vertices {a} and {b} are not adjacent")


def compose_along_path(graph: PoseGraph, path) -> PoseGraphEdge:
    """Fold the measurements along ``path`` into one repair edge.

    Edges traversed against their stored direction are inverted; the new
    edge's weights are the minima of the constituents (conservative choice,
    documented in the package notes).
    """
    if len(path) < 2:
        raise PathError("path must contain at least two vertices")
    rel = Pose.identity()
    w_t = np.inf
    w_r = np.inf
    edge_lookup = {}
    for e in graph.edges:
        edge_lookup.setdefault((e.from_id, e.to_id), e)
    for a, b in zip(path[:-1], path[1:]):
        e = edge_lookup.get((a, b))
        forward = True
        if e is None:
            e = edge_lookup.get((b, a))
            forward = False
        if e is None:
            raise PathError(f"consecutive path vertices {a} and {b} are not adjacent")
        step = e.measurement() if forward else e.measurement().inverse()
        rel = rel.compose(step)
        w_t = min(w_t, e.weight_t)
        w_r = min(w_r, e.weight_r)
    return PoseGraphEdge(path[0], path[-1], rel.rotation, rel.translation,
                         float(w_t), float(w_r), REPAIR)
