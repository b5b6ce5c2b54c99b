"""Connectivity repair: synthesize edges so every partition is internally connected."""

from __future__ import annotations

from ..core import UnreachableError, compose_along_path, connected_components, shortest_path
from .types import Partitioning


def repair_connectivity(graph, parts: Partitioning):
    """Repair edges making each partition's induced subgraph connected.

    For a partition with c components, c - 1 edges are composed along
    minimum-hop paths over the whole graph, merging components in ascending
    smallest-id order. When the global graph itself is disconnected the
    unreachable pairs are skipped (the caller anchors per component instead).
    """
    repairs = []
    for i in range(parts.k):
        members = parts.sets[i]
        if len(members) < 2:
            continue
        comps = connected_components(graph, members)
        if len(comps) < 2:
            continue
        merged = set(comps[0])
        for comp in comps[1:]:
            try:
                path = shortest_path(graph, merged, comp)
            except UnreachableError:
                # globally unreachable island; leave it for per-component gauge
                merged |= comp
                continue
            repairs.append(compose_along_path(graph, path))
            merged |= comp
    return repairs
