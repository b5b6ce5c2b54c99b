"""Partition quality metrics: imbalance, edge-cut factor, communication volume."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .types import Partitioning


@dataclass
class PartitionMetrics:
    imbalance: float
    edge_cut_factor: float
    comm_volume_factor: float
    raw_comm_volume: int
    additional_edges: int = 0

    CSV_HEADER = "step,lambda_imb,lambda_cut,lambda_vol,comm_volume,additional_edges"

    def csv_row(self, step: int) -> str:
        return "%d,%s,%s,%s,%d,%d" % (
            step,
            format(self.imbalance, ".12g"),
            format(self.edge_cut_factor, ".12g"),
            format(self.comm_volume_factor, ".12g"),
            self.raw_comm_volume,
            self.additional_edges,
        )


def imbalance_factor(parts: Partitioning) -> float:
    """max |P_i| / min |P_j|; +inf sentinel when a partition is empty."""
    sizes = parts.sizes()
    smallest = min(sizes)
    if smallest == 0:
        return float("inf")
    return max(sizes) / smallest


def _assign_array(graph, parts: Partitioning):
    arrays = graph.csr()
    assign = np.empty(arrays.n, dtype=np.int64)
    for kf, idx in arrays.index.items():
        assign[idx] = parts.assignment[kf]
    return arrays, assign


def edge_cut_factor(graph, parts: Partitioning) -> float:
    """|E_cut| / |V|."""
    arrays, assign = _assign_array(graph, parts)
    if arrays.n == 0:
        return 0.0
    cut = int(np.count_nonzero(assign[arrays.eu] != assign[arrays.ev]))
    return cut / arrays.n


def comm_volume(graph, parts: Partitioning, sigma_p: int = 1) -> int:
    """Data exchanged per optimization iteration.

    sigma_p * sum over vertices of |D(v)|, where D(v) is the set of foreign
    partitions containing a neighbor of v.
    """
    if sigma_p < 1:
        raise ValueError("sigma_p must be >= 1")
    arrays, assign = _assign_array(graph, parts)
    if arrays.m == 0:
        return 0
    pu = assign[arrays.eu]
    pv = assign[arrays.ev]
    cross = pu != pv
    if not np.any(cross):
        return 0
    # (vertex, foreign partition) pairs, counted once each
    pairs = np.concatenate([
        np.stack([arrays.eu[cross], pv[cross]], axis=1),
        np.stack([arrays.ev[cross], pu[cross]], axis=1),
    ])
    distinct = np.unique(pairs, axis=0)
    return int(sigma_p) * len(distinct)


def comm_volume_per_partition(graph, parts: Partitioning, sigma_p: int = 1):
    """Per-partition share of :func:`comm_volume` (what each owner must send)."""
    arrays, assign = _assign_array(graph, parts)
    out = np.zeros(parts.k, dtype=np.int64)
    if arrays.m == 0:
        return out
    pu = assign[arrays.eu]
    pv = assign[arrays.ev]
    cross = pu != pv
    if not np.any(cross):
        return out
    pairs = np.concatenate([
        np.stack([arrays.eu[cross], pv[cross]], axis=1),
        np.stack([arrays.ev[cross], pu[cross]], axis=1),
    ])
    distinct = np.unique(pairs, axis=0)
    owners = assign[distinct[:, 0]]
    np.add.at(out, owners, sigma_p)
    return out


def comm_volume_factor(graph, parts: Partitioning, sigma_p: int = 1) -> float:
    """comm_volume normalized to a per-vertex, per-pose figure."""
    if graph.n_vertices == 0:
        return 0.0
    return comm_volume(graph, parts, sigma_p) / (sigma_p * graph.n_vertices)


def partition_metrics(graph, parts: Partitioning, sigma_p: int = 1,
                      additional_edges: int = 0) -> PartitionMetrics:
    vol = comm_volume(graph, parts, sigma_p)
    return PartitionMetrics(
        imbalance=imbalance_factor(parts),
        edge_cut_factor=edge_cut_factor(graph, parts),
        comm_volume_factor=vol / (sigma_p * graph.n_vertices) if graph.n_vertices else 0.0,
        raw_comm_volume=vol,
        additional_edges=additional_edges,
    )
