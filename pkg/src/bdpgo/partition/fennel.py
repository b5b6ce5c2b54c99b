"""First-stage streaming assignment of arriving keyframes."""

from __future__ import annotations

import numpy as np

from .. import _kernels
from .types import CapacityError, FennelParams, Partitioning


def fennel_scores(neighbor_counts, sizes, params: FennelParams):
    """Greedy score per partition: |P_i ∩ N(v)| - alpha * gamma * |P_i|^(gamma-1)."""
    alpha = params.alpha
    return np.asarray(neighbor_counts, dtype=float) \
        - alpha * params.gamma * np.asarray(sizes, dtype=float) ** (params.gamma - 1.0)


def fennel_assign(v, neighbors, parts: Partitioning, params: FennelParams) -> int:
    """Assign one arriving vertex and return the chosen partition index.

    Neighbors not yet assigned anywhere are ignored (they arrive later and the
    periodic repartition absorbs the error). Partitions at capacity are hard
    rejected; ties break toward the smaller partition, then the smaller index.
    """
    if v in parts.assignment:
        raise ValueError(f"{v} is already assigned")
    k = parts.k
    counts = np.zeros(k, dtype=np.int64)
    for w in neighbors:
        i = parts.assignment.get(w)
        if i is not None:
            counts[i] += 1
    sizes = np.fromiter((len(s) for s in parts.sets), dtype=np.int64, count=k)
    choice = _kernels.backend.fennel_pick(counts, sizes, int(params.capacity),
                                          params.alpha, params.gamma)
    if choice < 0:
        raise CapacityError(
            f"all {k} partitions at capacity {params.capacity}; repartition required")
    parts.assign(v, int(choice))
    return int(choice)
