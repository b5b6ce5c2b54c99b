"""Two-stage incremental edge-cut partitioning and its quality metrics."""

from .fennel import fennel_assign, fennel_scores
from .metrics import (
    PartitionMetrics,
    comm_volume,
    comm_volume_factor,
    comm_volume_per_partition,
    edge_cut_factor,
    imbalance_factor,
    partition_metrics,
)
from .repair import repair_connectivity
from .repartition import balance_caps, repartition
from .types import (
    CapacityError,
    FennelParams,
    InfeasiblePartitionError,
    Partitioning,
    update_fennel_params,
)

__all__ = [
    "Partitioning", "FennelParams", "PartitionMetrics",
    "CapacityError", "InfeasiblePartitionError",
    "fennel_assign", "fennel_scores", "update_fennel_params",
    "repartition", "balance_caps", "repair_connectivity",
    "imbalance_factor", "edge_cut_factor", "comm_volume",
    "comm_volume_factor", "comm_volume_per_partition", "partition_metrics",
]
