"""Pose-graph data model, dataset ingestion, and shared graph utilities."""

from .algorithms import (
    PathError,
    UnreachableError,
    compose_along_path,
    connected_components,
    shortest_path,
)
from .cost import evaluate_cost, evaluate_cost_arrays
from .g2o import (
    G2oDataError,
    G2oParseError,
    G2oReferenceError,
    parse_g2o,
    serialize_g2o,
)
from .graph import (
    LOOP,
    ODOMETRY,
    REPAIR,
    GraphArrays,
    KeyframeId,
    MissingVertexError,
    Pose,
    PoseGraph,
    PoseGraphEdge,
)
from .rotations import (
    DegenerateMatrixError,
    hat,
    is_rotation,
    matrix_to_quat,
    project_to_so3,
    project_to_so3_many,
    quat_to_matrix,
    rot_z,
    so3_exp,
    so3_exp_many,
    so3_log,
    vee,
)

__all__ = [
    "KeyframeId", "Pose", "PoseGraph", "PoseGraphEdge", "GraphArrays",
    "ODOMETRY", "LOOP", "REPAIR", "MissingVertexError",
    "parse_g2o", "serialize_g2o",
    "G2oParseError", "G2oReferenceError", "G2oDataError",
    "evaluate_cost", "evaluate_cost_arrays",
    "connected_components", "shortest_path", "compose_along_path",
    "UnreachableError", "PathError",
    "project_to_so3", "project_to_so3_many", "DegenerateMatrixError",
    "so3_exp", "so3_exp_many", "so3_log", "hat", "vee",
    "quat_to_matrix", "matrix_to_quat", "rot_z", "is_rotation",
]
