"""Pose graph data model: keyframe ids, poses, measurement edges, graph container."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .rotations import is_rotation

ODOMETRY = "odometry"
LOOP = "loop"
REPAIR = "repair"


@dataclass(frozen=True, order=True)
class KeyframeId:
    """Identity of one keyframe: acquiring robot + per-robot sequence number.

    ``tick`` is the global stream timestamp the keyframe was emitted at; it is
    carried for bookkeeping but does not participate in identity or ordering.
    """

    robot: int
    seq: int
    tick: int = field(default=0, compare=False)

    def __repr__(self):
        return f"kf({self.robot},{self.seq})"

    def key(self):
        return (self.robot, self.seq)


@dataclass
class Pose:
    """SE(3) pose: 3x3 rotation and translation in meters."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        self.rotation = np.asarray(self.rotation, dtype=float)
        self.translation = np.asarray(self.translation, dtype=float).reshape(3)

    def validate(self):
        if not is_rotation(self.rotation):
            raise ValueError("pose rotation is not in SO(3) within 1e-9")

    @staticmethod
    def identity():
        return Pose(np.eye(3), np.zeros(3))

    def compose(self, other: "Pose") -> "Pose":
        return Pose(self.rotation @ other.rotation,
                    self.translation + self.rotation @ other.translation)

    def inverse(self) -> "Pose":
        Rt = self.rotation.T
        return Pose(Rt, -(Rt @ self.translation))


@dataclass
class PoseGraphEdge:
    """Relative-pose measurement between two keyframes."""

    from_id: KeyframeId
    to_id: KeyframeId
    rel_rotation: np.ndarray
    rel_translation: np.ndarray
    weight_t: float = 1.0
    weight_r: float = 1.0
    kind: str = ODOMETRY

    def __post_init__(self):
        self.rel_rotation = np.asarray(self.rel_rotation, dtype=float)
        self.rel_translation = np.asarray(self.rel_translation, dtype=float).reshape(3)
        if self.from_id == self.to_id:
            raise ValueError(f"self edge on {self.from_id}")
        if self.weight_t <= 0 or self.weight_r <= 0:
            raise ValueError("edge weights must be positive")

    def key(self):
        return (self.from_id.key(), self.to_id.key(), self.kind)

    def measurement(self) -> Pose:
        return Pose(self.rel_rotation, self.rel_translation)


class MissingVertexError(KeyError):
    """An edge or lookup referenced a keyframe the graph does not contain."""


class PoseGraph:
    """Undirected pose graph with value semantics.

    Vertices map keyframe ids to their current pose estimate; edges are
    relative-pose measurements. An adjacency index and a CSR snapshot (used by
    the numeric kernels) are maintained lazily.
    """

    def __init__(self):
        self.vertices: dict[KeyframeId, Pose] = {}
        self.edges: list[PoseGraphEdge] = []
        self._adj: dict[KeyframeId, set[KeyframeId]] = {}
        self._edge_keys: set = set()
        self._csr = None

    # -- construction -----------------------------------------------------

    def add_vertex(self, kf: KeyframeId, pose: Pose):
        if kf in self.vertices:
            raise ValueError(f"duplicate vertex {kf}")
        self.vertices[kf] = pose
        self._adj[kf] = set()
        self._csr = None

    def add_edge(self, edge: PoseGraphEdge):
        if edge.from_id not in self.vertices:
            raise MissingVertexError(edge.from_id)
        if edge.to_id not in self.vertices:
            raise MissingVertexError(edge.to_id)
        if edge.key() in self._edge_keys:
            raise ValueError(f"duplicate edge {edge.key()}")
        self.edges.append(edge)
        self._edge_keys.add(edge.key())
        self._adj[edge.from_id].add(edge.to_id)
        self._adj[edge.to_id].add(edge.from_id)
        self._csr = None

    def has_vertex(self, kf: KeyframeId) -> bool:
        return kf in self.vertices

    def has_edge_key(self, key) -> bool:
        return key in self._edge_keys

    # -- queries -----------------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def neighbors(self, kf: KeyframeId) -> set:
        try:
            return self._adj[kf]
        except KeyError:
            raise MissingVertexError(kf) from None

    def copy(self) -> "PoseGraph":
        g = PoseGraph()
        g.vertices = dict(self.vertices)
        g.edges = list(self.edges)
        g._adj = {k: set(v) for k, v in self._adj.items()}
        g._edge_keys = set(self._edge_keys)
        return g

    def induced(self, keep) -> "PoseGraph":
        """Subgraph on the given vertex set (edges with both endpoints kept)."""
        keep = set(keep)
        g = PoseGraph()
        for kf, pose in self.vertices.items():
            if kf in keep:
                g.add_vertex(kf, pose)
        for e in self.edges:
            if e.from_id in keep and e.to_id in keep:
                g.add_edge(e)
        return g

    # -- flat snapshot for numeric code ------------------------------------

    def csr(self) -> "GraphArrays":
        """Array snapshot over vertices sorted by id (cached until mutation)."""
        if self._csr is None:
            self._csr = GraphArrays.from_graph(self)
        return self._csr

    def check_invariants(self):
        for e in self.edges:
            if e.from_id not in self.vertices or e.to_id not in self.vertices:
                raise MissingVertexError(e.key())
        deg_from_edges: dict[KeyframeId, set] = {k: set() for k in self.vertices}
        for e in self.edges:
            deg_from_edges[e.from_id].add(e.to_id)
            deg_from_edges[e.to_id].add(e.from_id)
        if deg_from_edges != self._adj:
            raise AssertionError("adjacency index out of sync with edge list")


class GraphArrays:
    """Flat, index-based view of a :class:`PoseGraph`.

    ``ids`` is sorted; every other array is aligned with it. Edges keep their
    insertion order so cost sums are reproducible.
    """

    def __init__(self, ids, index, indptr, indices, eu, ev, rel_R, rel_t, w_t, w_r, R, p):
        self.ids = ids
        self.index = index
        self.indptr = indptr
        self.indices = indices
        self.eu = eu
        self.ev = ev
        self.rel_R = rel_R
        self.rel_t = rel_t
        self.w_t = w_t
        self.w_r = w_r
        self.R = R
        self.p = p

    @property
    def n(self):
        return len(self.ids)

    @property
    def m(self):
        return len(self.eu)

    @staticmethod
    def from_graph(graph: PoseGraph, extra_edges=()) -> "GraphArrays":
        ids = sorted(graph.vertices.keys())
        index = {kf: i for i, kf in enumerate(ids)}
        n = len(ids)
        edges = list(graph.edges) + list(extra_edges)
        m = len(edges)
        eu = np.empty(m, dtype=np.int64)
        ev = np.empty(m, dtype=np.int64)
        rel_R = np.empty((m, 3, 3))
        rel_t = np.empty((m, 3))
        w_t = np.empty(m)
        w_r = np.empty(m)
        for i, e in enumerate(edges):
            eu[i] = index[e.from_id]
            ev[i] = index[e.to_id]
            rel_R[i] = e.rel_rotation
            rel_t[i] = e.rel_translation
            w_t[i] = e.weight_t
            w_r[i] = e.weight_r
        R = np.empty((n, 3, 3))
        p = np.empty((n, 3))
        for kf, i in index.items():
            pose = graph.vertices[kf]
            R[i] = pose.rotation
            p[i] = pose.translation
        # CSR adjacency with ascending neighbor ids per row
        counts = np.zeros(n, dtype=np.int64)
        np.add.at(counts, eu, 1)
        np.add.at(counts, ev, 1)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        indices = np.empty(indptr[-1], dtype=np.int64)
        fill = indptr[:-1].copy()
        for a, b in zip(eu, ev):
            indices[fill[a]] = b
            fill[a] += 1
            indices[fill[b]] = a
            fill[b] += 1
        for i in range(n):
            seg = indices[indptr[i]:indptr[i + 1]]
            seg.sort()
        return GraphArrays(ids, index, indptr, indices, eu, ev, rel_R, rel_t, w_t, w_r, R, p)

    def with_extra_edges(self, graph: PoseGraph, extra_edges) -> "GraphArrays":
        return GraphArrays.from_graph(graph, extra_edges=extra_edges)
