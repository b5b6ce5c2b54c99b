"""g2o text format reader/writer.

Supported records: VERTEX_SE3:QUAT / EDGE_SE3:QUAT and VERTEX_SE2 / EDGE_SE2.
Planar records are lifted to SE(3) (rotation about z, zero z-translation).
Information matrices collapse to two scalar weights: the mean of the diagonal
translation block and the mean of the diagonal rotation block.
"""

from __future__ import annotations

import io

import numpy as np

from .graph import KeyframeId, Pose, PoseGraph, PoseGraphEdge, LOOP, ODOMETRY
from .rotations import matrix_to_quat, quat_to_matrix, rot_z, so3_log


class G2oParseError(ValueError):
    """Malformed g2o input; carries the 1-based line number."""

    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class G2oReferenceError(G2oParseError):
    """Edge references a vertex id that was never declared."""


class G2oDataError(G2oParseError):
    """Numerically unusable record (e.g. zero-norm quaternion)."""


def _floats(parts, lineno):
    try:
        return [float(x) for x in parts]
    except ValueError as exc:
        raise G2oParseError(lineno, f"bad number: {exc}") from None


def _upper_tri_diag_means(values, dim, lineno, t_slice, r_slice):
    """Mean of translation/rotation diagonal entries of an upper-tri info matrix."""
    expected = dim * (dim + 1) // 2
    if len(values) != expected:
        raise G2oParseError(lineno, f"expected {expected} information entries, got {len(values)}")
    info = np.zeros((dim, dim))
    it = iter(values)
    for i in range(dim):
        for j in range(i, dim):
            info[i, j] = next(it)
    diag = np.diag(info)
    w_t = float(np.mean(diag[t_slice]))
    w_r = float(np.mean(diag[r_slice]))
    if w_t <= 0 or w_r <= 0:
        raise G2oDataError(lineno, "non-positive information diagonal")
    return w_t, w_r


def parse_g2o(source) -> PoseGraph:
    """Parse a g2o document from a string, bytes, or file-like object."""
    if isinstance(source, bytes):
        source = source.decode()
    if isinstance(source, str):
        source = io.StringIO(source)

    graph = PoseGraph()
    id_map: dict[int, KeyframeId] = {}
    pending_edges = []

    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        tag = parts[0]

        if tag == "VERTEX_SE3:QUAT":
            if len(parts) != 9:
                raise G2oParseError(lineno, f"VERTEX_SE3:QUAT needs 8 fields, got {len(parts) - 1}")
            vid = int(parts[1])
            x, y, z, qx, qy, qz, qw = _floats(parts[2:], lineno)
            norm = np.sqrt(qx * qx + qy * qy + qz * qz + qw * qw)
            if norm < 1e-12:
                raise G2oDataError(lineno, "quaternion norm below 1e-12")
            kf = KeyframeId(0, vid)
            id_map[vid] = kf
            graph.add_vertex(kf, Pose(quat_to_matrix(qx, qy, qz, qw), [x, y, z]))

        elif tag == "VERTEX_SE2":
            if len(parts) != 5:
                raise G2oParseError(lineno, f"VERTEX_SE2 needs 4 fields, got {len(parts) - 1}")
            vid = int(parts[1])
            x, y, theta = _floats(parts[2:], lineno)
            kf = KeyframeId(0, vid)
            id_map[vid] = kf
            graph.add_vertex(kf, Pose(rot_z(theta), [x, y, 0.0]))

        elif tag == "EDGE_SE3:QUAT":
            if len(parts) != 31:
                raise G2oParseError(lineno, f"EDGE_SE3:QUAT needs 30 fields, got {len(parts) - 1}")
            i, j = int(parts[1]), int(parts[2])
            vals = _floats(parts[3:], lineno)
            x, y, z, qx, qy, qz, qw = vals[:7]
            norm = np.sqrt(qx * qx + qy * qy + qz * qz + qw * qw)
            if norm < 1e-12:
                raise G2oDataError(lineno, "quaternion norm below 1e-12")
            w_t, w_r = _upper_tri_diag_means(vals[7:], 6, lineno, slice(0, 3), slice(3, 6))
            pending_edges.append((lineno, i, j, quat_to_matrix(qx, qy, qz, qw),
                                  np.array([x, y, z]), w_t, w_r))

        elif tag == "EDGE_SE2":
            if len(parts) != 12:
                raise G2oParseError(lineno, f"EDGE_SE2 needs 11 fields, got {len(parts) - 1}")
            i, j = int(parts[1]), int(parts[2])
            vals = _floats(parts[3:], lineno)
            dx, dy, dtheta = vals[:3]
            w_t, w_r = _upper_tri_diag_means(vals[3:], 3, lineno, slice(0, 2), slice(2, 3))
            pending_edges.append((lineno, i, j, rot_z(dtheta),
                                  np.array([dx, dy, 0.0]), w_t, w_r))

        else:
            raise G2oParseError(lineno, f"unknown record type {tag!r}")

    for lineno, i, j, rel_R, rel_t, w_t, w_r in pending_edges:
        if i not in id_map:
            raise G2oReferenceError(lineno, f"edge references unknown vertex {i}")
        if j not in id_map:
            raise G2oReferenceError(lineno, f"edge references unknown vertex {j}")
        # consecutive ids are odometry, anything else a loop closure
        kind = ODOMETRY if abs(i - j) == 1 else LOOP
        graph.add_edge(PoseGraphEdge(id_map[i], id_map[j], rel_R, rel_t, w_t, w_r, kind))

    return graph


def serialize_g2o(graph: PoseGraph) -> str:
    """Write a graph as SE3:QUAT records (weights expand to diagonal info)."""
    out = []
    ids = sorted(graph.vertices.keys())
    number = {kf: i for i, kf in enumerate(ids)}
    for kf in ids:
        pose = graph.vertices[kf]
        q = matrix_to_quat(pose.rotation)
        t = pose.translation
        out.append(
            "VERTEX_SE3:QUAT %d %.17g %.17g %.17g %.17g %.17g %.17g %.17g"
            % (number[kf], t[0], t[1], t[2], q[0], q[1], q[2], q[3])
        )
    for e in graph.edges:
        q = matrix_to_quat(e.rel_rotation)
        t = e.rel_translation
        diag = [e.weight_t] * 3 + [e.weight_r] * 3
        info = []
        for i in range(6):
            for j in range(i, 6):
                info.append(diag[i] if i == j else 0.0)
        out.append(
            "EDGE_SE3:QUAT %d %d %.17g %.17g %.17g %.17g %.17g %.17g %.17g "
            % (number[e.from_id], number[e.to_id], t[0], t[1], t[2], q[0], q[1], q[2], q[3])
            + " ".join("%.17g" % v for v in info)
        )
    return "\n".join(out) + "\n"


def write_se2_g2o(path, poses, edges):
    """Write planar poses/edges as VERTEX_SE2 / EDGE_SE2 records.

    ``poses``: iterable of (x, y, theta). ``edges``: iterable of
    (i, j, dx, dy, dtheta, w_t, w_r).
    """
    with open(path, "w") as fh:
        for vid, (x, y, theta) in enumerate(poses):
            fh.write("VERTEX_SE2 %d %.12g %.12g %.12g\n" % (vid, x, y, theta))
        for (i, j, dx, dy, dtheta, w_t, w_r) in edges:
            info = (w_t, 0.0, 0.0, w_t, 0.0, w_r)
            fh.write(
                "EDGE_SE2 %d %d %.12g %.12g %.12g %s\n"
                % (i, j, dx, dy, dtheta, " ".join("%.12g" % v for v in info))
            )


def write_se3_g2o(path, poses, edges):
    """Write SE(3) poses/edges; rotations given as matrices.

    ``poses``: iterable of (R, t). ``edges``: (i, j, R, t, w_t, w_r).
    """
    with open(path, "w") as fh:
        for vid, (R, t) in enumerate(poses):
            q = matrix_to_quat(R)
            fh.write(
                "VERTEX_SE3:QUAT %d %.12g %.12g %.12g %.12g %.12g %.12g %.12g\n"
                % (vid, t[0], t[1], t[2], q[0], q[1], q[2], q[3])
            )
        for (i, j, R, t, w_t, w_r) in edges:
            q = matrix_to_quat(R)
            diag = [w_t] * 3 + [w_r] * 3
            info = []
            for a in range(6):
                for b in range(a, 6):
                    info.append(diag[a] if a == b else 0.0)
            fh.write(
                "EDGE_SE3:QUAT %d %d %.12g %.12g %.12g %.12g %.12g %.12g %.12g %s\n"
                % (i, j, t[0], t[1], t[2], q[0], q[1], q[2], q[3],
                   " ".join("%.12g" % v for v in info))
            )
