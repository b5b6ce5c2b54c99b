"""Synthetic pose-graph dataset generation.

The benchmark protocol runs on classic public pose graphs (indoor lab scans,
city-block odometry, torus/grid/sphere meshes). Those files are not bundled
here, so structurally matching stand-ins are generated instead, with the same
vertex/edge counts for the two planar sets and the same lattice topology for
the 3D sets. Vertex estimates come from noisy odometry integration; edge
measurements are noisy ground-truth relative poses, so optimization has real
work to do.
"""

from __future__ import annotations

import math
import os

import numpy as np

from .core import rot_z, so3_exp
from .core.g2o import write_se2_g2o, write_se3_g2o

ODO_T_SIGMA = 0.03
ODO_R_SIGMA = 0.008
LOOP_T_SIGMA = 0.02
LOOP_R_SIGMA = 0.005


def _se2_rel(a, b):
    """Relative planar pose from a=(x,y,th) to b."""
    dx, dy = b[0] - a[0], b[1] - a[1]
    c, s = math.cos(-a[2]), math.sin(-a[2])
    return (c * dx - s * dy, s * dx + c * dy, _wrap(b[2] - a[2]))


def _wrap(theta):
    return (theta + math.pi) % (2.0 * math.pi) - math.pi


def _se2_dataset(gt, loops, rng):
    """Noisy measurements + odometry-integrated estimates from GT poses."""
    n = len(gt)
    edges = []
    est = [gt[0]]
    for i in range(n - 1):
        dx, dy, dth = _se2_rel(gt[i], gt[i + 1])
        dx += rng.normal(0.0, ODO_T_SIGMA)
        dy += rng.normal(0.0, ODO_T_SIGMA)
        dth += rng.normal(0.0, ODO_R_SIGMA)
        edges.append((i, i + 1, dx, dy, dth, 1.0, 1.0))
        x, y, th = est[-1]
        c, s = math.cos(th), math.sin(th)
        est.append((x + c * dx - s * dy, y + s * dx + c * dy, _wrap(th + dth)))
    for (i, j) in loops:
        dx, dy, dth = _se2_rel(gt[i], gt[j])
        dx += rng.normal(0.0, LOOP_T_SIGMA)
        dy += rng.normal(0.0, LOOP_T_SIGMA)
        dth += rng.normal(0.0, LOOP_R_SIGMA)
        edges.append((i, j, dx, dy, dth, 1.0, 1.0))
    return est, edges


def _pick_loops(positions, n_loops, rng, min_gap=20, radius=1.5):
    """Loop-closure pairs among revisits: close in space, far apart in time."""
    cells = {}
    candidates = []
    for i, (x, y) in enumerate(positions):
        key = (int(math.floor(x / radius)), int(math.floor(y / radius)))
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for j in cells.get((key[0] + dx, key[1] + dy), ()):
                    if i - j >= min_gap:
                        candidates.append((j, i))
        cells.setdefault(key, []).append(i)
    if len(candidates) < n_loops:
        # degenerate trajectory: pad with long-range pairs
        while len(candidates) < n_loops:
            i = int(rng.integers(len(positions) - min_gap))
            candidates.append((i, i + min_gap))
    idx = rng.choice(len(candidates), size=n_loops, replace=False)
    return [candidates[int(i)] for i in sorted(idx)]


def make_intel(path, seed=3, n_poses=1228, n_edges=1501):
    """Indoor-lab style planar wander in a bounded arena."""
    rng = np.random.default_rng(seed)
    gt = [(0.0, 0.0, 0.0)]
    x, y, th = 0.0, 0.0, 0.0
    for _ in range(n_poses - 1):
        th = _wrap(th + rng.normal(0.0, 0.35) + (rng.uniform() < 0.04) * rng.choice([-1.6, 1.6]))
        x += 0.6 * math.cos(th)
        y += 0.6 * math.sin(th)
        # keep the walk inside a lab-sized footprint
        if abs(x) > 18.0:
            th = _wrap(math.pi - th)
            x = math.copysign(18.0, x)
        if abs(y) > 14.0:
            th = _wrap(-th)
            y = math.copysign(14.0, y)
        gt.append((x, y, th))
    loops = _pick_loops([(px, py) for px, py, _ in gt], n_edges - (n_poses - 1), rng)
    est, edges = _se2_dataset(gt, loops, rng)
    write_se2_g2o(path, est, edges)
    return path


def make_manhattan(path, seed=7, n_poses=3500, n_edges=5548):
    """City-block planar random walk with axis-aligned headings."""
    rng = np.random.default_rng(seed)
    headings = [0.0, math.pi / 2, math.pi, -math.pi / 2]
    h = 0
    x, y = 0.0, 0.0
    gt = [(x, y, headings[h])]
    for _ in range(n_poses - 1):
        u = rng.uniform()
        if u < 0.15:
            h = (h + 1) % 4
        elif u < 0.30:
            h = (h - 1) % 4
        x += math.cos(headings[h])
        y += math.sin(headings[h])
        if abs(x) > 30.0 or abs(y) > 30.0:  # bounce back into the grid
            h = (h + 2) % 4
            x = min(max(x, -30.0), 30.0)
            y = min(max(y, -30.0), 30.0)
        gt.append((x, y, headings[h]))
    loops = _pick_loops([(px, py) for px, py, _ in gt],
                        n_edges - (n_poses - 1), rng, min_gap=30, radius=1.0)
    est, edges = _se2_dataset(gt, loops, rng)
    write_se2_g2o(path, est, edges)
    return path


def _se3_dataset(gt_R, gt_p, odo_pairs, loop_pairs, rng):
    n = len(gt_R)
    edges = []
    adj = []
    for (i, j) in odo_pairs:
        adj.append((i, j, True))
    for (i, j) in loop_pairs:
        adj.append((i, j, False))
    est_R = [None] * n
    est_p = [None] * n
    est_R[0] = gt_R[0].copy()
    est_p[0] = gt_p[0].copy()
    for (i, j, is_odo) in adj:
        Rij = gt_R[i].T @ gt_R[j]
        tij = gt_R[i].T @ (gt_p[j] - gt_p[i])
        sig_r = ODO_R_SIGMA if is_odo else LOOP_R_SIGMA
        sig_t = ODO_T_SIGMA if is_odo else LOOP_T_SIGMA
        Rm = Rij @ so3_exp(rng.normal(0.0, sig_r, 3))
        tm = tij + rng.normal(0.0, sig_t, 3)
        edges.append((i, j, Rm, tm, 1.0, 1.0))
        if is_odo and est_R[j] is None:
            est_R[j] = est_R[i] @ Rm
            est_p[j] = est_p[i] + est_R[i] @ tm
    poses = list(zip(est_R, est_p))
    return poses, edges


def make_grid(path, seed=11, nx=10, ny=10, nz=10, spacing=1.0):
    """3D lattice: serpentine odometry chain + all remaining lattice adjacencies."""
    rng = np.random.default_rng(seed)
    coord = []
    for z in range(nz):
        for y in range(ny):
            xs = range(nx) if (y + z * ny) % 2 == 0 else range(nx - 1, -1, -1)
            for x in xs:
                coord.append((x, y, z))
    index = {c: i for i, c in enumerate(coord)}
    n = len(coord)
    gt_R = [so3_exp(rng.normal(0.0, 0.3, 3)) for _ in range(n)]
    gt_p = [spacing * np.array(c, dtype=float) for c in coord]
    odo = [(i, i + 1) for i in range(n - 1)]
    odo_set = {tuple(sorted(p)) for p in odo}
    loops = []
    for c, i in index.items():
        for axis in range(3):
            nb = list(c)
            nb[axis] += 1
            j = index.get(tuple(nb))
            if j is not None and tuple(sorted((i, j))) not in odo_set:
                loops.append((min(i, j), max(i, j)))
    poses, edges = _se3_dataset(gt_R, gt_p, odo, loops, rng)
    write_se3_g2o(path, poses, edges)
    return path


def make_torus(path, seed=13, n_major=32, n_minor=32, R_major=6.0, r_minor=2.0):
    """Torus lattice swept ring by ring."""
    rng = np.random.default_rng(seed)
    n = n_major * n_minor
    gt_R = []
    gt_p = []
    for a in range(n_major):
        for b in range(n_minor):
            u = 2.0 * math.pi * a / n_major
            v = 2.0 * math.pi * b / n_minor
            x = (R_major + r_minor * math.cos(v)) * math.cos(u)
            y = (R_major + r_minor * math.cos(v)) * math.sin(u)
            z = r_minor * math.sin(v)
            gt_p.append(np.array([x, y, z]))
            gt_R.append(rot_z(u) @ so3_exp(np.array([v, 0.0, 0.0])))
    def vid(a, b):
        return (a % n_major) * n_minor + (b % n_minor)
    odo = [(i, i + 1) for i in range(n - 1)]
    odo_set = {tuple(sorted(p)) for p in odo}
    loops = []
    for a in range(n_major):
        for b in range(n_minor):
            i = vid(a, b)
            for (j) in (vid(a, b + 1), vid(a + 1, b)):
                key = tuple(sorted((i, j)))
                if i != j and key not in odo_set:
                    loops.append(key)
    loops = sorted(set(loops))
    poses, edges = _se3_dataset(gt_R, gt_p, odo, loops, rng)
    write_se3_g2o(path, poses, edges)
    return path


GENERATORS = {
    "intel": make_intel,
    "manhattan": make_manhattan,
    "grid": make_grid,
    "torus": make_torus,
}


def generate_all(out_dir, seed=0):
    os.makedirs(out_dir, exist_ok=True)
    written = {}
    for name, gen in GENERATORS.items():
        target = os.path.join(out_dir, f"{name}.g2o")
        gen(target, seed=seed + {"intel": 3, "manhattan": 7, "grid": 11, "torus": 13}[name])
        written[name] = target
    return written
