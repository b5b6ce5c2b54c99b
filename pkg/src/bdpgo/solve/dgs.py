"""Synchronous two-phase distributed solver.

Phase 1 relaxes rotations to flat 3x3 blocks and minimizes the chordal
objective by per-robot block sweeps; phase 2 takes a single Gauss-Newton
linearization of the full objective at the initialized rotations and solves
its normal equations with the same sweep machinery. Per-robot solve time is
simulated as unit_cost x block size, so speed and utilization figures are
hardware independent.
"""

from __future__ import annotations

import numpy as np

from ..core import GraphArrays, Pose, project_to_so3_many, so3_exp_many
from ..core.cost import evaluate_cost_arrays
from ..partition.metrics import comm_volume
from .engine import AnchoringError, BlockSweepSystem
from .report import SolveReport, iteration_imbalance, utilization_of

# so(3) generators, matching rotations.hat
_GEN = np.zeros((3, 3, 3))
_GEN[0, 1, 2] = -1.0
_GEN[0, 2, 1] = 1.0
_GEN[1, 0, 2] = 1.0
_GEN[1, 2, 0] = -1.0
_GEN[2, 0, 1] = -1.0
_GEN[2, 1, 0] = 1.0


def hat_many(v):
    out = np.zeros(v.shape[:-1] + (3, 3))
    out[..., 0, 1] = -v[..., 2]
    out[..., 0, 2] = v[..., 1]
    out[..., 1, 0] = v[..., 2]
    out[..., 1, 2] = -v[..., 0]
    out[..., 2, 0] = -v[..., 1]
    out[..., 2, 1] = v[..., 0]
    return out


def component_anchors(arrays: GraphArrays):
    """Smallest-id pose of every connected component (gauge anchors)."""
    n = arrays.n
    anchored = np.zeros(n, dtype=bool)
    seen = np.zeros(n, dtype=bool)
    for start in range(n):
        if seen[start]:
            continue
        anchored[start] = True  # ids are sorted, so `start` is the component minimum
        stack = [start]
        seen[start] = True
        while stack:
            v = stack.pop()
            for e in range(arrays.indptr[v], arrays.indptr[v + 1]):
                w = arrays.indices[e]
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
    return anchored


def _assign_of(arrays, parts):
    assign = np.empty(arrays.n, dtype=np.int64)
    for kf, idx in arrays.index.items():
        assign[idx] = parts.assignment[kf]
    return assign


def dgs_solve_arrays(graph, parts, max_iters_per_phase=100, stop_tol=1e-4,
                     unit_cost=1e-5, sigma_p=1, extra_edges=(), R0=None, p0=None):
    """Array-level solve; returns (R, p, SolveReport)."""
    solve_arrays = GraphArrays.from_graph(graph, extra_edges=extra_edges)
    cost_arrays = graph.csr()
    n = solve_arrays.n
    if R0 is None:
        R0, p0 = solve_arrays.R.copy(), solve_arrays.p.copy()
    assign = _assign_of(solve_arrays, parts)
    anchored = component_anchors(solve_arrays)
    initial_cost = evaluate_cost_arrays(cost_arrays, R0, p0)

    w_rot = solve_arrays.w_r ** 2

    # phase 1: chordal rotation initialization on flat 3x3 blocks
    diag_scalar = np.zeros(n)
    np.add.at(diag_scalar, solve_arrays.eu, w_rot)
    np.add.at(diag_scalar, solve_arrays.ev, w_rot)
    diag1 = diag_scalar[:, None, None] * np.eye(3)[None, :, :]
    blocks1 = -w_rot[:, None, None] * solve_arrays.rel_R
    x1 = np.swapaxes(R0, 1, 2).copy()  # column r holds row r of the rotation
    sys1 = BlockSweepSystem(parts.k, 3, 3, assign, anchored, diag1,
                            solve_arrays.eu, solve_arrays.ev, blocks1,
                            np.zeros((n, 3, 3)))
    x1, sweeps1 = sys1.run(x1, max_iters_per_phase, stop_tol)
    X = np.swapaxes(x1, 1, 2)
    R_init = R0.copy()
    free = ~anchored
    if np.any(free):
        R_init[free] = project_to_so3_many(X[free])

    # phase 2: one Gauss-Newton linearization at the initialized rotations
    Ri = R_init[solve_arrays.eu]
    Rj = R_init[solve_arrays.ev]
    w_r = 0.5 * solve_arrays.w_r ** 2
    w_t = solve_arrays.w_t ** 2
    m = solve_arrays.m

    r_rot = (Rj - Ri @ solve_arrays.rel_R).reshape(m, 9)
    r_t = p0[solve_arrays.ev] - p0[solve_arrays.eu] \
        - np.einsum("eij,ej->ei", Ri, solve_arrays.rel_t)
    Jr_j = np.einsum("eab,mbc->emac", Rj, _GEN).reshape(m, 3, 9).transpose(0, 2, 1)
    Jr_i = -np.einsum("eab,mbc,ecd->emad", Ri, _GEN, solve_arrays.rel_R) \
        .reshape(m, 3, 9).transpose(0, 2, 1)
    Jti = Ri @ hat_many(solve_arrays.rel_t)

    H_ii = np.zeros((m, 6, 6))
    H_ij = np.zeros((m, 6, 6))
    H_jj = np.zeros((m, 6, 6))
    g = np.zeros((n, 6))
    wr = w_r[:, None, None]
    wt = w_t[:, None, None]
    eye3 = np.eye(3)
    H_ii[:, :3, :3] = wr * np.einsum("eam,ean->emn", Jr_i, Jr_i) \
        + wt * np.einsum("eam,ean->emn", Jti, Jti)
    H_ii[:, :3, 3:] = -wt * np.swapaxes(Jti, 1, 2)
    H_ii[:, 3:, :3] = np.swapaxes(H_ii[:, :3, 3:], 1, 2)
    H_ii[:, 3:, 3:] = wt * eye3
    H_jj[:, :3, :3] = wr * np.einsum("eam,ean->emn", Jr_j, Jr_j)
    H_jj[:, 3:, 3:] = wt * eye3
    H_ij[:, :3, :3] = wr * np.einsum("eam,ean->emn", Jr_i, Jr_j)
    H_ij[:, :3, 3:] = wt * np.swapaxes(Jti, 1, 2)
    H_ij[:, 3:, 3:] = -wt * eye3

    g_i = np.concatenate([
        np.einsum("eam,ea->em", Jr_i, w_r[:, None] * r_rot)
        + np.einsum("eam,ea->em", Jti, w_t[:, None] * r_t),
        -w_t[:, None] * r_t,
    ], axis=1)
    g_j = np.concatenate([
        np.einsum("eam,ea->em", Jr_j, w_r[:, None] * r_rot),
        w_t[:, None] * r_t,
    ], axis=1)
    np.add.at(g, solve_arrays.eu, g_i)
    np.add.at(g, solve_arrays.ev, g_j)

    diag2 = np.zeros((n, 6, 6))
    np.add.at(diag2, solve_arrays.eu, H_ii)
    np.add.at(diag2, solve_arrays.ev, H_jj)
    rhs2 = -g[:, :, None]
    sys2 = BlockSweepSystem(parts.k, 6, 1, assign, anchored, diag2,
                            solve_arrays.eu, solve_arrays.ev, H_ij, rhs2)
    x2 = np.zeros((n, 6, 1))
    x2, sweeps2 = sys2.run(x2, max_iters_per_phase, stop_tol)

    theta = x2[:, :3, 0]
    delta_p = x2[:, 3:, 0]
    R_final = R_init @ so3_exp_many(theta)
    p_final = p0 + delta_p
    final_cost = evaluate_cost_arrays(cost_arrays, R_final, p_final)

    sweeps = sweeps1 + sweeps2
    sizes = np.array(parts.sizes(), dtype=float)
    busy = (sweeps * unit_cost) * sizes
    vol = comm_volume(graph, parts, sigma_p)
    iterations = [sweeps if s > 0 else 0 for s in parts.sizes()]
    report = SolveReport(
        solver="dgs",
        k=parts.k,
        iterations=iterations,
        wall_times=busy.tolist(),
        time_sim=float(busy.max()) if len(busy) else 0.0,
        utilization=utilization_of(busy.tolist()),
        iter_imbalance=iteration_imbalance(iterations),
        initial_cost=initial_cost,
        final_cost=final_cost,
        comm_volume_total=sweeps * vol,
        sweeps_phase1=sweeps1,
        sweeps_phase2=sweeps2,
    )
    return R_final, p_final, report


def dgs_solve(graph, parts, max_iters_per_phase=100, stop_tol=1e-4, **kwargs):
    """Two-phase distributed solve; returns (estimates, SolveReport)."""
    R, p, report = dgs_solve_arrays(graph, parts, max_iters_per_phase,
                                    stop_tol, **kwargs)
    arrays = graph.csr()
    estimates = {kf: Pose(R[i], p[i]) for kf, i in arrays.index.items()}
    return estimates, report


__all__ = ["dgs_solve", "dgs_solve_arrays", "component_anchors", "AnchoringError", "hat_many"]
