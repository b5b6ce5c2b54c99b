"""Asynchronous per-robot gradient descent on the manifold.

Each robot repeatedly computes the gradient of its local cost against the
latest published neighbor copies, retracts, and publishes. Robots run on
simulated clocks: one iteration takes block_size / rate seconds, so a robot
performs floor(rate * budget / block_size) iterations and bigger blocks
iterate less (the iteration-imbalance effect the benchmark measures).
Interleaving is a deterministic event queue seeded by ``seed``.
"""

from __future__ import annotations

import heapq
import math

import numpy as np

from ..core import GraphArrays, Pose, so3_exp_many
from ..core.cost import evaluate_cost_arrays
from ..partition.metrics import comm_volume_per_partition
from .report import SolveReport, iteration_imbalance, utilization_of


def _tangent_rot_grad(R_local, G_euclid):
    """Coordinate gradient of f(R exp(hat(w))) at w=0 from the Euclidean gradient."""
    M = np.einsum("nba,nbc->nac", R_local, G_euclid)
    return np.stack([M[:, 2, 1] - M[:, 1, 2],
                     M[:, 0, 2] - M[:, 2, 0],
                     M[:, 1, 0] - M[:, 0, 1]], axis=1)


def riemannian_gradient(sub, estimates):
    """Gradient of a subproblem's local cost at ``estimates``.

    Returns {keyframe: (rot_grad(3,), trans_grad(3,))} for the local
    variables: translation gradients are plain Euclidean; rotation gradients
    are the Euclidean block projected to the tangent space at R (expressed in
    the exponential chart, so finite differences along R exp(h e_m) match).
    """
    def pose_of(kf):
        if kf in estimates:
            return estimates[kf]
        return sub.remote_copies[kf]

    local = {kf: i for i, kf in enumerate(sub.local_vars)}
    nb = len(local)
    Gp = np.zeros((nb, 3))
    GR = np.zeros((nb, 3, 3))
    edges = [(e, True, True) for e in sub.intra_edges] + \
            [(e, lf, False) for e, lf in sub.inter_edges]
    for e, local_is_from, intra in edges:
        pi, pj = pose_of(e.from_id), pose_of(e.to_id)
        ct = e.weight_t ** 2
        cr = e.weight_r ** 2
        r_t = pj.translation - pi.translation - pi.rotation @ e.rel_translation
        r_R = pj.rotation - pi.rotation @ e.rel_rotation
        i_loc = local.get(e.from_id)
        j_loc = local.get(e.to_id)
        if i_loc is not None and (intra or local_is_from):
            Gp[i_loc] -= 2.0 * ct * r_t
            GR[i_loc] += -2.0 * ct * np.outer(r_t, e.rel_translation) \
                - cr * (r_R @ e.rel_rotation.T)
        if j_loc is not None and (intra or not local_is_from):
            Gp[j_loc] += 2.0 * ct * r_t
            GR[j_loc] += cr * r_R
    R_local = np.stack([pose_of(kf).rotation for kf in sub.local_vars]) \
        if nb else np.zeros((0, 3, 3))
    g_rot = _tangent_rot_grad(R_local, GR) if nb else np.zeros((0, 3))
    return {kf: (g_rot[i], Gp[i]) for kf, i in local.items()}


class _RobotBlock:
    """Precomputed index arrays for one robot's gradient step."""

    def __init__(self, arrays: GraphArrays, assign, b):
        self.local = np.where(assign == b)[0]
        slot = np.full(arrays.n, -1, dtype=np.int64)
        slot[self.local] = np.arange(len(self.local))
        touch = np.zeros(arrays.m, dtype=bool)
        if arrays.m:
            touch = (assign[arrays.eu] == b) | (assign[arrays.ev] == b)
        self.e = np.where(touch)[0]
        self.lu = slot[arrays.eu[self.e]]
        self.lv = slot[arrays.ev[self.e]]
        self.mu = self.lu >= 0
        self.mv = self.lv >= 0

    def step(self, arrays, R, p, step_size):
        e = self.e
        if len(self.local) == 0:
            return
        Ri = R[arrays.eu[e]]
        ct = (arrays.w_t[e] ** 2)[:, None]
        cr = (arrays.w_r[e] ** 2)
        r_t = p[arrays.ev[e]] - p[arrays.eu[e]] - np.einsum("eij,ej->ei", Ri, arrays.rel_t[e])
        r_R = R[arrays.ev[e]] - Ri @ arrays.rel_R[e]
        nb = len(self.local)
        Gp = np.zeros((nb, 3))
        GR = np.zeros((nb, 3, 3))
        if np.any(self.mu):
            mu = self.mu
            np.add.at(Gp, self.lu[mu], -2.0 * (ct[mu] * r_t[mu]))
            contrib = -2.0 * ct[mu, :, None] * np.einsum("ei,ej->eij", r_t[mu], arrays.rel_t[e][mu]) \
                - cr[mu, None, None] * (r_R[mu] @ np.swapaxes(arrays.rel_R[e][mu], 1, 2))
            np.add.at(GR, self.lu[mu], contrib)
        if np.any(self.mv):
            mv = self.mv
            np.add.at(Gp, self.lv[mv], 2.0 * (ct[mv] * r_t[mv]))
            np.add.at(GR, self.lv[mv], cr[mv, None, None] * r_R[mv])
        g_rot = _tangent_rot_grad(R[self.local], GR)
        R[self.local] = R[self.local] @ so3_exp_many(-step_size * g_rot)
        p[self.local] -= step_size * Gp


def asapp_solve_arrays(graph, parts, step=1e-5, budget_seconds=5.0, rate_model=2000.0,
                       seed=0, sigma_p=1, extra_edges=(), R0=None, p0=None,
                       max_iters_per_robot=100000):
    """Array-level solve; returns (R, p, SolveReport)."""
    if step <= 0:
        raise ValueError("step must be positive")
    solve_arrays = GraphArrays.from_graph(graph, extra_edges=extra_edges)
    cost_arrays = graph.csr()
    if R0 is None:
        R0, p0 = solve_arrays.R.copy(), solve_arrays.p.copy()
    R = R0.copy()
    p = p0.copy()
    assign = np.empty(solve_arrays.n, dtype=np.int64)
    for kf, idx in solve_arrays.index.items():
        assign[idx] = parts.assignment[kf]
    initial_cost = evaluate_cost_arrays(cost_arrays, R, p)

    k = parts.k
    rate = rate_model if callable(rate_model) else (lambda r: float(rate_model))
    blocks = [_RobotBlock(solve_arrays, assign, b) for b in range(k)]
    sizes = parts.sizes()
    planned = []
    durations = []
    for b in range(k):
        B = sizes[b]
        if B == 0 or rate(b) <= 0:
            planned.append(0)
            durations.append(0.0)
            continue
        planned.append(min(int(math.floor(rate(b) * budget_seconds / B)),
                           max_iters_per_robot))
        durations.append(B / rate(b))

    rng = np.random.default_rng(seed)
    offsets = rng.uniform(0.0, 1.0, size=k)
    heap = []
    for b in range(k):
        if planned[b] > 0:
            heapq.heappush(heap, (offsets[b] * durations[b] + durations[b], b, 1))
    done = [0] * k
    while heap:
        t, b, i = heapq.heappop(heap)
        blocks[b].step(solve_arrays, R, p, step)
        done[b] = i
        if i < planned[b]:
            heapq.heappush(heap, (t + durations[b], b, i + 1))

    final_cost = evaluate_cost_arrays(cost_arrays, R, p)
    busy = [done[b] * durations[b] for b in range(k)]
    per_part_vol = comm_volume_per_partition(graph, parts, sigma_p)
    comm_total = int(sum(done[b] * int(per_part_vol[b]) for b in range(k)))
    report = SolveReport(
        solver="asapp",
        k=k,
        iterations=list(done),
        wall_times=busy,
        time_sim=float(budget_seconds),
        utilization=utilization_of(busy),
        iter_imbalance=iteration_imbalance(done),
        initial_cost=initial_cost,
        final_cost=final_cost,
        comm_volume_total=comm_total,
        diverged=bool(final_cost > 1.1 * initial_cost + 1e-12),
    )
    return R, p, report


def asapp_solve(graph, parts, step=1e-5, budget_seconds=5.0, rate_model=2000.0, **kwargs):
    """Asynchronous gradient-descent solve; returns (estimates, SolveReport)."""
    R, p, report = asapp_solve_arrays(graph, parts, step, budget_seconds,
                                      rate_model, **kwargs)
    arrays = graph.csr()
    estimates = {kf: Pose(R[i], p[i]) for kf, i in arrays.index.items()}
    return estimates, report
