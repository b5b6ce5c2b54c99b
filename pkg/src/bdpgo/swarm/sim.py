"""Deterministic discrete-event simulation of the whole swarm protocol.

Each tick: keyframes arrive and are pushed to currently connected robots,
then every sub-swarm runs its partitioning step (pull-diff sync, repartition
when needed, solve when due). All per-tick processing iterates robots in
sorted order, so identical inputs and seeds replay byte-for-byte.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from ..core import evaluate_cost_arrays
from ..partition import (
    InfeasiblePartitionError,
    Partitioning,
    FennelParams,
    partition_metrics,
    repair_connectivity,
    repartition,
)
from ..solve import decomposition_cost_arrays, dgs_solve_arrays, asapp_solve_arrays
from .network import NetworkModel, sub_swarms
from .state import BASELINE, METHODS, PROPOSED, SwarmState


class SimInvariantError(RuntimeError):
    """A simulation-level invariant failed; names the invariant."""

    def __init__(self, invariant, detail=""):
        super().__init__(f"invariant violated: {invariant} {detail}".rstrip())
        self.invariant = invariant


@dataclass
class SolveRecord:
    step: int
    tick: int
    main: int
    members: tuple
    metrics: object
    report: object

    def csv_row(self) -> str:
        return self.metrics.csv_row(self.step) + "," + self.report.csv_row()


@dataclass
class SimResult:
    events: list
    solves: list
    n_keyframes: int
    partition_overhead_ms: float
    repartitions: int = 0

    CSV_HEADER = ("step,lambda_imb,lambda_cut,lambda_vol,comm_volume,additional_edges,"
                  "solver,k,iterations_max,time_sim,utilization,iter_imbalance,"
                  "initial_cost,final_cost,comm_total")

    def metrics_csv(self) -> str:
        return "\n".join([self.CSV_HEADER] + [s.csv_row() for s in self.solves]) + "\n"


class SwarmSimulator:
    """Runs one scenario: a keyframe stream over a network model."""

    def __init__(self, stream_events, n_robots, net: NetworkModel, method: str,
                 solver: str = "dgs", dn: int = 100, gamma: float = 1.5,
                 nu: float = 1.1, seed: int = 0, solve_every: int = 10,
                 sigma_p: int = 1, balance_tol: float = 1.05,
                 migration_weight: float = 0.5, dgs_max_iters: int = 100,
                 dgs_stop_tol: float = 1e-4, unit_cost: float = 1e-5,
                 asapp_step: float = 1e-5, asapp_budget: float = 5.0,
                 asapp_rate: float = 2000.0, asapp_max_iters: int = 400,
                 collect_estimates: bool = False):
        if method not in METHODS:
            raise ValueError(f"unknown method {method!r}")
        if solver not in ("dgs", "asapp"):
            raise ValueError(f"unknown solver {solver!r}")
        self.n_robots = n_robots
        self.net = net
        self.method = method
        self.solver = solver
        self.dn = dn
        self.seed = seed
        self.solve_every = solve_every
        self.sigma_p = sigma_p
        self.balance_tol = balance_tol
        self.migration_weight = migration_weight
        self.dgs_max_iters = dgs_max_iters
        self.dgs_stop_tol = dgs_stop_tol
        self.unit_cost = unit_cost
        self.asapp_step = asapp_step
        self.asapp_budget = asapp_budget
        self.asapp_rate = asapp_rate
        self.asapp_max_iters = asapp_max_iters
        self.collect_estimates = collect_estimates

        self.by_tick: dict = {}
        for ev in stream_events:
            self.by_tick.setdefault(ev.tick, []).append(ev)
        self.max_tick = max(self.by_tick) if self.by_tick else -1

        self.states = [SwarmState(r, FennelParams.initial(n_robots, dn, gamma, nu), dn)
                       for r in range(n_robots)]
        self.events: list = []
        self.solves: list = []
        self.repart_time = 0.0
        self.n_repartitions = 0
        self.n_delivered = 0
        self._last_topology = None
        self._solve_step = 0
        self.last_estimates = None

    # -- helpers -------------------------------------------------------------

    def _log(self, tick, type_, **payload):
        ev = {"tick": tick, "type": type_}
        ev.update(payload)
        self.events.append(ev)

    def _sync(self, members, tick):
        """Pull-diff: bring every member to the union of the sub-swarm's knowledge."""
        states = [self.states[r] for r in members]
        fps = {s.fingerprint for s in states}
        if len(fps) == 1:
            return 0
        union_vertices = {}
        union_edges = {}
        union_owners = {}
        for s in states:
            for kf, pose in s.graph.vertices.items():
                union_vertices.setdefault(kf, pose)
            for e in s.graph.edges:
                union_edges.setdefault(e.key(), e)
            for key, e in s.pending_edges.items():
                union_edges.setdefault(key, e)
            for kf, entry in s.owners.items():
                cur = union_owners.get(kf)
                if cur is None or entry.epoch > cur.epoch:
                    union_owners[kf] = entry
        pulled = 0
        for s in states:
            for kf in sorted(union_vertices):
                if not s.graph.has_vertex(kf):
                    s.add_vertex(kf, union_vertices[kf])
                    s.keyframes_since_repart += 1
                    s.keyframes_since_solve += 1
                    pulled += 1
            for key in sorted(union_edges):
                s.try_add_edge(union_edges[key])
            s.flush_pending()
            for kf in sorted(union_owners):
                entry = union_owners[kf]
                s.set_owner(kf, entry.owner, entry.epoch)
            s.epoch = max(s.epoch, max((e.epoch for e in union_owners.values()), default=0))
        return pulled

    def _repartition(self, ss, tick):
        main = self.states[ss.main]
        members = list(ss.members)
        k = len(members)
        graph = main.graph
        if k > graph.n_vertices:
            return False  # too early; retry next window
        rank = {r: i for i, r in enumerate(members)}
        current = Partitioning(k)
        spread = 0
        for i, kf in enumerate(sorted(graph.vertices)):
            entry = main.owners.get(kf)
            if entry is not None and entry.owner in rank:
                current.assign(kf, rank[entry.owner])
            else:
                # owner failed or belongs to another sub-swarm: spread evenly,
                # the refinement below re-balances and re-cuts anyway
                current.assign(kf, spread % k)
                spread += 1
        new_epoch = max(s.epoch for s in (self.states[r] for r in members)) + 1
        repart_seed = (self.seed * 1_000_003 + new_epoch * 101 + ss.main) & 0x7FFFFFFF
        t0 = time.perf_counter()
        result = repartition(graph, current, k, self.balance_tol,
                             self.migration_weight, repart_seed)
        self.repart_time += time.perf_counter() - t0
        owners = {kf: members[i] for kf, i in result.assignment.items()}
        union_v, union_e = graph.n_vertices, graph.n_edges
        for r in members:
            self.states[r].handle_remote_partitions(owners, new_epoch, union_v, union_e)
        self.n_repartitions += 1
        sizes = [len(result.sets[i]) for i in range(k)]
        self._log(tick, "repartition", main=ss.main, members=members,
                  epoch=new_epoch, sizes=sizes)
        return True

    def _solve(self, ss, tick):
        main = self.states[ss.main]
        members = list(ss.members)
        k = len(members)
        rank = {r: i for i, r in enumerate(members)}
        orphans = [kf for kf, e in main.owners.items() if e.owner not in rank]
        if self.method != BASELINE and orphans:
            raise SimInvariantError(
                "subswarm-coverage",
                f"{len(orphans)} keyframes owned outside sub-swarm {members} at tick {tick}")
        if orphans:
            keep = [kf for kf, e in main.owners.items() if e.owner in rank]
            graph = main.graph.induced(keep)
        else:
            graph = main.graph
        if graph.n_vertices == 0:
            return
        parts = Partitioning(k)
        for kf in graph.vertices:
            parts.assign(kf, rank[main.owners[kf].owner])
        parts.validate(graph)

        repairs = repair_connectivity(graph, parts)

        arrays = graph.csr()
        assign = np.empty(arrays.n, dtype=np.int64)
        for kf, idx in arrays.index.items():
            assign[idx] = parts.assignment[kf]
        central = evaluate_cost_arrays(arrays, arrays.R, arrays.p)
        decomposed = decomposition_cost_arrays(arrays, assign, arrays.R, arrays.p)
        if not math.isclose(central, decomposed, rel_tol=1e-9, abs_tol=1e-9):
            raise SimInvariantError(
                "cost-decomposition",
                f"central {central!r} vs distributed {decomposed!r} at tick {tick}")

        if self.solver == "dgs":
            R, p, report = dgs_solve_arrays(
                graph, parts, self.dgs_max_iters, self.dgs_stop_tol,
                unit_cost=self.unit_cost, sigma_p=self.sigma_p, extra_edges=repairs)
        else:
            R, p, report = asapp_solve_arrays(
                graph, parts, step=self.asapp_step, budget_seconds=self.asapp_budget,
                rate_model=self.asapp_rate, seed=self.seed + self._solve_step,
                sigma_p=self.sigma_p, extra_edges=repairs,
                max_iters_per_robot=self.asapp_max_iters)
        if self.collect_estimates:
            self.last_estimates = (list(arrays.ids), R, p)

        metrics = partition_metrics(graph, parts, self.sigma_p, len(repairs))
        record = SolveRecord(self._solve_step, tick, ss.main, tuple(members),
                             metrics, report)
        self.solves.append(record)
        self._solve_step += 1
        for r in members:
            self.states[r].keyframes_since_solve = 0
        self._log(tick, "solve", main=ss.main, members=members, k=k,
                  step=record.step,
                  lambda_imb=_json_float(metrics.imbalance),
                  lambda_cut=metrics.edge_cut_factor,
                  lambda_vol=metrics.comm_volume_factor,
                  comm_volume=metrics.raw_comm_volume,
                  additional_edges=metrics.additional_edges,
                  solver=self.solver,
                  iterations_max=report.iterations_max,
                  time_sim=report.time_sim,
                  utilization=report.utilization,
                  iter_imbalance=report.iter_imbalance,
                  initial_cost=report.initial_cost,
                  final_cost=report.final_cost,
                  comm_total=report.comm_volume_total)

    # -- main loop -------------------------------------------------------------

    def run(self) -> SimResult:
        # robots know the initial topology; only changes trigger repartitions
        initial = sub_swarms(self.net, 0)
        member_of = {}
        for ss in initial:
            for r in ss.members:
                member_of[r] = ss
        for ss in initial:
            for r in ss.members:
                self.states[r].last_topology = frozenset(ss.members)
        failed_logged = set()

        for tick in range(self.max_tick + 1):
            groups = sub_swarms(self.net, tick)
            member_of = {}
            for ss in groups:
                for r in ss.members:
                    member_of[r] = ss
            topo = [list(ss.members) for ss in groups]
            if topo != self._last_topology:
                self._log(tick, "topology", subswarms=topo)
                self._last_topology = topo
            for r, ft in sorted(self.net.failures.items()):
                if ft == tick and r not in failed_logged:
                    self._log(tick, "failure", robot=r)
                    failed_logged.add(r)

            for ev in self.by_tick.get(tick, ()):
                if not self.net.alive(ev.robot, tick):
                    continue
                state = self.states[ev.robot]
                ss = member_of[ev.robot]
                owner = state.handle_new_keyframe(ev.kf, ev.pose, ev.edges,
                                                  ss.members, self.method)
                self.n_delivered += 1
                for r in ss.members:
                    if r != ev.robot:
                        self.states[r].handle_remote_keyframe(
                            ev.kf, ev.pose, ev.edges, owner, state.epoch)
                self._log(tick, "keyframe", robot=ev.robot,
                          kf=[ev.kf.robot, ev.kf.seq], owner=owner)

            # partitioning step per sub-swarm: sync, repartition, solve
            for ss in groups:
                pulled = self._sync(ss.members, tick)
                if pulled:
                    self._log(tick, "sync", main=ss.main, pulled=pulled)
                main = self.states[ss.main]
                if self.method != BASELINE and main.need_repartition(ss.members):
                    self._repartition(ss, tick)
                if main.keyframes_since_solve >= self.solve_every:
                    self._solve(ss, tick)

        fennel_time = sum(s.fennel_time for s in self.states)
        overhead_ms = 0.0
        if self.n_delivered:
            overhead_ms = 1000.0 * (fennel_time + self.repart_time) / self.n_delivered
        return SimResult(self.events, self.solves, self.n_delivered,
                         overhead_ms, self.n_repartitions)


def _json_float(x):
    return x if math.isfinite(x) else "inf"
