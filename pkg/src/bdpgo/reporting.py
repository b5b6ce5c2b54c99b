"""Benchmark aggregation: per-run rows and cross-method comparison tables."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass


@dataclass
class BenchmarkRow:
    """Averages over all solve events of one scenario run."""

    dataset: str
    method: str
    solver: str
    n_solves: int
    n_keyframes: int
    repartitions: int
    mean_lambda_imb: float          # +inf when any solve saw an empty partition
    mean_lambda_imb_finite: float   # mean over finite samples only
    inf_lambda_events: int
    mean_lambda_cut: float
    mean_lambda_vol: float
    mean_comm_volume: float
    mean_additional_edges: float
    mean_iterations: float
    mean_time_sim: float
    mean_utilization: float
    mean_iter_imbalance: float
    mean_initial_cost: float
    mean_final_cost: float
    total_comm: int
    partition_overhead_ms: float
    seed: int

    def to_json(self) -> str:
        d = asdict(self)
        for key, val in d.items():
            if isinstance(val, float) and not math.isfinite(val):
                d[key] = "inf"
        return json.dumps(d, sort_keys=True, indent=2) + "\n"

    @staticmethod
    def from_json(text: str) -> "BenchmarkRow":
        d = json.loads(text)
        for key, val in d.items():
            if val == "inf":
                d[key] = math.inf
        return BenchmarkRow(**d)


def _mean(xs):
    xs = list(xs)
    return sum(xs) / len(xs) if xs else 0.0


def summarize(result, dataset: str, method: str, solver: str, seed: int) -> BenchmarkRow:
    solves = result.solves
    imb = [s.metrics.imbalance for s in solves]
    finite = [x for x in imb if math.isfinite(x)]
    return BenchmarkRow(
        dataset=dataset,
        method=method,
        solver=solver,
        n_solves=len(solves),
        n_keyframes=result.n_keyframes,
        repartitions=result.repartitions,
        mean_lambda_imb=_mean(imb) if finite == imb else math.inf,
        mean_lambda_imb_finite=_mean(finite),
        inf_lambda_events=len(imb) - len(finite),
        mean_lambda_cut=_mean(s.metrics.edge_cut_factor for s in solves),
        mean_lambda_vol=_mean(s.metrics.comm_volume_factor for s in solves),
        mean_comm_volume=_mean(s.metrics.raw_comm_volume for s in solves),
        mean_additional_edges=_mean(s.metrics.additional_edges for s in solves),
        mean_iterations=_mean(s.report.iterations_max for s in solves),
        mean_time_sim=_mean(s.report.time_sim for s in solves),
        mean_utilization=_mean(s.report.utilization for s in solves),
        mean_iter_imbalance=_mean(s.report.iter_imbalance for s in solves),
        mean_initial_cost=_mean(s.report.initial_cost for s in solves),
        mean_final_cost=_mean(s.report.final_cost for s in solves),
        total_comm=int(sum(s.report.comm_volume_total for s in solves)),
        partition_overhead_ms=result.partition_overhead_ms,
        seed=seed,
    )


COMPARE_COLUMNS = [
    "method", "lambda_imb", "lambda_cut", "lambda_vol", "add_edges",
    "time_sim", "utilization", "iter_imb", "final_cost", "total_comm",
    "speedup_vs_baseline", "comm_reduction_vs_baseline",
]


def compare_rows(rows):
    """Side-by-side comparison of methods sharing (dataset, solver).

    Returns (header, table rows) with speedup and communication-reduction
    ratios against the baseline row when present.
    """
    if not rows:
        raise ValueError("no rows to compare")
    key = {(r.dataset, r.solver) for r in rows}
    if len(key) != 1:
        raise ValueError(f"rows mix datasets/solvers: {sorted(key)}")
    base = next((r for r in rows if r.method == "baseline"), None)
    table = []
    for r in sorted(rows, key=lambda r: r.method):
        speedup = ""
        comm_red = ""
        if base is not None and r.mean_time_sim > 0:
            speedup = "%.3g" % (base.mean_time_sim / r.mean_time_sim)
        if base is not None and r.total_comm > 0:
            comm_red = "%.3g" % (base.total_comm / r.total_comm)
        imb = r.mean_lambda_imb
        table.append([
            r.method,
            "%.4g" % imb if math.isfinite(imb) else "inf",
            "%.4g" % r.mean_lambda_cut,
            "%.4g" % r.mean_lambda_vol,
            "%.4g" % r.mean_additional_edges,
            "%.6g" % r.mean_time_sim,
            "%.4g" % r.mean_utilization,
            "%.4g" % r.mean_iter_imbalance,
            "%.6g" % r.mean_final_cost,
            "%d" % r.total_comm,
            speedup,
            comm_red,
        ])
    return COMPARE_COLUMNS, table


def format_table(header, rows) -> str:
    widths = [max(len(str(h)), *(len(r[i]) for r in rows)) for i, h in enumerate(header)]
    lines = ["  ".join(str(h).ljust(w) for h, w in zip(header, widths))]
    for r in rows:
        lines.append("  ".join(str(c).ljust(w) for c, w in zip(r, widths)))
    return "\n".join(lines) + "\n"
