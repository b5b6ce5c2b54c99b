"""Command-line entry points: scenario runner, comparisons, datasets, benchmarks.

Exit codes of ``run``: 0 on success, 2 for configuration/startup problems,
3 when an in-simulation invariant fails.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import BACKEND_NAME, datasets
from .core import parse_g2o
from .reporting import BenchmarkRow, compare_rows, format_table, summarize
from .swarm import ADHOC, INFRASTRUCTURE, NetworkModel, SwarmSimulator, SimInvariantError
from .trajgen import generate_paths, paths_csv, schedule_stream

_DEFAULTS = {
    "dataset": None,
    "name": None,
    "n_robots": 10,
    "mode": INFRASTRUCTURE,
    "radius": 10.0,
    "failures": "",
    "dn": 100,
    "gamma": 1.5,
    "nu": 1.1,
    "solver": "dgs",
    "method": "proposed",
    "seed": 0,
    "solve_every": 10,
    "sigma_p": 1,
    "balance_tol": 1.05,
    "migration_weight": 0.5,
    "dgs_max_iters": 100,
    "dgs_stop_tol": 1e-4,
    "unit_cost": 1e-5,
    "asapp_step": 1e-5,
    "asapp_budget": 5.0,
    "asapp_rate": 2000.0,
    "asapp_max_iters": 400,
    "path_profile": "skewed",
}

_INT_KEYS = {"n_robots", "dn", "seed", "solve_every", "sigma_p",
             "dgs_max_iters", "asapp_max_iters"}
_FLOAT_KEYS = {"radius", "gamma", "nu", "balance_tol", "migration_weight",
               "dgs_stop_tol", "unit_cost", "asapp_step", "asapp_budget",
               "asapp_rate"}


class ConfigError(ValueError):
    pass


def parse_config(text: str) -> dict:
    """Key = value scenario file; '#' starts a comment."""
    cfg = dict(_DEFAULTS)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in cfg:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in _INT_KEYS:
            cfg[key] = int(value)
        elif key in _FLOAT_KEYS:
            cfg[key] = float(value)
        else:
            cfg[key] = value
    return cfg


def parse_failures(spec: str) -> dict:
    """Failure schedule "robot:tick, robot:tick"."""
    out = {}
    spec = spec.strip()
    if not spec:
        return out
    for item in spec.split(","):
        robot, tick = item.strip().split(":")
        out[int(robot)] = int(tick)
    return out


def _positions_from_paths(graph, paths, n_ticks):
    pos = np.zeros((len(paths), n_ticks, 3))
    for p in paths:
        xyz = np.array([graph.vertices[v].translation for v in p.vertices])
        last = min(len(xyz), n_ticks)
        pos[p.robot, :last] = xyz[:n_ticks]
        if last < n_ticks:
            pos[p.robot, last:] = xyz[-1]
    return pos


def run_scenario(cfg: dict, out_dir=None, collect_estimates=False):
    """Execute one scenario; optionally write the output bundle. Returns
    (BenchmarkRow, SimResult)."""
    if not cfg.get("dataset"):
        raise ConfigError("config must name a dataset file")
    if not os.path.exists(cfg["dataset"]):
        raise ConfigError(f"dataset not found: {cfg['dataset']}")
    with open(cfg["dataset"]) as fh:
        graph = parse_g2o(fh.read())
    name = cfg.get("name") or os.path.splitext(os.path.basename(cfg["dataset"]))[0]

    paths = generate_paths(graph, cfg["n_robots"], seed=cfg["seed"],
                           profile=cfg["path_profile"])
    events, _ = schedule_stream(paths, graph)
    n_ticks = max(len(p) for p in paths)
    failures = parse_failures(cfg["failures"])
    positions = None
    if cfg["mode"] == ADHOC:
        positions = _positions_from_paths(graph, paths, n_ticks)
    net = NetworkModel(n_robots=cfg["n_robots"], mode=cfg["mode"],
                       radius=cfg["radius"], positions=positions,
                       failures=failures)
    sim = SwarmSimulator(
        events, cfg["n_robots"], net, cfg["method"], solver=cfg["solver"],
        dn=cfg["dn"], gamma=cfg["gamma"], nu=cfg["nu"], seed=cfg["seed"],
        solve_every=cfg["solve_every"], sigma_p=cfg["sigma_p"],
        balance_tol=cfg["balance_tol"], migration_weight=cfg["migration_weight"],
        dgs_max_iters=cfg["dgs_max_iters"], dgs_stop_tol=cfg["dgs_stop_tol"],
        unit_cost=cfg["unit_cost"], asapp_step=cfg["asapp_step"],
        asapp_budget=cfg["asapp_budget"], asapp_rate=cfg["asapp_rate"],
        asapp_max_iters=cfg["asapp_max_iters"],
        collect_estimates=collect_estimates,
    )
    result = sim.run()
    row = summarize(result, name, cfg["method"], cfg["solver"], cfg["seed"])

    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "metrics.csv"), "w") as fh:
            fh.write(result.metrics_csv())
        with open(os.path.join(out_dir, "events.jsonl"), "w") as fh:
            for ev in result.events:
                fh.write(json.dumps(ev, sort_keys=True) + "\n")
        with open(os.path.join(out_dir, "paths.csv"), "w") as fh:
            fh.write(paths_csv(paths))
        with open(os.path.join(out_dir, "report.json"), "w") as fh:
            fh.write(row.to_json())
    return row, result


def _cmd_run(args):
    try:
        with open(args.config) as fh:
            cfg = parse_config(fh.read())
        if args.seed is not None:
            cfg["seed"] = args.seed
        if args.method is not None:
            cfg["method"] = args.method
        if args.solver is not None:
            cfg["solver"] = args.solver
        out = args.out
        if args.split_methods:
            out = os.path.join(args.out, f"{cfg['method']}_{cfg['solver']}")
    except (OSError, ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        row, result = run_scenario(cfg, out)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SimInvariantError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    print(f"{row.dataset} method={row.method} solver={row.solver} "
          f"solves={row.n_solves} lambda_imb={row.mean_lambda_imb:.4g} "
          f"final_cost={row.mean_final_cost:.6g} comm={row.total_comm}")
    return 0


def _cmd_compare(args):
    rows = []
    for root, _dirs, files in os.walk(args.in_dir):
        for f in files:
            if f == "report.json":
                with open(os.path.join(root, f)) as fh:
                    rows.append(BenchmarkRow.from_json(fh.read()))
    if not rows:
        print(f"error: no report.json files under {args.in_dir}", file=sys.stderr)
        return 2
    groups = {}
    for r in rows:
        groups.setdefault((r.dataset, r.solver), []).append(r)
    csv_lines = ["dataset,solver," + ",".join(compare_rows(rows[:1])[0])]
    for (dataset, solver), group in sorted(groups.items()):
        header, table = compare_rows(group)
        print(f"== {dataset} / {solver} ==")
        print(format_table(header, table))
        for line in table:
            csv_lines.append(",".join([dataset, solver] + line))
    out = os.path.join(args.in_dir, "comparison.csv")
    with open(out, "w") as fh:
        fh.write("\n".join(csv_lines) + "\n")
    print(f"wrote {out}")
    return 0


def _cmd_datasets(args):
    written = datasets.generate_all(args.out, seed=args.seed)
    for name, path in sorted(written.items()):
        print(f"{name}: {path}")
    return 0


def _cmd_bench(args):
    from .benchmarks import kernel_benchmark
    report = kernel_benchmark(n_vertices=args.n, seed=args.seed)
    print(json.dumps(report, indent=2, sort_keys=True))
    if args.out:
        os.makedirs(os.path.dirname(args.out) or ".", exist_ok=True)
        with open(args.out, "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="bdpgo",
        description="Balanced distributed pose graph optimization benchmark harness "
                    f"(kernel backend: {BACKEND_NAME})")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", required=True)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--method", choices=["baseline", "nofennel", "proposed"])
    p_run.add_argument("--solver", choices=["dgs", "asapp"])
    p_run.add_argument("--split-methods", action="store_true",
                       help="write outputs under <out>/<method>_<solver>/")
    p_run.set_defaults(func=_cmd_run)

    p_cmp = sub.add_parser("compare", help="tabulate report.json files")
    p_cmp.add_argument("--in", dest="in_dir", required=True)
    p_cmp.set_defaults(func=_cmd_compare)

    p_ds = sub.add_parser("datasets", help="generate the synthetic datasets")
    p_ds.add_argument("--out", required=True)
    p_ds.add_argument("--seed", type=int, default=0)
    p_ds.set_defaults(func=_cmd_datasets)

    p_bench = sub.add_parser("bench", help="kernel backend benchmark")
    p_bench.add_argument("--n", type=int, default=10000)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--out", default=None)
    p_bench.set_defaults(func=_cmd_bench)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
