"""Micro-benchmarks: compiled kernels vs the pure-Python fallback.

Also measures the streaming-assignment cost per keyframe (the figure the
partitioning overhead budget is judged against). Run via ``bdpgo bench``.
"""

from __future__ import annotations

import time

import numpy as np

from ._kernels import available_backends, pyref

try:
    from ._kernels import _core
except ImportError:
    _core = None


def synthetic_csr(n, seed=0, extra_per_vertex=1.2):
    """Chain + random shortcut edges, as index arrays."""
    rng = np.random.default_rng(seed)
    eu = [np.arange(n - 1, dtype=np.int64)]
    ev = [np.arange(1, n, dtype=np.int64)]
    m_extra = int(extra_per_vertex * n)
    a = rng.integers(0, n, m_extra)
    b = rng.integers(0, n, m_extra)
    keep = a != b
    eu.append(np.minimum(a[keep], b[keep]).astype(np.int64))
    ev.append(np.maximum(a[keep], b[keep]).astype(np.int64))
    eu = np.concatenate(eu)
    ev = np.concatenate(ev)
    counts = np.zeros(n, dtype=np.int64)
    np.add.at(counts, eu, 1)
    np.add.at(counts, ev, 1)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    indices = np.empty(indptr[-1], dtype=np.int64)
    fill = indptr[:-1].copy()
    for x, y in zip(eu, ev):
        indices[fill[x]] = y
        fill[x] += 1
        indices[fill[y]] = x
        fill[y] += 1
    return indptr, indices, eu, ev


def _stream_assign(backend, indptr, indices, n, k, capacity, alpha, gamma):
    assign = np.full(n, -1, dtype=np.int64)
    sizes = np.zeros(k, dtype=np.int64)
    counts = np.zeros(k, dtype=np.int64)
    t0 = time.perf_counter()
    for v in range(n):
        counts[:] = 0
        for e in range(indptr[v], indptr[v + 1]):
            w = indices[e]
            if assign[w] >= 0:
                counts[assign[w]] += 1
        pick = backend.fennel_pick(counts, sizes, capacity, alpha, gamma)
        if pick < 0:
            pick = int(np.argmin(sizes))
        assign[v] = pick
        sizes[pick] += 1
    return assign, time.perf_counter() - t0


def kernel_benchmark(n_vertices=10000, k=10, seed=0):
    indptr, indices, eu, ev = synthetic_csr(n_vertices, seed)
    n = n_vertices
    alpha = np.sqrt(k) * len(eu) / float(n) ** 1.5
    capacity = int(np.ceil(1.1 * n / k))
    report = {"n_vertices": int(n), "n_edges": int(len(eu)), "k": k,
              "backends": available_backends()}

    backends = [("python", pyref)] + ([("compiled", _core)] if _core else [])
    assigns = {}
    for name, mod in backends:
        assign, dt = _stream_assign(mod, indptr, indices, n, k, capacity, alpha, 1.5)
        assigns[name] = assign
        report[f"fennel_ms_per_keyframe_{name}"] = dt / n * 1000.0

    rng = np.random.default_rng(seed + 1)
    base = assigns["python"].copy()
    refined = {}
    for name, mod in backends:
        assign = base.copy()
        order = rng.permutation(n).astype(np.int64)
        rng = np.random.default_rng(seed + 1)  # same order for both backends
        order = rng.permutation(n).astype(np.int64)
        t0 = time.perf_counter()
        moves = mod.refine(indptr, indices, assign, base.copy(), k,
                           int(np.ceil(n / k) * 1.05), (n // k) * 95 // 100,
                           0.5, order, 8)
        report[f"refine_seconds_{name}"] = time.perf_counter() - t0
        report[f"refine_moves_{name}"] = int(moves)
        refined[name] = assign

    if _core is not None:
        report["fennel_identical"] = bool(np.array_equal(assigns["python"],
                                                         assigns["compiled"]))
        report["refine_identical"] = bool(np.array_equal(refined["python"],
                                                         refined["compiled"]))
        report["refine_speedup"] = (report["refine_seconds_python"]
                                    / max(report["refine_seconds_compiled"], 1e-12))
        report["fennel_speedup"] = (report["fennel_ms_per_keyframe_python"]
                                    / max(report["fennel_ms_per_keyframe_compiled"], 1e-12))
    return report
