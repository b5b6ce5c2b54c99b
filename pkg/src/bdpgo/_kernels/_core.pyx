# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; semantics mirror pyref.py line for line.

Both backends must stay bit-identical: same expressions, same evaluation
order, no fused multiply-adds (see -ffp-contract=off in setup.py).
"""

from libc.math cimport pow, INFINITY

import numpy as np
cimport numpy as cnp

cnp.import_array()

NAME = "compiled"

ctypedef cnp.int64_t i64


def fennel_pick(i64[::1] counts, i64[::1] sizes, long capacity, double alpha, double gamma):
    """See pyref.fennel_pick."""
    cdef Py_ssize_t k = sizes.shape[0]
    cdef Py_ssize_t i
    cdef long best = -1
    cdef double best_score = -INFINITY
    cdef long best_size = 0
    cdef long size
    cdef double score
    for i in range(k):
        size = sizes[i]
        if size >= capacity:
            continue
        score = <double>counts[i] - alpha * gamma * pow(<double>size, gamma - 1.0)
        if best < 0 or score > best_score or (score == best_score and size < best_size):
            best = i
            best_score = score
            best_size = size
    return best


cdef void _neighbor_counts(i64[::1] indptr, i64[::1] indices, i64[::1] assign,
                           Py_ssize_t v, Py_ssize_t k, i64[::1] counts) noexcept:
    cdef Py_ssize_t i, e
    for i in range(k):
        counts[i] = 0
    for e in range(indptr[v], indptr[v + 1]):
        counts[assign[indices[e]]] += 1


cdef (long, double) _best_target(i64[::1] counts, i64[::1] sizes, long input_part,
                                 long cur, Py_ssize_t k, long size_hi, double mw) noexcept:
    cdef long cnt_cur = counts[cur]
    cdef long best_t = -1
    cdef double best_gain = -INFINITY
    cdef long best_size = 0
    cdef Py_ssize_t t
    cdef double gain
    cdef long dm
    for t in range(k):
        if t == cur or sizes[t] + 1 > size_hi:
            continue
        gain = <double>(counts[t] - cnt_cur)
        dm = (1 if t != input_part else 0) - (1 if cur != input_part else 0)
        if dm != 0:
            gain -= mw * dm
        if best_t < 0 or gain > best_gain or (
            gain == best_gain and (sizes[t] < best_size
                                   or (sizes[t] == best_size and t < best_t))
        ):
            best_t = t
            best_gain = gain
            best_size = sizes[t]
    return best_t, best_gain


def refine(i64[::1] indptr, i64[::1] indices, cnp.ndarray[i64, ndim=1] assign_arr,
           i64[::1] input_assign, long k, long size_hi, long size_lo, double mw,
           i64[::1] order, long max_passes):
    """See pyref.refine."""
    cdef i64[::1] assign = assign_arr
    cdef Py_ssize_t n = assign.shape[0]
    cdef cnp.ndarray[i64, ndim=1] sizes_arr = np.zeros(k, dtype=np.int64)
    cdef i64[::1] sizes = sizes_arr
    cdef cnp.ndarray[i64, ndim=1] counts_arr = np.zeros(k, dtype=np.int64)
    cdef i64[::1] counts = counts_arr
    cdef Py_ssize_t v, i, e, oi
    cdef long moves = 0, moved
    cdef long p_over, p_under, cur, best_v, best_t, t, dm
    cdef double best_gain, gain
    cdef long pass_i
    cdef bint boundary

    for v in range(n):
        sizes[assign[v]] += 1

    # stage 1: shed overfull partitions
    while True:
        p_over = -1
        for i in range(k):
            if sizes[i] > size_hi and (p_over < 0 or sizes[i] > sizes[p_over]):
                p_over = i
        if p_over < 0:
            break
        best_gain = -INFINITY
        best_v = -1
        best_t = -1
        for v in range(n):
            if assign[v] != p_over:
                continue
            _neighbor_counts(indptr, indices, assign, v, k, counts)
            t, gain = _best_target(counts, sizes, input_assign[v], p_over, k, size_hi, mw)
            if t >= 0 and gain > best_gain:
                best_gain = gain
                best_v = v
                best_t = t
        if best_v < 0:
            break
        assign[best_v] = best_t
        sizes[p_over] -= 1
        sizes[best_t] += 1
        moves += 1

    # stage 2: fill underfull partitions
    while True:
        p_under = -1
        for i in range(k):
            if sizes[i] < size_lo and (p_under < 0 or sizes[i] < sizes[p_under]):
                p_under = i
        if p_under < 0:
            break
        best_gain = -INFINITY
        best_v = -1
        for v in range(n):
            cur = assign[v]
            if cur == p_under or sizes[cur] - 1 < size_lo:
                continue
            _neighbor_counts(indptr, indices, assign, v, k, counts)
            gain = <double>(counts[p_under] - counts[cur])
            dm = (1 if p_under != input_assign[v] else 0) - (1 if cur != input_assign[v] else 0)
            if dm != 0:
                gain -= mw * dm
            if gain > best_gain:
                best_gain = gain
                best_v = v
        if best_v < 0:
            break
        sizes[assign[best_v]] -= 1
        assign[best_v] = p_under
        sizes[p_under] += 1
        moves += 1

    # stage 3: positive-gain boundary moves
    for pass_i in range(max_passes):
        moved = 0
        for oi in range(n):
            v = order[oi]
            cur = assign[v]
            if sizes[cur] - 1 < size_lo:
                continue
            boundary = False
            for e in range(indptr[v], indptr[v + 1]):
                if assign[indices[e]] != cur:
                    boundary = True
                    break
            if not boundary:
                continue
            _neighbor_counts(indptr, indices, assign, v, k, counts)
            t, gain = _best_target(counts, sizes, input_assign[v], cur, k, size_hi, mw)
            if t >= 0 and gain > 0.0:
                sizes[cur] -= 1
                assign[v] = t
                sizes[t] += 1
                moved += 1
        moves += moved
        if moved == 0:
            break
    return moves


def edge_cut(i64[::1] eu, i64[::1] ev, i64[::1] assign):
    """See pyref.edge_cut."""
    cdef Py_ssize_t m = eu.shape[0]
    cdef Py_ssize_t i
    cdef long cut = 0
    for i in range(m):
        if assign[eu[i]] != assign[ev[i]]:
            cut += 1
    return cut


def bfs_path(i64[::1] indptr, i64[::1] indices, i64[::1] sources, i64[::1] targets):
    """See pyref.bfs_path."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef cnp.ndarray[i64, ndim=1] parent_arr = np.full(n, -2, dtype=np.int64)
    cdef i64[::1] parent = parent_arr
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] is_target_arr = np.zeros(n, dtype=np.uint8)
    cdef cnp.uint8_t[::1] is_target = is_target_arr
    cdef cnp.ndarray[i64, ndim=1] queue_arr = np.empty(n, dtype=np.int64)
    cdef i64[::1] queue = queue_arr
    cdef Py_ssize_t head = 0, tail = 0
    cdef Py_ssize_t i, e
    cdef long v, w, found = -1

    for i in range(targets.shape[0]):
        is_target[targets[i]] = 1
    for i in range(sources.shape[0]):
        parent[sources[i]] = -1
        queue[tail] = sources[i]
        tail += 1
    while head < tail and found < 0:
        v = queue[head]
        head += 1
        for e in range(indptr[v], indptr[v + 1]):
            w = indices[e]
            if parent[w] != -2:
                continue
            parent[w] = v
            if is_target[w]:
                found = w
                break
            queue[tail] = w
            tail += 1
    if found < 0:
        return None
    path = [found]
    while parent[path[-1]] != -1:
        path.append(parent[path[-1]])
    path.reverse()
    return [int(x) for x in path]
