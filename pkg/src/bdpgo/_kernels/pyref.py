"""Pure-Python reference kernels.

The compiled extension (`_core.pyx`) mirrors these routines operation for
operation; both must produce bit-identical results. Keep the arithmetic
expressions in the two files literally in sync.
"""

import math

import numpy as np

NAME = "python"


def fennel_pick(counts, sizes, capacity, alpha, gamma):
    """Greedy streaming-assignment score argmax.

    score(i) = counts[i] - alpha * gamma * sizes[i]**(gamma - 1); partitions at
    or above ``capacity`` are vetoed. Ties prefer the smaller partition, then
    the smaller index. Returns -1 when every partition is at capacity.
    """
    k = len(sizes)
    best = -1
    best_score = -math.inf
    best_size = 0
    for i in range(k):
        size = int(sizes[i])
        if size >= capacity:
            continue
        score = float(counts[i]) - alpha * gamma * float(size) ** (gamma - 1.0)
        if best < 0 or score > best_score or (score == best_score and size < best_size):
            best = i
            best_score = score
            best_size = size
    return best


def _best_target(counts, sizes, input_part, cur, k, size_hi, mw):
    """Best destination for one vertex: max gain, then smaller size, then index."""
    cnt_cur = counts[cur]
    best_t = -1
    best_gain = -math.inf
    best_size = 0
    for t in range(k):
        if t == cur or sizes[t] + 1 > size_hi:
            continue
        gain = float(counts[t] - cnt_cur)
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


def refine(indptr, indices, assign, input_assign, k, size_hi, size_lo, mw, order, max_passes):
    """Balanced boundary-move refinement.

    Mutates ``assign`` in place. Three stages: shed overfull partitions down
    to ``size_hi``, fill underfull partitions up to ``size_lo``, then greedy
    single-vertex moves with strictly positive gain
    (cut reduction - mw * migration delta). Returns the number of moves.
    """
    n = len(assign)
    indptr_l = indptr.tolist()
    indices_l = indices.tolist()
    input_l = input_assign.tolist()
    assign_l = assign.tolist()
    order_l = order.tolist()
    sizes = [0] * k
    for v in range(n):
        sizes[assign_l[v]] += 1
    counts = [0] * k
    moves = 0

    def neighbor_counts(v):
        for i in range(k):
            counts[i] = 0
        for e in range(indptr_l[v], indptr_l[v + 1]):
            counts[assign_l[indices_l[e]]] += 1

    # stage 1: shed overfull partitions
    while True:
        p_over = -1
        for i in range(k):
            if sizes[i] > size_hi and (p_over < 0 or sizes[i] > sizes[p_over]):
                p_over = i
        if p_over < 0:
            break
        best_gain = -math.inf
        best_v = -1
        best_t = -1
        for v in range(n):
            if assign_l[v] != p_over:
                continue
            neighbor_counts(v)
            t, gain = _best_target(counts, sizes, input_l[v], p_over, k, size_hi, mw)
            if t >= 0 and gain > best_gain:
                best_gain = gain
                best_v = v
                best_t = t
        if best_v < 0:
            break
        assign_l[best_v] = best_t
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
        best_gain = -math.inf
        best_v = -1
        for v in range(n):
            cur = assign_l[v]
            if cur == p_under or sizes[cur] - 1 < size_lo:
                continue
            neighbor_counts(v)
            gain = float(counts[p_under] - counts[cur])
            dm = (1 if p_under != input_l[v] else 0) - (1 if cur != input_l[v] else 0)
            if dm != 0:
                gain -= mw * dm
            if gain > best_gain:
                best_gain = gain
                best_v = v
        if best_v < 0:
            break
        sizes[assign_l[best_v]] -= 1
        assign_l[best_v] = p_under
        sizes[p_under] += 1
        moves += 1

    # stage 3: positive-gain boundary moves
    for _ in range(max_passes):
        moved = 0
        for oi in range(n):
            v = order_l[oi]
            cur = assign_l[v]
            if sizes[cur] - 1 < size_lo:
                continue
            boundary = False
            for e in range(indptr_l[v], indptr_l[v + 1]):
                if assign_l[indices_l[e]] != cur:
                    boundary = True
                    break
            if not boundary:
                continue
            neighbor_counts(v)
            t, gain = _best_target(counts, sizes, input_l[v], cur, k, size_hi, mw)
            if t >= 0 and gain > 0.0:
                sizes[cur] -= 1
                assign_l[v] = t
                sizes[t] += 1
                moved += 1
        moves += moved
        if moved == 0:
            break

    assign[:] = assign_l
    return moves


def edge_cut(eu, ev, assign):
    """Number of edges whose endpoints lie in different partitions."""
    cut = 0
    for i in range(len(eu)):
        if assign[eu[i]] != assign[ev[i]]:
            cut += 1
    return cut


def bfs_path(indptr, indices, sources, targets):
    """Minimum-hop path from any source to any target (unit weights).

    Sources are visited in the given (ascending) order and CSR neighbor lists
    are ascending, so tie-breaking is deterministic: among minimum-hop paths
    the one reaching the smallest-id vertices first. Returns an index list or
    None when unreachable.
    """
    n = len(indptr) - 1
    parent = np.full(n, -2, dtype=np.int64)
    is_target = np.zeros(n, dtype=bool)
    is_target[np.asarray(targets, dtype=np.int64)] = True
    queue = []
    for s in sources:
        parent[s] = -1
        queue.append(int(s))
    head = 0
    found = -1
    while head < len(queue) and found < 0:
        v = queue[head]
        head += 1
        for e in range(indptr[v], indptr[v + 1]):
            w = indices[e]
            if parent[w] != -2:
                continue
            parent[w] = v
            if is_target[w]:
                found = int(w)
                break
            queue.append(int(w))
    if found < 0:
        return None
    path = [found]
    while parent[path[-1]] != -1:
        path.append(int(parent[path[-1]]))
    path.reverse()
    return path
