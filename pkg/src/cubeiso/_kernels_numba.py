"""Numba kernels; same names, signatures and results as ``_kernels_numpy``."""

import numpy as np
from numba import njit

from ._kernels_numpy import WORD_MASKS, covering_arcs, flow_network_arcs  # noqa: F401

_OPTS = dict(cache=True, nogil=True)

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)


@njit(**_OPTS)
def _popcount(x):
    x = x - ((x >> np.uint64(1)) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    return np.int64((x * _H01) >> np.uint64(56))


@njit(**_OPTS)
def _edge_counts(words, i0, masks):
    diff = 0
    dec = 0
    s = 1 << i0
    if s < 64:
        mask = masks[i0]
        sh = np.uint64(s)
        for k in range(words.shape[0]):
            w = words[k]
            lo = w & mask
            hi = (w >> sh) & mask
            diff += _popcount(lo ^ hi)
            dec += _popcount(lo & ~hi)
    else:
        sw = s >> 6
        for base in range(0, words.shape[0], 2 * sw):
            for k in range(base, base + sw):
                lo = words[k]
                hi = words[k + sw]
                diff += _popcount(lo ^ hi)
                dec += _popcount(lo & ~hi)
    return diff, dec


def edge_counts(words, m, i0):
    """Return ``(differing_edges, decreasing_edges)`` along coordinate ``i0``."""
    d, c = _edge_counts(words, i0, WORD_MASKS)
    return int(d), int(c)


@njit(**_OPTS)
def _all_edge_counts(words, m, masks):
    diff = np.zeros(m, dtype=np.int64)
    dec = np.zeros(m, dtype=np.int64)
    for i0 in range(m):
        diff[i0], dec[i0] = _edge_counts(words, i0, masks)
    return diff, dec


def all_edge_counts(words, m):
    return _all_edge_counts(words, m, WORD_MASKS)


@njit(**_OPTS)
def sensitivity_counts(bits, m):
    n_pts = bits.shape[0]
    sens = np.zeros(n_pts, dtype=np.uint8)
    neg = np.zeros(n_pts, dtype=np.uint8)
    for x in range(n_pts):
        fx = bits[x]
        s = 0
        c = 0
        for i0 in range(m):
            y = x ^ (1 << i0)
            if bits[y] != fx:
                s += 1
                if fx == 1 and (x >> i0) & 1 == 0:
                    c += 1
        sens[x] = s
        neg[x] = c
    return sens, neg


# --- exact min cut on the implicit closure network -------------------------
#
# Points 0..N-1, source N, sink N+1. Arc slots of a point x: 0..m-1 are the
# hypercube neighbours (up arcs have infinite capacity, a down arc x -> x^b is
# the residual of the up arc x^b -> x), slot m is the sink arc. Every source
# arc has capacity 1, so each augmenting path carries exactly one unit.


@njit(**_OPTS)
def _residual(u, a, m, bits, up_flow, snk_used):
    # target of slot a at point u, or -1 when that slot has no residual capacity
    if a == m:
        if bits[u] == 0 and snk_used[u] == 0:
            return -2
        return -1
    v = u ^ (1 << a)
    if (u >> a) & 1 == 0:
        return v
    if up_flow[v, a] > 0:
        return v
    return -1


@njit(**_OPTS)
def _bfs(m, bits, up_flow, src_used, snk_used, level, queue):
    n_pts = bits.shape[0]
    for x in range(n_pts):
        level[x] = -1
    head = 0
    tail = 0
    for x in range(n_pts):
        if bits[x] == 1 and src_used[x] == 0:
            level[x] = 1
            queue[tail] = x
            tail += 1
    sink_level = -1
    while head < tail:
        u = queue[head]
        head += 1
        if sink_level != -1 and level[u] >= sink_level:
            break
        for a in range(m + 1):
            v = _residual(u, a, m, bits, up_flow, snk_used)
            if v == -2:
                if sink_level == -1:
                    sink_level = level[u] + 1
            elif v >= 0 and level[v] == -1:
                level[v] = level[u] + 1
                queue[tail] = v
                tail += 1
    return sink_level


@njit(**_OPTS)
def _augment_from(start, m, bits, up_flow, snk_used, level, it, path, slots, sink_level):
    top = 0
    path[0] = start
    while top >= 0:
        u = path[top]
        moved = False
        while it[u] <= m:
            a = it[u]
            v = _residual(u, a, m, bits, up_flow, snk_used)
            if v == -2 and level[u] + 1 == sink_level:
                for k in range(top):
                    p = path[k]
                    b = slots[k]
                    if (p >> b) & 1 == 0:
                        up_flow[p, b] += 1
                    else:
                        up_flow[path[k + 1], b] -= 1
                snk_used[u] = 1
                return True
            if v >= 0 and level[v] == level[u] + 1:
                slots[top] = a
                top += 1
                path[top] = v
                moved = True
                break
            it[u] += 1
        if not moved:
            level[u] = -1
            top -= 1
            if top >= 0:
                it[path[top]] += 1
    return False


@njit(**_OPTS)
def _dinic(bits, m):
    n_pts = bits.shape[0]
    up_flow = np.zeros((n_pts, max(m, 1)), dtype=np.int32)
    src_used = np.zeros(n_pts, dtype=np.uint8)
    snk_used = np.zeros(n_pts, dtype=np.uint8)
    level = np.empty(n_pts, dtype=np.int64)
    queue = np.empty(n_pts, dtype=np.int64)
    it = np.zeros(n_pts, dtype=np.int64)
    path = np.empty(n_pts + 1, dtype=np.int64)
    slots = np.empty(n_pts + 1, dtype=np.int64)
    total = 0
    while True:
        sink_level = _bfs(m, bits, up_flow, src_used, snk_used, level, queue)
        if sink_level == -1:
            break
        for x in range(n_pts):
            it[x] = 0
        for x in range(n_pts):
            if bits[x] == 1 and src_used[x] == 0 and level[x] == 1:
                if _augment_from(x, m, bits, up_flow, snk_used, level, it, path, slots, sink_level):
                    src_used[x] = 1
                    total += 1
    # residual reachability from the source: minimal source side
    side = np.zeros(n_pts, dtype=np.uint8)
    head = 0
    tail = 0
    for x in range(n_pts):
        if bits[x] == 1 and src_used[x] == 0:
            side[x] = 1
            queue[tail] = x
            tail += 1
    while head < tail:
        u = queue[head]
        head += 1
        for a in range(m):
            v = _residual(u, a, m, bits, up_flow, snk_used)
            if v >= 0 and side[v] == 0:
                side[v] = 1
                queue[tail] = v
                tail += 1
    return total, side


def monotone_min_cut(bits, m):
    """Max-flow value and the source side (points only) of the minimal min cut."""
    total, side = _dinic(bits, m)
    return int(total), side


# --- Hopcroft-Karp on the violation graph ----------------------------------


@njit(**_OPTS)
def _violation_csr(bits, m):
    n_pts = bits.shape[0]
    full = n_pts - 1
    indptr = np.zeros(n_pts + 1, dtype=np.int64)
    for x in range(n_pts):
        c = 0
        if bits[x] == 1:
            comp = full & ~x
            s = comp
            while s != 0:
                if bits[x | s] == 0:
                    c += 1
                s = (s - 1) & comp
        indptr[x + 1] = indptr[x] + c
    indices = np.empty(indptr[n_pts], dtype=np.int64)
    for x in range(n_pts):
        if bits[x] == 1:
            k = indptr[x]
            comp = full & ~x
            s = comp
            while s != 0:
                if bits[x | s] == 0:
                    indices[k] = x | s
                    k += 1
                s = (s - 1) & comp
    return indptr, indices


@njit(**_OPTS)
def _hopcroft_karp(n_left, n_right, indptr, indices):
    inf = n_left + n_right + 1
    match_l = np.full(n_left, -1, dtype=np.int64)
    match_r = np.full(n_right, -1, dtype=np.int64)
    dist = np.empty(n_left, dtype=np.int64)
    queue = np.empty(n_left, dtype=np.int64)
    it = np.empty(n_left, dtype=np.int64)
    stack = np.empty(n_left + 1, dtype=np.int64)
    via = np.empty(n_left + 1, dtype=np.int64)
    size = 0
    while True:
        head = 0
        tail = 0
        for u in range(n_left):
            if match_l[u] == -1 and indptr[u + 1] > indptr[u]:
                dist[u] = 0
                queue[tail] = u
                tail += 1
            else:
                dist[u] = inf
        dist_free = inf
        while head < tail:
            u = queue[head]
            head += 1
            if dist[u] >= dist_free:
                continue
            for e in range(indptr[u], indptr[u + 1]):
                w = match_r[indices[e]]
                if w == -1:
                    if dist_free == inf:
                        dist_free = dist[u] + 1
                elif dist[w] == inf:
                    dist[w] = dist[u] + 1
                    queue[tail] = w
                    tail += 1
        if dist_free == inf:
            break
        for u in range(n_left):
            it[u] = indptr[u]
        for root in range(n_left):
            if match_l[root] != -1 or dist[root] != 0:
                continue
            top = 0
            stack[0] = root
            while top >= 0:
                u = stack[top]
                if it[u] < indptr[u + 1]:
                    v = indices[it[u]]
                    it[u] += 1
                    w = match_r[v]
                    if w == -1:
                        if dist[u] + 1 == dist_free:
                            via[top] = v
                            for k in range(top, -1, -1):
                                match_r[via[k]] = stack[k]
                                match_l[stack[k]] = via[k]
                            size += 1
                            break
                    elif dist[w] == dist[u] + 1:
                        via[top] = v
                        top += 1
                        stack[top] = w
                else:
                    dist[u] = inf
                    top -= 1
    return size


def violation_edges(bits, m):
    indptr, indices = _violation_csr(bits, m)
    xs = np.repeat(np.arange(bits.shape[0], dtype=np.int64), np.diff(indptr))
    return xs, indices


def max_violation_matching(bits, m):
    n_pts = bits.shape[0]
    indptr, indices = _violation_csr(bits, m)
    return int(_hopcroft_karp(n_pts, n_pts, indptr, indices))


# --- tribe sampling ---------------------------------------------------------


@njit(**_OPTS)
def partial_fisher_yates(draws):
    """Apply a partial Fisher-Yates shuffle of range(n) per row of ``draws``."""
    t, w = draws.shape
    out = np.empty((t, w), dtype=np.int64)
    pos = np.empty(w, dtype=np.int64)
    val = np.empty(w, dtype=np.int64)
    for row in range(t):
        for j in range(w):
            r = np.int64(draws[row, j])
            a = j
            b = r
            found_a = False
            found_b = False
            for k in range(j - 1, -1, -1):
                if not found_a and pos[k] == j:
                    a = val[k]
                    found_a = True
                if not found_b and pos[k] == r:
                    b = val[k]
                    found_b = True
            out[row, j] = b
            pos[j] = r
            val[j] = a
    return out


@njit(**_OPTS)
def fired_stats(xwords, tribes):
    """Per-sample tribe firing summary; see the numpy twin."""
    n_samples = xwords.shape[0]
    n, w = tribes.shape
    hist = np.zeros(n + 1, dtype=np.int64)
    csum = np.zeros(n, dtype=np.float64)
    csq = np.zeros(n, dtype=np.float64)
    fired = np.empty(n, dtype=np.int64)
    for s in range(n_samples):
        k = 0
        for i in range(n):
            ok = True
            for j in range(w):
                col = tribes[i, j]
                if (xwords[s, col >> 6] >> np.uint64(col & 63)) & np.uint64(1) == 0:
                    ok = False
                    break
            if ok:
                fired[k] = i
                k += 1
        hist[k] += 1
        if k > 0:
            contrib = 2.0 ** (1 - k)
            for q in range(k):
                csum[fired[q]] += contrib
                csq[fired[q]] += contrib * contrib
    return hist, csum, csq
