"""Pure numpy/scipy kernels.

Every function here has a twin of the same name and signature in
``_kernels_numba``; the two are checked against each other in the tests.
Conventions: ``bits`` is a uint8 truth table of length 2**m, ``words`` the
same table packed little-endian into uint64, coordinates are zero-based.
"""

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order, maximum_bipartite_matching, maximum_flow

# mask of bit positions p (0 <= p < 64) whose bit k is clear, for k = 0..5
WORD_MASKS = np.array(
    [
        0x5555555555555555,
        0x3333333333333333,
        0x0F0F0F0F0F0F0F0F,
        0x00FF00FF00FF00FF,
        0x0000FFFF0000FFFF,
        0x00000000FFFFFFFF,
    ],
    dtype=np.uint64,
)


def _halves(words, i0):
    s = 1 << i0
    if s < 64:
        lo = words & WORD_MASKS[i0]
        hi = (words >> np.uint64(s)) & WORD_MASKS[i0]
        return lo, hi
    v = words.reshape(-1, 2, s >> 6)
    return v[:, 0, :], v[:, 1, :]


def edge_counts(words, m, i0):
    """Return ``(differing_edges, decreasing_edges)`` along coordinate ``i0``."""
    lo, hi = _halves(words, i0)
    diff = int(np.bitwise_count(lo ^ hi).sum(dtype=np.int64))
    dec = int(np.bitwise_count(lo & ~hi).sum(dtype=np.int64))
    return diff, dec


def all_edge_counts(words, m):
    diff = np.zeros(m, dtype=np.int64)
    dec = np.zeros(m, dtype=np.int64)
    for i0 in range(m):
        diff[i0], dec[i0] = edge_counts(words, m, i0)
    return diff, dec


def sensitivity_counts(bits, m):
    n_pts = bits.shape[0]
    sens = np.zeros(n_pts, dtype=np.uint8)
    neg = np.zeros(n_pts, dtype=np.uint8)
    for i0 in range(m):
        s = 1 << i0
        v = bits.reshape(-1, 2, s)
        lo, hi = v[:, 0, :], v[:, 1, :]
        d = lo ^ hi
        sv = sens.reshape(-1, 2, s)
        sv[:, 0, :] += d
        sv[:, 1, :] += d
        neg.reshape(-1, 2, s)[:, 0, :] += lo & (hi ^ 1)
    return sens, neg


def covering_arcs(m):
    """Tails and heads of all arcs x -> x | 2**i with bit i of x clear."""
    pts = np.arange(1 << m, dtype=np.int64)
    tails, heads = [], []
    for i0 in range(m):
        low = pts[(pts >> i0) & 1 == 0]
        tails.append(low)
        heads.append(low | (1 << i0))
    if not tails:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    return np.concatenate(tails), np.concatenate(heads)


def flow_network_arcs(bits, m):
    """Arc list (tails, heads, caps) of the closure network; source 2**m, sink 2**m + 1."""
    n_pts = 1 << m
    src, snk = n_pts, n_pts + 1
    inf = n_pts + 1
    ct, ch = covering_arcs(m)
    ones = np.flatnonzero(bits == 1)
    zeros = np.flatnonzero(bits == 0)
    tails = np.concatenate([ct, np.full(ones.size, src), zeros])
    heads = np.concatenate([ch, ones, np.full(zeros.size, snk)])
    caps = np.concatenate(
        [np.full(ct.size, inf), np.ones(ones.size, np.int64), np.ones(zeros.size, np.int64)]
    )
    return tails, heads, caps


def monotone_min_cut(bits, m):
    """Max-flow value and the source side (points only) of the minimal min cut."""
    n_pts = 1 << m
    n_nodes = n_pts + 2
    src, snk = n_pts, n_pts + 1
    tails, heads, caps = flow_network_arcs(bits, m)
    graph = csr_matrix(
        (caps.astype(np.int32), (tails, heads)), shape=(n_nodes, n_nodes)
    )
    graph.sort_indices()
    res = maximum_flow(graph, src, snk, method="dinic")
    flow = res.flow.tocsr()
    f_arc = np.asarray(flow[tails, heads]).ravel().astype(np.int64)
    fwd_res = caps - f_arc
    keep_f = fwd_res > 0
    keep_b = f_arc > 0
    r_tails = np.concatenate([tails[keep_f], heads[keep_b]])
    r_heads = np.concatenate([heads[keep_f], tails[keep_b]])
    residual = csr_matrix(
        (np.ones(r_tails.size, np.int8), (r_tails, r_heads)), shape=(n_nodes, n_nodes)
    )
    order = breadth_first_order(residual, src, directed=True, return_predecessors=False)
    side = np.zeros(n_nodes, dtype=np.uint8)
    side[order] = 1
    return int(res.flow_value), side[:n_pts]


def comparable_pairs(m):
    """All pairs (x, y) with x a proper subset of y, as two index arrays."""
    xs = np.zeros(1, dtype=np.int64)
    ys = np.zeros(1, dtype=np.int64)
    for i0 in range(m):
        b = 1 << i0
        xs = np.concatenate([xs, xs, xs | b])
        ys = np.concatenate([ys, ys | b, ys | b])
    keep = xs != ys
    return xs[keep], ys[keep]


def violation_edges(bits, m):
    xs, ys = comparable_pairs(m)
    keep = (bits[xs] == 1) & (bits[ys] == 0)
    return xs[keep], ys[keep]


def max_violation_matching(bits, m):
    n_pts = 1 << m
    xs, ys = violation_edges(bits, m)
    if xs.size == 0:
        return 0
    graph = csr_matrix(
        (np.ones(xs.size, np.int8), (xs, ys)), shape=(n_pts, n_pts)
    )
    match = maximum_bipartite_matching(graph, perm_type="column")
    return int(np.count_nonzero(match >= 0))


def _lookup(pos, val, p):
    # value stored at position p after earlier swaps (identity when untouched)
    if pos.shape[1] == 0:
        return p.copy()
    hit = pos == p[:, None]
    has = hit.any(axis=1)
    last = pos.shape[1] - 1 - np.argmax(hit[:, ::-1], axis=1)
    return np.where(has, val[np.arange(p.size), last], p)


def partial_fisher_yates(draws):
    """Apply a partial Fisher-Yates shuffle of range(n) per row.

    ``draws[:, j]`` is the swap partner drawn uniformly from ``[j, n)``; the
    result's row holds the first ``w`` entries of the shuffled range.
    """
    t, w = draws.shape
    out = np.empty((t, w), dtype=np.int64)
    pos = np.full((t, w), -1, dtype=np.int64)
    val = np.zeros((t, w), dtype=np.int64)
    for j in range(w):
        r = draws[:, j].astype(np.int64)
        a = _lookup(pos[:, :j], val[:, :j], np.full(t, j, dtype=np.int64))
        b = _lookup(pos[:, :j], val[:, :j], r)
        out[:, j] = b
        pos[:, j] = r
        val[:, j] = a
    return out


def fired_stats(xwords, tribes):
    """Per-sample tribe firing summary.

    Returns ``(hist, contrib_sum, contrib_sumsq)`` where ``hist[k]`` counts
    samples with exactly k fired tribes and the contribution of tribe i at a
    sample with k fired tribes is ``2**(1-k)`` when i fired, else 0.
    """
    n = tribes.shape[0]
    word = tribes >> 6
    off = (tribes & 63).astype(np.uint64)
    bits = (xwords[:, word] >> off) & np.uint64(1)
    fired = bits.all(axis=2)
    k = fired.sum(axis=1)
    hist = np.bincount(k, minlength=n + 1).astype(np.int64)
    contrib = np.where(fired, np.ldexp(1.0, 1 - k)[:, None], 0.0)
    return hist, contrib.sum(axis=0), (contrib * contrib).sum(axis=0)
