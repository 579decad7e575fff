"""Distance to monotonicity.

The exact route is a closure (project selection) min cut: every point is a
node, source arcs of capacity 1 enter the points where f = 1, sink arcs of
capacity 1 leave the points where f = 0, and infinite arcs x -> y along every
covering pair force the source side to be an up-set U. A cut then costs
``|{f=1} \\ U| + |{f=0} & U|``, the number of points a repair to the indicator
of U changes. Brute-force enumeration of all monotone functions (m <= 5) and a
violation-graph matching bound serve as independent checks.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ._accel import kernels
from ._kernels_numpy import flow_network_arcs
from .errors import CapacityError, StructureError
from .hypercube import (
    BOTH,
    DECREASING,
    INCREASING,
    BooleanFunction,
    distance,
    is_monotone,
    monotone_direction,
    to_json_bits,
)
from .metrics import rational_json

MINCUT_MAX_ARITY = 20
BRUTEFORCE_MAX_ARITY = 5
MATCHING_MAX_ARITY = 14

MINCUT = "mincut"
BRUTEFORCE = "bruteforce"


@dataclass(frozen=True)
class FlowNetwork:
    """Explicit closure network; source is node 2**m, sink node 2**m + 1."""

    arity: int
    tails: np.ndarray
    heads: np.ndarray
    caps: np.ndarray

    @property
    def num_nodes(self):
        return (1 << self.arity) + 2

    @property
    def source(self):
        return 1 << self.arity

    @property
    def sink(self):
        return (1 << self.arity) + 1

    @property
    def infinite_capacity(self):
        return (1 << self.arity) + 1

    def covering_arc_count(self):
        return int(np.count_nonzero(self.caps == self.infinite_capacity))

    def cut_value(self, upset):
        """Capacity of the cut whose source side is {source} plus ``upset``."""
        side = np.zeros(self.num_nodes, dtype=bool)
        side[: 1 << self.arity] = np.asarray(upset, dtype=bool)
        side[self.source] = True
        crossing = side[self.tails] & ~side[self.heads]
        return int(self.caps[crossing].sum())


def build_flow_network(f):
    tails, heads, caps = flow_network_arcs(f.bits, f.arity)
    return FlowNetwork(f.arity, tails, heads, caps)


@dataclass(frozen=True)
class ViolationGraph:
    """Bipartite graph on f^-1(1) x f^-1(0); edge (x, y) when x < y."""

    arity: int
    left: np.ndarray
    right: np.ndarray
    edges: tuple  # (xs, ys)

    @property
    def num_edges(self):
        return int(self.edges[0].size)

    def is_empty(self):
        return self.num_edges == 0


def _guard(f, limit, name, hint):
    if f.arity > limit:
        raise CapacityError(
            f"{name} supports arity <= {limit}, got {f.arity}; {hint}",
            guard=name, limit=limit, value=f.arity,
        )


def build_violation_graph(f):
    _guard(f, MATCHING_MAX_ARITY, "violation-graph", "the graph can reach 3^m edges")
    xs, ys = kernels.violation_edges(f.bits, f.arity)
    return ViolationGraph(
        f.arity,
        np.flatnonzero(f.bits == 1),
        np.flatnonzero(f.bits == 0),
        (np.asarray(xs), np.asarray(ys)),
    )


@dataclass(frozen=True)
class EpsResult:
    eps: Fraction
    changed_points: int
    method: str
    matching_lower_bound: Fraction = None
    witness: BooleanFunction = field(default=None, compare=False)

    def to_json(self, include_witness=False):
        out = {
            "eps": rational_json(self.eps),
            "changed_points": self.changed_points,
            "method": self.method,
            "matching_lower_bound": (
                None if self.matching_lower_bound is None
                else rational_json(self.matching_lower_bound)
            ),
        }
        if include_witness and self.witness is not None:
            out["witness"] = to_json_bits(self.witness)
        return out


def violated_edge_counts(f):
    """Per coordinate: #{x : x_i = 0, f(x) = 1, f(x^(+i)) = 0}."""
    _, dec = kernels.all_edge_counts(f.words, f.arity)
    return [int(d) for d in dec]


def distance_to_monotone_exact(f, with_matching=False):
    """Exact eps(f) by min cut, with the minimal optimal up-set as witness."""
    _guard(f, MINCUT_MAX_ARITY, "mincut", "use the sampled estimators for larger inputs")
    flow, side = kernels.monotone_min_cut(f.bits, f.arity)
    g = BooleanFunction(f.arity, side)
    changed = int(np.count_nonzero(side != f.bits))
    if changed != flow or not is_monotone(g):
        raise RuntimeError(
            f"min-cut witness inconsistent: flow {flow}, changed {changed}"
        )
    lower = matching_lower_bound(f) if with_matching else None
    return EpsResult(Fraction(flow, f.size), flow, MINCUT, lower, g)


@lru_cache(maxsize=None)
def monotone_tables(m):
    """Truth tables (as uint64 integers) of every monotone function on m bits.

    Built from the decomposition f = (g0 on x_m = 0, g1 on x_m = 1) with g0, g1
    monotone and g0 <= g1 pointwise.
    """
    if m > BRUTEFORCE_MAX_ARITY:
        raise CapacityError(
            f"monotone enumeration supports arity <= {BRUTEFORCE_MAX_ARITY}, got {m}",
            guard="bruteforce", limit=BRUTEFORCE_MAX_ARITY, value=m,
        )
    tables = np.array([0, 1], dtype=np.uint64)
    for k in range(1, m + 1):
        half = np.uint64(1 << (k - 1))
        g0 = tables[:, None]
        g1 = tables[None, :]
        ok = (g0 & ~g1) == 0
        a, b = np.nonzero(ok)
        tables = tables[a] | (tables[b] << half)
    tables.flags.writeable = False
    return tables


def distance_to_monotone_bruteforce(f):
    """Exact eps(f) as the minimum over all monotone functions (m <= 5)."""
    _guard(f, BRUTEFORCE_MAX_ARITY, "bruteforce", "use distance_to_monotone_exact")
    tables = monotone_tables(f.arity)
    word = f.words[0]
    dists = np.bitwise_count(tables ^ word)
    best = int(np.argmin(dists))
    changed = int(dists[best])
    g_bits = (int(tables[best]) >> np.arange(f.size)) & 1
    g = BooleanFunction(f.arity, g_bits)
    return EpsResult(Fraction(changed, f.size), changed, BRUTEFORCE, None, g)


def matching_lower_bound(f):
    """(maximum matching of the violation graph) / 2^m, a lower bound on eps."""
    _guard(f, MATCHING_MAX_ARITY, "matching", "the violation graph can reach 3^m edges")
    return Fraction(kernels.max_violation_matching(f.bits, f.arity), f.size)


def check_bilinear_structure(f, n):
    if f.arity != 2 * n or n < 1:
        raise StructureError(f"arity {f.arity} does not split into two blocks of {n}")
    for i in range(1, n + 1):
        if monotone_direction(f, i) not in (INCREASING, BOTH):
            raise StructureError(f"not monotone in coordinate {i} of the first block")
    for i in range(n + 1, 2 * n + 1):
        if monotone_direction(f, i) not in (DECREASING, BOTH):
            raise StructureError(f"not anti-monotone in coordinate {i} of the second block")


def bilinear_variance(f, n):
    """E_x[Var_y f(x, y)] for f monotone in x = coords 1..n, anti-monotone in y.

    Each column of the (y, x) table is the restriction f(x, .), so the
    restriction means come from column sums.
    """
    check_bilinear_structure(f, n)
    size = 1 << n
    cols = f.bits.reshape(size, size).sum(axis=0, dtype=np.int64)
    total = int(np.dot(cols, size - cols))
    return Fraction(total, size ** 3)


__all__ = [
    "BRUTEFORCE",
    "MINCUT",
    "EpsResult",
    "FlowNetwork",
    "ViolationGraph",
    "bilinear_variance",
    "build_flow_network",
    "build_violation_graph",
    "check_bilinear_structure",
    "distance",
    "distance_to_monotone_bruteforce",
    "distance_to_monotone_exact",
    "matching_lower_bound",
    "monotone_tables",
    "violated_edge_counts",
]
