"""Slow, independent reference implementations used as test oracles.

Nothing here calls the package's kernels: every quantity is recomputed
point by point from the definitions.
"""

import itertools
from fractions import Fraction


def points(m):
    return list(itertools.product((0, 1), repeat=m))


def index(x):
    # x = (x_1, ..., x_m); coordinate 1 is the least significant bit
    return sum(b << k for k, b in enumerate(x))


def table(m, fn):
    out = [0] * (1 << m)
    for x in points(m):
        out[index(x)] = 1 if fn(x) else 0
    return out


def flip(x, i):
    y = list(x)
    y[i - 1] = 1 - y[i - 1]
    return tuple(y)


def leq(x, y):
    return all(a <= b for a, b in zip(x, y))


def sens(tab, m, x):
    fx = tab[index(x)]
    return sum(1 for i in range(1, m + 1) if tab[index(flip(x, i))] != fx)


def neg_sens(tab, m, x):
    fx = tab[index(x)]
    return sum(
        1 for i in range(1, m + 1)
        if x[i - 1] == 0 and fx > tab[index(flip(x, i))]
    )


def influence(tab, m, i):
    hits = sum(1 for x in points(m) if tab[index(x)] != tab[index(flip(x, i))])
    return Fraction(hits, 1 << m)


def negative_influence(tab, m, i):
    hits = sum(
        1 for x in points(m)
        if x[i - 1] == 0 and tab[index(x)] > tab[index(flip(x, i))]
    )
    return Fraction(hits, 1 << (m - 1))


def is_monotone(tab, m):
    pts = points(m)
    return all(
        tab[index(x)] <= tab[index(y)] for x in pts for y in pts if leq(x, y)
    )


def monotone_tables(m):
    """Every monotone table on m bits, by filtering all 2^(2^m) tables (m <= 4)."""
    assert m <= 4
    size = 1 << m
    pts = points(m)
    pairs = [(index(x), index(y)) for x in pts for y in pts if leq(x, y) and x != y]
    out = []
    for t in range(1 << size):
        tab = [(t >> j) & 1 for j in range(size)]
        if all(tab[a] <= tab[b] for a, b in pairs):
            out.append(tab)
    return out


def eps_bruteforce(tab, m, monotone=None):
    if monotone is None:
        monotone = monotone_tables(m)
    best = min(sum(a != b for a, b in zip(tab, g)) for g in monotone)
    return Fraction(best, 1 << m)


def restricted_mean(tab, m, fixed):
    """Mean of f over points agreeing with ``fixed`` ({coord: bit})."""
    pts = [x for x in points(m) if all(x[c - 1] == b for c, b in fixed.items())]
    return Fraction(sum(tab[index(x)] for x in pts), len(pts))
