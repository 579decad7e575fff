"""The randomized tribes counterexample and a zoo of classic functions.

For n a power of two and w = log2(n), draw tribes T_1..T_n, each a uniform
w-subset of [n], independently. On {0,1}^n x {0,1}^n set

    f(x, y) = OR_i ( AND_{j in T_i} x_j  AND  NOT y_i ).

The x-block is coordinates 1..n and the y-block coordinates n+1..2n. Exact
routes materialize the truth table (2n <= 26) or enumerate the x-block
(n <= 20); the sampled route only ever evaluates tribes at random x.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._accel import kernels
from .errors import ArgumentError, CapacityError
from .hypercube import MAX_ARITY, BooleanFunction, constant

SYMBOLIC_MAX_N = 1 << 20
ENUMERATE_MAX_N = 20
_MC_STREAM = 1  # spawn key separating Monte Carlo draws from tribe draws


def _check_n(n):
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise ArgumentError(f"tribe count must be an integer, got {n!r}")
    n = int(n)
    if n < 2 or n & (n - 1):
        raise ArgumentError(f"tribe count must be a power of two >= 2, got {n}")
    if n > SYMBOLIC_MAX_N:
        raise CapacityError(
            f"tribe count {n} exceeds {SYMBOLIC_MAX_N}",
            guard="tribes", limit=SYMBOLIC_MAX_N, value=n,
        )
    return n


def _check_seed(seed):
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or not 0 <= seed < 2**64:
        raise ArgumentError(f"seed must be an integer in [0, 2^64), got {seed!r}")
    return int(seed)


@dataclass(frozen=True, eq=False)
class TribesInstance:
    """Tribe sets as an (n, w) array of sorted 1-based x-coordinates."""

    n: int
    seed: int
    tribes: np.ndarray = field(repr=False)

    @property
    def width(self):
        return self.n.bit_length() - 1

    @property
    def arity(self):
        return 2 * self.n

    def __eq__(self, other):
        if not isinstance(other, TribesInstance):
            return NotImplemented
        return (self.n, self.seed) == (other.n, other.seed) and np.array_equal(
            self.tribes, other.tribes
        )

    def __hash__(self):
        return hash((self.n, self.seed, self.tribes.tobytes()))

    def tribe(self, i):
        """The set T_i, i in 1..n."""
        return frozenset(int(j) for j in self.tribes[i - 1])

    def masks(self):
        """Per-tribe bitmask over the x-block (python ints, any n)."""
        return [sum(1 << (int(j) - 1) for j in row) for row in self.tribes]

    def to_json(self):
        return {"n": self.n, "seed": self.seed, "tribes": self.tribes.tolist()}


def _freeze(arr):
    arr = np.ascontiguousarray(arr, dtype=np.int64)
    arr.flags.writeable = False
    return arr


def sample_counterexample(n, seed):
    """Draw the n tribes deterministically from ``seed``.

    Each tribe is the prefix of a seeded partial Fisher-Yates shuffle of
    range(n), so it is uniform over w-subsets; tribes may repeat.
    """
    n = _check_n(n)
    seed = _check_seed(seed)
    w = n.bit_length() - 1
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    draws = rng.integers(np.arange(w), n, size=(n, w))
    subsets = np.sort(kernels.partial_fisher_yates(draws.astype(np.int64)), axis=1)
    return TribesInstance(n, seed, _freeze(subsets + 1))


def instance_from_json(obj):
    try:
        n, seed, rows = obj["n"], obj["seed"], obj["tribes"]
    except (KeyError, TypeError):
        raise ArgumentError("tribes JSON needs 'n', 'seed' and 'tribes'")
    n = _check_n(n)
    seed = _check_seed(seed)
    w = n.bit_length() - 1
    arr = np.asarray(rows, dtype=np.int64)
    if arr.shape != (n, w):
        raise ArgumentError(f"expected {n} tribes of size {w}, got shape {arr.shape}")
    if arr.size and (arr.min() < 1 or arr.max() > n):
        raise ArgumentError(f"tribe members must lie in 1..{n}")
    arr = np.sort(arr, axis=1)
    if w > 1 and (np.diff(arr, axis=1) == 0).any():
        raise ArgumentError("tribe members must be distinct within a tribe")
    return TribesInstance(n, seed, _freeze(arr))


def instance_to_function(inst):
    """Materialize the 2n-bit truth table (2n <= 26)."""
    if inst.arity > MAX_ARITY:
        raise CapacityError(
            f"cannot materialize arity {inst.arity} > {MAX_ARITY}; use the sampled route",
            guard="arity", limit=MAX_ARITY, value=inst.arity,
        )
    fired = _fired_masks(inst)
    y = np.arange(1 << inst.n, dtype=np.int64)[:, None]
    table = (fired[None, :] & ~y) != 0
    return BooleanFunction(inst.arity, table.ravel())


def _fired_masks(inst):
    # bit i-1 of entry x is set when tribe i fires at x (needs n <= 62)
    xs = np.arange(1 << inst.n, dtype=np.int64)
    out = np.zeros(xs.size, dtype=np.int64)
    for i, mask in enumerate(inst.masks()):
        out |= ((xs & mask) == mask).astype(np.int64) << i
    return out


def _x_bits(inst, x):
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        if not 0 <= x < (1 << inst.n):
            raise ArgumentError(f"x-block point {x} out of range for n = {inst.n}")
        return np.array([(int(x) >> k) & 1 for k in range(inst.n)], dtype=np.uint8)
    arr = np.asarray(x)
    if arr.shape != (inst.n,) or not np.isin(arr, (0, 1)).all():
        raise ArgumentError(f"x must be a point index or a 0/1 vector of length {inst.n}")
    return arr.astype(np.uint8)


def fired_tribes(inst, x):
    """1-based indices of the tribes all of whose coordinates are set in x."""
    bits = _x_bits(inst, x)
    fired = bits[inst.tribes - 1].all(axis=1)
    return frozenset(int(i) + 1 for i in np.flatnonzero(fired))


def _restricted_variance(k):
    # f(x, .) is an OR of k anti-dictators: mean 1 - 2^-k
    return Fraction((1 << k) - 1, 1 << (2 * k))


def conditional_variance(inst, x):
    """Var_y f(x, y) = (1 - 2^-k) 2^-k with k the number of fired tribes."""
    return _restricted_variance(len(fired_tribes(inst, x)))


def _check_enumerable(inst):
    if inst.n > ENUMERATE_MAX_N:
        raise CapacityError(
            f"x-block enumeration supports n <= {ENUMERATE_MAX_N}, got {inst.n}",
            guard="enumerate", limit=ENUMERATE_MAX_N, value=inst.n,
        )


def _fired_count_array(inst):
    xs = np.arange(1 << inst.n, dtype=np.int64)
    k = np.zeros(xs.size, dtype=np.int64)
    for mask in inst.masks():
        k += (xs & mask) == mask
    return xs, k


def fired_count_distribution(inst):
    """Exact counts, over all 2^n x, of the number of fired tribes."""
    _check_enumerable(inst)
    _, k = _fired_count_array(inst)
    return np.bincount(k, minlength=inst.n + 1)


def firing_probabilities(inst):
    """Exact Pr_x[tribe i fires] for each i, by counting over the x-block."""
    _check_enumerable(inst)
    xs = np.arange(1 << inst.n, dtype=np.int64)
    return [
        Fraction(int(np.count_nonzero((xs & mask) == mask)), xs.size)
        for mask in inst.masks()
    ]


def exact_bilinear_variance(inst):
    """E_x[Var_y f] from the fired-count distribution (n <= 20)."""
    hist = fired_count_distribution(inst)
    total = sum((int(c) * _restricted_variance(k) for k, c in enumerate(hist) if c), Fraction(0))
    return total / (1 << inst.n)


def exact_negative_influences_y(inst):
    """Exact Inf^- of the y-coordinates n+1..2n without materializing f.

    At an x with k fired tribes including tribe i, the decreasing (n+i)-edges
    are the y with y_i = 0 and y_j = 1 for the other fired j: a 2^-k share of
    all y. Normalizing by 2^(2n-1) gives Inf^-_{n+i} = 2 E_x[1{i fired} 2^-k].
    """
    _check_enumerable(inst)
    xs, k = _fired_count_array(inst)
    n = inst.n
    out = []
    for mask in inst.masks():
        hit = (xs & mask) == mask
        counts = np.bincount(k[hit], minlength=n + 1)
        num = sum((int(c) * Fraction(2, 1 << kk) for kk, c in enumerate(counts) if c), Fraction(0))
        out.append(num / (1 << n))
    return out


# --- sampled route -----------------------------------------------------------


def _bernoulli(count, total):
    p = count / total
    return p, math.sqrt(p * (1 - p) / total)


@dataclass(frozen=True)
class SampledReport:
    n: int
    samples: int
    seed: int
    workers: int
    fired_hist: list
    mean_fired: float
    se_mean_fired: float
    p_zero: float
    se_p_zero: float
    p_one: float
    se_p_one: float
    p_ge2: float
    se_p_ge2: float
    var_proxy: float
    se_var_proxy: float
    neg_inf_y: np.ndarray = field(repr=False)
    se_neg_inf_y: np.ndarray = field(repr=False)

    @property
    def max_neg_inf_y(self):
        return float(self.neg_inf_y.max())

    def to_json(self):
        return {
            "n": self.n,
            "samples": self.samples,
            "seed": self.seed,
            "workers": self.workers,
            "fired_hist": list(self.fired_hist),
            "mean_fired": self.mean_fired,
            "se_mean_fired": self.se_mean_fired,
            "p_zero": self.p_zero,
            "se_p_zero": self.se_p_zero,
            "p_one": self.p_one,
            "se_p_one": self.se_p_one,
            "p_ge2": self.p_ge2,
            "se_p_ge2": self.se_p_ge2,
            "var_proxy": self.var_proxy,
            "se_var_proxy": self.se_var_proxy,
            "max_neg_inf_y": self.max_neg_inf_y,
            "neg_inf_y": self.neg_inf_y.tolist(),
            "se_neg_inf_y": self.se_neg_inf_y.tolist(),
        }


def _worker_stats(inst, budget, worker_seed, chunk):
    n = inst.n
    n_words = (n + 63) // 64
    tribes0 = np.ascontiguousarray(inst.tribes - 1)
    rng = np.random.default_rng(np.random.SeedSequence(worker_seed, spawn_key=(_MC_STREAM,)))
    hist = np.zeros(n + 1, dtype=np.int64)
    csum = np.zeros(n)
    csq = np.zeros(n)
    done = 0
    while done < budget:
        size = min(chunk, budget - done)
        xw = rng.integers(0, 2**64, size=(size, n_words), dtype=np.uint64)
        h, s, q = kernels.fired_stats(xw, tribes0)
        hist += h
        csum += s
        csq += q
        done += size
    return hist, csum, csq


def estimate_metrics(inst, samples, seed, workers=1):
    """Monte Carlo over uniform x: fired-tribe counts, E_x Var_y f and y-block Inf^-.

    The budget is split across ``workers``; worker j draws from a stream keyed
    by ``seed ^ j``. Merged sums do not depend on completion order, so the
    result depends only on (instance, samples, seed, workers).
    """
    if isinstance(samples, bool) or not isinstance(samples, (int, np.integer)) or samples < 1:
        raise ArgumentError(f"samples must be a positive integer, got {samples!r}")
    seed = _check_seed(seed)
    if workers < 1:
        raise ArgumentError("workers must be >= 1")
    workers = min(int(workers), int(samples))
    n = inst.n
    chunk = max(1, (1 << 22) // (n * max(inst.width, 1)))
    shares = [samples // workers + (1 if j < samples % workers else 0) for j in range(workers)]
    jobs = [(inst, shares[j], seed ^ j, chunk) for j in range(workers)]
    if workers == 1:
        parts = [_worker_stats(*jobs[0])]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda a: _worker_stats(*a), jobs))
    hist = sum(p[0] for p in parts)
    csum = sum(p[1] for p in parts)
    csq = sum(p[2] for p in parts)

    s = int(samples)
    ks = np.arange(hist.size)
    mean_k = float(np.dot(hist, ks)) / s
    var_k = max(float(np.dot(hist, ks * ks)) / s - mean_k**2, 0.0)
    se_k = math.sqrt(var_k * s / max(s - 1, 1) / s)

    vals = np.array([float(_restricted_variance(int(k))) for k in ks])
    v_mean = float(np.dot(hist, vals)) / s
    v_var = max(float(np.dot(hist, vals * vals)) / s - v_mean**2, 0.0)
    se_v = math.sqrt(v_var * s / max(s - 1, 1) / s)

    ninf = csum / s
    ninf_var = np.maximum(csq / s - ninf**2, 0.0)
    se_ninf = np.sqrt(ninf_var * s / max(s - 1, 1) / s)

    p0, se0 = _bernoulli(int(hist[0]), s)
    p1, se1 = _bernoulli(int(hist[1]), s)
    p2, se2 = _bernoulli(int(hist[2:].sum()), s)
    last = int(np.flatnonzero(hist).max()) + 1
    return SampledReport(
        n=n, samples=s, seed=seed, workers=workers,
        fired_hist=[int(c) for c in hist[:last]],
        mean_fired=mean_k, se_mean_fired=se_k,
        p_zero=p0, se_p_zero=se0,
        p_one=p1, se_p_one=se1,
        p_ge2=p2, se_p_ge2=se2,
        var_proxy=v_mean, se_var_proxy=se_v,
        neg_inf_y=ninf, se_neg_inf_y=se_ninf,
    )


# --- zoo -------------------------------------------------------------------

ZOO_NAMES = ("constant", "dictator", "anti_dictator", "parity", "majority", "tribes_bl", "random")

_ZOO_PARAMS = {
    "constant": ({"m"}, {"value"}),
    "dictator": ({"m"}, {"i"}),
    "anti_dictator": ({"m"}, {"i"}),
    "parity": ({"m"}, set()),
    "majority": ({"m"}, set()),
    "tribes_bl": ({"b", "s"}, set()),
    "random": ({"m", "seed"}, set()),
}


@dataclass(frozen=True)
class ZooSpec:
    name: str
    params: tuple = ()  # sorted (key, int value) pairs

    @classmethod
    def make(cls, name, **params):
        return cls(name, tuple(sorted((k, int(v)) for k, v in params.items())))

    def validate(self):
        if self.name not in _ZOO_PARAMS:
            raise ArgumentError(f"unknown zoo function {self.name!r}; choose from {', '.join(ZOO_NAMES)}")
        required, optional = _ZOO_PARAMS[self.name]
        keys = {k for k, _ in self.params}
        if len(keys) != len(self.params):
            raise ArgumentError(f"duplicate parameter in zoo spec {self.name}")
        missing = required - keys
        extra = keys - required - optional
        if missing:
            raise ArgumentError(f"zoo:{self.name} needs parameter(s) {', '.join(sorted(missing))}")
        if extra:
            raise ArgumentError(f"zoo:{self.name} does not take {', '.join(sorted(extra))}")
        return dict(self.params)

    def __str__(self):
        body = ",".join(f"{k}={v}" for k, v in self.params)
        return f"zoo:{self.name}" + (f",{body}" if body else "")


def _points(m):
    return np.arange(1 << m, dtype=np.int64)


def zoo(spec, **params):
    """Build a named classic function.

    ``spec`` is a :class:`ZooSpec` or a name, with keyword parameters:
    constant(m, value=0), dictator(m, i=1), anti_dictator(m, i=1), parity(m),
    majority(m odd), tribes_bl(b, s) on b*s bits, random(m, seed).
    """
    if not isinstance(spec, ZooSpec):
        spec = ZooSpec.make(spec, **params)
    p = spec.validate()
    name = spec.name
    if name == "tribes_bl":
        b, s = p["b"], p["s"]
        if b < 1 or s < 1:
            raise ArgumentError("tribes_bl needs b >= 1 and s >= 1")
        m = b * s
        if m > MAX_ARITY:
            raise CapacityError(f"tribes_bl arity {m} exceeds {MAX_ARITY}",
                                guard="arity", limit=MAX_ARITY, value=m)
        xs = _points(m)
        block = (1 << b) - 1
        out = np.zeros(xs.size, dtype=bool)
        for t in range(s):
            mask = block << (t * b)
            out |= (xs & mask) == mask
        return BooleanFunction(m, out)
    m = p["m"]
    if not 1 <= m <= MAX_ARITY:
        raise ArgumentError(f"arity {m} outside 1..{MAX_ARITY}")
    if name == "constant":
        value = p.get("value", 0)
        if value not in (0, 1):
            raise ArgumentError("constant value must be 0 or 1")
        return constant(m, value)
    xs = _points(m)
    if name in ("dictator", "anti_dictator"):
        i = p.get("i", 1)
        if not 1 <= i <= m:
            raise ArgumentError(f"coordinate {i} out of range 1..{m}")
        bit = (xs >> (i - 1)) & 1
        return BooleanFunction(m, bit if name == "dictator" else 1 - bit)
    if name == "parity":
        return BooleanFunction(m, np.bitwise_count(xs) & 1)
    if name == "majority":
        if m % 2 == 0:
            raise ArgumentError("majority needs an odd arity")
        return BooleanFunction(m, 2 * np.bitwise_count(xs) > m)
    seed = p["seed"]
    if seed < 0:
        raise ArgumentError("seed must be non-negative")
    rng = np.random.default_rng(seed)
    return BooleanFunction(m, rng.integers(0, 2, size=1 << m, dtype=np.uint8))
