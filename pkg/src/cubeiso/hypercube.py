"""Points and Boolean functions on the hypercube {0,1}^m.

A point x is encoded as the integer ``sum(x_i * 2**(i-1))``: coordinate 1 is
the least significant bit. Coordinates are 1-based in every public function.
Truth tables are stored bit-packed into little-endian uint64 words.
"""

import json
import os
from collections.abc import Mapping
from fractions import Fraction

import numpy as np

from ._accel import kernels
from .errors import ArgumentError, CapacityError, ConstructionError

MAX_ARITY = 26
JSON_BITS_MAX_ARITY = 16

INCREASING = "increasing"
DECREASING = "decreasing"
BOTH = "both"
NEITHER = "neither"


def _check_arity(m):
    if not isinstance(m, (int, np.integer)) or isinstance(m, bool):
        raise ArgumentError(f"arity must be an integer, got {m!r}")
    if not 1 <= m <= MAX_ARITY:
        raise CapacityError(
            f"arity {m} outside supported range 1..{MAX_ARITY}",
            guard="arity", limit=MAX_ARITY, value=int(m),
        )
    return int(m)


def check_coordinate(i, m):
    if isinstance(i, bool) or not isinstance(i, (int, np.integer)) or not 1 <= i <= m:
        raise ArgumentError(f"coordinate {i!r} out of range 1..{m}")
    return int(i)


def encode_point(coords):
    """Encode a 0/1 sequence ``(x_1, ..., x_m)`` as a point index."""
    ix = 0
    for k, c in enumerate(coords):
        if c not in (0, 1):
            raise ArgumentError(f"coordinate value must be 0 or 1, got {c!r}")
        ix |= int(c) << k
    return ix


def decode_point(ix, m):
    """Inverse of :func:`encode_point`."""
    if not 0 <= ix < (1 << m):
        raise ArgumentError(f"point index {ix} out of range for arity {m}")
    return tuple((ix >> k) & 1 for k in range(m))


def flip(ix, i, m=None):
    """Toggle coordinate ``i`` of point ``ix`` (the point x^(+i))."""
    if m is not None:
        check_coordinate(i, m)
        if not 0 <= ix < (1 << m):
            raise ArgumentError(f"point index {ix} out of range for arity {m}")
    elif isinstance(i, bool) or not isinstance(i, (int, np.integer)) or i < 1:
        raise ArgumentError(f"coordinate {i!r} must be a positive integer")
    if ix < 0:
        raise ArgumentError(f"point index {ix} is negative")
    return ix ^ (1 << (i - 1))


def precedes(x, y):
    """Coordinatewise order: True when x_i <= y_i for every i."""
    return x & ~y == 0


def _pack(bits):
    n_words = max(1, bits.size // 64)
    buf = np.zeros(n_words * 8, dtype=np.uint8)
    packed = np.packbits(bits, bitorder="little")
    buf[: packed.size] = packed
    return buf.view("<u8").astype(np.uint64)


class BooleanFunction:
    """Immutable bit-packed truth table of f: {0,1}^m -> {0,1}."""

    __slots__ = ("_m", "_words", "_bits")

    def __init__(self, m, bits):
        m = _check_arity(m)
        arr = _coerce_bits(bits)
        if arr.size != (1 << m):
            raise ConstructionError(
                f"truth table for arity {m} needs {1 << m} bits, got {arr.size}"
            )
        arr = np.ascontiguousarray(arr, dtype=np.uint8)
        arr.flags.writeable = False
        words = _pack(arr)
        words.flags.writeable = False
        self._m = m
        self._bits = arr
        self._words = words

    @property
    def arity(self):
        return self._m

    @property
    def size(self):
        return 1 << self._m

    @property
    def bits(self):
        """Read-only uint8 view of the table, position ix = f(ix)."""
        return self._bits

    @property
    def words(self):
        """Read-only packed table; trailing bits of the last word are zero."""
        return self._words

    def __call__(self, ix):
        return evaluate(self, ix)

    def __eq__(self, other):
        if not isinstance(other, BooleanFunction):
            return NotImplemented
        return self._m == other._m and np.array_equal(self._words, other._words)

    def __hash__(self):
        return hash((self._m, self._words.tobytes()))

    def __repr__(self):
        if self._m <= 6:
            return f"BooleanFunction(m={self._m}, bits={self.bitstring()!r})"
        return f"BooleanFunction(m={self._m}, ones={self.count_ones()})"

    def bitstring(self):
        return "".join("1" if b else "0" for b in self._bits.tolist())

    def count_ones(self):
        return int(np.bitwise_count(self._words).sum(dtype=np.int64))


def _coerce_bits(bits):
    if isinstance(bits, str):
        if set(bits) - {"0", "1"}:
            raise ConstructionError("bit string may contain only '0' and '1'")
        return np.frombuffer(bits.encode("ascii"), dtype=np.uint8) - ord("0")
    arr = np.asarray(bits)
    if arr.ndim != 1:
        raise ConstructionError(f"truth table must be one-dimensional, got shape {arr.shape}")
    if arr.dtype == bool:
        return arr.astype(np.uint8)
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ConstructionError("truth table entries must be 0 or 1")
    return arr.astype(np.uint8)


def build_function(m, bits):
    """Build an immutable :class:`BooleanFunction` of arity ``m``.

    ``bits`` may be a '0'/'1' string, a sequence of ints or bools, or a numpy
    array; position ``ix`` holds f at the point with index ``ix``.
    """
    return BooleanFunction(m, bits)


def from_callable(m, fn):
    """Tabulate ``fn(coords)`` over all points, coords a tuple (x_1, ..., x_m)."""
    m = _check_arity(m)
    return BooleanFunction(m, [1 if fn(decode_point(ix, m)) else 0 for ix in range(1 << m)])


def evaluate(f, ix):
    if isinstance(ix, bool) or not isinstance(ix, (int, np.integer)) or not 0 <= ix < f.size:
        raise ArgumentError(f"point index {ix!r} out of range for arity {f.arity}")
    return int(f.bits[ix])


def mean_variance(f):
    """Exact ``(E[f], Var[f])`` under the uniform measure."""
    mean = Fraction(f.count_ones(), f.size)
    return mean, mean * (1 - mean)


def _assignment_items(fixed, m):
    items = list(fixed.items()) if isinstance(fixed, Mapping) else list(fixed)
    seen = {}
    for item in items:
        try:
            coord, bit = item
        except (TypeError, ValueError):
            raise ArgumentError(f"assignment entries must be (coordinate, bit) pairs, got {item!r}")
        coord = check_coordinate(coord, m)
        if coord in seen:
            raise ArgumentError(f"coordinate {coord} assigned twice")
        if bit not in (0, 1):
            raise ArgumentError(f"assigned value for coordinate {coord} must be 0 or 1")
        seen[coord] = int(bit)
    return seen


def restrict(f, fixed):
    """Restrict ``f`` by fixing some coordinates.

    ``fixed`` is a mapping ``{coordinate: bit}`` or an iterable of pairs. The
    result lives on the free coordinates, which keep their relative order.
    """
    m = f.arity
    assignment = _assignment_items(fixed, m)
    if len(assignment) >= m:
        raise ArgumentError("restriction must leave at least one free coordinate")
    # C-order reshape: axis 0 is coordinate m, the last axis is coordinate 1
    cube = f.bits.reshape((2,) * m)
    index = tuple(
        assignment.get(m - axis, slice(None)) for axis in range(m)
    )
    sub = np.ascontiguousarray(cube[index]).ravel()
    return BooleanFunction(m - len(assignment), sub)


def edge_counts(f, i):
    """``(differing_edges, decreasing_edges)`` along coordinate ``i``.

    An i-edge {x, x^(+i)} with x_i = 0 is decreasing when f(x)=1, f(x^(+i))=0.
    """
    check_coordinate(i, f.arity)
    return kernels.edge_counts(f.words, f.arity, i - 1)


def monotone_direction(f, i):
    """Classify ``f`` along coordinate ``i``.

    Returns one of ``"increasing"``, ``"decreasing"``, ``"both"`` (i is
    irrelevant) or ``"neither"``.
    """
    diff, dec = edge_counts(f, i)
    if diff == 0:
        return BOTH
    if dec == 0:
        return INCREASING
    if dec == diff:
        return DECREASING
    return NEITHER


def is_monotone(f):
    """True when x <= y implies f(x) <= f(y); checked edge by edge."""
    _, dec = kernels.all_edge_counts(f.words, f.arity)
    return not dec.any()


def distance(f, g):
    """Exact Pr_x[f(x) != g(x)]."""
    if f.arity != g.arity:
        raise ArgumentError(f"arity mismatch: {f.arity} vs {g.arity}")
    return Fraction(int(np.bitwise_count(f.words ^ g.words).sum(dtype=np.int64)), f.size)


def constant(m, value=0):
    m = _check_arity(m)
    return BooleanFunction(m, np.full(1 << m, 1 if value else 0, dtype=np.uint8))


# --- serialization ---------------------------------------------------------


def to_json_bits(f):
    """``{"m": m, "bits": "..."}``; only for arity up to 16."""
    if f.arity > JSON_BITS_MAX_ARITY:
        raise CapacityError(
            f"inline bit strings are limited to arity {JSON_BITS_MAX_ARITY}; use the raw format",
            guard="json-bits", limit=JSON_BITS_MAX_ARITY, value=f.arity,
        )
    return {"m": f.arity, "bits": f.bitstring()}


def raw_bytes(f):
    """ceil(2^m/8) bytes; bit j of byte b is f(8b + j)."""
    return np.packbits(f.bits, bitorder="little").tobytes()


def from_raw_bytes(m, data):
    m = _check_arity(m)
    expected = ((1 << m) + 7) // 8
    if len(data) != expected:
        raise ConstructionError(
            f"raw table for arity {m} needs {expected} bytes, got {len(data)}"
        )
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8), bitorder="little")
    if (1 << m) < 8 and bits[1 << m:].any():
        raise ConstructionError("padding bits of a raw table must be zero")
    return BooleanFunction(m, bits[: 1 << m])


def function_from_json(obj, base_dir="."):
    """Decode either the inline or the raw-file JSON table format."""
    if not isinstance(obj, Mapping) or "m" not in obj:
        raise ConstructionError("table JSON must be an object with an 'm' field")
    m = obj["m"]
    if "bits" in obj:
        f = BooleanFunction(m, obj["bits"])
        return f
    if "raw" in obj:
        path = obj["raw"]
        if not os.path.isabs(path):
            path = os.path.join(base_dir, path)
        with open(path, "rb") as fh:
            return from_raw_bytes(m, fh.read())
    raise ConstructionError("table JSON needs either 'bits' or 'raw'")


def save_function(f, path, fmt="json-bits"):
    """Write ``f`` to ``path``.

    ``json-bits`` writes a single JSON file. ``raw`` writes the packed bytes to
    ``path`` and a descriptor ``path + '.json'`` pointing at it; the descriptor
    path is returned.
    """
    if fmt == "json-bits":
        with open(path, "w") as fh:
            json.dump(to_json_bits(f), fh, separators=(",", ":"))
        return path
    if fmt == "raw":
        with open(path, "wb") as fh:
            fh.write(raw_bytes(f))
        desc = path + ".json"
        with open(desc, "w") as fh:
            json.dump({"m": f.arity, "raw": os.path.basename(path)}, fh, separators=(",", ":"))
        return desc
    raise ArgumentError(f"unknown table format {fmt!r}; expected 'json-bits' or 'raw'")


def load_function(path):
    with open(path) as fh:
        obj = json.load(fh)
    return function_from_json(obj, base_dir=os.path.dirname(os.path.abspath(path)))
