import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from cubeiso import _kernels_numba, _kernels_numpy  # noqa: E402
from cubeiso.hypercube import build_function  # noqa: E402

BACKENDS = {"numpy": _kernels_numpy, "numba": _kernels_numba}


@pytest.fixture(params=sorted(BACKENDS))
def backend(request):
    return BACKENDS[request.param]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_function(rng, m):
    return build_function(m, rng.integers(0, 2, size=1 << m, dtype=np.uint8))


def structured_function(rng, n, terms=None):
    """Random f monotone in x (coords 1..n) and anti-monotone in y (n+1..2n).

    f(x, y) = OR_t [x >= a_t and y <= b_t] over a few random (a_t, b_t).
    """
    m = 2 * n
    if terms is None:
        terms = int(rng.integers(1, 4))
    pts = np.arange(1 << m)
    xs, ys = pts & ((1 << n) - 1), pts >> n
    out = np.zeros(pts.size, dtype=bool)
    for _ in range(terms):
        a, b = int(rng.integers(0, 1 << n)), int(rng.integers(0, 1 << n))
        out |= ((xs & a) == a) & ((ys & ~b) == 0)
    return build_function(m, out)


def pytest_terminal_summary(terminalreporter):
    lines = []
    for key in ("passed", "failed"):
        for rep in terminalreporter.stats.get(key, []):
            if getattr(rep, "when", None) != "call" or "test_acceptance.py" not in rep.nodeid:
                continue
            label = dict(rep.user_properties).get("criterion")
            if label:
                lines.append((label, "PASS" if rep.passed else "FAIL"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for label, status in sorted(lines, key=lambda t: int(t[0].split(".")[0])):
            terminalreporter.write_line(f"[{status}] {label}")
