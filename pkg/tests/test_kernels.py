import os
import subprocess
import sys

import numpy as np
import pytest

from conftest import BACKENDS, random_function
from cubeiso.hypercube import build_function, is_monotone
from cubeiso.tribes import instance_to_function, sample_counterexample


def naive_edges(bits, m, i):
    idx = np.arange(bits.size)
    other = bits[idx ^ (1 << i)]
    low = ((idx >> i) & 1) == 0
    diff = int((low & (bits != other)).sum())
    dec = int((low & (bits == 1) & (other == 0)).sum())
    return diff, dec


@pytest.mark.parametrize("m", [1, 2, 5, 6, 7, 9, 13])
def test_edge_counts(backend, m, rng):
    f = random_function(rng, m)
    diff, dec = backend.all_edge_counts(f.words, m)
    for i in range(m):
        assert (int(diff[i]), int(dec[i])) == naive_edges(f.bits, m, i)
        assert tuple(map(int, backend.edge_counts(f.words, m, i))) == (int(diff[i]), int(dec[i]))


@pytest.mark.parametrize("m", [1, 3, 8])
def test_sensitivity_counts(backend, m, rng):
    f = random_function(rng, m)
    sens, neg = backend.sensitivity_counts(f.bits, m)
    ref_s, ref_n = BACKENDS["numpy"].sensitivity_counts(f.bits, m)
    assert np.array_equal(sens, ref_s) and np.array_equal(neg, ref_n)
    idx = np.arange(f.size)
    for i in range(m):
        other = f.bits[idx ^ (1 << i)]
        assert ((f.bits != other) <= (sens > 0)).all()


@pytest.mark.parametrize("m", range(1, 13))
def test_min_cut_backends_agree(m, rng):
    for _ in range(8 if m < 8 else 2):
        f = random_function(rng, m)
        results = {name: k.monotone_min_cut(f.bits, m) for name, k in BACKENDS.items()}
        flows = {name: r[0] for name, r in results.items()}
        assert len(set(flows.values())) == 1, flows
        sides = [np.asarray(r[1], dtype=np.uint8) for r in results.values()]
        # both report the minimal min-cut up-set
        assert np.array_equal(sides[0], sides[1])
        g = build_function(m, sides[0])
        assert is_monotone(g)
        assert int((g.bits != f.bits).sum()) == flows["numpy"]


def test_min_cut_structured(backend):
    f = instance_to_function(sample_counterexample(4, 7))
    flow, _ = backend.monotone_min_cut(f.bits, 8)
    assert flow == 22  # eps = 11/128


@pytest.mark.parametrize("m", [1, 2, 4, 6, 9])
def test_violation_edges(backend, m, rng):
    f = random_function(rng, m)
    xs, ys = backend.violation_edges(f.bits, m)
    got = sorted(zip(np.asarray(xs).tolist(), np.asarray(ys).tolist()))
    rx, ry = BACKENDS["numpy"].violation_edges(f.bits, m)
    assert got == sorted(zip(rx.tolist(), ry.tolist()))
    for x, y in got[:200]:
        assert x & ~y == 0 and x != y and f.bits[x] == 1 and f.bits[y] == 0


@pytest.mark.parametrize("m", range(1, 11))
def test_matching_backends_agree(m, rng):
    f = random_function(rng, m)
    sizes = {name: k.max_violation_matching(f.bits, m) for name, k in BACKENDS.items()}
    assert len(set(sizes.values())) == 1, sizes


def test_fired_stats_agree(rng):
    for n in (4, 64, 128):
        inst = sample_counterexample(n, 2)
        words = (n + 63) // 64
        xw = rng.integers(0, 2**64, size=(300, words), dtype=np.uint64)
        t0 = np.ascontiguousarray(inst.tribes - 1)
        a = BACKENDS["numpy"].fired_stats(xw, t0)
        b = BACKENDS["numba"].fired_stats(xw, t0)
        assert np.array_equal(a[0], b[0])
        np.testing.assert_allclose(a[1], b[1], rtol=1e-12)
        np.testing.assert_allclose(a[2], b[2], rtol=1e-12)


def test_fired_stats_definition():
    # two tribes {1} and {2}: x = 0b11 fires both, x = 0b01 fires tribe 1
    tribes0 = np.array([[0], [1]], dtype=np.int64)
    xw = np.array([[3], [1], [0]], dtype=np.uint64)
    for k in BACKENDS.values():
        hist, s, q = k.fired_stats(xw, tribes0)
        assert list(hist[:3]) == [1, 1, 1]
        # contribution of tribe i at x is 2^(1-k) when i fires
        np.testing.assert_allclose(s, [0.5 + 1.0, 0.5])
        np.testing.assert_allclose(q, [0.25 + 1.0, 0.25])


def test_fisher_yates_agree(rng):
    draws = rng.integers(np.arange(5), 32, size=(500, 5)).astype(np.int64)
    a = BACKENDS["numpy"].partial_fisher_yates(draws)
    b = BACKENDS["numba"].partial_fisher_yates(draws)
    assert np.array_equal(a, b)


def test_env_flag_selects_numpy():
    code = "from cubeiso._accel import BACKEND; print(BACKEND)"
    env = dict(os.environ, CUBEISO_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
    env["CUBEISO_DISABLE_NUMBA"] = "0"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numba"
