import math
import os
import subprocess
import sys

import numpy as np
import pytest

from cogcap import _backend, _kernels

needs_numba = pytest.mark.skipif(not _backend.HAVE_NUMBA, reason="numba not installed")


def _inputs(seed, n=5000, M=3, p_max=math.inf, lt=(-3.0, -1.0)):
    rng = np.random.default_rng(seed)
    busy = rng.random((n, M)) < 0.4
    detected = np.where(busy, rng.random((n, M)) < 0.8, rng.random((n, M)) < 0.3)
    z = rng.exponential(size=(n, M))
    zsp = rng.exponential(size=(n, M))
    if math.isfinite(p_max):
        # a zero cross gain is only meaningful with a peak cap
        zsp[rng.random((n, M)) < 0.01] = 0.0
    return (busy, detected, z, zsp, rng.random(n), lt[0], lt[1], 1.0 / 91.0,
            2.0, 1.0, p_max, 1e4, 1e-4, 1e-4, 0.9)


def _run(kernel, args, random_select):
    n = args[0].shape[0]
    outs = [np.empty(n, dtype=np.int8), np.empty(n, dtype=np.int64)] + [np.empty(n) for _ in range(6)]
    kernel(*args, random_select, *outs)
    return outs


@needs_numba
@pytest.mark.parametrize("random_select", [False, True])
@pytest.mark.parametrize("p_max", [math.inf, 0.5])
@pytest.mark.parametrize("lt", [(-3.0, -1.0), (math.inf, math.inf), (-math.inf, -math.inf)])
def test_frame_kernels_agree(random_select, p_max, lt):
    args = _inputs(1, p_max=p_max, lt=lt)
    a = _run(_kernels._frame_kernel_nb, args, random_select)
    b = _run(_kernels._frame_kernel_np, args, random_select)
    for x, y in zip(a, b):
        np.testing.assert_allclose(x, y, rtol=1e-13, atol=0.0)


def test_never_transmit_threshold_silences_everything():
    out = _run(_kernels._frame_kernel_np, _inputs(2, lt=(math.inf, math.inf)), False)
    power, service, interference = out[5], out[6], out[7]
    assert np.all(power == 0) and np.all(service == 0) and np.all(interference == 0)


def test_selection_picks_largest_candidate_ratio():
    args = _inputs(3)
    busy, detected, z, zsp = args[:4]
    scen, k, lrsel = _run(_kernels._frame_kernel_np, args, False)[:3]
    with np.errstate(divide="ignore"):
        lr = np.log(z) - np.log(zsp)
    idle = ~detected
    cand = np.where((idle.sum(axis=1) > 0)[:, None], idle, True)
    best = np.where(cand, lr, -np.inf).max(axis=1)
    assert np.array_equal(lrsel, best)
    assert np.array_equal(k, idle.sum(axis=1))


@needs_numba
def test_lindley_kernels_agree():
    rng = np.random.default_rng(4)
    s = rng.exponential(50.0, 20000) * (rng.random(20000) > 0.05)
    a, b = np.empty_like(s), np.empty_like(s)
    qa = _kernels._lindley_nb(3.0, 44.0, s, a)
    qb = _kernels._lindley_np(3.0, 44.0, s, b)
    np.testing.assert_allclose(a, b, rtol=1e-9, atol=1e-6)
    assert qa == pytest.approx(qb, rel=1e-9, abs=1e-6)


def test_lindley_matches_recursion():
    rng = np.random.default_rng(5)
    s = rng.exponential(10.0, 500)
    out = np.empty_like(s)
    _kernels._lindley_np(0.0, 9.0, s, out)
    q, ref = 0.0, []
    for x in s:
        q = max(q + 9.0 - x, 0.0)
        ref.append(q)
    np.testing.assert_allclose(out, ref, atol=1e-9)


def test_env_flag_selects_numpy_backend():
    env = dict(os.environ, COGCAP_NUMBA="0")
    code = "from cogcap import _backend; print(_backend.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True)
    assert out.stdout.strip() == "numpy"


def test_active_backend_consistent():
    expect = "numba" if _backend.USE_NUMBA else "numpy"
    assert _backend.BACKEND == expect
    if not _backend.USE_NUMBA:
        assert _kernels.frame_kernel is _kernels._frame_kernel_np
