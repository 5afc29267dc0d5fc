"""Time the numba and numpy kernels on identical inputs.

    python3 benchmarks/bench_kernels.py [--frames 1000000] [--M 2] [--repeat 5]

Also times a full ``simulate_frames`` call under each backend by re-running
this script in a subprocess with COGCAP_NUMBA set.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from cogcap import _backend, _kernels
from cogcap.optimizer import baseline_params, solve_lambda
from cogcap.simulator import _draw, _policy_inputs


def kernel_inputs(n, M, seed=0):
    p = baseline_params(M=M)
    pol = solve_lambda(p)
    busy, detected, z, zsp, sel_u = _draw(p, np.random.default_rng(seed), n)
    lt1, lt2, inv_c1, mu1, mu2, p_max = _policy_inputs(p, pol)
    args = (busy, detected, z, zsp, sel_u, lt1, lt2, inv_c1, mu1, mu2, p_max,
            p.Bc, p.sigma_n2, p.sigma_sp2, p.T - p.N, False)
    outs = ([np.empty(n, dtype=np.int8), np.empty(n, dtype=np.int64)]
            + [np.empty(n) for _ in range(6)])
    return args, outs


def best_of(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def end_to_end(frames, M, repeat):
    code = ("import timeit; from cogcap.optimizer import baseline_params, solve_lambda;"
            "from cogcap.simulator import simulate_frames;"
            f"p = baseline_params(M={M}); pol = solve_lambda(p);"
            f"simulate_frames(p, pol, 1000, 1);"
            f"print(min(timeit.repeat(lambda: simulate_frames(p, pol, {frames}, 1),"
            f" number=1, repeat={repeat})))")
    out = {}
    for flag in ("1", "0"):
        env = dict(os.environ, COGCAP_NUMBA=flag)
        res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                             text=True, check=True)
        out["numba" if flag == "1" else "numpy"] = float(res.stdout.strip())
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--frames", type=int, default=1_000_000)
    ap.add_argument("--M", type=int, default=2)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    print(f"frames={args.frames} M={args.M} numba available: {_backend.HAVE_NUMBA}")
    kargs, outs = kernel_inputs(args.frames, args.M)
    service = np.random.default_rng(1).exponential(6000.0, args.frames)
    q_out = np.empty(args.frames)
    rows = [("frame kernel", "numpy",
             best_of(lambda: _kernels._frame_kernel_np(*kargs, *outs), args.repeat)),
            ("lindley", "numpy",
             best_of(lambda: _kernels._lindley_np(0.0, 43.7, service, q_out), args.repeat))]
    if _backend.HAVE_NUMBA:
        # first calls compile (or load the cache)
        _kernels._frame_kernel_nb(*kargs, *outs)
        _kernels._lindley_nb(0.0, 43.7, service, q_out)
        rows += [("frame kernel", "numba",
                  best_of(lambda: _kernels._frame_kernel_nb(*kargs, *outs), args.repeat)),
                 ("lindley", "numba",
                  best_of(lambda: _kernels._lindley_nb(0.0, 43.7, service, q_out),
                          args.repeat))]
    for name, backend, sec in sorted(rows):
        rate = args.frames / sec / 1e6
        print(f"{name:<16} {backend:<6} {sec * 1e3:9.2f} ms  {rate:7.1f} Mframe/s")
    for backend, sec in end_to_end(args.frames, args.M, args.repeat).items():
        print(f"{'simulate_frames':<16} {backend:<6} {sec * 1e3:9.2f} ms  "
              f"{args.frames / sec / 1e6:7.1f} Mframe/s")


if __name__ == "__main__":
    main()
