"""Compare the compiled and numpy kernels on the series sampler's hot loop.

    python benchmarks/bench_kernels.py [--n 100000] [--J 1000] [--paths 50]

Both backends must return identical numbers; the script checks that before
printing timings.
"""

import argparse
import time

import numpy as np

from maxstable_lab import kernels
from maxstable_lab.ladder_flow import build_chain, initial_state_weights
from maxstable_lab.randkit import stream_keys


def time_backend(mod, chain, n, J, paths):
    cw = initial_state_weights(chain, n)
    grid = np.array([n // 4, n // 2, 3 * n // 4, n], dtype=np.int64)
    weights = np.random.default_rng(0).standard_normal(J)
    out = []
    t0 = time.perf_counter()
    for p in range(paths):
        k0, k1 = stream_keys(1, p)
        out.append(np.asarray(mod.partial_maxima(k0, k1, chain.return_cdf_table, cw, n, weights, grid)))
    return time.perf_counter() - t0, np.array(out)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=10**5)
    ap.add_argument("--J", type=int, default=1000)
    ap.add_argument("--paths", type=int, default=50)
    ap.add_argument("--beta", type=float, default=0.75)
    args = ap.parse_args()

    chain = build_chain(args.beta, args.n)
    backends = kernels.available_backends()
    results = {}
    for name, mod in backends.items():
        time_backend(mod, chain, args.n, args.J, 2)  # warm-up
        results[name] = time_backend(mod, chain, args.n, args.J, args.paths)

    ref = results["python"][1]
    for name, (elapsed, values) in results.items():
        same = np.array_equal(values, ref)
        print(f"{name:>7}: {1e3 * elapsed / args.paths:8.2f} ms/path  identical={same}")
    if "cython" in results:
        print(f"speed-up: {results['python'][0] / results['cython'][0]:.1f}x")
    else:
        print("compiled extension not available; only the numpy backend was timed")


if __name__ == "__main__":
    main()
