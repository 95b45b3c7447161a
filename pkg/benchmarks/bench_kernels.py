"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [-p 3] [-n 3] [--repeat 5]
"""

import argparse
import time

import numpy as np

from sylowgl import kernels
from sylowgl.groups import build_group
from sylowgl.lattice import all_subgroups
from sylowgl.residue import Ctx


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(p, n, rng):
    ctx = Ctx(p, n)
    S = build_group(ctx, "SylowGL")
    sl = build_group(ctx, "SylowSL")
    K = S.embed(build_group(ctx, "KernelK", m=1))
    i = rng.integers(0, S.order, 200_000)
    j = rng.integers(0, S.order, 200_000)
    start = np.zeros(S.order, dtype=np.uint8)
    start[S.identity_index] = 1
    gens = S.generator_index
    e, k, M, inv = S.entries, S.keys, S.M, S.inverse_index
    return {
        "mul_idx (2e5 products)": lambda: kernels.mul_idx(e, k, M, i, j),
        "normalizes_mask (N_S(K))": lambda: kernels.normalizes_mask(e, k, M, inv, K.mask, K.generators),
        "centralizes_mask (Z(S))": lambda: kernels.centralizes_mask(e, M, e[gens]),
        "closure_mask (<gens> = S)": lambda: kernels.closure_mask(e, k, M, start, gens),
        f"all_subgroups(S_{p}({n},SL))": lambda: all_subgroups(sl),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("-p", type=int, default=3)
    ap.add_argument("-n", type=int, default=3)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled kernels not built; only the numpy fallback is available")
    before = kernels.BACKEND
    results: dict[str, dict[str, float]] = {}
    for b in backends:
        kernels.set_backend(b)
        for name, fn in cases(args.p, args.n, np.random.default_rng(0)).items():
            results.setdefault(name, {})[b] = best_of(fn, args.repeat)
    kernels.set_backend(before)

    width = max(map(len, results)) + 2
    print(f"{'kernel':<{width}}" + "".join(f"{b:>12}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for name, row in results.items():
        line = f"{name:<{width}}" + "".join(f"{row[b] * 1e3:>10.1f}ms" for b in backends)
        if "cython" in row and "python" in row:
            line += f"{row['python'] / row['cython']:>11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
