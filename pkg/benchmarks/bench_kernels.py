"""Time the float reference solver on the compiled and pure-Python kernels.

    python benchmarks/bench_kernels.py [--sizes 10 40 80] [--repeat 3]
"""

import argparse
import time

from divstable import kernels
from divstable.tooling import GenSpec, generate, reference_solve_float


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[10, 40, 80])
    ap.add_argument("--density", type=float, default=0.5)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)

    backends = sorted(kernels.BACKENDS)
    if "cython" not in backends:
        print("compiled kernel not built; timing the Python fallback only")
    print(f"{'n':>5} {'edges':>6} {'iters':>6} " + " ".join(f"{b + ' [s]':>12}" for b in backends) + "  speedup")
    for n in args.sizes:
        inst = generate(GenSpec(firms=n, workers=n, density=args.density, seed=args.seed,
                                cap_max=10, quota_max=4 * n, denominator=4))
        times = {}
        results = {}
        for b in backends:
            times[b], results[b] = best_of(lambda: reference_solve_float(inst, backend=b), args.repeat)
        if len(results) == 2:
            diff = max((abs(results["cython"].values[e] - results["python"].values[e])
                        for e in inst.edge_ids), default=0.0)
            assert diff <= 1e-12, f"backends disagree by {diff}"
        speed = f"{times['python'] / times['cython']:7.1f}x" if "cython" in times else "      -"
        iters = results[backends[0]].iterations
        print(f"{n:>5} {len(inst.edges):>6} {iters:>6} "
              + " ".join(f"{times[b]:12.5f}" for b in backends) + f"  {speed}")


if __name__ == "__main__":
    main()
