"""Compare the numba kernels against the pure-numpy fallback.

Times the neighbor-count self-join at a mid-ladder radius and a full
``run_mccatch`` on uniform 2-d clouds, best of ``--repeats``, after one
warm-up call so numba compilation is excluded. Both backends must return
identical counts; the script exits non-zero otherwise.

    python3 benchmarks/bench_backends.py --sizes 5000 20000 80000
"""
import argparse
import sys
import time

import numpy as np

from mccatch._backend import HAVE_NUMBA, backend
from mccatch.index import build_index, count_self_join, estimate_diameter
from mccatch.oracle import radii_schedule
from mccatch.score import run_mccatch
from mccatch.synth import CloudSpec, generate_cloud


def best_of(fn, repeats):
    best, out = float("inf"), None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[5000, 20000, 80000])
    ap.add_argument("--dim", type=int, default=2)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if not HAVE_NUMBA:
        print("numba is not installed; nothing to compare", file=sys.stderr)
        return 1

    warm = generate_cloud(CloudSpec("uniform", args.dim, 500, args.seed))
    with backend("numba"):
        run_mccatch(warm)

    print(f"{'n':>8} {'stage':>10} {'numba s':>10} {'numpy s':>10} {'speedup':>8}")
    for n in args.sizes:
        data = generate_cloud(CloudSpec("uniform", args.dim, n, args.seed))
        tree = build_index(data)
        r = radii_schedule(estimate_diameter(tree), 15).radii[7]
        rows = {}
        for name in ("numba", "numpy"):
            with backend(name):
                rows[name] = (best_of(lambda: count_self_join(tree, r), args.repeats),
                              best_of(lambda: run_mccatch(data, tree=tree), args.repeats))
        (tj, cj), (tp, rp) = rows["numba"]
        (uj, cu), (up, ru) = rows["numpy"]
        if not np.array_equal(cj, cu) or rp.scores != ru.scores:
            print(f"backends disagree at n={n}", file=sys.stderr)
            return 2
        print(f"{n:>8} {'self-join':>10} {tj:>10.4f} {uj:>10.4f} {uj / tj:>7.1f}x")
        print(f"{n:>8} {'pipeline':>10} {tp:>10.4f} {up:>10.4f} {up / tp:>7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
