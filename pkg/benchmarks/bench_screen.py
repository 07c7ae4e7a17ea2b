"""Compare the numba and numpy tuple-screening kernels.

    python benchmarks/bench_screen.py [--repeat 5]

Each case screens every face tuple the solver would enumerate for one
target; numba compile time is paid once in a warm-up call and not counted.
"""
import argparse
import time

import numpy as np

from baryskel import kernels
from baryskel.instances import random_polytope
from baryskel.solver import _face_table, enumerate_tuples

CASES = [
    # (label, seed, dim, facets, n, d)
    ("polygon 12 edges, n=2", 1, 2, 12, 2, 1),
    ("3-polytope 12 facets, n=3", 2, 3, 12, 3, 1),
    ("4-polytope 14 facets, n=2", 3, 4, 14, 2, 2),
    ("6-polytope 9 facets, n=3", 4, 6, 9, 3, 2),
]


def build(seed, D, m, n, d):
    P = random_polytope(seed, D, m)
    faces = P.lattice.by_dim[d]
    U, H, C = _face_table(P, faces)
    combos = enumerate_tuples([len(faces)] * n, [0] * n, True)
    p = np.array([float(x) for x in P.centroid])
    return H, C, U @ p, p, np.full(n, 1.0 / n), combos


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not kernels.HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")
    print(f"{'case':32} {'tuples':>9} {'numpy ms':>10} {'numba ms':>10} {'speedup':>8}")
    for label, seed, D, m, n, d in CASES:
        a = build(seed, D, m, n, d)
        ok1, s1 = kernels.screen_tuples(*a, backend="numba")  # warm-up / compile
        ok2, s2 = kernels.screen_tuples(*a, backend="numpy")
        assert np.array_equal(ok1, ok2) and np.allclose(s1, s2)
        t_np = best_of(lambda: kernels.screen_tuples(*a, backend="numpy"), args.repeat)
        t_nb = best_of(lambda: kernels.screen_tuples(*a, backend="numba"), args.repeat)
        print(f"{label:32} {len(a[-1]):>9} {1e3 * t_np:>10.2f} {1e3 * t_nb:>10.2f} {t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
