"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Each kernel runs on identical inputs under both backends; the table shows the
best wall time of ``--repeat`` runs and the speedup.
"""

import argparse
import timeit

import numpy as np

from qcmap import kernels


def cases(rng):
    a = rng.normal(size=(48, 48))
    sym = np.ascontiguousarray(a + a.T)
    n = 8
    b = rng.uniform(-0.05, 0.05, (n, n))
    h = np.ascontiguousarray(np.diag(rng.uniform(0.8, 1.2, n)) + np.triu(b, 1) + np.triu(b, 1).T)
    s = np.ascontiguousarray(h @ h)
    x0, y0 = rng.normal(size=n), rng.normal(size=n)
    g = np.full(n, 1e-3)
    steps = np.arange(0, 20_001, 100, dtype=np.int64)
    dt = 2 * np.pi / 1.3 / 1000
    return {
        "jacobi_eigh 48x48": ("jacobi_eigh", (sym, 50)),
        "rk4_hamilton n=8, 2e4 steps": ("rk4_hamilton", (h, g, x0, y0, dt, steps)),
        "verlet n=8, 2e4 steps": ("verlet", (s, x0, y0, dt, steps)),
        "rk4_second_order n=8, 2e4 steps": ("rk4_second_order", (s, g, x0, y0, dt, steps)),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if "compiled" not in kernels.AVAILABLE:
        print("compiled backend not built; run `python setup.py build_ext --inplace` first")
        return
    rng = np.random.default_rng(0)
    print(f"{'kernel':34s} {'compiled [ms]':>14s} {'python [ms]':>12s} {'speedup':>8s}")
    for label, (name, call_args) in cases(rng).items():
        best = {}
        for backend in ("compiled", "python"):
            fn = getattr(kernels.AVAILABLE[backend], name)
            best[backend] = min(timeit.repeat(lambda: fn(*call_args), number=1, repeat=args.repeat))
        c, p = best["compiled"] * 1e3, best["python"] * 1e3
        print(f"{label:34s} {c:14.3f} {p:12.3f} {p / c:7.1f}x")


if __name__ == "__main__":
    main()
