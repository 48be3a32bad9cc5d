"""Time each hot kernel under the numpy and numba backends.

Usage::

    python benchmarks/bench_kernels.py [--n 1000] [--samples 8192] [--m 10] [--repeat 5]

Numba kernels are called once before timing so compilation is excluded.
Each row also checks that both backends return the same answer.
"""

import argparse
import math
import timeit

import numpy as np

from primecurves._kernels import numpy_backend

try:
    from primecurves._kernels import numba_backend
except ImportError:
    numba_backend = None

from primecurves.geometry import normalize
from primecurves.scaling import cells_per_axis
from primecurves.spectral import SamplingGrid, build_prime_model, evaluate


def cases(n, samples, m):
    model = build_prime_model(n)
    t = SamplingGrid.uniform(samples).nodes
    f = model.frequencies
    w = model.weights.astype(np.float64)

    pts = normalize(evaluate(model, samples).points).points
    shifted = pts - pts.min(axis=0)
    ext = shifted.max(axis=0)
    u, v = np.ldexp(shifted[:, 0], m), np.ldexp(shifted[:, 1], m)
    ncols, nrows = cells_per_axis(float(ext[0]), m), cells_per_axis(float(ext[1]), m)

    order = np.lexsort((pts[:, 1], pts[:, 0]))
    xs, ys = np.ascontiguousarray(pts[order, 0]), np.ascontiguousarray(pts[order, 1])
    hull = numpy_backend.hull_chain(xs, ys)
    hx, hy = np.ascontiguousarray(xs[hull]), np.ascontiguousarray(ys[hull])

    return {
        "eval_series": ("eval_series", (t, f, w)),
        "count_point_cells": ("count_point_cells", (u, v, ncols, nrows)),
        "count_segment_cells": ("count_segment_cells", (u, v, ncols, nrows)),
        "hull_chain": ("hull_chain", (xs, ys)),
        "max_sq_distance_convex": ("max_sq_distance_convex", (hx, hy)),
    }


def same(a, b):
    if isinstance(a, tuple):
        return all(np.allclose(x, y, rtol=0, atol=1e-9) for x, y in zip(a, b))
    return np.array_equal(a, b)


def best_of(fn, args, repeat):
    number = 1
    while timeit.timeit(lambda: fn(*args), number=number) < 0.05 and number < 10**4:
        number *= 4
    return min(timeit.repeat(lambda: fn(*args), number=number, repeat=repeat)) / number


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--samples", type=int, default=1 << 13)
    ap.add_argument("--m", type=int, default=10)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    backends = [numpy_backend] + ([numba_backend] if numba_backend else [])
    print(f"n={args.n}  samples={args.samples}  m={args.m}")
    header = f"{'kernel':<24}" + "".join(f"{b.NAME + ' [ms]':>14}" for b in backends)
    print(header + ("     speedup  agree" if numba_backend else ""))
    for name, (attr, call_args) in cases(args.n, args.samples, args.m).items():
        results, times = [], []
        for b in backends:
            fn = getattr(b, attr)
            results.append(fn(*call_args))  # warm-up (jit compile)
            times.append(best_of(fn, call_args, args.repeat))
        row = f"{name:<24}" + "".join(f"{1e3 * s:>14.3f}" for s in times)
        if numba_backend:
            ratio = times[0] / times[1] if times[1] > 0 else math.inf
            row += f"{ratio:>11.1f}x  {'yes' if same(*results) else 'NO'}"
        print(row)


if __name__ == "__main__":
    main()
