"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--points 20000] [--repeat 3]

Both backends are imported directly, so the environment switch
``WILDARC_PURE`` has no effect here.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from wildarc import _pykernels

try:
    from wildarc import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def random_graph(n, degree, rng):
    src = np.repeat(np.arange(n), degree)
    dst = np.clip(src + rng.integers(-3, 4, size=src.size), 0, n - 1)
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    indptr = np.searchsorted(src, np.arange(n + 1))
    return indptr, dst


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--steps", type=int, default=128)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(0)
    z = rng.uniform(-2.0, 2.0, size=(args.points, 3))
    z[:, 0] = rng.uniform(-2.5, 1.5, size=args.points)
    indptr, indices = random_graph(args.points * 5, 6, rng)
    side = 64
    lo = rng.integers(0, side - 3, size=(args.points, 3))
    hi = lo + rng.integers(0, 3, size=(args.points, 3))
    src = np.arange(args.points)

    cases = {
        "cherry_rhs_batch": lambda k: k.cherry_rhs_batch(z),
        "flow_batch": lambda k: k.flow_batch(z, 1.0, args.steps),
        "strong_components": lambda k: k.strong_components(len(indptr) - 1, indptr, indices),
        "expand_ranges": lambda k: k.expand_ranges(src, lo, hi, side),
    }
    backends = [("python", _pykernels)]
    if _ckernels is not None:
        backends.append(("cython", _ckernels))
    else:
        print("compiled extension not available; timing the fallback only")

    print(f"{'kernel':20s} " + " ".join(f"{name:>10s}" for name, _ in backends) + "    speedup")
    for label, fn in cases.items():
        times, outs = [], []
        for _, mod in backends:
            t, out = best_of(lambda: fn(mod), args.repeat)
            times.append(t)
            outs.append(out)
        row = f"{label:20s} " + " ".join(f"{t:10.4f}" for t in times)
        if len(times) == 2:
            row += f"  {times[0] / times[1]:8.1f}x"
            if label in ("cherry_rhs_batch", "flow_batch"):
                row += f"  (max diff {np.abs(outs[0] - outs[1]).max():.1e})"
        print(row)


if __name__ == "__main__":
    main()
