"""Time the numba kernels against the numpy/Python fallbacks.

    python3 benchmarks/bench_kernels.py [--side 161] [--repeat 5]

Both paths run in one process; ``use_numba`` picks the implementation, so
FPP_DISABLE_NUMBA does not need to be set.  Results are checked for
agreement before timings are printed.
"""

import argparse
import timeit

import numpy as np

from fpplab import kernels
from fpplab._accel import HAVE_NUMBA
from fpplab.lattice import Window
from fpplab.weights import Distribution, WeightField


def bench(label, fn, repeat):
    fn()  # warm up, includes jit compilation
    best = min(timeit.repeat(fn, number=1, repeat=repeat))
    print(f"  {label:<10} {best * 1e3:10.2f} ms")
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--side", type=int, default=161, help="window side for hashing and dijkstra")
    ap.add_argument("--saw-m", type=int, default=9)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    radius = args.side // 2
    win = Window((0, 0), radius)
    seed = 12345
    corner = tuple(c - radius for c in win.center)

    cases = []
    a = kernels.edge_uniforms(seed, corner, win.side, 2, use_numba=True)
    b = kernels.edge_uniforms(seed, corner, win.side, 2, use_numba=False)
    assert np.array_equal(a, b)
    cases.append(("edge hash", lambda nb: kernels.edge_uniforms(seed, corner, win.side, 2, use_numba=nb)))

    W = WeightField(Distribution.exponential(), seed).window_weights(win)
    src = win.indices([(0, 0)])
    r1 = kernels.dijkstra(W, win.side, 2, src, use_numba=True)
    r2 = kernels.dijkstra(W, win.side, 2, src, use_numba=False)
    assert np.allclose(r1[0], r2[0], rtol=0, atol=1e-9)
    cases.append(("dijkstra", lambda nb: kernels.dijkstra(W, win.side, 2, src, use_numba=nb)))

    sw = Window((0, 0), args.saw_m)
    Ws = WeightField(Distribution.atom_mixture(0.3, 1.0), seed).window_weights(sw)
    o = sw.index((0, 0))
    assert kernels.saw_min(Ws, sw.side, 2, o, args.saw_m, 10**8, use_numba=True) == kernels.saw_min(
        Ws, sw.side, 2, o, args.saw_m, 10**8, use_numba=False
    )
    cases.append((f"saw m={args.saw_m}", lambda nb: kernels.saw_min(Ws, sw.side, 2, o, args.saw_m, 10**8, use_numba=nb)))

    print(f"window side {win.side} ({win.size} sites), best of {args.repeat}")
    for name, fn in cases:
        print(name)
        t_nb = bench("numba", lambda: fn(True), args.repeat)
        t_np = bench("fallback", lambda: fn(False), args.repeat)
        print(f"  speedup    {t_np / t_nb:10.1f}x")


if __name__ == "__main__":
    main()
