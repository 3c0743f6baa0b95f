"""Compare the compiled and pure-Python marching kernels.

Usage: python benchmarks/bench_kernels.py [--grid-n 256 512] [--repeat 5]

Times ``march_cells``, ``chain_segments`` and a full ``extract_isophotes``
call on the hyperboloid illumination field for each available backend, and
checks that both backends produce identical segment lists.
"""

import argparse
import math
import timeit

import numpy as np

from lmisophote import kernels
from lmisophote.isophote import extract_isophotes, illumination_field, make_axis
from lmisophote.surface import builtin_surface


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid-n", type=int, nargs="+", default=[128, 256, 512])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    backends = ["python"] + (["cython"] if kernels.compiled is not None else [])
    if len(backends) == 1:
        print("compiled kernels unavailable; timing the pure-Python backend only")
    S = builtin_surface("hyperboloid")
    # a tilted timelike axis gives a non-trivial closed contour
    axis = make_axis([math.cosh(0.3), math.sinh(0.3), 0.0], "timelike", 1.0)

    print(f"{'grid':>6} {'kernel':<16}" + "".join(f"{b:>12}" for b in backends)
          + ("     speedup" if len(backends) == 2 else ""))
    for n in args.grid_n:
        us, vs, F = illumination_field(S, axis.d, n)
        G = F - axis.level
        center = np.zeros((len(us) - 1 + S.periodic[0], len(vs) - 1 + S.periodic[1]), dtype=np.int8)
        segs = {b: kernels.march_cells(G, *S.periodic, center, backend=b) for b in backends}
        if len(backends) == 2:
            assert np.array_equal(segs["python"], segs["cython"]), "backends disagree"
        _, _, n_edges = kernels.grid_counts(len(us), len(vs), *S.periodic)
        rows = {
            "march_cells": lambda b: kernels.march_cells(G, *S.periodic, center, backend=b),
            "chain_segments": lambda b: kernels.chain_segments(segs[b], n_edges, backend=b),
            "extract (full)": lambda b: extract_isophotes(S, axis, grid_n=n, backend=b),
        }
        for name, call in rows.items():
            times = [best(lambda: call(b), args.repeat) for b in backends]
            line = f"{n:>6} {name:<16}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times)
            if len(times) == 2:
                line += f"{times[0] / times[1]:>11.1f}x"
            print(line)


if __name__ == "__main__":
    main()
