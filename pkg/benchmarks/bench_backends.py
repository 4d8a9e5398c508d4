"""Compare the compiled and pure-Python kernel backends.

Usage::

    python benchmarks/bench_backends.py [--repeats R] [--size N]

Times ``apply_stencil``, ``power_blocks`` and ``hadamard_blocks`` on each
available backend, then an end-to-end periodic solve with each backend
swapped in. Prints one row per measurement with the speedup of the
compiled backend over the fallback.
"""

import argparse
import sys
import time

import numpy as np

from fftstencil import FieldGrid, _backend, solve_periodic
from fftstencil.oracle import evolve_periodic_naive
from fftstencil.stencils import builtin_stencil


def best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def cases(size, rng):
    k2 = builtin_stencil("jacobi2d")
    grid2 = rng.uniform(-1, 1, size=(size, size, 1))
    lam1 = np.exp(1j * rng.uniform(0, 2 * np.pi, size=(size * size, 1, 1)))
    lam2 = rng.normal(size=(size * size, 2, 2)) + 1j * rng.normal(size=(size * size, 2, 2))
    lam2 /= np.abs(lam2).sum(axis=2, keepdims=True).max(axis=1, keepdims=True)
    x2 = rng.normal(size=(size * size, 2)) + 1j * rng.normal(size=(size * size, 2))
    return [
        ("apply_stencil jacobi2d", lambda mod: mod.apply_stencil(grid2, k2.offsets, k2.blocks)),
        ("power_blocks m=1 T=1e9", lambda mod: mod.power_blocks(lam1, 10**9)),
        ("power_blocks m=2 T=1e3", lambda mod: mod.power_blocks(lam2, 10**3)),
        ("hadamard_blocks m=2", lambda mod: mod.hadamard_blocks(lam2, x2)),
    ]


def end_to_end(size, rng):
    k = builtin_stencil("heat2d")
    a0 = FieldGrid.from_array(rng.uniform(-1, 1, size=(size, size)))
    return [
        ("solve fft heat2d T=1e6", lambda: solve_periodic(a0, k, 10**6)),
        ("solve naive heat2d T=50", lambda: evolve_periodic_naive(a0, k, 50)),
    ]


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--size", type=int, default=256, help="edge length of the 2-D test grid")
    args = parser.parse_args(argv)

    backends = _backend.available()
    names = sorted(backends, key=lambda n: n != "cython")
    rng = np.random.default_rng(0)
    header = f"{'benchmark':<28}" + "".join(f"{n:>12}" for n in names) + (
        f"{'speedup':>10}" if len(names) == 2 else "")
    print(header)
    print("-" * len(header))

    def report(label, times):
        row = f"{label:<28}" + "".join(f"{times[n] * 1e3:>10.2f}ms" for n in names)
        if len(names) == 2:
            row += f"{times[names[1]] / times[names[0]]:>9.1f}x"
        print(row, flush=True)

    for label, fn in cases(args.size, rng):
        report(label, {n: best_of(lambda: fn(backends[n]), args.repeats) for n in names})

    saved = _backend.active
    try:
        for label, fn in end_to_end(args.size, rng):
            times = {}
            for n in names:
                _backend.active = backends[n]
                times[n] = best_of(fn, args.repeats)
            report(label, times)
    finally:
        _backend.active = saved
    if len(names) == 1:
        print(f"only the {names[0]} backend is available; build the extension to compare", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
